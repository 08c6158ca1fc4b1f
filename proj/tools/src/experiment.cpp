#include "experiment.hpp"

#include "tmsched/centralized.hpp"
#include "tmsched/distributed.hpp"
#include "tmsched/errors.hpp"
#include "tmsched/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

namespace tmsched::cli {

std::string_view to_string(SchedulerKind kind)
{
    return kind == SchedulerKind::centralized ? "centralized" : "distributed";
}

std::string_view to_string(AdversaryKind kind)
{
    switch (kind) {
    case AdversaryKind::token_bucket:
        return "token-bucket";
    case AdversaryKind::lower_bound:
        return "lower-bound";
    case AdversaryKind::replay:
        return "replay";
    }
    return "token-bucket";
}

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : InvalidInput(source + ":" + std::to_string(line) + ": " + message), line_(line)
{
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    std::size_t line = 0;
};

class Reader {
public:
    Reader(std::map<std::string, Entry> entries, std::string source, std::size_t last_line)
        : entries_(std::move(entries)), source_(std::move(source)), last_line_(last_line)
    {
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::size_t line(const std::string& key) const
    {
        const auto it = entries_.find(key);
        return it == entries_.end() ? last_line_ : it->second.line;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const
    {
        throw ConfigError(source_, line(key), message);
    }

    template <typename Int>
    Int integer(const std::string& key, Int fallback) const
    {
        const auto it = entries_.find(key);
        if (it == entries_.end()) {
            return fallback;
        }
        const auto& v = it->second.value;
        Int out{};
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size()) {
            fail(key, key + " must be an integer, got '" + v + "'");
        }
        return out;
    }

    std::string text(const std::string& key, std::string fallback) const
    {
        const auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.value;
    }

private:
    std::map<std::string, Entry> entries_;
    std::string source_;
    std::size_t last_line_;
};

const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys{
        "scheduler", "adversary",        "m",              "k",           "n",
        "horizon",   "seed",             "rho",            "b",           "model",
        "shape",     "shape.max_weight", "shape.attempts", "shape.types", "phase3_fallback",
        "replay",    "out"};
    return keys;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::string& source)
{
    std::map<std::string, Entry> entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(source, line_no, "expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError(source, line_no, "missing key before '='");
        }
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
            throw ConfigError(source, line_no, "unknown key '" + key + "'");
        }
        if (value.empty()) {
            throw ConfigError(source, line_no, "missing value for '" + key + "'");
        }
        if (entries.count(key)) {
            throw ConfigError(source, line_no,
                              "'" + key + "' already set on line " + std::to_string(entries[key].line));
        }
        entries[key] = Entry{value, line_no};
        if (end == text.size()) {
            break;
        }
    }
    const Reader in(std::move(entries), source, line_no);

    ExperimentConfig c;
    const auto scheduler = in.text("scheduler", "centralized");
    if (scheduler == "centralized") {
        c.scheduler = SchedulerKind::centralized;
    } else if (scheduler == "distributed") {
        c.scheduler = SchedulerKind::distributed;
    } else {
        in.fail("scheduler", "scheduler must be centralized or distributed");
    }
    const auto adversary = in.text("adversary", "token-bucket");
    if (adversary == "token-bucket") {
        c.adversary = AdversaryKind::token_bucket;
    } else if (adversary == "lower-bound") {
        c.adversary = AdversaryKind::lower_bound;
    } else if (adversary == "replay") {
        c.adversary = AdversaryKind::replay;
    } else {
        in.fail("adversary", "adversary must be token-bucket, lower-bound or replay");
    }

    c.system.m = in.integer<int>("m", 1);
    c.system.k = in.integer<int>("k", 1);
    c.system.n = in.integer<int>("n", 1);
    c.system.horizon = in.integer<Round>("horizon", 1000);
    c.system.seed = in.integer<std::uint64_t>("seed", 0);
    if (c.system.m < 1 || c.system.m > kMaxObjects) {
        in.fail("m", "m must be in [1, 64]");
    }
    if (c.system.k < 1 || c.system.k > c.system.m) {
        in.fail(in.has("k") ? "k" : "m", "k must be in [1, m]");
    }
    if (c.system.n < 1) {
        in.fail("n", "n must be at least 1");
    }
    if (c.system.horizon < 1) {
        in.fail("horizon", "horizon must be at least 1");
    }

    if (in.has("rho")) {
        try {
            c.params.rho = parse_rational(in.text("rho", ""));
        } catch (const InvalidInput& e) {
            in.fail("rho", e.what());
        }
    }
    c.params.b = in.integer<std::int64_t>("b", 1);
    const auto default_model = c.scheduler == SchedulerKind::centralized ? "qf" : "qb";
    try {
        c.params.model = parse_autonomy_model(in.text("model", default_model));
    } catch (const InvalidInput& e) {
        in.fail("model", e.what());
    }
    if (c.params.rho <= 0 || c.params.rho > 1) {
        in.fail("rho", "rho must be in (0, 1]");
    }
    if (c.params.b < 1) {
        in.fail("b", "b must be at least 1");
    }
    if (c.scheduler == SchedulerKind::centralized && c.params.model != AutonomyModel::queue_free) {
        in.fail("model", "the centralized scheduler runs in the queue-free model");
    }
    if (c.scheduler == SchedulerKind::distributed && c.params.model != AutonomyModel::queue_based) {
        in.fail("model", "the distributed scheduler runs in the queue-based model");
    }
    if (c.adversary == AdversaryKind::lower_bound && c.params.model != AutonomyModel::queue_free) {
        in.fail("adversary", "the lower-bound adversary is queue-free only");
    }

    const bool token_bucket = c.adversary == AdversaryKind::token_bucket;
    for (const char* key : {"shape", "shape.max_weight", "shape.attempts", "shape.types"}) {
        if (in.has(key) && !token_bucket) {
            in.fail(key, std::string(key) + " only applies to the token-bucket adversary");
        }
    }
    if (token_bucket) {
        const auto shape = in.text("shape", "uniform");
        if (shape == "uniform") {
            if (in.has("shape.types")) {
                in.fail("shape.types", "shape.types only applies to the cycle shape");
            }
            c.shape = WorkloadShape::uniform(in.integer<int>("shape.max_weight", c.system.k),
                                             in.integer<int>("shape.attempts", 1));
            if (c.shape.max_weight < 1 || c.shape.max_weight > c.system.k) {
                in.fail(in.has("shape.max_weight") ? "shape.max_weight" : "k", "shape.max_weight must be in [1, k]");
            }
            if (c.shape.attempts_per_round < 0) {
                in.fail("shape.attempts", "shape.attempts must be nonnegative");
            }
        } else if (shape == "cycle") {
            for (const char* key : {"shape.max_weight", "shape.attempts"}) {
                if (in.has(key)) {
                    in.fail(key, std::string(key) + " only applies to the uniform shape");
                }
            }
            if (!in.has("shape.types")) {
                in.fail("shape", "the cycle shape needs shape.types");
            }
            std::vector<TxType> types;
            std::stringstream list(in.text("shape.types", ""));
            std::string item;
            while (std::getline(list, item, ',')) {
                const std::string bits(trim(item));
                if (bits.size() != static_cast<std::size_t>(c.system.m)) {
                    in.fail("shape.types", "type '" + bits + "' must have m=" + std::to_string(c.system.m) + " bits");
                }
                try {
                    types.push_back(TxType::parse(bits));
                } catch (const InvalidInput& e) {
                    in.fail("shape.types", e.what());
                }
                if (types.back().weight() > c.system.k) {
                    in.fail("shape.types", "type '" + bits + "' is heavier than k");
                }
            }
            if (types.empty()) {
                in.fail("shape.types", "shape.types is empty");
            }
            c.shape = WorkloadShape::cycle(std::move(types));
        } else {
            in.fail("shape", "shape must be uniform or cycle");
        }
    }

    if (in.has("phase3_fallback")) {
        if (c.scheduler != SchedulerKind::distributed) {
            in.fail("phase3_fallback", "phase3_fallback only applies to the distributed scheduler");
        }
        const auto v = in.text("phase3_fallback", "");
        if (v != "true" && v != "false") {
            in.fail("phase3_fallback", "phase3_fallback must be true or false");
        }
        c.phase3_fallback = v == "true";
    }

    c.replay = in.text("replay", "");
    if (c.adversary == AdversaryKind::replay && c.replay.empty()) {
        in.fail("adversary", "the replay adversary needs a replay path");
    }
    if (c.adversary != AdversaryKind::replay && !c.replay.empty()) {
        in.fail("replay", "replay only applies to the replay adversary");
    }
    c.out = in.text("out", "");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot read config " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::string format_config(const ExperimentConfig& c)
{
    std::ostringstream out;
    out << "scheduler = " << to_string(c.scheduler) << '\n';
    out << "adversary = " << to_string(c.adversary) << '\n';
    out << "m = " << c.system.m << '\n';
    out << "k = " << c.system.k << '\n';
    out << "n = " << c.system.n << '\n';
    out << "horizon = " << c.system.horizon << '\n';
    out << "seed = " << c.system.seed << '\n';
    out << "rho = " << to_string(c.params.rho) << '\n';
    out << "b = " << c.params.b << '\n';
    out << "model = " << to_string(c.params.model) << '\n';
    if (c.adversary == AdversaryKind::token_bucket) {
        if (c.shape.kind == WorkloadShape::Kind::uniform) {
            out << "shape = uniform\n";
            out << "shape.max_weight = " << c.shape.max_weight << '\n';
            out << "shape.attempts = " << c.shape.attempts_per_round << '\n';
        } else {
            out << "shape = cycle\n";
            out << "shape.types = ";
            for (std::size_t i = 0; i < c.shape.types.size(); ++i) {
                out << (i ? "," : "") << c.shape.types[i].to_string(c.system.m);
            }
            out << '\n';
        }
    }
    if (c.scheduler == SchedulerKind::distributed) {
        out << "phase3_fallback = " << (c.phase3_fallback ? "true" : "false") << '\n';
    }
    if (!c.replay.empty()) {
        out << "replay = " << c.replay << '\n';
    }
    if (!c.out.empty()) {
        out << "out = " << c.out << '\n';
    }
    return out.str();
}

RunResult run_experiment(const ExperimentConfig& config)
{
    const auto& sys = config.system;
    sys.validate();

    std::unique_ptr<Generator> generator;
    std::optional<GenerationStream> replayed;
    switch (config.adversary) {
    case AdversaryKind::token_bucket:
        generator = std::make_unique<TokenBucketGenerator>(config.params, config.shape, sys.m, sys.n, sys.seed);
        break;
    case AdversaryKind::lower_bound:
        generator = std::make_unique<LowerBoundGenerator>(config.params, sys.m, sys.k);
        break;
    case AdversaryKind::replay: {
        std::ifstream in(config.replay);
        if (!in) {
            throw InvalidInput("cannot read generation stream " + config.replay);
        }
        replayed = read_generation_stream(in);
        if (replayed->m != sys.m || replayed->n != sys.n || replayed->model != config.params.model) {
            throw InvalidInput("generation stream " + config.replay + " does not match m, n and model of the config");
        }
        generator = std::make_unique<ReplayGenerator>(*replayed);
        break;
    }
    }

    RunResult result;
    const bool admissible_source =
        !replayed || verify_admissibility(*replayed, config.params).admissible();
    if (config.scheduler == SchedulerKind::centralized) {
        CentralizedScheduler scheduler;
        result.trace = run_simulation(sys, scheduler, *generator);
        const auto bounds = centralized_bounds(sys.m, sys.k, config.params.b);
        result.bounds_claimed = admissible_source && config.params.rho <= bounds.rho_max;
        result.report = result.bounds_claimed ? analyze(result.trace, bounds) : analyze(result.trace);
        result.claim = result.bounds_claimed ? "rho <= " + to_string(bounds.rho_max) + ": bounds claimed"
                                             : "rho above " + to_string(bounds.rho_max) + ": no bounds claimed";
    } else {
        DistributedScheduler scheduler(sys.n, sys.m, DistributedOptions{config.phase3_fallback});
        result.trace = run_simulation(sys, scheduler, *generator);
        std::optional<DistributedBounds> bounds;
        try {
            bounds = distributed_bounds(sys.n, sys.m, sys.k, config.params.b, config.params.rho);
        } catch (const InvalidInput&) {
            bounds.reset();
        }
        result.bounds_claimed = admissible_source && bounds && sys.n >= 2 && config.params.rho < bounds->rho_max &&
                                bounds->bulk_ok.value_or(false);
        result.report = result.bounds_claimed ? analyze(result.trace, *bounds) : analyze(result.trace);
        result.claim = result.bounds_claimed ? "rho < " + to_string(bounds->rho_max) + " and bulk large: bounds claimed"
                                             : "outside the stable range: no bounds claimed";
    }
    if (!admissible_source) {
        result.claim = "replayed stream is not admissible: no bounds claimed";
    }
    return result;
}

void write_run_outputs(const RunResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    const auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) {
            throw InvalidInput("cannot write " + (dir / name).string());
        }
        return f;
    };
    {
        auto f = open("trace.csv");
        write_trace_csv(f, result.trace);
    }
    {
        auto f = open("trace.json");
        write_trace_json(f, result.trace);
    }
    {
        auto f = open("generations.json");
        write_generation_stream(f, generations_of(result.trace));
    }
    {
        auto f = open("report.txt");
        f << result.claim << '\n' << format_report(result.report);
    }
    {
        auto f = open("report.json");
        f << report_json(result.report);
    }
}

}  // namespace tmsched::cli

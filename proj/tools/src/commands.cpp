#include "commands.hpp"

#include "experiment.hpp"

#include "tmsched/adversary.hpp"
#include "tmsched/centralized.hpp"
#include "tmsched/distributed.hpp"
#include "tmsched/errors.hpp"
#include "tmsched/trace_io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace tmsched::cli {

namespace {

struct JobOutput {
    std::string out;
    std::string err;
    int code = kExitOk;
};

JobOutput run_one(const std::string& path, const RunOptions& options, bool many)
{
    JobOutput job;
    std::ostringstream out;
    std::ostringstream err;
    try {
        auto config = load_config(path);
        if (options.seed) {
            config.system.seed = *options.seed;
        }
        std::filesystem::path dir = options.out ? *options.out : (config.out.empty() ? "tmsched-out" : config.out);
        if (many) {
            dir /= std::filesystem::path(path).stem();
        }
        const auto result = run_experiment(config);
        write_run_outputs(result, dir);
        const auto& r = result.report;
        out << path << ": " << result.claim << "; max pending " << r.max_pending << ", max latency "
            << r.max_latency << ", growth slope " << std::fixed << std::setprecision(4) << to_double(r.growth_slope) << std::defaultfloat
            << (r.unstable ? " (unstable)" : "") << ", violations " << r.violation_count << ", milestone failures "
            << r.milestone_failures.size() << " -> " << dir.string() << '\n';
        if (result.bounds_claimed && !r.clean()) {
            err << path << ": bound violations recorded in " << (dir / "report.txt").string() << '\n';
            job.code = kExitViolation;
        }
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        job.code = kExitError;
    }
    job.out = out.str();
    job.err = err.str();
    return job;
}

std::vector<int> parse_order(std::string_view text)
{
    std::vector<int> order;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = std::min(text.find(',', pos), text.size());
        const auto item = text.substr(pos, comma - pos);
        int v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size()) {
            throw InvalidInput("order entries must be integers, got '" + std::string(item) + "'");
        }
        order.push_back(v);
        pos = comma + 1;
    }
    return order;
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err)
{
    const auto& configs = options.configs;
    if (configs.empty()) {
        err << "run: no config given\n";
        return kExitError;
    }
    const bool many = configs.size() > 1;
    std::vector<JobOutput> results(configs.size());
    const auto workers = static_cast<std::size_t>(std::clamp<int>(options.jobs, 1, static_cast<int>(configs.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) {
            results[i] = run_one(configs[i], options, many);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (auto i = next++; i < configs.size(); i = next++) {
                    results[i] = run_one(configs[i], options, many);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    int code = kExitOk;
    for (const auto& r : results) {
        out << r.out;
        err << r.err;
        code = std::max(code, r.code);
    }
    return code;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        AdversaryParams params;
        params.rho = parse_rational(options.rho);
        params.b = options.b;
        std::ifstream in(options.stream);
        if (!in) {
            throw InvalidInput("cannot read " + options.stream);
        }
        const auto stream = read_generation_stream(in);
        params.model = stream.model;
        if (options.model && parse_autonomy_model(*options.model) != stream.model) {
            throw InvalidInput("stream is " + std::string(to_string(stream.model)) + " but --model is " +
                               *options.model);
        }
        params.validate();
        const auto verdict = verify_admissibility(stream, params);
        if (verdict.admissible()) {
            out << "admissible: " << stream.rounds.size() << " rounds, rho " << to_string(params.rho) << ", b "
                << params.b << '\n';
            return kExitOk;
        }
        const auto& v = *verdict.violation;
        out << "violation: " << v.entity.to_string() << " rounds [" << v.first << ", " << v.last << "] congestion "
            << v.congestion << " > " << to_string(v.bound) << '\n';
        return kExitViolation;
    } catch (const std::exception& e) {
        err << "verify: " << e.what() << '\n';
        return kExitError;
    }
}

int cmd_setfamily(int n, std::ostream& out, std::ostream& err)
{
    try {
        const auto family = build_set_family(n);
        for (const auto& set : family.sets) {
            for (std::size_t i = 0; i < set.size(); ++i) {
                out << (i ? " " : "") << set[i];
            }
            out << '\n';
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "setfamily: " << e.what() << '\n';
        return kExitError;
    }
}

ConflictGraph parse_graph(std::string_view text)
{
    std::optional<int> declared;
    std::vector<std::pair<int, int>> edges;
    int highest = -1;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        std::string first;
        if (!(fields >> first)) {
            continue;
        }
        const auto fail = [&](const std::string& msg) {
            throw InvalidInput("graph line " + std::to_string(line_no) + ": " + msg);
        };
        std::string rest;
        if (first == "vertices") {
            int count = 0;
            if (!(fields >> count) || count < 0 || (fields >> rest)) {
                fail("expected 'vertices N'");
            }
            declared = count;
            continue;
        }
        int u = 0;
        int v = 0;
        std::istringstream edge(line);
        if (!(edge >> u >> v) || (edge >> rest) || u < 0 || v < 0) {
            fail("expected two vertex indices");
        }
        edges.emplace_back(u, v);
        highest = std::max({highest, u, v});
    }
    const int count = declared.value_or(highest + 1);
    if (highest >= count) {
        throw InvalidInput("edge endpoint " + std::to_string(highest) + " outside the declared vertex count");
    }
    ConflictGraph g(count);
    for (const auto& [u, v] : edges) {
        g.add_edge(u, v);
    }
    return g;
}

int cmd_color(const ColorOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        std::ifstream in(options.graph);
        if (!in) {
            throw InvalidInput("cannot read " + options.graph);
        }
        std::stringstream buf;
        buf << in.rdbuf();
        const auto g = parse_graph(buf.str());
        std::vector<int> order(static_cast<std::size_t>(g.size()));
        std::iota(order.begin(), order.end(), 0);
        if (options.order) {
            order = parse_order(*options.order);
        }
        Coloring c;
        if (options.variant == "primary") {
            c = primary_greedy_coloring(g, order);
        } else if (options.variant == "alternative") {
            c = alternative_greedy_coloring(g, order);
        } else {
            throw InvalidInput("variant must be primary or alternative");
        }
        for (int v = 0; v < g.size(); ++v) {
            out << v << ' ' << c.color[static_cast<std::size_t>(v)] << '\n';
        }
        out << "colors " << c.max_color() << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "color: " << e.what() << '\n';
        return kExitError;
    }
}

int cmd_bounds(const BoundsOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        std::optional<Rational> rho;
        if (options.rho) {
            rho = parse_rational(*options.rho);
        }
        if (options.scheduler == "centralized") {
            const auto b = centralized_bounds(options.m, options.k, options.b);
            out << "rho_max = " << to_string(b.rho_max) << '\n';
            out << "pending_bound = " << b.pending_bound << '\n';
            out << "latency_bound = " << b.latency_bound << '\n';
            out << "milestone_len = " << b.milestone_len << '\n';
            if (rho) {
                out << "stable = " << (*rho <= b.rho_max ? "true" : "false") << '\n';
            }
            return kExitOk;
        }
        if (options.scheduler == "distributed") {
            if (!options.n) {
                throw InvalidInput("distributed bounds need --n");
            }
            const auto b = distributed_bounds(*options.n, options.m, options.k, options.b, rho);
            out << "P = " << b.P << '\n';
            out << "L = " << b.L << '\n';
            out << "C = " << b.C << '\n';
            out << "epoch_len = " << b.epoch_len << '\n';
            out << "interval_len = " << b.interval_len << '\n';
            out << "bulk = " << b.bulk << '\n';
            if (b.bulk_ok) {
                out << "bulk_ok = " << (*b.bulk_ok ? "true" : "false") << '\n';
            }
            out << "rho_max = " << to_string(b.rho_max) << '\n';
            out << "pending_bound = " << b.pending_bound << '\n';
            out << "latency_bound = " << b.latency_bound << '\n';
            out << "entropy_estimate = " << std::setprecision(6) << b.entropy_estimate << '\n';
            if (b.entropy_estimate_holds) {
                out << "entropy_estimate_holds = " << (*b.entropy_estimate_holds ? "true" : "false") << '\n';
            }
            return kExitOk;
        }
        throw InvalidInput("scheduler must be centralized or distributed");
    } catch (const std::exception& e) {
        err << "bounds: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace tmsched::cli

#include "tmsched/trace_io.hpp"

#include "tmsched/errors.hpp"

#include <json.hpp>

#include <iterator>
#include <ostream>
#include <sstream>

namespace tmsched {

using nlohmann::ordered_json;

void write_trace_csv(std::ostream& out, const Trace& trace)
{
    out << "round,generated,invoked,committed,aborted,pending\n";
    for (const auto& r : trace.rounds) {
        out << r.round << ',' << r.generated.size() << ',' << r.outcome.invoked.size() << ','
            << r.outcome.committed.size() << ',' << r.outcome.aborted.size() << ',' << r.pending << '\n';
    }
}

namespace {

ordered_json config_json(const Trace& trace)
{
    const auto& c = trace.config;
    return ordered_json{{"m", c.m},
                        {"k", c.k},
                        {"n", c.n},
                        {"horizon", c.horizon},
                        {"seed", c.seed},
                        {"model", std::string(to_string(trace.model))}};
}

ordered_json round_object(const Trace& trace, const RoundRecord& r)
{
    ordered_json generated = ordered_json::array();
    for (const auto& t : r.generated) {
        generated.push_back(ordered_json{{"id", t.id},
                                         {"owner", t.owner ? ordered_json(t.owner->index) : ordered_json(nullptr)},
                                         {"type", t.ttype.to_string(trace.config.m)}});
    }
    ordered_json obj{{"round", r.round},
                     {"generated", std::move(generated)},
                     {"invoked", r.outcome.invoked},
                     {"committed", r.outcome.committed},
                     {"aborted", r.outcome.aborted},
                     {"pending", r.pending}};
    if (!r.note.empty()) {
        obj["note"] = r.note;
    }
    return obj;
}

}  // namespace

std::string round_json(const Trace& trace, std::size_t index)
{
    return round_object(trace, trace.rounds.at(index)).dump();
}

void write_trace_json(std::ostream& out, const Trace& trace)
{
    // Streamed round by round so long traces never build one giant document.
    out << "{\"config\":" << config_json(trace).dump() << ",\"rounds\":[";
    for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
        if (i != 0) {
            out << ",\n";
        }
        out << round_object(trace, trace.rounds[i]).dump();
    }
    out << "]}\n";
}

std::string trace_json(const Trace& trace)
{
    std::ostringstream out;
    write_trace_json(out, trace);
    return out.str();
}

GenerationStream generations_of(const Trace& trace)
{
    GenerationStream stream;
    stream.m = trace.config.m;
    stream.n = trace.config.n;
    stream.model = trace.model;
    stream.rounds.reserve(trace.rounds.size());
    for (const auto& r : trace.rounds) {
        std::vector<Generation> gens;
        gens.reserve(r.generated.size());
        for (const auto& t : r.generated) {
            gens.push_back(Generation{t.ttype, t.owner});
        }
        stream.rounds.push_back(std::move(gens));
    }
    return stream;
}

std::string generation_stream_json(const GenerationStream& stream)
{
    const ordered_json header{{"format", "tmsched-generations"},
                              {"m", stream.m},
                              {"n", stream.n},
                              {"model", std::string(to_string(stream.model))},
                              {"rounds", stream.rounds.size()}};
    std::string out = header.dump();
    out.pop_back();  // reopen the header object to append the rows
    out += ",\"generations\":[";
    bool first = true;
    for (std::size_t i = 0; i < stream.rounds.size(); ++i) {
        for (const auto& g : stream.rounds[i]) {
            const ordered_json row = ordered_json::array(
                {static_cast<std::int64_t>(i + 1), g.owner ? ordered_json(g.owner->index) : ordered_json(nullptr),
                 g.ttype.to_string(stream.m)});
            out += first ? "\n" : ",\n";
            out += row.dump();
            first = false;
        }
    }
    out += "]}\n";
    return out;
}

void write_generation_stream(std::ostream& out, const GenerationStream& stream)
{
    out << generation_stream_json(stream);
}

GenerationStream parse_generation_stream(const std::string& text)
{
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("generation stream is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.is_object() || doc.value("format", "") != "tmsched-generations") {
            throw InvalidInput("not a tmsched-generations document");
        }
        GenerationStream stream;
        stream.m = doc.at("m").get<int>();
        stream.n = doc.at("n").get<int>();
        stream.model = parse_autonomy_model(doc.at("model").get<std::string>());
        const auto rounds = doc.at("rounds").get<std::int64_t>();
        if (stream.m < 1 || stream.m > kMaxObjects || stream.n < 1 || rounds < 0) {
            throw InvalidInput("generation stream header out of range");
        }
        stream.rounds.resize(static_cast<std::size_t>(rounds));
        Round last = 0;
        for (const auto& row : doc.at("generations")) {
            if (!row.is_array() || row.size() != 3) {
                throw InvalidInput("generation rows must be [round, owner, type]");
            }
            const auto round = row[0].get<Round>();
            if (round < 1 || round > rounds) {
                throw InvalidInput("generation row round " + std::to_string(round) + " outside [1, " +
                                   std::to_string(rounds) + "]");
            }
            if (round < last) {
                throw InvalidInput("generation rows must be sorted by round");
            }
            last = round;
            const auto bits = row[2].get<std::string>();
            if (bits.size() != static_cast<std::size_t>(stream.m)) {
                throw InvalidInput("type '" + bits + "' does not have m=" + std::to_string(stream.m) + " bits");
            }
            Generation g{TxType::parse(bits), std::nullopt};
            if (!row[1].is_null()) {
                const int owner = row[1].get<int>();
                if (owner < 0 || owner >= stream.n) {
                    throw InvalidInput("owner " + std::to_string(owner) + " outside [0, n)");
                }
                g.owner = ProcessorId{owner};
            }
            if (g.owner.has_value() != (stream.model == AutonomyModel::queue_based)) {
                throw InvalidInput("owners must be present iff the stream is queue-based");
            }
            stream.rounds[static_cast<std::size_t>(round - 1)].push_back(g);
        }
        return stream;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed generation stream: ") + e.what());
    }
}

GenerationStream read_generation_stream(std::istream& in)
{
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_generation_stream(text);
}

}  // namespace tmsched

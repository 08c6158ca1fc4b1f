#pragma once

#include "tmsched/adversary.hpp"
#include "tmsched/engine.hpp"

#include <iosfwd>
#include <string>

namespace tmsched {

/// One line per round: round,generated,invoked,committed,aborted,pending
/// (counts), preceded by that header line.
void write_trace_csv(std::ostream& out, const Trace& trace);

/// Full-fidelity JSON: config, autonomy model, and per round the generated
/// transactions (id, owner, type bitstring), invoked/committed/aborted ids,
/// pending count and scheduler note. Output is deterministic.
void write_trace_json(std::ostream& out, const Trace& trace);
std::string trace_json(const Trace& trace);

/// The serialized form of a single round, as embedded in write_trace_json.
std::string round_json(const Trace& trace, std::size_t index);

/// The generation stream that produced a trace.
GenerationStream generations_of(const Trace& trace);

/// Generation stream file:
///   {"format": "tmsched-generations", "m": 4, "n": 1, "model": "qf",
///    "rounds": 10, "generations": [[round, owner|null, "bits"], ...]}
/// Rows are sorted by round; "rounds" fixes the stream length so trailing
/// empty rounds survive the round trip.
void write_generation_stream(std::ostream& out, const GenerationStream& stream);
std::string generation_stream_json(const GenerationStream& stream);

/// Throws InvalidInput on malformed or truncated input.
GenerationStream read_generation_stream(std::istream& in);
GenerationStream parse_generation_stream(const std::string& text);

}  // namespace tmsched

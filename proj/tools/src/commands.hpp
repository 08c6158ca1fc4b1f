#pragma once

#include "tmsched/combinatorics.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tmsched::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolation = 2;

struct RunOptions {
    std::vector<std::string> configs;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    int jobs = 1;
};

/// Runs every config (in parallel with jobs > 1) and writes outputs. With
/// several configs each gets <out>/<config stem>. Returns the worst exit
/// code.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

struct VerifyOptions {
    std::string stream;
    std::string rho;
    std::int64_t b = 1;
    std::optional<std::string> model;
};

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

int cmd_setfamily(int n, std::ostream& out, std::ostream& err);

/// Graph file: optional "vertices N" line, then one "u v" edge per line;
/// '#' starts a comment. Without a vertices line the count is the largest
/// index plus one.
ConflictGraph parse_graph(std::string_view text);

struct ColorOptions {
    std::string graph;
    std::string variant = "primary";
    std::optional<std::string> order;  // comma-separated vertex list
};

int cmd_color(const ColorOptions& options, std::ostream& out, std::ostream& err);

struct BoundsOptions {
    std::string scheduler;
    int m = 1;
    int k = 1;
    std::int64_t b = 1;
    std::optional<int> n;
    std::optional<std::string> rho;
};

int cmd_bounds(const BoundsOptions& options, std::ostream& out, std::ostream& err);

}  // namespace tmsched::cli

#pragma once

#include <string>
#include <vector>

#include "fraisse/age.hpp"

namespace fraisse::diagonal {

struct TraceEvent {
    std::size_t stage = 0;
    std::size_t e = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    PartialMap map;
};

/// A finite stand-in for the enumeration W_e: the events each requirement
/// sees, with strictly increasing stages per requirement.
struct EnumerationTrace {
    std::vector<TraceEvent> events;
};

EnumerationTrace parse_trace(const std::string& json_text);
std::string encode_trace(const EnumerationTrace& trace);

struct RequirementReport {
    std::size_t e = 0;
    std::size_t pair_low = 0;  // designated indices (pair_low, pair_low + 1)
    bool fired = false;
    std::size_t fired_stage = 0;
    bool identity_is_embedding = false;
    bool trace_contains_triple = false;
};

struct DiagonalReport {
    std::vector<RequirementReport> requirements;
    AgeRepPtr age;  // the constructed representation fragment
};

/// Runs the stagewise construction against the trace. Every requirement
/// designates a fresh index pair, vows its colors, and reacts when the
/// identity triple shows up in the trace; enough extra stages are run for
/// every trace event to be seen.
DiagonalReport run(const EnumerationTrace& trace, std::size_t requirements, std::size_t stages);

/// True iff for every requirement the trace's claim about the designated
/// triple differs from the actual embedding relation of the built
/// structures (recomputed from the report's age by brute force).
bool verify(const DiagonalReport& report);

}  // namespace fraisse::diagonal

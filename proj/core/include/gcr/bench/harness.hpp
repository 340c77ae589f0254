#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gcr/bench/report.hpp"
#include "gcr/bench/workload.hpp"

namespace gcr::bench {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A full benchmark request: the base workload, the thread counts to sweep
/// and the repeat/instance structure.
struct RunSpec {
    WorkloadConfig base;
    std::vector<int> thread_counts; // empty = auto sweep {1,2,4,...,2*CPUs}
    int repeats = 3;
    int instances = 1;
    std::string format = "csv"; // csv | json
    std::string out_path;       // empty = stdout
};

/// Parses harness flags (see usage_text). Throws UsageError on unknown
/// flags, unknown lock names, malformed lists or bad percentages.
RunSpec parse_args(const std::vector<std::string>& args);

std::string usage_text();

/// Expands "auto" thread counts: {1, 2, 4, ...} capped below 2*CPUs, plus
/// 2*CPUs itself.
std::vector<int> auto_thread_counts(int logical_cpus);

struct MatrixResult {
    std::vector<OutputRecord> records;
    bool partial_failure = false;
};

/// Runs every (thread count x repeat) combination, appending a summary
/// record (repeat_id -1, mean throughput/unfairness/handoff) per thread
/// count. With spec.instances > 1 each repeat spawns that many independent
/// benchmark processes and an aggregate record (instance_id -1) carries
/// the summed throughput. Per-run failures are recorded and the sweep
/// continues.
MatrixResult run_matrix(const RunSpec& spec);

} // namespace gcr::bench

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcr/config.hpp"
#include "gcr/locks.hpp"
#include "gcr/numa.hpp"

namespace gcr::bench {

struct WorkloadConfig {
    int threads = 1;
    double duration_s = 10.0;
    double warmup_s = 1.0;
    int key_range = 4096;
    int lookup_pct = 80;
    int insert_pct = 10;
    int remove_pct = 10;
    std::uint64_t ncs_iters = 400; // non-critical-section loop length
    std::uint64_t seed = 1;
    std::string lock_name = "mcs_spin";
    std::string gcr_mode = "off"; // off | on | numa

    /// Throws std::invalid_argument on bad values (percentages not summing
    /// to 100, nonpositive key range, unknown lock or mode).
    void validate() const;
};

struct RunMetrics {
    std::vector<std::uint64_t> per_thread_ops;
    std::uint64_t total_ops = 0;
    std::uint64_t lookups = 0;
    std::uint64_t inserts = 0;
    std::uint64_t removes = 0;
    double duration_s = 0.0;
    double throughput = 0.0; // ops per second
    std::uint64_t handoff_count = 0;
    double handoff_mean_ns = 0.0;
    double handoff_p50_ns = 0.0;
    double handoff_p99_ns = 0.0;
    double unfairness = 0.5;
};

/// Deterministic pseudo-random recurrence iterated n times; the returned
/// state keeps the loop from being optimized away.
std::uint64_t non_critical_work(std::uint64_t seed, std::uint64_t iters);

/// Fraction of all operations completed by the upper half (ceil(n/2)) of
/// threads; 0.5 for a strictly fair run, 1.0 for a maximally unfair one.
/// 0.5 by convention when the total is zero.
double unfairness(std::vector<std::uint64_t> counts);

/// Lock-handoff timing: the holder stamps a shared slot right before its
/// unlock call; the next holder samples right after its lock call returns.
/// The slot is written only under the lock. The first acquisition (no
/// previous holder) is excluded.
class HandoffRecorder {
public:
    /// Call while still holding the lock, immediately before unlock.
    void before_release() {
        last_release_ns_.store(now_ns(), std::memory_order_relaxed);
    }

    /// Call immediately after lock returns. Returns the sample in
    /// nanoseconds, or -1 when there is no previous release to pair with.
    std::int64_t after_acquire() {
        std::int64_t prev = last_release_ns_.load(std::memory_order_relaxed);
        if (prev == 0) return -1;
        return now_ns() - prev;
    }

    static std::int64_t now_ns();

private:
    std::atomic<std::int64_t> last_release_ns_{0};
};

/// Builds the lock stack for a run: the named lock, optionally wrapped in
/// the restriction layer selected by mode (off | on | numa).
std::unique_ptr<LockCore> make_workload_lock(const std::string& lock_name,
                                             const std::string& gcr_mode,
                                             const GcrConfig& cfg,
                                             const NumaOptions& numa = NumaOptions{});

/// Runs the AVL-tree microbenchmark over the supplied lock. Pre-fills the
/// tree to half the key range, warms up, barriers all threads, then
/// measures for cfg.duration_s.
RunMetrics run_workload(const WorkloadConfig& cfg, LockCore& lock);

/// Convenience overload constructing the lock from cfg (with GCR knobs
/// taken from the environment).
RunMetrics run_workload(const WorkloadConfig& cfg);

} // namespace gcr::bench

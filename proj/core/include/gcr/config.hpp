#pragma once

#include <cstdint>

namespace gcr {

/// Tunables for the concurrency-restriction wrapper. Defaults follow the
/// values we use in all experiments; every knob can also be overridden
/// through the GCR_* environment variables (see from_env).
struct GcrConfig {
    // An arriving thread takes the fast path while the active-thread
    // estimate is below this value.
    std::uint64_t passive_threshold = 4;

    // The head of the passive queue rejoins the active set on its own when
    // the estimate drops to this value or below. Also used as the "lock is
    // quiet" bound when deciding to disable restriction dynamically.
    std::uint64_t active_rejoin_threshold = 2;

    // One passive thread is promoted every this-many lock acquisitions.
    std::uint64_t fairness_threshold = 0x4000;

    // Upper bound for the doubling interval between active-count polls in
    // the head thread's spin loop.
    std::uint64_t backoff_cap = 1u << 20;

    // Number of threads that must be seen contending on a lock (in the
    // shared contention table) before restriction is enabled for it.
    std::uint64_t contention_enable_count = 4;

    // Acquisitions per preferred-socket epoch (NUMA variant).
    std::uint64_t numa_epoch_length = 0x4000;

    // Spin iterations before a passive thread parks while waiting to reach
    // the head of the queue.
    std::uint32_t spin_budget = 1000;

    // When true (the default), restriction starts disabled and is enabled
    // only once the contention table shows enough threads on the lock.
    // When false, restriction is unconditionally active.
    bool dynamic_enable = true;

    /// Defaults overlaid with GCR_FAIRNESS_THRESHOLD, GCR_PASSIVE_THRESHOLD,
    /// GCR_ENABLE_COUNT, GCR_BACKOFF_CAP and GCR_NUMA_EPOCH when set.
    static GcrConfig from_env();
};

} // namespace gcr

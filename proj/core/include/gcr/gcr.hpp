#pragma once

#include <atomic>
#include <cstdint>
#include <memory>

#include "gcr/config.hpp"
#include "gcr/contention_table.hpp"
#include "gcr/locks.hpp"
#include "gcr/passive_queue.hpp"

namespace gcr {

enum class AdmissionReason { signaled, active_set_empty };

/// Details handed to a test observer each time a passive thread is
/// admitted to the active set (just before it leaves the queue).
struct AdmissionInfo {
    std::uint64_t enqueue_seq;   // FIFO position of the admitted node
    std::uint64_t num_acqs;      // acquisition counter at admission
    AdmissionReason reason;
    int socket;                  // NUMA variant only, else 0
    int preferred_socket;        // NUMA variant only, else 0
    bool preferred_queue_empty;  // NUMA variant only
    std::uint64_t rotation_epoch; // NUMA variant only
};

using AdmissionObserver = void (*)(void* ctx, const AdmissionInfo& info);

/// Concurrency-restriction wrapper around any LockCore. Threads beyond the
/// passive threshold are parked in a FIFO queue instead of competing for
/// the inner lock; the head of the queue is promoted once per fairness
/// epoch, or immediately when the active set drains.
///
/// Non-reentrant: acquiring a GcrLock the calling thread already holds is
/// undefined (asserted in debug builds).
class GcrLock final : public LockCore {
public:
    explicit GcrLock(std::unique_ptr<LockCore> inner, GcrConfig cfg = GcrConfig{});

    void acquire() override;
    void release() override;
    const char* name() const override { return "gcr"; }

    /// ingress - egress, read non-atomically (ingress first); clamped at 0.
    /// A heuristic, never used for correctness.
    std::int64_t active_estimate() const {
        std::int64_t d = raw_estimate();
        return d < 0 ? 0 : d;
    }

    std::uint64_t acquisitions() const { return num_acqs_.load(); }
    std::uint64_t ingress() const { return ingress_.load(); }
    std::uint64_t egress() const { return egress_.load(); }
    bool enabled() const { return enabled_.load(); }
    std::uint64_t next_check_active() const { return next_check_active_.load(); }
    const PassiveQueue& queue() const { return queue_; }
    LockCore& inner() { return *inner_; }
    const GcrConfig& config() const { return cfg_; }

    bool held_by_caller() const;

    /// Performs the release-side bookkeeping (acquisition count, fairness
    /// signal, egress) without releasing the inner lock. Used when the
    /// inner lock is about to be released by foreign code (a condition
    /// wait behind the interposition shim). Callers must follow up with
    /// post_release_scan once the inner lock is actually released.
    void release_bookkeeping();

    /// Clears the caller's contention-table slot and runs the periodic
    /// contention scan. Invoked automatically by release().
    void post_release_scan();

    void set_admission_observer(AdmissionObserver obs, void* ctx) {
        observer_ctx_ = ctx;
        observer_ = obs;
    }

private:
    std::int64_t raw_estimate() const {
        std::uint64_t in = ingress_.load();
        std::uint64_t out = egress_.load();
        return static_cast<std::int64_t>(in) - static_cast<std::int64_t>(out);
    }

    void slow_path();
    AdmissionReason admission_wait();

    std::unique_ptr<LockCore> inner_;
    GcrConfig cfg_;
    PassiveQueue queue_;

    alignas(64) std::atomic<std::uint64_t> ingress_{0};
    alignas(64) std::atomic<std::uint64_t> egress_{0};
    alignas(64) std::atomic<std::uint64_t> num_acqs_{0};
    alignas(64) std::atomic<std::uint64_t> next_check_active_{1};
    alignas(64) std::atomic<int> top_approved_{0};
    std::atomic<bool> enabled_;

    std::atomic<AdmissionObserver> observer_{nullptr};
    void* observer_ctx_ = nullptr;
};

namespace detail {
/// Per-thread queue node. A thread waits in at most one passive queue at a
/// time (it is blocked while queued), so a single node per thread is
/// enough; it is recycled across locks.
QueueNode* self_queue_node();
} // namespace detail

} // namespace gcr

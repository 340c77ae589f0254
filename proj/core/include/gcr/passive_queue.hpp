#pragma once

#include <atomic>
#include <cstdint>

#include "gcr/waiting.hpp"

namespace gcr {

/// One waiting passive thread's entry in the queue. Written by its owner,
/// by exactly one successor (the next link) and one signaler (the event).
struct QueueNode {
    std::atomic<QueueNode*> next{nullptr};
    WaitFlag event;
    // Position in the queue's global FIFO order; assigned during push and
    // stable while the node is queued.
    std::uint64_t enqueue_seq = 0;
};

/// MCS-style queue of passive threads. push_self atomically swaps the new
/// node into the tail; pop_self (head only) hands the head position to the
/// successor and signals its event.
///
/// Structural invariants (checked by sample()):
///  - the node referenced by tail has a null next pointer;
///  - at most one reachable node has its event set, and it is the top node.
class PassiveQueue {
public:
    bool empty() const { return top_.load() == nullptr; }
    QueueNode* top() const { return top_.load(); }
    QueueNode* tail() const { return tail_.load(); }

    /// Enqueue the caller's node. On return, if the queue was empty the
    /// node is the top and its event is already set (the caller skips the
    /// blocking wait).
    void push_self(QueueNode* n);

    /// Dequeue the caller's node; n must be the node top references. Waits
    /// for an in-flight enqueuer to link itself if the tail swap shows the
    /// node is no longer last. Signals (and wakes) the successor.
    void pop_self(QueueNode* n);

    /// Runs fn against a structurally stable snapshot: no push or pop was
    /// in progress while fn ran. Returns false if no stable window was
    /// found within max_attempts. fn receives (top, tail) and may walk the
    /// chain; it can be invoked several times, and only the invocation
    /// immediately preceding a true return saw a stable queue, so fn must
    /// reset any accumulated findings on entry.
    template <typename Fn>
    bool sample(Fn&& fn, int max_attempts = 10000) const {
        for (int i = 0; i < max_attempts; ++i) {
            std::uint64_t e1 = entries_.load();
            if (e1 != exits_.load()) {
                cpu_relax();
                continue;
            }
            fn(top_.load(), tail_.load());
            if (entries_.load() == e1) return true;
        }
        return false;
    }

private:
    alignas(64) std::atomic<QueueNode*> top_{nullptr};
    alignas(64) std::atomic<QueueNode*> tail_{nullptr};
    alignas(64) std::atomic<std::uint64_t> entries_{0};
    std::atomic<std::uint64_t> exits_{0};
    // Sequence of the most recently popped node; read by a pusher that
    // finds the queue empty (the emptying CAS orders the read).
    std::uint64_t last_popped_seq_ = 0;
};

} // namespace gcr

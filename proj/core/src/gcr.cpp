#include "gcr/gcr.hpp"

#include <cassert>
#include <thread>

#include "gcr/detail/held.hpp"

namespace gcr {

namespace detail {

QueueNode* self_queue_node() {
    thread_local QueueNode node;
    return &node;
}

} // namespace detail

GcrLock::GcrLock(std::unique_ptr<LockCore> inner, GcrConfig cfg)
    : inner_(std::move(inner)), cfg_(cfg), enabled_(!cfg.dynamic_enable) {}

bool GcrLock::held_by_caller() const {
    return detail::HeldStack::contains(this);
}

void GcrLock::acquire() {
    assert(!held_by_caller());
    int slot = ContentionTable::instance().self_slot();
    ContentionTable::instance().note_acquiring(slot, this);

    bool counted = false;
    // Overflow threads (slot < 0) have no contention-table presence and
    // treat restriction as always enabled.
    if (enabled_.load() || slot < 0) {
        // A pending fairness signal means the queue head is about to be
        // admitted; defer to it instead of racing past. This keeps the
        // admission gap bounded in acquisitions (each active thread slips
        // in at most the acquisition already in flight) on any scheduler.
        while (top_approved_.load() != 0 && !queue_.empty())
            std::this_thread::yield();
        // The check and the increment are deliberately not mutually atomic;
        // over-admission only costs performance, never correctness.
        if (raw_estimate() < static_cast<std::int64_t>(cfg_.passive_threshold)) {
            ingress_.fetch_add(1);
        } else {
            slow_path();
        }
        counted = true;
    }
    detail::HeldStack::push(this, nullptr, counted);
    inner_->acquire();
}

void GcrLock::slow_path() {
    QueueNode* node = detail::self_queue_node();
    queue_.push_self(node);
    if (!node->event.is_set()) node->event.wait(cfg_.spin_budget);

    AdmissionReason reason = admission_wait();
    ingress_.fetch_add(1);

    if (AdmissionObserver obs = observer_.load()) {
        AdmissionInfo info{node->enqueue_seq, num_acqs_.load(), reason, 0, 0, false, 0};
        obs(observer_ctx_, info);
    }
    queue_.pop_self(node);
}

AdmissionReason GcrLock::admission_wait() {
    AdmissionReason reason = AdmissionReason::signaled;
    std::uint64_t iter = 0;
    while (top_approved_.load() == 0) {
        ++iter;
        // The head never parks (a signal must find it polling), but past
        // the spin budget it yields so an oversubscribed machine still
        // gives the active set the CPU.
        if (iter <= cfg_.spin_budget)
            cpu_relax();
        else
            std::this_thread::yield();
        std::uint64_t gap = next_check_active_.load();
        if (iter % gap == 0) {
            if (raw_estimate() <= static_cast<std::int64_t>(cfg_.active_rejoin_threshold)) {
                next_check_active_.store(1);
                reason = AdmissionReason::active_set_empty;
                break;
            }
            if (gap < cfg_.backoff_cap) next_check_active_.store(gap * 2);
        }
    }
    if (top_approved_.load() != 0) top_approved_.store(0);
    return reason;
}

void GcrLock::release() {
    release_bookkeeping();
    inner_->release();
    post_release_scan();
}

void GcrLock::release_bookkeeping() {
    detail::HeldEntry held = detail::HeldStack::pop(this);
    if (!held.flag) return; // acquired while restriction was off

    std::uint64_t acqs = num_acqs_.load() + 1; // plain increment, under lock
    num_acqs_.store(acqs);
    if (acqs % cfg_.fairness_threshold == 0) {
        if (!queue_.empty()) {
            top_approved_.store(1);
        } else if (cfg_.dynamic_enable &&
                   raw_estimate() <= static_cast<std::int64_t>(cfg_.active_rejoin_threshold)) {
            enabled_.store(false);
        }
    }
    egress_.store(egress_.load() + 1); // plain increment, under lock
}

void GcrLock::post_release_scan() {
    int slot = ContentionTable::instance().self_slot();
    // Scan before clearing our own slot: the releasing thread counts as a
    // contender of this lock.
    if (cfg_.dynamic_enable && slot >= 0 && self_scan_schedule().due()) {
        if (!enabled_.load() &&
            contention_scan(ContentionTable::instance(), this, cfg_.contention_enable_count)) {
            enabled_.store(true);
        }
    }
    ContentionTable::instance().note_released(slot);
}

} // namespace gcr

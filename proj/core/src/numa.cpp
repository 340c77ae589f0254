#include "gcr/numa.hpp"

#include <cassert>
#include <thread>

#include "gcr/detail/held.hpp"
#include "gcr/topology.hpp"

namespace gcr {

NumaGcrLock::NumaGcrLock(std::unique_ptr<LockCore> inner, GcrConfig cfg, NumaOptions numa)
    : inner_(std::move(inner)), cfg_(cfg), numa_(std::move(numa)),
      enabled_(!cfg.dynamic_enable) {
    int n = numa_.socket_count > 0 ? numa_.socket_count : platform_socket_count();
    if (n < 1) n = 1;
    queues_ = std::vector<SocketQueue>(static_cast<std::size_t>(n));
}

bool NumaGcrLock::held_by_caller() const {
    return detail::HeldStack::contains(this);
}

int NumaGcrLock::socket_of_self() {
    struct Cache {
        const void* lock = nullptr;
        int socket = 0;
        std::uint32_t remaining = 0;
    };
    thread_local Cache cache;
    if (cache.lock == this && cache.remaining > 0) {
        --cache.remaining;
        return cache.socket;
    }
    int s = numa_.socket_of ? numa_.socket_of() : platform_current_socket();
    if (s < 0 || s >= socket_count()) s = 0;
    cache = {this, s, numa_.refresh_interval};
    return s;
}

bool NumaGcrLock::all_queues_empty() const {
    for (const auto& sq : queues_)
        if (!sq.q.empty()) return false;
    return true;
}

void NumaGcrLock::acquire() {
    assert(!held_by_caller());
    int slot = ContentionTable::instance().self_slot();
    ContentionTable::instance().note_acquiring(slot, this);

    bool counted = false;
    if (enabled_.load() || slot < 0) {
        int socket = socket_of_self();
        // A pending fairness signal means the preferred queue's head is
        // about to be admitted; defer to it instead of racing past (keeps
        // the admission gap bounded in acquisitions on any scheduler).
        while (top_approved_.load() != 0 && !queues_[preferred_.load()].q.empty())
            std::this_thread::yield();
        // Ineligible threads never read the active counters; they go
        // straight to their socket's queue.
        if (eligible(socket) &&
            raw_estimate() < static_cast<std::int64_t>(cfg_.passive_threshold)) {
            ingress_.fetch_add(1);
        } else {
            slow_path(socket);
        }
        counted = true;
    }
    detail::HeldStack::push(this, nullptr, counted);
    inner_->acquire();
}

void NumaGcrLock::slow_path(int socket) {
    QueueNode* node = detail::self_queue_node();
    PassiveQueue& q = queues_[socket].q;
    q.push_self(node);
    if (!node->event.is_set()) node->event.wait(cfg_.spin_budget);

    // Head of our socket's queue. Admission requires eligibility, plus
    // either the fairness signal or a drained active set.
    AdmissionReason reason = AdmissionReason::signaled;
    bool pref_empty_seen = false;
    std::uint64_t iter = 0;
    for (;;) {
        int pref = preferred_.load();
        bool pref_empty = queues_[pref].q.empty();
        bool elig = socket == pref || pref_empty;
        if (elig && top_approved_.load() != 0) {
            pref_empty_seen = pref_empty;
            break;
        }
        ++iter;
        // As in the flat wrapper: the head never parks, but yields past
        // its spin budget to keep the active set running when cores are
        // oversubscribed.
        if (iter <= cfg_.spin_budget)
            cpu_relax();
        else
            std::this_thread::yield();
        std::uint64_t gap = next_check_active_.load();
        if (iter % gap == 0) {
            if (elig &&
                raw_estimate() <= static_cast<std::int64_t>(cfg_.active_rejoin_threshold)) {
                next_check_active_.store(1);
                reason = AdmissionReason::active_set_empty;
                pref_empty_seen = pref_empty;
                break;
            }
            if (gap < cfg_.backoff_cap) next_check_active_.store(gap * 2);
        }
    }
    if (top_approved_.load() != 0) top_approved_.store(0);
    ingress_.fetch_add(1);

    if (AdmissionObserver obs = observer_.load()) {
        AdmissionInfo info{node->enqueue_seq, num_acqs_.load(), reason,
                           socket, preferred_.load(), pref_empty_seen,
                           rotation_epoch_.load()};
        obs(observer_ctx_, info);
    }
    q.pop_self(node);
}

void NumaGcrLock::release() {
    detail::HeldEntry held = detail::HeldStack::pop(this);
    if (held.flag) {
        std::uint64_t acqs = num_acqs_.load() + 1; // plain increment, under lock
        num_acqs_.store(acqs);

        if (socket_count() > 1 && ++acq_since_rotation_ >= cfg_.numa_epoch_length) {
            acq_since_rotation_ = 0;
            preferred_.store((preferred_.load() + 1) % socket_count());
            rotation_epoch_.fetch_add(1);
        }

        if (acqs % cfg_.fairness_threshold == 0) {
            if (!queues_[preferred_.load()].q.empty()) {
                top_approved_.store(1);
            } else if (cfg_.dynamic_enable && all_queues_empty() &&
                       raw_estimate() <=
                           static_cast<std::int64_t>(cfg_.active_rejoin_threshold)) {
                enabled_.store(false);
            }
        }
        egress_.store(egress_.load() + 1);
    }
    inner_->release();

    int slot = ContentionTable::instance().self_slot();
    if (cfg_.dynamic_enable && slot >= 0 && self_scan_schedule().due()) {
        if (!enabled_.load() &&
            contention_scan(ContentionTable::instance(), this, cfg_.contention_enable_count)) {
            enabled_.store(true);
        }
    }
    ContentionTable::instance().note_released(slot);
}

} // namespace gcr

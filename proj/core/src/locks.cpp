#include "gcr/locks.hpp"

#include <cstdio>
#include <cstdlib>

#include "gcr/detail/held.hpp"

namespace gcr {

void BackoffLock::acquire() {
    std::uint32_t delay = kMinDelay;
    for (;;) {
        if (word_.load() == 0 && word_.exchange(1) == 0) return;
        if (attempt_log) attempt_log->push_back(delay);
        for (std::uint32_t i = 0; i < delay; ++i) cpu_relax();
        if (delay < kMaxDelay) delay *= 2;
    }
}

namespace {

// Per-thread MCS node pool. A thread can hold several MCS locks at once, so
// nodes are handed out from a small free list.
struct NodePool {
    std::vector<McsLock::Node*> nodes;
    ~NodePool() {
        for (auto* n : nodes) delete n;
    }
};

std::vector<McsLock::Node*>& node_pool() {
    thread_local NodePool pool;
    return pool.nodes;
}

McsLock::Node* node_alloc() {
    auto& pool = node_pool();
    if (!pool.empty()) {
        McsLock::Node* n = pool.back();
        pool.pop_back();
        return n;
    }
    return new McsLock::Node();
}

void node_free(McsLock::Node* n) { node_pool().push_back(n); }

} // namespace

void McsLock::acquire() {
    Node* node = node_alloc();
    node->next.store(nullptr);
    node->granted.rearm();
    Node* prev = tail_.exchange(node);
    if (prev != nullptr) {
        prev->next.store(node);
        if (policy_ == WaitPolicy::spin)
            node->granted.wait_spin();
        else
            node->granted.wait();
    }
    detail::HeldStack::push(this, node, false);
}

void McsLock::release() {
    Node* node = static_cast<Node*>(detail::HeldStack::pop(this).value);
    Node* succ = node->next.load();
    if (succ == nullptr) {
        Node* expected = node;
        if (tail_.compare_exchange_strong(expected, nullptr)) {
            node_free(node);
            return;
        }
        while ((succ = node->next.load()) == nullptr) cpu_relax();
    }
    succ->granted.set_and_wake();
    node_free(node);
}

void PthreadMutexLock::acquire() {
    int rc = pthread_mutex_lock(&mutex_);
    if (rc != 0) {
        std::fprintf(stderr, "pthread_mutex_lock failed: %d\n", rc);
        std::abort();
    }
}

void PthreadMutexLock::release() {
    int rc = pthread_mutex_unlock(&mutex_);
    if (rc != 0) {
        std::fprintf(stderr, "pthread_mutex_unlock failed: %d\n", rc);
        std::abort();
    }
}

std::unique_ptr<LockCore> make_lock(std::string_view name) {
    if (name == "ttas") return std::make_unique<TtasLock>();
    if (name == "backoff") return std::make_unique<BackoffLock>();
    if (name == "ticket") return std::make_unique<TicketLock>();
    if (name == "mcs_spin") return std::make_unique<McsLock>(WaitPolicy::spin);
    if (name == "mcs_stp") return std::make_unique<McsLock>(WaitPolicy::spin_then_park);
    if (name == "pthread") return std::make_unique<PthreadMutexLock>();
    return nullptr;
}

} // namespace gcr

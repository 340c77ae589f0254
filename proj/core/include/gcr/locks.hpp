#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include <pthread.h>

#include "gcr/waiting.hpp"

namespace gcr {

/// Uniform mutual-exclusion interface. All locks here (and the restriction
/// wrappers built on top of them) are non-reentrant: a thread must not
/// acquire a lock it already holds.
class LockCore {
public:
    virtual ~LockCore() = default;
    virtual void acquire() = 0;
    virtual void release() = 0;
    virtual const char* name() const = 0;
};

enum class WaitPolicy { spin, spin_then_park };

/// Test-test-and-set spinlock.
class TtasLock final : public LockCore {
public:
    void acquire() override {
        for (;;) {
            while (word_.load() != 0) cpu_relax();
            if (word_.exchange(1) == 0) return;
        }
    }
    void release() override { word_.store(0); }
    const char* name() const override { return "ttas"; }

private:
    std::atomic<int> word_{0};
};

/// Test-and-set spinlock with bounded exponential backoff between attempts.
class BackoffLock final : public LockCore {
public:
    static constexpr std::uint32_t kMinDelay = 1u << 4;
    static constexpr std::uint32_t kMaxDelay = 1u << 16;

    void acquire() override;
    void release() override { word_.store(0); }
    const char* name() const override { return "backoff"; }

    /// Test hook: when non-null, each failed attempt appends the delay (in
    /// relax iterations) it is about to wait. Not thread-safe; set only in
    /// single-contender experiments.
    std::vector<std::uint32_t>* attempt_log = nullptr;

private:
    std::atomic<int> word_{0};
};

/// FIFO ticket lock.
class TicketLock final : public LockCore {
public:
    void acquire() override {
        std::uint64_t my = next_.fetch_add(1);
        while (serving_.load() != my) cpu_relax();
    }
    void release() override { serving_.store(serving_.load() + 1); }
    const char* name() const override { return "ticket"; }

private:
    alignas(64) std::atomic<std::uint64_t> next_{0};
    alignas(64) std::atomic<std::uint64_t> serving_{0};
};

/// MCS queue lock. Waiters spin on their own node; the waiting policy
/// selects pure spinning or spin-then-park.
class McsLock final : public LockCore {
public:
    explicit McsLock(WaitPolicy policy = WaitPolicy::spin) : policy_(policy) {}

    void acquire() override;
    void release() override;
    const char* name() const override {
        return policy_ == WaitPolicy::spin ? "mcs_spin" : "mcs_stp";
    }

    struct Node {
        std::atomic<Node*> next{nullptr};
        WaitFlag granted;
    };

private:
    alignas(64) std::atomic<Node*> tail_{nullptr};
    WaitPolicy policy_;
};

/// The operating system's default mutex.
class PthreadMutexLock final : public LockCore {
public:
    PthreadMutexLock() { pthread_mutex_init(&mutex_, nullptr); }
    ~PthreadMutexLock() override { pthread_mutex_destroy(&mutex_); }
    PthreadMutexLock(const PthreadMutexLock&) = delete;
    PthreadMutexLock& operator=(const PthreadMutexLock&) = delete;

    void acquire() override;
    void release() override;
    const char* name() const override { return "pthread"; }

private:
    pthread_mutex_t mutex_;
};

/// Known names: ttas | backoff | ticket | mcs_spin | mcs_stp | pthread.
/// Returns nullptr for unknown names.
std::unique_ptr<LockCore> make_lock(std::string_view name);

} // namespace gcr

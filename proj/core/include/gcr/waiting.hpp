#pragma once

#include <atomic>
#include <cstdint>

namespace gcr {

#if defined(__x86_64__) || defined(__i386__)
inline void cpu_relax() { __builtin_ia32_pause(); }
#elif defined(__aarch64__)
inline void cpu_relax() { asm volatile("yield" ::: "memory"); }
#else
inline void cpu_relax() { std::atomic_signal_fence(std::memory_order_seq_cst); }
#endif

/// One-shot binary event with a single waiter and any number of signalers.
/// The waiter spins for a budget and then parks on a futex. Spurious
/// wakeups (including futex wakes aimed at a previous user of the same
/// memory) are absorbed by re-checking the flag.
class WaitFlag {
public:
    static constexpr std::uint32_t kDefaultSpinBudget = 1000;

    bool is_set() const { return state_.load() == kSet; }

    /// Reset to unset. Only valid when no waiter is present.
    void rearm() {
        state_.store(kUnset);
    }

    /// Blocks until the flag is set. Spins up to spin_budget iterations
    /// first; after that the thread parks until woken.
    void wait(std::uint32_t spin_budget = kDefaultSpinBudget);

    /// Busy-waits until the flag is set (never parks).
    void wait_spin() {
        while (state_.load() != kSet) cpu_relax();
    }

    /// Sets the flag and wakes the waiter if it is parked. Idempotent.
    void set_and_wake();

    /// Number of times a waiter actually parked on this flag.
    std::uint32_t park_count() const { return parks_.load(std::memory_order_relaxed); }

private:
    static constexpr int kUnset = 0;
    static constexpr int kSet = 1;
    static constexpr int kParked = 2;

    std::atomic<int> state_{kUnset};
    std::atomic<std::uint32_t> parks_{0};
};

} // namespace gcr

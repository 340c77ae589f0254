#include "gcr/waiting.hpp"

#include <climits>

#ifdef __linux__
#include <linux/futex.h>
#include <sys/syscall.h>
#include <unistd.h>
#endif

namespace gcr {

namespace {

#ifdef __linux__
void futex_wait(std::atomic<int>* addr, int expected) {
    syscall(SYS_futex, reinterpret_cast<int*>(addr), FUTEX_WAIT_PRIVATE, expected,
            nullptr, nullptr, 0);
}

void futex_wake_one(std::atomic<int>* addr) {
    syscall(SYS_futex, reinterpret_cast<int*>(addr), FUTEX_WAKE_PRIVATE, 1,
            nullptr, nullptr, 0);
}
#else
#error "WaitFlag requires Linux futexes"
#endif

} // namespace

void WaitFlag::wait(std::uint32_t spin_budget) {
    for (std::uint32_t i = 0; i < spin_budget; ++i) {
        if (state_.load() == kSet) return;
        cpu_relax();
    }
    for (;;) {
        int s = state_.load();
        if (s == kSet) return;
        if (s == kUnset) {
            if (!state_.compare_exchange_strong(s, kParked)) continue;
            parks_.fetch_add(1, std::memory_order_relaxed);
        }
        futex_wait(&state_, kParked);
    }
}

void WaitFlag::set_and_wake() {
    int prev = state_.exchange(kSet);
    if (prev == kParked) futex_wake_one(&state_);
}

} // namespace gcr

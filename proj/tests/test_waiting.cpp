#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "gcr/waiting.hpp"

using gcr::WaitFlag;

TEST_CASE("set before wait returns immediately without parking") {
    WaitFlag f;
    f.set_and_wake();
    CHECK(f.is_set());
    f.wait(0); // must not block
    CHECK(f.park_count() == 0);
}

TEST_CASE("exhausted spin budget parks exactly once") {
    WaitFlag f;
    std::atomic<bool> started{false};
    std::thread waiter([&] {
        started.store(true);
        f.wait(0); // no spinning: park immediately
    });
    while (!started.load()) std::this_thread::yield();
    // Give the waiter time to reach the futex.
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    f.set_and_wake();
    waiter.join();
    CHECK(f.is_set());
    CHECK(f.park_count() == 1);
}

TEST_CASE("waiter inside spin budget never parks") {
    WaitFlag f;
    std::thread waiter([&] { f.wait_spin(); });
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    f.set_and_wake();
    waiter.join();
    CHECK(f.park_count() == 0);
}

TEST_CASE("rearm resets the flag for reuse") {
    WaitFlag f;
    f.set_and_wake();
    CHECK(f.is_set());
    f.rearm();
    CHECK(!f.is_set());
    f.set_and_wake();
    CHECK(f.is_set());
}

TEST_CASE("no lost wakeups across many park/wake rounds") {
    // Two threads ping-pong through two flags. A lost wakeup deadlocks the
    // loop; completion is the assertion. Small spin budgets force the futex
    // path often.
    constexpr int kRounds = 20000;
    WaitFlag a, b;
    std::atomic<int> rounds_a{0}, rounds_b{0};

    std::thread t1([&] {
        for (int i = 0; i < kRounds; ++i) {
            a.wait(8);
            a.rearm();
            rounds_a.fetch_add(1, std::memory_order_relaxed);
            b.set_and_wake();
        }
    });
    std::thread t2([&] {
        for (int i = 0; i < kRounds; ++i) {
            b.wait(8);
            b.rearm();
            rounds_b.fetch_add(1, std::memory_order_relaxed);
            if (i + 1 < kRounds) a.set_and_wake();
        }
    });

    a.set_and_wake(); // kick the first round
    t1.join();
    t2.join();
    CHECK(rounds_a.load() == kRounds);
    CHECK(rounds_b.load() == kRounds);
}

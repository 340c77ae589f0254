#include <doctest.h>

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>
#include <vector>

#include "gcr/detail/held.hpp"
#include "gcr/locks.hpp"
#include "gcr/numa.hpp"

using namespace gcr;

namespace {

thread_local int tl_socket = 0;

GcrConfig static_cfg() {
    GcrConfig cfg;
    cfg.dynamic_enable = false;
    return cfg;
}

NumaOptions two_sockets() {
    NumaOptions o;
    o.socket_count = 2;
    o.socket_of = [] { return tl_socket; };
    return o;
}

/// One fast-path acquisition never matched by a release: pins the
/// active-set estimate. The caller keeps the raw inner pointer so the
/// inner lock can be handed back.
void phantom_active(NumaGcrLock& g, LockCore* inner) {
    g.acquire();
    inner->release();
    detail::HeldStack::pop(&g);
}

/// Release bookkeeping without a matching acquire. Releasing the free
/// test-and-set inner lock a second time is a harmless store.
void simulate_release(NumaGcrLock& g) {
    detail::HeldStack::push(&g, nullptr, true);
    g.release();
}

struct AdmissionLog {
    std::mutex mu;
    std::vector<AdmissionInfo> infos;

    static void callback(void* ctx, const AdmissionInfo& info) {
        auto* self = static_cast<AdmissionLog*>(ctx);
        std::lock_guard<std::mutex> g(self->mu);
        self->infos.push_back(info);
    }

    std::size_t size() {
        std::lock_guard<std::mutex> g(mu);
        return infos.size();
    }
};

} // namespace

TEST_CASE("socket count follows the injected topology") {
    auto inner = make_lock("ttas");
    NumaGcrLock g(std::move(inner), static_cfg(), two_sockets());
    CHECK(g.socket_count() == 2);
    CHECK(g.preferred_socket() == 0);
    CHECK(g.rotation_epoch() == 0);
    CHECK(std::string(g.name()) == "gcr_numa");

    NumaGcrLock platform(make_lock("ttas"), static_cfg());
    CHECK(platform.socket_count() >= 1);
}

TEST_CASE("preferred socket rotates round-robin once per epoch") {
    GcrConfig cfg = static_cfg();
    cfg.passive_threshold = 100;
    cfg.numa_epoch_length = 4;
    NumaGcrLock g(make_lock("ttas"), cfg, two_sockets());

    tl_socket = 0;
    for (int i = 0; i < 3; ++i) {
        g.acquire();
        g.release();
    }
    CHECK(g.preferred_socket() == 0); // epoch not yet full
    CHECK(g.rotation_epoch() == 0);

    g.acquire();
    g.release(); // 4th acquisition completes the epoch
    CHECK(g.preferred_socket() == 1);
    CHECK(g.rotation_epoch() == 1);

    for (int i = 0; i < 4; ++i) {
        g.acquire();
        g.release();
    }
    CHECK(g.preferred_socket() == 0); // wrapped around
    CHECK(g.rotation_epoch() == 2);
}

TEST_CASE("single-socket topology never rotates") {
    GcrConfig cfg = static_cfg();
    cfg.passive_threshold = 100;
    cfg.numa_epoch_length = 2;
    NumaOptions one;
    one.socket_count = 1;
    one.socket_of = [] { return 0; };
    NumaGcrLock g(make_lock("ttas"), cfg, one);
    for (int i = 0; i < 10; ++i) {
        g.acquire();
        g.release();
    }
    CHECK(g.preferred_socket() == 0);
    CHECK(g.rotation_epoch() == 0);
}

TEST_CASE("socket lookups are cached and refreshed on schedule") {
    GcrConfig cfg = static_cfg();
    cfg.passive_threshold = 100;
    NumaOptions numa;
    numa.socket_count = 2;
    numa.refresh_interval = 2;
    std::atomic<int> lookups{0};
    numa.socket_of = [&lookups] {
        lookups.fetch_add(1);
        return 0;
    };
    NumaGcrLock g(make_lock("ttas"), cfg, numa);

    // Fresh thread: its cache cannot hold a stale entry for this lock.
    std::thread t([&] {
        for (int i = 0; i < 5; ++i) {
            g.acquire();
            g.release();
        }
    });
    t.join();
    // Miss on acquisition 1, two cached hits, miss on 4, cached hit on 5.
    CHECK(lookups.load() == 2);
}

TEST_CASE("threads off the preferred socket enqueue locally without consulting the estimate") {
    GcrConfig cfg = static_cfg();
    cfg.passive_threshold = 10;
    cfg.active_rejoin_threshold = 0;
    auto inner_owned = make_lock("ttas");
    LockCore* inner = inner_owned.get();
    NumaGcrLock g(std::move(inner_owned), cfg, two_sockets());
    AdmissionLog log;
    g.set_admission_observer(&AdmissionLog::callback, &log);

    tl_socket = 0;
    for (int i = 0; i < 10; ++i) phantom_active(g, inner); // estimate 10

    // P (socket 0, the preferred socket) hits the passive threshold and
    // parks in queue 0.
    std::thread p([&] {
        tl_socket = 0;
        g.acquire();
        g.release();
    });
    while (g.queue(0).empty()) std::this_thread::yield();

    // Nine simulated releases bring the estimate down to 1 — below the
    // passive threshold. T still must not take the fast path: queue 0 is
    // non-empty and T runs on socket 1, so it is ineligible.
    for (int i = 0; i < 9; ++i) simulate_release(g);
    CHECK(g.active_estimate() == 1);

    std::thread t([&] {
        tl_socket = 1;
        g.acquire();
        g.release();
    });
    while (g.queue(1).empty()) std::this_thread::yield();
    CHECK(!g.queue(0).empty()); // P still parked: nobody was admitted yet
    CHECK(log.size() == 0);

    // Draining the active set admits P first (its socket is preferred);
    // with queue 0 empty, T follows.
    simulate_release(g);
    p.join();
    t.join();

    REQUIRE(log.size() == 2);
    CHECK(log.infos[0].socket == 0);
    CHECK(log.infos[0].preferred_socket == 0);
    CHECK(log.infos[1].socket == 1);
    CHECK(log.infos[1].preferred_queue_empty); // admitted only because queue 0 drained
    CHECK(g.queue(0).empty());
    CHECK(g.queue(1).empty());
}

TEST_CASE("fairness epoch signals the preferred queue's head") {
    GcrConfig cfg = static_cfg();
    cfg.passive_threshold = 5;
    cfg.active_rejoin_threshold = 0;
    cfg.fairness_threshold = 4;
    auto inner_owned = make_lock("ttas");
    LockCore* inner = inner_owned.get();
    NumaGcrLock g(std::move(inner_owned), cfg, two_sockets());
    AdmissionLog log;
    g.set_admission_observer(&AdmissionLog::callback, &log);

    tl_socket = 0;
    for (int i = 0; i < 5; ++i) phantom_active(g, inner); // estimate 5

    std::thread w([&] {
        tl_socket = 0;
        g.acquire();
        g.release();
    });
    while (g.queue(0).empty()) std::this_thread::yield();

    // Four releases cross the fairness epoch while the estimate stays at
    // 1 or above, so the head can only enter by being signaled.
    for (int i = 0; i < 4; ++i) simulate_release(g);
    w.join();

    REQUIRE(log.size() == 1);
    CHECK(log.infos[0].reason == AdmissionReason::signaled);
    CHECK(log.infos[0].socket == 0);
    CHECK(log.infos[0].num_acqs == 4);
}

TEST_CASE("socket-aware restriction is exclusive and drains under stress") {
    GcrConfig cfg = static_cfg();
    cfg.passive_threshold = 2;
    cfg.active_rejoin_threshold = 2;
    cfg.fairness_threshold = 64;
    cfg.numa_epoch_length = 128;
    NumaGcrLock g(make_lock("mcs_spin"), cfg, two_sockets());

    constexpr int kThreads = 8;
    constexpr int kIters = 1500;
    std::uint64_t counter = 0;
    std::atomic<int> in_cs{0};
    std::atomic<std::uint64_t> violations{0};
    std::vector<std::thread> workers;
    for (int t = 0; t < kThreads; ++t) {
        workers.emplace_back([&, t] {
            tl_socket = t % 2;
            for (int i = 0; i < kIters; ++i) {
                g.acquire();
                if (in_cs.fetch_add(1) != 0) violations.fetch_add(1);
                ++counter;
                in_cs.fetch_sub(1);
                g.release();
            }
        });
    }
    for (auto& w : workers) w.join();

    CHECK(violations.load() == 0);
    CHECK(counter == static_cast<std::uint64_t>(kThreads) * kIters);
    CHECK(g.acquisitions() == static_cast<std::uint64_t>(kThreads) * kIters);
    CHECK(g.active_estimate() == 0);
    CHECK(g.queue(0).empty());
    CHECK(g.queue(1).empty());
    CHECK(g.rotation_epoch() >= 2); // several full rotations happened
}

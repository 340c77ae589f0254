// LD_PRELOAD shim: routes pthread_mutex_lock/unlock through the
// concurrency-restriction wrapper so unmodified dynamically linked
// binaries get restriction on their mutexes.
//
// trylock and timed variants are forwarded untouched (admission is
// blocking by nature). A mutex seen in a condition wait is switched to
// passthrough: the wait releases the mutex inside the OS, invisible to
// the wrapper's counters.

#include <dlfcn.h>
#include <pthread.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <unordered_map>

#include "gcr/config.hpp"
#include "gcr/gcr.hpp"
#include "gcr/locks.hpp"
#include "gcr/numa.hpp"
#include "gcr/waiting.hpp"

namespace {

using MutexFn = int (*)(pthread_mutex_t*);
using CondWaitFn = int (*)(pthread_cond_t*, pthread_mutex_t*);
using CondTimedWaitFn = int (*)(pthread_cond_t*, pthread_mutex_t*, const struct timespec*);

struct RealFns {
    MutexFn lock;
    MutexFn unlock;
    MutexFn trylock;
    MutexFn destroy;
    CondWaitFn cond_wait;
    CondTimedWaitFn cond_timedwait;
};

const RealFns& real() {
    static RealFns fns = [] {
        RealFns f;
        f.lock = reinterpret_cast<MutexFn>(dlsym(RTLD_NEXT, "pthread_mutex_lock"));
        f.unlock = reinterpret_cast<MutexFn>(dlsym(RTLD_NEXT, "pthread_mutex_unlock"));
        f.trylock = reinterpret_cast<MutexFn>(dlsym(RTLD_NEXT, "pthread_mutex_trylock"));
        f.destroy = reinterpret_cast<MutexFn>(dlsym(RTLD_NEXT, "pthread_mutex_destroy"));
        // Condition variables changed layout at glibc 2.3.2; dlsym returns
        // the oldest compat version, which hangs against modern condvars.
        // Ask for the current version explicitly, falling back for non-glibc.
        f.cond_wait = reinterpret_cast<CondWaitFn>(
            dlvsym(RTLD_NEXT, "pthread_cond_wait", "GLIBC_2.3.2"));
        if (!f.cond_wait)
            f.cond_wait = reinterpret_cast<CondWaitFn>(dlsym(RTLD_NEXT, "pthread_cond_wait"));
        f.cond_timedwait = reinterpret_cast<CondTimedWaitFn>(
            dlvsym(RTLD_NEXT, "pthread_cond_timedwait", "GLIBC_2.3.2"));
        if (!f.cond_timedwait)
            f.cond_timedwait =
                reinterpret_cast<CondTimedWaitFn>(dlsym(RTLD_NEXT, "pthread_cond_timedwait"));
        if (!f.lock || !f.unlock || !f.trylock || !f.destroy) {
            std::fprintf(stderr, "gcr shim: cannot resolve pthread symbols\n");
            std::abort();
        }
        return f;
    }();
    return fns;
}

thread_local int tl_inner_status = 0;

// Adapter making the wrapper's inner acquire/release hit the real (not
// interposed) pthread functions on the foreign mutex.
class ForeignMutexCore final : public gcr::LockCore {
public:
    explicit ForeignMutexCore(pthread_mutex_t* m) : mutex_(m) {}
    void acquire() override { tl_inner_status = real().lock(mutex_); }
    void release() override { tl_inner_status = real().unlock(mutex_); }
    const char* name() const override { return "foreign_pthread"; }

private:
    pthread_mutex_t* mutex_;
};

struct MutexEntry {
    std::unique_ptr<gcr::LockCore> wrapper;
    gcr::GcrLock* gcr = nullptr;         // set when mode is "on"
    gcr::NumaGcrLock* numa = nullptr;    // set when mode is "numa"
    std::atomic<bool> bypass{false};     // sticky: condition-wait interop

    bool held_by_caller() const {
        return gcr ? gcr->held_by_caller() : numa->held_by_caller();
    }
};

MutexEntry* make_entry(pthread_mutex_t* m) {
    auto* e = new MutexEntry();
    auto inner = std::make_unique<ForeignMutexCore>(m);
    const char* mode = std::getenv("GCR_MODE");
    gcr::GcrConfig cfg = gcr::GcrConfig::from_env();
    if (mode && std::string_view(mode) == "numa") {
        auto lock = std::make_unique<gcr::NumaGcrLock>(std::move(inner), cfg);
        e->numa = lock.get();
        e->wrapper = std::move(lock);
    } else {
        auto lock = std::make_unique<gcr::GcrLock>(std::move(inner), cfg);
        e->gcr = lock.get();
        e->wrapper = std::move(lock);
    }
    return e;
}

// Sharded registry: foreign mutex identity -> wrapper state. Shards use a
// private spinlock so registry maintenance never re-enters the interposed
// symbols.
class Registry {
public:
    static constexpr std::size_t kShards = 64;

    MutexEntry* get_or_create(pthread_mutex_t* m) {
        Shard& s = shard(m);
        ShardGuard g(s);
        auto it = s.map.find(m);
        if (it != s.map.end()) return it->second;
        MutexEntry* e = make_entry(m);
        s.map.emplace(m, e);
        return e;
    }

    MutexEntry* find(pthread_mutex_t* m) {
        Shard& s = shard(m);
        ShardGuard g(s);
        auto it = s.map.find(m);
        return it == s.map.end() ? nullptr : it->second;
    }

    void erase(pthread_mutex_t* m) {
        Shard& s = shard(m);
        MutexEntry* e = nullptr;
        {
            ShardGuard g(s);
            auto it = s.map.find(m);
            if (it != s.map.end()) {
                e = it->second;
                s.map.erase(it);
            }
        }
        delete e;
    }

    std::size_t size() {
        std::size_t n = 0;
        for (auto& s : shards_) {
            ShardGuard g(s);
            n += s.map.size();
        }
        return n;
    }

private:
    struct Shard {
        std::atomic<int> guard{0};
        std::unordered_map<pthread_mutex_t*, MutexEntry*> map;
    };

    struct ShardGuard {
        explicit ShardGuard(Shard& s) : shard(s) {
            while (shard.guard.exchange(1) != 0) gcr::cpu_relax();
        }
        ~ShardGuard() { shard.guard.store(0); }
        Shard& shard;
    };

    Shard& shard(pthread_mutex_t* m) {
        auto h = reinterpret_cast<std::uintptr_t>(m);
        return shards_[(h >> 6) % kShards];
    }

    Shard shards_[kShards];
};

Registry& registry() {
    static Registry* r = new Registry(); // never destroyed; threads may outlive main
    return *r;
}

} // namespace

extern "C" {

int pthread_mutex_lock(pthread_mutex_t* m) {
    MutexEntry* e = registry().get_or_create(m);
    if (e->bypass.load()) return real().lock(m);
    e->wrapper->acquire();
    return tl_inner_status;
}

int pthread_mutex_unlock(pthread_mutex_t* m) {
    MutexEntry* e = registry().find(m);
    if (e && e->held_by_caller()) {
        e->wrapper->release();
        return tl_inner_status;
    }
    return real().unlock(m);
}

int pthread_mutex_trylock(pthread_mutex_t* m) {
    return real().trylock(m);
}

int pthread_mutex_destroy(pthread_mutex_t* m) {
    registry().erase(m);
    return real().destroy(m);
}

int pthread_cond_wait(pthread_cond_t* c, pthread_mutex_t* m) {
    MutexEntry* e = registry().find(m);
    if (e) {
        if (e->held_by_caller()) {
            // The wait releases the inner mutex behind our back; settle the
            // wrapper's books now and stop wrapping this mutex.
            if (e->gcr) {
                e->gcr->release_bookkeeping();
                e->gcr->post_release_scan();
            } else {
                // NUMA wrapper has no split bookkeeping entry point; the
                // bypass below keeps future cycles consistent, and this
                // cycle's egress is intentionally dropped (estimate skew
                // only).
            }
        }
        e->bypass.store(true);
    }
    return real().cond_wait(c, m);
}

int pthread_cond_timedwait(pthread_cond_t* c, pthread_mutex_t* m, const struct timespec* ts) {
    MutexEntry* e = registry().find(m);
    if (e) {
        if (e->held_by_caller() && e->gcr) {
            e->gcr->release_bookkeeping();
            e->gcr->post_release_scan();
        }
        e->bypass.store(true);
    }
    return real().cond_timedwait(c, m, ts);
}

/// Test probe: number of mutexes currently tracked by the shim.
std::size_t gcr_shim_registry_size() {
    return registry().size();
}

} // extern "C"

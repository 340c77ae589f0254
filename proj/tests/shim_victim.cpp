// Plain pthread test program for the mutex-interposition library. Each mode
// prints deterministic output; a preloaded wrapper library must not change
// it. Exit code 0 on success, 1 on any detected anomaly.

#include <dlfcn.h>
#include <errno.h>
#include <pthread.h>

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

namespace {

// 4 threads increment a mutex-protected counter; an occupancy flag detects
// any mutual-exclusion failure.
int mode_contend(int iters) {
    pthread_mutex_t mu = PTHREAD_MUTEX_INITIALIZER;
    struct Shared {
        pthread_mutex_t* mu;
        long counter = 0;
        int in_cs = 0;
        long violations = 0;
        int iters;
    } shared{&mu, 0, 0, 0, iters};

    auto worker = [](void* arg) -> void* {
        auto* s = static_cast<Shared*>(arg);
        for (int i = 0; i < s->iters; ++i) {
            pthread_mutex_lock(s->mu);
            if (++s->in_cs != 1) ++s->violations;
            ++s->counter;
            --s->in_cs;
            pthread_mutex_unlock(s->mu);
        }
        return nullptr;
    };

    pthread_t threads[4];
    for (auto& t : threads) pthread_create(&t, nullptr, worker, &shared);
    for (auto& t : threads) pthread_join(t, nullptr);
    pthread_mutex_destroy(&mu);

    std::printf("counter=%ld violations=%ld\n", shared.counter, shared.violations);
    return shared.violations == 0 && shared.counter == 4L * iters ? 0 : 1;
}

// Single producer / single consumer over a condition variable: exercises
// pthread_cond_wait releasing and re-taking the mutex.
int mode_cond() {
    pthread_mutex_t mu = PTHREAD_MUTEX_INITIALIZER;
    pthread_cond_t cv = PTHREAD_COND_INITIALIZER;
    struct Shared {
        pthread_mutex_t* mu;
        pthread_cond_t* cv;
        std::vector<int> queue;
        bool done = false;
        long sum = 0;
    } shared{&mu, &cv, {}, false, 0};

    auto consumer = [](void* arg) -> void* {
        auto* s = static_cast<Shared*>(arg);
        pthread_mutex_lock(s->mu);
        for (;;) {
            while (s->queue.empty() && !s->done) pthread_cond_wait(s->cv, s->mu);
            if (s->queue.empty()) break;
            s->sum += s->queue.back();
            s->queue.pop_back();
        }
        pthread_mutex_unlock(s->mu);
        return nullptr;
    };

    pthread_t t;
    pthread_create(&t, nullptr, consumer, &shared);
    for (int i = 1; i <= 100; ++i) {
        pthread_mutex_lock(&mu);
        shared.queue.push_back(i);
        pthread_cond_signal(&cv);
        pthread_mutex_unlock(&mu);
    }
    pthread_mutex_lock(&mu);
    shared.done = true;
    pthread_cond_broadcast(&cv);
    pthread_mutex_unlock(&mu);
    pthread_join(t, nullptr);
    pthread_mutex_destroy(&mu);
    pthread_cond_destroy(&cv);

    std::printf("sum=%ld\n", shared.sum);
    return shared.sum == 5050 ? 0 : 1;
}

// Trylock semantics must survive interposition: EBUSY while held, 0 when
// free, and a trylock-taken mutex unlocks cleanly.
int mode_trylock() {
    pthread_mutex_t mu = PTHREAD_MUTEX_INITIALIZER;
    struct Shared {
        pthread_mutex_t* mu;
        int busy_rc = 0;
    } shared{&mu, 0};

    pthread_mutex_lock(&mu);
    pthread_t t;
    pthread_create(
        &t, nullptr,
        [](void* arg) -> void* {
            auto* s = static_cast<Shared*>(arg);
            s->busy_rc = pthread_mutex_trylock(s->mu);
            return nullptr;
        },
        &shared);
    pthread_join(t, nullptr);
    pthread_mutex_unlock(&mu);

    int free_rc = pthread_mutex_trylock(&mu);
    if (free_rc == 0) pthread_mutex_unlock(&mu);
    pthread_mutex_destroy(&mu);

    std::printf("busy=%s free=%d\n", shared.busy_rc == EBUSY ? "EBUSY" : "other", free_rc);
    return shared.busy_rc == EBUSY && free_rc == 0 ? 0 : 1;
}

// Creates and destroys many mutexes. When the interposition library is
// loaded, its registry must not grow without bound; its size probe is
// looked up dynamically so the binary also runs bare.
int mode_churn() {
    for (int i = 0; i < 10000; ++i) {
        pthread_mutex_t mu = PTHREAD_MUTEX_INITIALIZER;
        pthread_mutex_lock(&mu);
        pthread_mutex_unlock(&mu);
        pthread_mutex_destroy(&mu);
    }
    using SizeFn = std::size_t (*)();
    auto probe = reinterpret_cast<SizeFn>(dlsym(RTLD_DEFAULT, "gcr_shim_registry_size"));
    if (!probe) {
        std::printf("registry=n/a\n");
        return 0;
    }
    std::size_t size = probe();
    std::printf("registry=%zu\n", size);
    return size <= 4 ? 0 : 1; // a few long-lived internal mutexes are fine
}

// One mutex reused across lock/unlock cycles: the registry must keep a
// single entry for it.
int mode_reuse() {
    pthread_mutex_t mu = PTHREAD_MUTEX_INITIALIZER;
    long acquired = 0;
    for (int i = 0; i < 10000; ++i) {
        pthread_mutex_lock(&mu);
        ++acquired;
        pthread_mutex_unlock(&mu);
    }
    std::printf("acquired=%ld\n", acquired);
    pthread_mutex_destroy(&mu);
    return acquired == 10000 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    std::string mode = argc > 1 ? argv[1] : "contend";
    if (mode == "contend") return mode_contend(argc > 2 ? std::atoi(argv[2]) : 20000);
    if (mode == "cond") return mode_cond();
    if (mode == "trylock") return mode_trylock();
    if (mode == "churn") return mode_churn();
    if (mode == "reuse") return mode_reuse();
    std::fprintf(stderr, "unknown mode: %s\n", mode.c_str());
    return 2;
}

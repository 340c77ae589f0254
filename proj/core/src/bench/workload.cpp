#include "gcr/bench/workload.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "gcr/bench/avl_map.hpp"
#include "gcr/gcr.hpp"

namespace gcr::bench {

void WorkloadConfig::validate() const {
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (duration_s < 0) throw std::invalid_argument("duration must be >= 0");
    if (key_range <= 0) throw std::invalid_argument("key range must be > 0");
    if (lookup_pct < 0 || insert_pct < 0 || remove_pct < 0 ||
        lookup_pct + insert_pct + remove_pct != 100)
        throw std::invalid_argument("operation percentages must sum to 100");
    if (gcr_mode != "off" && gcr_mode != "on" && gcr_mode != "numa")
        throw std::invalid_argument("unknown gcr mode: " + gcr_mode);
    if (!make_lock(lock_name))
        throw std::invalid_argument("unknown lock: " + lock_name);
}

std::uint64_t non_critical_work(std::uint64_t seed, std::uint64_t iters) {
    // xorshift64; cheap and impossible to elide since the state is returned.
    std::uint64_t x = seed ? seed : 0x9e3779b97f4a7c15ull;
    for (std::uint64_t i = 0; i < iters; ++i) {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
    }
    return x;
}

double unfairness(std::vector<std::uint64_t> counts) {
    if (counts.empty()) return 0.5;
    std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total == 0) return 0.5;
    std::sort(counts.begin(), counts.end(), std::greater<>());
    std::size_t upper = (counts.size() + 1) / 2;
    std::uint64_t top = std::accumulate(counts.begin(), counts.begin() + upper,
                                        std::uint64_t{0});
    return static_cast<double>(top) / static_cast<double>(total);
}

std::int64_t HandoffRecorder::now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::unique_ptr<LockCore> make_workload_lock(const std::string& lock_name,
                                             const std::string& gcr_mode,
                                             const GcrConfig& cfg,
                                             const NumaOptions& numa) {
    auto inner = make_lock(lock_name);
    if (!inner) throw std::invalid_argument("unknown lock: " + lock_name);
    if (gcr_mode == "off") return inner;
    if (gcr_mode == "on") return std::make_unique<GcrLock>(std::move(inner), cfg);
    if (gcr_mode == "numa")
        return std::make_unique<NumaGcrLock>(std::move(inner), cfg, numa);
    throw std::invalid_argument("unknown gcr mode: " + gcr_mode);
}

namespace {

// Latest-samples ring per thread; large runs produce far more handoff
// samples than we want to keep.
class SampleRing {
public:
    static constexpr std::size_t kCapacity = 1u << 16;

    void add(std::int64_t v) {
        ++seen_;
        if (samples_.size() < kCapacity)
            samples_.push_back(v);
        else
            samples_[seen_ % kCapacity] = v;
    }

    std::uint64_t seen() const { return seen_; }
    const std::vector<std::int64_t>& samples() const { return samples_; }

private:
    std::vector<std::int64_t> samples_;
    std::uint64_t seen_ = 0;
};

struct ThreadResult {
    std::uint64_t ops = 0;
    std::uint64_t lookups = 0;
    std::uint64_t inserts = 0;
    std::uint64_t removes = 0;
    std::uint64_t ncs_sink = 0;
    SampleRing handoffs;
};

double percentile(std::vector<std::int64_t>& v, double p) {
    if (v.empty()) return 0.0;
    std::size_t idx = static_cast<std::size_t>(p * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + idx, v.end());
    return static_cast<double>(v[idx]);
}

} // namespace

RunMetrics run_workload(const WorkloadConfig& cfg, LockCore& lock) {
    cfg.validate();

    RunMetrics metrics;
    metrics.per_thread_ops.assign(static_cast<std::size_t>(cfg.threads), 0);
    if (cfg.duration_s == 0) {
        metrics.unfairness = 0.5;
        return metrics;
    }

    AvlMap tree;
    {
        // Pre-fill with half of the key range.
        std::mt19937_64 rng(cfg.seed);
        std::vector<std::int64_t> keys(static_cast<std::size_t>(cfg.key_range));
        std::iota(keys.begin(), keys.end(), 0);
        std::shuffle(keys.begin(), keys.end(), rng);
        for (int i = 0; i < cfg.key_range / 2; ++i)
            tree.insert(keys[static_cast<std::size_t>(i)], keys[static_cast<std::size_t>(i)] * 3);
    }

    HandoffRecorder handoff;
    std::atomic<bool> measuring{false};
    std::atomic<bool> stop{false};
    std::barrier ready(cfg.threads + 1);
    std::vector<ThreadResult> results(static_cast<std::size_t>(cfg.threads));
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(cfg.threads));

    for (int t = 0; t < cfg.threads; ++t) {
        workers.emplace_back([&, t] {
            ThreadResult& res = results[static_cast<std::size_t>(t)];
            std::mt19937_64 rng(cfg.seed + 0x9e37u + static_cast<std::uint64_t>(t));
            std::uniform_int_distribution<int> op_dist(0, 99);
            std::uniform_int_distribution<std::int64_t> key_dist(0, cfg.key_range - 1);
            std::uint64_t ncs_state = cfg.seed ^ static_cast<std::uint64_t>(t + 1);

            ready.arrive_and_wait();
            while (!stop.load(std::memory_order_relaxed)) {
                int op = op_dist(rng);
                std::int64_t key = key_dist(rng);
                // With no warmup phase every operation is counted, which
                // keeps per-thread op counts equal to lock acquisitions
                // (the counter-conservation tests rely on this).
                bool measured = cfg.warmup_s == 0.0 ||
                                measuring.load(std::memory_order_relaxed);

                lock.acquire();
                std::int64_t sample = measured ? handoff.after_acquire() : -1;
                if (op < cfg.lookup_pct) {
                    tree.lookup(key);
                    if (measured) ++res.lookups;
                } else if (op < cfg.lookup_pct + cfg.insert_pct) {
                    tree.insert(key, key * 3);
                    if (measured) ++res.inserts;
                } else {
                    tree.remove(key);
                    if (measured) ++res.removes;
                }
                handoff.before_release();
                lock.release();

                if (measured) {
                    ++res.ops;
                    if (sample >= 0) res.handoffs.add(sample);
                }
                ncs_state = non_critical_work(ncs_state, cfg.ncs_iters);
            }
            res.ncs_sink = ncs_state;
        });
    }

    ready.arrive_and_wait();
    auto sleep_for = [](double seconds) {
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    };
    sleep_for(cfg.warmup_s);
    auto start = std::chrono::steady_clock::now();
    measuring.store(true);
    sleep_for(cfg.duration_s);
    measuring.store(false);
    auto end = std::chrono::steady_clock::now();
    stop.store(true);
    for (auto& w : workers) w.join();

    metrics.duration_s = std::chrono::duration<double>(end - start).count();
    std::vector<std::int64_t> all_samples;
    double sample_sum = 0.0;
    for (int t = 0; t < cfg.threads; ++t) {
        const ThreadResult& res = results[static_cast<std::size_t>(t)];
        metrics.per_thread_ops[static_cast<std::size_t>(t)] = res.ops;
        metrics.total_ops += res.ops;
        metrics.lookups += res.lookups;
        metrics.inserts += res.inserts;
        metrics.removes += res.removes;
        metrics.handoff_count += res.handoffs.seen();
        for (std::int64_t s : res.handoffs.samples()) {
            all_samples.push_back(s);
            sample_sum += static_cast<double>(s);
        }
    }
    metrics.throughput = metrics.duration_s > 0
                             ? static_cast<double>(metrics.total_ops) / metrics.duration_s
                             : 0.0;
    if (!all_samples.empty()) {
        metrics.handoff_mean_ns = sample_sum / static_cast<double>(all_samples.size());
        metrics.handoff_p50_ns = percentile(all_samples, 0.50);
        metrics.handoff_p99_ns = percentile(all_samples, 0.99);
    }
    metrics.unfairness = unfairness(metrics.per_thread_ops);
    return metrics;
}

RunMetrics run_workload(const WorkloadConfig& cfg) {
    cfg.validate();
    auto lock = make_workload_lock(cfg.lock_name, cfg.gcr_mode, GcrConfig::from_env());
    return run_workload(cfg, *lock);
}

} // namespace gcr::bench

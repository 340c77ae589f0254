#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "gcr/config.hpp"
#include "gcr/contention_table.hpp"
#include "gcr/gcr.hpp"
#include "gcr/locks.hpp"
#include "gcr/passive_queue.hpp"

namespace gcr {

/// Topology hooks for the NUMA-aware wrapper. socket_of is invoked on the
/// calling thread and may be injected for testing; by default the platform
/// is queried. Results are cached per thread and refreshed every
/// refresh_interval acquisitions.
struct NumaOptions {
    int socket_count = 0;                // 0 = query the platform
    std::function<int()> socket_of;      // empty = query the platform
    std::uint32_t refresh_interval = 64;
};

/// NUMA-aware concurrency restriction: one passive queue per socket and a
/// preferred socket rotated round-robin every epoch_length acquisitions.
/// A thread may compete for the active set only while it runs on the
/// preferred socket or the preferred socket's queue is empty; everyone
/// else is parked on their own socket's queue.
class NumaGcrLock final : public LockCore {
public:
    NumaGcrLock(std::unique_ptr<LockCore> inner, GcrConfig cfg = GcrConfig{},
                NumaOptions numa = NumaOptions{});

    void acquire() override;
    void release() override;
    const char* name() const override { return "gcr_numa"; }

    std::int64_t active_estimate() const {
        std::int64_t d = raw_estimate();
        return d < 0 ? 0 : d;
    }
    std::uint64_t acquisitions() const { return num_acqs_.load(); }
    bool enabled() const { return enabled_.load(); }
    int preferred_socket() const { return preferred_.load(); }
    std::uint64_t rotation_epoch() const { return rotation_epoch_.load(); }
    int socket_count() const { return static_cast<int>(queues_.size()); }
    const PassiveQueue& queue(int socket) const { return queues_[socket].q; }
    bool held_by_caller() const;

    void set_admission_observer(AdmissionObserver obs, void* ctx) {
        observer_ctx_ = ctx;
        observer_ = obs;
    }

private:
    struct alignas(64) SocketQueue {
        PassiveQueue q;
    };

    std::int64_t raw_estimate() const {
        std::uint64_t in = ingress_.load();
        std::uint64_t out = egress_.load();
        return static_cast<std::int64_t>(in) - static_cast<std::int64_t>(out);
    }

    bool eligible(int socket) const {
        int pref = preferred_.load();
        return socket == pref || queues_[pref].q.empty();
    }

    int socket_of_self();
    void slow_path(int socket);
    bool all_queues_empty() const;

    std::unique_ptr<LockCore> inner_;
    GcrConfig cfg_;
    NumaOptions numa_;
    std::vector<SocketQueue> queues_;

    alignas(64) std::atomic<std::uint64_t> ingress_{0};
    alignas(64) std::atomic<std::uint64_t> egress_{0};
    alignas(64) std::atomic<std::uint64_t> num_acqs_{0};
    alignas(64) std::atomic<std::uint64_t> next_check_active_{1};
    alignas(64) std::atomic<int> top_approved_{0};
    alignas(64) std::atomic<int> preferred_{0};
    std::atomic<std::uint64_t> rotation_epoch_{0};
    std::uint64_t acq_since_rotation_ = 0; // written under the inner lock
    std::atomic<bool> enabled_;

    std::atomic<AdmissionObserver> observer_{nullptr};
    void* observer_ctx_ = nullptr;
};

} // namespace gcr

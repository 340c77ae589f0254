#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>

namespace gcr {

/// Process-wide table answering "how many threads are currently trying to
/// acquire lock X". Each thread owns one slot and stores the identity of
/// the lock it is about to acquire there, clearing it after release. A
/// releasing thread occasionally scans the table to decide whether
/// restriction should be enabled for the lock it just released.
///
/// Threads beyond the fixed capacity get slot -1; callers treat such
/// threads as if restriction were always enabled.
class ContentionTable {
public:
    static constexpr std::size_t kSlots = 1024;

    static ContentionTable& instance();

    /// Slot of the calling thread; registers on first use, releases the
    /// slot at thread exit. Returns -1 when the table is full.
    int self_slot();

    void note_acquiring(int slot, const void* lock_id) {
        if (slot >= 0) slots_[slot].value.store(lock_id);
    }

    void note_released(int slot) {
        if (slot >= 0) slots_[slot].value.store(nullptr);
    }

    /// Number of slots currently registered on lock_id.
    std::size_t count(const void* lock_id) const;

    // Slot lifetime management; used by the per-thread lease in the
    // implementation file. Prefer self_slot().
    int take_slot();
    void give_slot(int slot);

private:
    struct alignas(64) Slot {
        std::atomic<const void*> value{nullptr};
    };

    Slot slots_[kSlots];

    // Free-slot stack, guarded by a tiny spinlock so that exiting threads
    // can return their slot.
    std::atomic<int> guard_{0};
    int free_[kSlots];
    std::size_t free_count_ = 0;
    std::size_t next_unused_ = 0;
};

/// Per-thread scan schedule: the period between scans doubles after each
/// scan, up to a cap, so long-running threads scan rarely.
class ScanSchedule {
public:
    static constexpr std::uint64_t kPeriodCap = 1u << 12;

    /// Called once per lock release; true when a scan is due now.
    bool due() {
        if (++releases_ < next_scan_) return false;
        period_ = period_ < kPeriodCap ? period_ * 2 : kPeriodCap;
        next_scan_ = releases_ + period_;
        return true;
    }

    std::uint64_t period() const { return period_; }

private:
    std::uint64_t releases_ = 0;
    std::uint64_t next_scan_ = 1;
    std::uint64_t period_ = 1;
};

ScanSchedule& self_scan_schedule();

/// Counts threads registered on lock_id; the enable decision.
inline bool contention_scan(const ContentionTable& t, const void* lock_id,
                            std::uint64_t enable_count) {
    return t.count(lock_id) >= enable_count;
}

} // namespace gcr

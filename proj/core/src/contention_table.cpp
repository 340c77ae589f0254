#include "gcr/contention_table.hpp"

#include "gcr/waiting.hpp"

namespace gcr {

namespace {

struct TableGuard {
    explicit TableGuard(std::atomic<int>& g) : guard(g) {
        while (guard.exchange(1) != 0) cpu_relax();
    }
    ~TableGuard() { guard.store(0); }
    std::atomic<int>& guard;
};

// RAII holder so a thread returns its slot when it exits.
class SlotLease {
public:
    SlotLease();
    ~SlotLease();
    int slot() const { return slot_; }

private:
    int slot_ = -1;
};

} // namespace

ContentionTable& ContentionTable::instance() {
    static ContentionTable table;
    return table;
}

int ContentionTable::self_slot() {
    thread_local SlotLease lease;
    return lease.slot();
}

std::size_t ContentionTable::count(const void* lock_id) const {
    std::size_t n = 0;
    for (const auto& s : slots_)
        if (s.value.load() == lock_id) ++n;
    return n;
}

int ContentionTable::take_slot() {
    TableGuard g(guard_);
    if (free_count_ > 0) return free_[--free_count_];
    if (next_unused_ < kSlots) return static_cast<int>(next_unused_++);
    return -1;
}

void ContentionTable::give_slot(int slot) {
    slots_[slot].value.store(nullptr);
    TableGuard g(guard_);
    free_[free_count_++] = slot;
}

namespace {

SlotLease::SlotLease() { slot_ = ContentionTable::instance().take_slot(); }

SlotLease::~SlotLease() {
    if (slot_ >= 0) ContentionTable::instance().give_slot(slot_);
}

} // namespace

ScanSchedule& self_scan_schedule() {
    thread_local ScanSchedule schedule;
    return schedule;
}

} // namespace gcr

#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace gcr::detail {

struct HeldEntry {
    const void* key = nullptr;
    void* value = nullptr;
    bool flag = false;
};

/// Per-thread stack of currently held locks. Lock implementations use it to
/// find the state they stashed at acquire time (MCS queue node, GCR
/// bookkeeping flag). Lookups scan backwards; the stack is almost always
/// one entry deep.
class HeldStack {
public:
    static void push(const void* key, void* value, bool flag) {
        tls().push_back({key, value, flag});
    }

    static HeldEntry pop(const void* key) {
        auto& v = tls();
        for (auto it = v.rbegin(); it != v.rend(); ++it) {
            if (it->key == key) {
                HeldEntry e = *it;
                v.erase(std::next(it).base());
                return e;
            }
        }
        assert(!"release of a lock this thread does not hold");
        return {};
    }

    static bool contains(const void* key) {
        auto& v = tls();
        for (auto it = v.rbegin(); it != v.rend(); ++it)
            if (it->key == key) return true;
        return false;
    }

private:
    static std::vector<HeldEntry>& tls() {
        thread_local std::vector<HeldEntry> v;
        return v;
    }
};

} // namespace gcr::detail

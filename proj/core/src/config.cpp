#include "gcr/config.hpp"

#include <cstdlib>

namespace gcr {

namespace {

void load_u64(const char* var, std::uint64_t& out) {
    if (const char* s = std::getenv(var)) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(s, &end, 0);
        if (end && *end == '\0' && end != s) out = v;
    }
}

} // namespace

GcrConfig GcrConfig::from_env() {
    GcrConfig cfg;
    load_u64("GCR_FAIRNESS_THRESHOLD", cfg.fairness_threshold);
    load_u64("GCR_PASSIVE_THRESHOLD", cfg.passive_threshold);
    load_u64("GCR_ENABLE_COUNT", cfg.contention_enable_count);
    load_u64("GCR_BACKOFF_CAP", cfg.backoff_cap);
    load_u64("GCR_NUMA_EPOCH", cfg.numa_epoch_length);
    if (cfg.fairness_threshold == 0) cfg.fairness_threshold = 1;
    if (cfg.numa_epoch_length == 0) cfg.numa_epoch_length = 1;
    return cfg;
}

} // namespace gcr

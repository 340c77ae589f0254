#pragma once

#include <string>
#include <vector>

namespace gcr::bench {

/// One benchmark result row. repeat_id -1 marks the per-configuration
/// summary (mean of repeats); instance_id -1 marks the aggregate over a
/// multi-instance run.
struct OutputRecord {
    std::string lock;
    std::string gcr_mode;
    int threads = 0;
    int instance_id = 0;
    int repeat_id = 0;
    double throughput = 0.0;
    double handoff_mean_ns = 0.0;
    double handoff_p50_ns = 0.0;
    double handoff_p99_ns = 0.0;
    double unfairness = 0.5;
    double duration_s = 0.0;

    bool operator==(const OutputRecord&) const = default;
};

inline constexpr const char* kCsvHeader =
    "lock,gcr_mode,threads,instance_id,repeat_id,throughput,"
    "handoff_mean_ns,handoff_p50_ns,handoff_p99_ns,unfairness,duration_s";

/// Byte-stable given identical records.
std::string to_csv(const std::vector<OutputRecord>& records);
std::string to_json(const std::vector<OutputRecord>& records);

std::vector<OutputRecord> records_from_json(const std::string& text);
std::vector<OutputRecord> records_from_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);

} // namespace gcr::bench

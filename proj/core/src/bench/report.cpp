#include "gcr/bench/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gcr::bench {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace

std::string to_csv(const std::vector<OutputRecord>& records) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.lock << ',' << r.gcr_mode << ',' << r.threads << ','
            << r.instance_id << ',' << r.repeat_id << ',' << fmt(r.throughput) << ','
            << fmt(r.handoff_mean_ns) << ',' << fmt(r.handoff_p50_ns) << ','
            << fmt(r.handoff_p99_ns) << ',' << fmt(r.unfairness) << ','
            << fmt(r.duration_s) << '\n';
    }
    return out.str();
}

std::string to_json(const std::vector<OutputRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        arr.push_back({{"lock", r.lock},
                       {"gcr_mode", r.gcr_mode},
                       {"threads", r.threads},
                       {"instance_id", r.instance_id},
                       {"repeat_id", r.repeat_id},
                       {"throughput", r.throughput},
                       {"handoff_mean_ns", r.handoff_mean_ns},
                       {"handoff_p50_ns", r.handoff_p50_ns},
                       {"handoff_p99_ns", r.handoff_p99_ns},
                       {"unfairness", r.unfairness},
                       {"duration_s", r.duration_s}});
    }
    return arr.dump(2) + "\n";
}

std::vector<OutputRecord> records_from_json(const std::string& text) {
    nlohmann::json arr = nlohmann::json::parse(text);
    std::vector<OutputRecord> records;
    for (const auto& j : arr) {
        OutputRecord r;
        r.lock = j.at("lock").get<std::string>();
        r.gcr_mode = j.at("gcr_mode").get<std::string>();
        r.threads = j.at("threads").get<int>();
        r.instance_id = j.at("instance_id").get<int>();
        r.repeat_id = j.at("repeat_id").get<int>();
        r.throughput = j.at("throughput").get<double>();
        r.handoff_mean_ns = j.at("handoff_mean_ns").get<double>();
        r.handoff_p50_ns = j.at("handoff_p50_ns").get<double>();
        r.handoff_p99_ns = j.at("handoff_p99_ns").get<double>();
        r.unfairness = j.at("unfairness").get<double>();
        r.duration_s = j.at("duration_s").get<double>();
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<OutputRecord> records_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<OutputRecord> records;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line != kCsvHeader) throw std::runtime_error("unexpected CSV header");
            continue;
        }
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 11) throw std::runtime_error("malformed CSV row: " + line);
        OutputRecord r;
        r.lock = fields[0];
        r.gcr_mode = fields[1];
        r.threads = std::stoi(fields[2]);
        r.instance_id = std::stoi(fields[3]);
        r.repeat_id = std::stoi(fields[4]);
        r.throughput = std::stod(fields[5]);
        r.handoff_mean_ns = std::stod(fields[6]);
        r.handoff_p50_ns = std::stod(fields[7]);
        r.handoff_p99_ns = std::stod(fields[8]);
        r.unfairness = std::stod(fields[9]);
        r.duration_s = std::stod(fields[10]);
        records.push_back(std::move(r));
    }
    return records;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace gcr::bench

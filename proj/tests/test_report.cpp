#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gcr/bench/report.hpp"

using namespace gcr::bench;

namespace {

std::vector<OutputRecord> sample_records() {
    OutputRecord a;
    a.lock = "mcs_spin";
    a.gcr_mode = "on";
    a.threads = 8;
    a.instance_id = 0;
    a.repeat_id = 2;
    a.throughput = 123456.789;
    a.handoff_mean_ns = 321.5;
    a.handoff_p50_ns = 280;
    a.handoff_p99_ns = 1500.25;
    a.unfairness = 0.625;
    a.duration_s = 10.002;

    OutputRecord b;
    b.lock = "ttas";
    b.gcr_mode = "off";
    b.threads = 1;
    b.instance_id = -1;
    b.repeat_id = -1;
    b.throughput = 1e7;
    b.unfairness = 0.5;
    b.duration_s = 10;
    return {a, b};
}

} // namespace

TEST_CASE("empty record list produces only the CSV header") {
    CHECK(to_csv({}) == std::string(kCsvHeader) + "\n");
}

TEST_CASE("CSV header has exactly the expected 11 columns") {
    std::istringstream in(kCsvHeader);
    std::string col;
    int cols = 0;
    while (std::getline(in, col, ',')) ++cols;
    CHECK(cols == 11);
}

TEST_CASE("CSV rows carry one field per column") {
    std::string csv = to_csv(sample_records());
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string field;
        int fields = 0;
        while (std::getline(row, field, ',')) ++fields;
        CHECK(fields == 11);
    }
}

TEST_CASE("CSV output is byte-stable for identical input") {
    auto records = sample_records();
    CHECK(to_csv(records) == to_csv(records));
    CHECK(to_json(records) == to_json(records));
}

TEST_CASE("CSV round-trips every field") {
    auto records = sample_records();
    auto back = records_from_csv(to_csv(records));
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(back[i].lock == records[i].lock);
        CHECK(back[i].gcr_mode == records[i].gcr_mode);
        CHECK(back[i].threads == records[i].threads);
        CHECK(back[i].instance_id == records[i].instance_id);
        CHECK(back[i].repeat_id == records[i].repeat_id);
        CHECK(back[i].throughput == doctest::Approx(records[i].throughput));
        CHECK(back[i].unfairness == doctest::Approx(records[i].unfairness));
        CHECK(back[i].duration_s == doctest::Approx(records[i].duration_s));
    }
}

TEST_CASE("JSON round-trips records exactly") {
    auto records = sample_records();
    auto back = records_from_json(to_json(records));
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) CHECK(back[i] == records[i]);
}

TEST_CASE("CSV parser rejects foreign headers and short rows") {
    CHECK_THROWS_AS(records_from_csv("nope,really\n1,2\n"), std::runtime_error);
    std::string bad = std::string(kCsvHeader) + "\nttas,off,1\n";
    CHECK_THROWS_AS(records_from_csv(bad), std::runtime_error);
}

TEST_CASE("write_file stores content verbatim and fails loudly on bad paths") {
    std::string path = "/tmp/gcr-report-test.csv";
    std::string content = to_csv(sample_records());
    write_file(path, content);
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == content);
    std::remove(path.c_str());

    CHECK_THROWS_AS(write_file("/nonexistent-dir/x/y.csv", "x"), std::runtime_error);
}

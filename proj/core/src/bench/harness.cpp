#include "gcr/bench/harness.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace gcr::bench {

namespace {

int parse_int(const std::string& flag, const std::string& value) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError("bad integer for " + flag + ": " + value);
    }
}

double parse_double(const std::string& flag, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError("bad number for " + flag + ": " + value);
    }
}

std::vector<int> parse_thread_list(const std::string& value) {
    if (value == "auto") return {};
    std::vector<int> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        int v = parse_int("--threads", item);
        if (v < 1) throw UsageError("thread counts must be >= 1");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("empty thread list");
    return out;
}

} // namespace

std::string usage_text() {
    return "gcr-bench: AVL-tree lock microbenchmark\n"
           "  --lock NAME        ttas|backoff|ticket|mcs_spin|mcs_stp|pthread (default mcs_spin)\n"
           "  --gcr MODE         off|on|numa (default off)\n"
           "  --threads LIST     comma list of thread counts, or 'auto' (default 1)\n"
           "  --duration SECS    measured interval per run (default 10)\n"
           "  --warmup SECS      untimed warmup per run (default 1)\n"
           "  --key-range N      AVL key range (default 4096)\n"
           "  --read-pct P       lookup percentage; rest split between insert/remove (default 80)\n"
           "  --ncs-iters N      non-critical-section loop length (default 400)\n"
           "  --repeats N        repeats per configuration (default 3)\n"
           "  --instances N      concurrent benchmark processes per repeat (default 1)\n"
           "  --seed N           RNG seed (default 1)\n"
           "  --format F         csv|json (default csv)\n"
           "  --out PATH         output file (default stdout)\n"
           "All GCR_* environment knobs are honored.\n";
}

RunSpec parse_args(const std::vector<std::string>& args) {
    RunSpec spec;
    spec.base.threads = 1;
    spec.thread_counts = {1};

    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto value = [&]() -> const std::string& {
            if (i + 1 >= args.size()) throw UsageError("missing value for " + a);
            return args[++i];
        };
        if (a == "--lock") {
            spec.base.lock_name = value();
        } else if (a == "--gcr") {
            spec.base.gcr_mode = value();
        } else if (a == "--threads") {
            spec.thread_counts = parse_thread_list(value());
        } else if (a == "--duration") {
            spec.base.duration_s = parse_double(a, value());
        } else if (a == "--warmup") {
            spec.base.warmup_s = parse_double(a, value());
        } else if (a == "--key-range") {
            spec.base.key_range = parse_int(a, value());
        } else if (a == "--read-pct") {
            int read = parse_int(a, value());
            if (read < 0 || read > 100) throw UsageError("--read-pct must be in [0,100]");
            spec.base.lookup_pct = read;
            spec.base.insert_pct = (100 - read + 1) / 2;
            spec.base.remove_pct = (100 - read) / 2;
        } else if (a == "--ncs-iters") {
            spec.base.ncs_iters = static_cast<std::uint64_t>(parse_int(a, value()));
        } else if (a == "--repeats") {
            spec.repeats = parse_int(a, value());
            if (spec.repeats < 1) throw UsageError("--repeats must be >= 1");
        } else if (a == "--instances") {
            spec.instances = parse_int(a, value());
            if (spec.instances < 1) throw UsageError("--instances must be >= 1");
        } else if (a == "--seed") {
            spec.base.seed = static_cast<std::uint64_t>(parse_int(a, value()));
        } else if (a == "--format") {
            spec.format = value();
            if (spec.format != "csv" && spec.format != "json")
                throw UsageError("--format must be csv or json");
        } else if (a == "--out") {
            spec.out_path = value();
        } else {
            throw UsageError("unknown flag: " + a);
        }
    }

    try {
        spec.base.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return spec;
}

std::vector<int> auto_thread_counts(int logical_cpus) {
    int cap = 2 * (logical_cpus > 0 ? logical_cpus : 1);
    std::vector<int> out;
    for (int t = 1; t < cap; t *= 2) out.push_back(t);
    out.push_back(cap);
    return out;
}

namespace {

OutputRecord record_from_metrics(const WorkloadConfig& cfg, int instance_id,
                                 int repeat_id, const RunMetrics& m) {
    OutputRecord r;
    r.lock = cfg.lock_name;
    r.gcr_mode = cfg.gcr_mode;
    r.threads = cfg.threads;
    r.instance_id = instance_id;
    r.repeat_id = repeat_id;
    r.throughput = m.throughput;
    r.handoff_mean_ns = m.handoff_mean_ns;
    r.handoff_p50_ns = m.handoff_p50_ns;
    r.handoff_p99_ns = m.handoff_p99_ns;
    r.unfairness = m.unfairness;
    r.duration_s = m.duration_s;
    return r;
}

std::string temp_result_path(int instance) {
    std::ostringstream p;
    p << "/tmp/gcr-bench-" << getpid() << '-' << instance << ".json";
    return p.str();
}

/// One repeat with N >= 2 instances: fork N children, each runs the whole
/// workload in its own process and leaves a one-record JSON file behind.
bool run_instances(const WorkloadConfig& cfg, int repeat_id, int instances,
                   std::vector<OutputRecord>& out) {
    std::vector<pid_t> pids;
    std::vector<std::string> paths;
    for (int inst = 0; inst < instances; ++inst) {
        std::string path = temp_result_path(inst);
        pid_t pid = fork();
        if (pid < 0) {
            for (pid_t p : pids) waitpid(p, nullptr, 0);
            return false;
        }
        if (pid == 0) {
            WorkloadConfig child = cfg;
            child.seed = cfg.seed + static_cast<std::uint64_t>(inst) * 7919u;
            int code = 1;
            try {
                RunMetrics m = run_workload(child);
                write_file(path, to_json({record_from_metrics(child, inst, repeat_id, m)}));
                code = 0;
            } catch (...) {
            }
            _exit(code);
        }
        pids.push_back(pid);
        paths.push_back(std::move(path));
    }

    bool ok = true;
    double total_throughput = 0.0;
    for (int inst = 0; inst < instances; ++inst) {
        int status = 0;
        waitpid(pids[static_cast<std::size_t>(inst)], &status, 0);
        bool child_ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
        if (child_ok) {
            std::ifstream in(paths[static_cast<std::size_t>(inst)]);
            std::stringstream buf;
            buf << in.rdbuf();
            try {
                auto records = records_from_json(buf.str());
                for (auto& r : records) {
                    total_throughput += r.throughput;
                    out.push_back(std::move(r));
                }
            } catch (...) {
                child_ok = false;
            }
        }
        if (!child_ok) ok = false;
        std::remove(paths[static_cast<std::size_t>(inst)].c_str());
    }

    OutputRecord agg;
    agg.lock = cfg.lock_name;
    agg.gcr_mode = cfg.gcr_mode;
    agg.threads = cfg.threads;
    agg.instance_id = -1;
    agg.repeat_id = repeat_id;
    agg.throughput = total_throughput;
    agg.duration_s = cfg.duration_s;
    out.push_back(std::move(agg));
    return ok;
}

} // namespace

MatrixResult run_matrix(const RunSpec& spec) {
    MatrixResult result;
    std::vector<int> counts = spec.thread_counts;
    if (counts.empty())
        counts = auto_thread_counts(static_cast<int>(std::thread::hardware_concurrency()));

    for (int threads : counts) {
        WorkloadConfig cfg = spec.base;
        cfg.threads = threads;

        double sum_tp = 0, sum_unf = 0, sum_mean = 0, sum_p50 = 0, sum_p99 = 0, sum_dur = 0;
        int successes = 0;
        for (int rep = 0; rep < spec.repeats; ++rep) {
            if (spec.instances > 1) {
                std::vector<OutputRecord> recs;
                if (!run_instances(cfg, rep, spec.instances, recs))
                    result.partial_failure = true;
                for (auto& r : recs) {
                    if (r.instance_id == -1) {
                        sum_tp += r.throughput;
                        sum_dur += r.duration_s;
                        sum_unf += 0.5;
                        ++successes;
                    }
                    result.records.push_back(std::move(r));
                }
                continue;
            }
            try {
                RunMetrics m = run_workload(cfg);
                OutputRecord r = record_from_metrics(cfg, 0, rep, m);
                sum_tp += r.throughput;
                sum_unf += r.unfairness;
                sum_mean += r.handoff_mean_ns;
                sum_p50 += r.handoff_p50_ns;
                sum_p99 += r.handoff_p99_ns;
                sum_dur += r.duration_s;
                ++successes;
                result.records.push_back(std::move(r));
            } catch (const std::exception& e) {
                std::fprintf(stderr, "run failed (lock=%s threads=%d): %s\n",
                             cfg.lock_name.c_str(), threads, e.what());
                result.partial_failure = true;
            }
        }
        if (successes > 0) {
            OutputRecord mean;
            mean.lock = cfg.lock_name;
            mean.gcr_mode = cfg.gcr_mode;
            mean.threads = threads;
            mean.instance_id = spec.instances > 1 ? -1 : 0;
            mean.repeat_id = -1;
            mean.throughput = sum_tp / successes;
            mean.handoff_mean_ns = sum_mean / successes;
            mean.handoff_p50_ns = sum_p50 / successes;
            mean.handoff_p99_ns = sum_p99 / successes;
            mean.unfairness = sum_unf / successes;
            mean.duration_s = sum_dur / successes;
            result.records.push_back(std::move(mean));
        }
    }
    return result;
}

} // namespace gcr::bench

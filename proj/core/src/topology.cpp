#include "gcr/topology.hpp"

#include <sched.h>

#include <cstdio>
#include <mutex>
#include <vector>

namespace gcr {

namespace {

struct Topology {
    std::vector<int> cpu_to_socket;
    int socket_count = 1;
};

int read_package_id(int cpu) {
    char path[128];
    std::snprintf(path, sizeof(path),
                  "/sys/devices/system/cpu/cpu%d/topology/physical_package_id", cpu);
    FILE* f = std::fopen(path, "r");
    if (!f) return -1;
    int id = -1;
    if (std::fscanf(f, "%d", &id) != 1) id = -1;
    std::fclose(f);
    return id;
}

const Topology& topology() {
    static Topology topo = [] {
        Topology t;
        std::vector<int> package_ids;
        for (int cpu = 0;; ++cpu) {
            int pkg = read_package_id(cpu);
            if (pkg < 0) break;
            int idx = -1;
            for (std::size_t i = 0; i < package_ids.size(); ++i)
                if (package_ids[i] == pkg) idx = static_cast<int>(i);
            if (idx < 0) {
                idx = static_cast<int>(package_ids.size());
                package_ids.push_back(pkg);
            }
            t.cpu_to_socket.push_back(idx);
        }
        t.socket_count = package_ids.empty() ? 1 : static_cast<int>(package_ids.size());
        return t;
    }();
    return topo;
}

} // namespace

int platform_socket_count() { return topology().socket_count; }

int platform_current_socket() {
    const Topology& t = topology();
    int cpu = sched_getcpu();
    if (cpu < 0 || cpu >= static_cast<int>(t.cpu_to_socket.size())) return 0;
    return t.cpu_to_socket[cpu];
}

} // namespace gcr

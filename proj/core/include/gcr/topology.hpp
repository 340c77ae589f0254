#pragma once

namespace gcr {

/// Number of NUMA sockets (packages) on this machine; 1 when the topology
/// cannot be determined.
int platform_socket_count();

/// Socket the calling thread is currently running on, in
/// [0, platform_socket_count()). Returns 0 when unknown.
int platform_current_socket();

} // namespace gcr

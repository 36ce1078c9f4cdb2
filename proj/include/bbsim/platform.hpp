#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bbsim/types.hpp"

namespace bbsim {

/// Log-normal distribution of the burst-buffer request per processor, in bytes.
struct LogNormalModel {
    double mu = std::log(4e9);
    double sigma = 1.0;

    /// Mean of the distribution, exp(mu + sigma^2 / 2).
    [[nodiscard]] double mean() const;
    void validate() const;
};

struct PlatformConfig {
    int n_compute_nodes = 96;
    int n_storage_nodes = 12;
    // Dragonfly shape; naming metadata only.
    int groups = 3;
    int chassis = 4;
    int routers = 3;
    int nodes_per_router = 3;
    double compute_link_bw = 1.25e9;  // 10 Gbit/s
    double pfs_link_bw = 5e9;
    /// Total burst-buffer capacity; empty means size it from the request model.
    std::optional<Bytes> bb_capacity_total;
    LogNormalModel bb_request_model;

    void validate() const;
};

struct NodeInfo {
    NodeId id = 0;
    std::string name;  // e.g. "g0c1r2n0"
    int group = 0;
    int chassis = 0;
    int router = 0;
    int slot = 0;
};

struct PfsLink {
    double bandwidth = 0.0;  // bytes per second
};

/// The simulated cluster. Immutable after build_platform().
///
/// Compute nodes carry ids 0..n_compute-1 and storage nodes
/// n_compute..n_compute+n_storage-1; both are numbered in
/// group-major topology order.
struct Platform {
    std::vector<NodeInfo> compute_nodes;
    std::vector<NodeInfo> storage_nodes;
    /// Capacity of each storage node, indexed like storage_nodes.
    std::vector<Bytes> bb_capacity_per_node;
    Bytes bb_capacity_total = 0;
    PfsLink pfs_link;
    double compute_link_bw = 0.0;

    [[nodiscard]] int n_compute() const { return static_cast<int>(compute_nodes.size()); }
    [[nodiscard]] int n_storage() const { return static_cast<int>(storage_nodes.size()); }
};

/// Expected total burst-buffer request with every compute node busy,
/// n_compute * E[request per processor], rounded down to whole bytes.
[[nodiscard]] Bytes expected_bb_capacity(const LogNormalModel& model, int n_compute);

/// Throws ConfigError when the configuration is inconsistent.
[[nodiscard]] Platform build_platform(const PlatformConfig& cfg);

/// Four compute nodes sharing 10 TB, the small cluster of the worked example.
[[nodiscard]] PlatformConfig example_platform_config();

}  // namespace bbsim

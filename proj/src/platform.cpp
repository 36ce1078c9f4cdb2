#include "bbsim/platform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "bbsim/error.hpp"

namespace bbsim {

double LogNormalModel::mean() const { return std::exp(mu + sigma * sigma / 2.0); }

void LogNormalModel::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
        throw ConfigError("log-normal model needs a finite mu and sigma > 0");
    }
}

void PlatformConfig::validate() const {
    if (n_compute_nodes < 1) throw ConfigError("n_compute_nodes must be at least 1");
    if (n_storage_nodes < 0) throw ConfigError("n_storage_nodes must not be negative");
    if (groups < 1 || chassis < 1 || routers < 1 || nodes_per_router < 1) {
        throw ConfigError("topology counts must be positive");
    }
    const long long slots = 1LL * groups * chassis * routers * nodes_per_router;
    if (slots != n_compute_nodes + n_storage_nodes) {
        throw ConfigError("topology has " + std::to_string(slots) + " node slots but " +
                          std::to_string(n_compute_nodes + n_storage_nodes) +
                          " compute+storage nodes were requested");
    }
    if (!(compute_link_bw > 0.0) || !(pfs_link_bw > 0.0)) {
        throw ConfigError("link bandwidths must be strictly positive");
    }
    if (bb_capacity_total) {
        if (*bb_capacity_total < 0) throw ConfigError("bb_capacity_total must not be negative");
        if (*bb_capacity_total > 0 && n_storage_nodes == 0) {
            throw ConfigError("burst-buffer capacity requires at least one storage node");
        }
    }
    bb_request_model.validate();
}

Bytes expected_bb_capacity(const LogNormalModel& model, int n_compute) {
    const double value = static_cast<double>(n_compute) * model.mean();
    // Values a few ulps from an integer snap to it; ln/exp round trips are
    // otherwise floored one byte short.
    const double nearest = std::round(value);
    if (std::abs(value - nearest) <= 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, value)) {
        return static_cast<Bytes>(nearest);
    }
    return static_cast<Bytes>(std::floor(value));
}

Platform build_platform(const PlatformConfig& cfg) {
    cfg.validate();

    const int n_chassis = cfg.groups * cfg.chassis;

    // Storage roles go round-robin over chassis, lowest slot first, so the
    // defaults put exactly one storage node in every chassis.
    std::set<std::pair<int, int>> storage_positions;  // (chassis, slot)
    for (int slot = 0; static_cast<int>(storage_positions.size()) < cfg.n_storage_nodes; ++slot) {
        for (int c = 0; c < n_chassis && static_cast<int>(storage_positions.size()) < cfg.n_storage_nodes;
             ++c) {
            storage_positions.emplace(c, slot);
        }
    }

    Platform p;
    p.compute_nodes.reserve(cfg.n_compute_nodes);
    p.storage_nodes.reserve(cfg.n_storage_nodes);
    for (int g = 0; g < cfg.groups; ++g) {
        for (int c = 0; c < cfg.chassis; ++c) {
            for (int r = 0; r < cfg.routers; ++r) {
                for (int n = 0; n < cfg.nodes_per_router; ++n) {
                    NodeInfo info;
                    info.group = g;
                    info.chassis = c;
                    info.router = r;
                    info.slot = n;
                    info.name = "g" + std::to_string(g) + "c" + std::to_string(c) + "r" + std::to_string(r) +
                                "n" + std::to_string(n);
                    const int chassis_index = g * cfg.chassis + c;
                    const int slot_index = r * cfg.nodes_per_router + n;
                    if (storage_positions.count({chassis_index, slot_index}) != 0) {
                        p.storage_nodes.push_back(std::move(info));
                    } else {
                        p.compute_nodes.push_back(std::move(info));
                    }
                }
            }
        }
    }
    for (std::size_t i = 0; i < p.compute_nodes.size(); ++i) {
        p.compute_nodes[i].id = static_cast<NodeId>(i);
    }
    for (std::size_t i = 0; i < p.storage_nodes.size(); ++i) {
        p.storage_nodes[i].id = static_cast<NodeId>(p.compute_nodes.size() + i);
    }

    Bytes total = 0;
    if (cfg.bb_capacity_total) {
        total = *cfg.bb_capacity_total;
    } else if (cfg.n_storage_nodes > 0) {
        total = expected_bb_capacity(cfg.bb_request_model, cfg.n_compute_nodes);
    }
    p.bb_capacity_total = total;
    p.bb_capacity_per_node.assign(p.storage_nodes.size(), 0);
    if (!p.storage_nodes.empty()) {
        const auto n = static_cast<Bytes>(p.storage_nodes.size());
        const Bytes base = total / n;
        const Bytes remainder = total % n;
        for (Bytes i = 0; i < n; ++i) {
            p.bb_capacity_per_node[static_cast<std::size_t>(i)] = base + (i < remainder ? 1 : 0);
        }
    }
    p.pfs_link.bandwidth = cfg.pfs_link_bw;
    p.compute_link_bw = cfg.compute_link_bw;
    return p;
}

PlatformConfig example_platform_config() {
    PlatformConfig cfg;
    cfg.n_compute_nodes = 4;
    cfg.n_storage_nodes = 1;
    cfg.groups = 1;
    cfg.chassis = 1;
    cfg.routers = 1;
    cfg.nodes_per_router = 5;
    cfg.bb_capacity_total = 10'000'000'000'000;  // 10 TB
    return cfg;
}

}  // namespace bbsim

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mmwcache/model.hpp"

namespace mmwc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

enum class NodeKind : uint8_t { bs = 0, rn = 1, ue = 2 };

// One sampled network realization. Node counts are Poisson draws over the
// deployment square; the typical UE sits at the area center. Per-link
// blockage states are derived deterministically from the deployment seed so
// that association and SINR evaluation see the same geometry.
struct Deployment {
    std::vector<Vec2> bs;
    std::vector<Vec2> rn;
    Vec2 ue;                                // typical UE (area center)
    std::vector<std::vector<uint8_t>> cache;  // per BS: cached file flags
    uint64_t seed = 0;
    double beta = 0.0;

    // LOS state of the (src -> dst) link; fixed per deployment.
    bool is_los(NodeKind src_kind, int src_idx, NodeKind dst_kind, int dst_idx,
                Vec2 src, Vec2 dst) const;
};

Deployment sample_deployment(const NetworkConfig& cfg, uint64_t seed);

// Realizes per-BS cache contents with exact marginal inclusion probability
// p_n and at most ceil(sum p) files per cache (interval-partition rounding).
void place_caches(Deployment& d, const CachingPolicy& policy,
                  const ContentCatalog& catalog, uint64_t seed);

enum class Association : uint8_t { one_hop, two_hop, none };

struct Selection {
    Association assoc = Association::none;
    int bs0 = -1;     // serving BS of the one-hop candidate
    int rn0 = -1;     // serving RN of the two-hop candidate
    int bs_r0 = -1;   // backhaul BS of the two-hop candidate
    double power_bs0 = 0.0;     // biased received powers of the candidates
    double power_two_hop = 0.0; // min over both two-hop links
    bool cache_hit = false;     // some BS caches the requested file
};

// BS and RN selection for a receiver at `where`, restricted to BSs caching
// `file` (pass file = -1 for cache-blind selection over the full tier).
Selection select_nodes(const Deployment& d, int file, const NetworkConfig& cfg,
                       Vec2 where, int ue_index = 0);

struct TrialOutcome {
    int requested_file = -1;
    Association assoc = Association::none;
    bool offload_success = false;
    double sinr_direct = 0.0;    // one-hop link
    double sinr_backhaul = 0.0;  // BS -> RN hop
    double sinr_access = 0.0;    // RN -> UE hop
};

struct TrialStats {
    double sbop = 0.0;
    double std_err = 0.0;
    long n_trials = 0;
    long n_one_hop = 0;   // association counts over offload attempts
    long n_two_hop = 0;
    long n_no_cache = 0;
    std::vector<long> per_file_trials;
    std::vector<long> per_file_successes;
};

// Runs one trial per deployment: sample geometry, realize caches, draw the
// requested file from the popularity law, select nodes, and test every hop
// against the file's SINR threshold. Deterministic in (cfg, seed); trials
// are split across per-deployment RNG streams.
TrialStats run_trials(const NetworkConfig& cfg, const ContentCatalog& catalog,
                      const CachingPolicy& policy, long n_deployments, uint64_t seed,
                      std::vector<TrialOutcome>* outcomes = nullptr, int n_threads = 1);

struct UeAssociationRow {
    int ue_id = 0;
    Vec2 position;
    NodeKind serving_kind = NodeKind::bs;
    int serving_id = -1;
    int hop_count = 1;
    bool offload_success = false;
};

// One deployment with a fixed number of UEs; every UE requests a file and
// associates per the selection rule, falling back to cache-blind selection
// when offloading fails.
std::vector<UeAssociationRow> association_snapshot(const NetworkConfig& cfg,
                                                   const ContentCatalog& catalog,
                                                   const CachingPolicy& policy,
                                                   uint64_t seed, int n_ues);

// SplitMix64 mixing, used to derive independent substreams.
uint64_t mix_seed(uint64_t seed, uint64_t salt_a, uint64_t salt_b = 0, uint64_t salt_c = 0);

}  // namespace mmwc

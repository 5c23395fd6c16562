#include "mmwcache/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "mmwcache/units.hpp"

namespace mmwc {

namespace {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Uniform in [0, 1) from a hashed 64-bit word.
double hash_uniform(uint64_t word) {
    return (word >> 11) * 0x1.0p-53;
}

}  // namespace

uint64_t mix_seed(uint64_t seed, uint64_t salt_a, uint64_t salt_b, uint64_t salt_c) {
    uint64_t s = seed;
    splitmix64(s);
    s ^= 0xa076'1d64'78bd'642full + salt_a;
    splitmix64(s);
    s ^= 0xe703'7ed1'a0b4'28dbull + salt_b;
    splitmix64(s);
    s ^= salt_c;
    return splitmix64(s);
}

bool Deployment::is_los(NodeKind src_kind, int src_idx, NodeKind dst_kind, int dst_idx,
                        Vec2 src, Vec2 dst) const {
    const double r = dist(src, dst);
    if (beta == 0.0) return true;
    const uint64_t word =
        mix_seed(seed ^ 0xb10c'ab1eull,
                 (static_cast<uint64_t>(src_kind) << 32) | static_cast<uint32_t>(src_idx),
                 (static_cast<uint64_t>(dst_kind) << 32) | static_cast<uint32_t>(dst_idx));
    return hash_uniform(word) < std::exp(-beta * r);
}

Deployment sample_deployment(const NetworkConfig& cfg, uint64_t seed) {
    if (!(cfg.area_side > 0.0)) throw std::invalid_argument("area_side must be > 0");
    Deployment d;
    d.seed = seed;
    d.beta = cfg.beta;
    d.ue = {0.5 * cfg.area_side, 0.5 * cfg.area_side};
    std::mt19937_64 rng(mix_seed(seed, 0x0de9'107eull));
    const double area = cfg.area_side * cfg.area_side;
    std::uniform_real_distribution<double> pos(0.0, cfg.area_side);
    auto draw_points = [&](double lambda, std::vector<Vec2>& out) {
        if (lambda <= 0.0) return;
        std::poisson_distribution<int> count(lambda * area);
        const int n = count(rng);
        out.resize(n);
        for (auto& p : out) {
            p.x = pos(rng);
            p.y = pos(rng);
        }
    };
    draw_points(cfg.lambda_bs, d.bs);
    draw_points(cfg.lambda_rn, d.rn);
    return d;
}

void place_caches(Deployment& d, const CachingPolicy& policy,
                  const ContentCatalog& catalog, uint64_t seed) {
    policy.validate(catalog.cache_size);
    const int f = catalog.f_count;
    if (static_cast<int>(policy.probs.size()) != f)
        throw std::invalid_argument("place_caches: policy length mismatch");
    d.cache.assign(d.bs.size(), std::vector<uint8_t>(f, 0));
    for (std::size_t b = 0; b < d.bs.size(); ++b) {
        // Lay the p_n segments end to end and sample them with a single
        // uniform offset and unit stride: marginals are exact and the cache
        // never holds more than ceil(sum p) files.
        std::mt19937_64 rng(mix_seed(seed, 0xcac4'e5ull, b));
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        double edge = 0.0;
        for (int n = 0; n < f; ++n) {
            const double lo = edge;
            edge += policy.probs[n];
            // Points u, u+1, u+2, ... hit the segment [lo, lo + p_n)?
            const double first_point = std::ceil(lo - u) + u;
            if (first_point < edge && policy.probs[n] > 0.0) d.cache[b][n] = 1;
        }
    }
}

namespace {

// Biased received power used by the association rule: average (fading-free)
// power with the realized blockage state and aligned beams.
double biased_power(const Deployment& d, const NetworkConfig& cfg, NodeKind kind, int idx,
                    Vec2 node, Vec2 at, NodeKind at_kind, int at_idx) {
    const double r = std::max(dist(node, at), 1.0);  // clamp inside 1 m ring
    const bool los = d.is_los(kind, idx, at_kind, at_idx, node, at);
    const double alpha = los ? cfg.alpha_los : cfg.alpha_nlos;
    const double power = kind == NodeKind::bs ? cfg.p_bs : cfg.p_rn;
    const double bias = kind == NodeKind::bs ? cfg.bias_bs : cfg.bias_rn;
    return power * bias * cfg.aligned_gain() * cfg.gamma_intercept * std::pow(r, -alpha);
}

}  // namespace

Selection select_nodes(const Deployment& d, int file, const NetworkConfig& cfg,
                       Vec2 where, int ue_index) {
    Selection sel;
    if (d.bs.empty()) return sel;
    if (file >= 0 && d.cache.size() != d.bs.size())
        throw std::invalid_argument("select_nodes: caches not realized");

    auto caches_file = [&](int b) { return file < 0 || d.cache[b][file] != 0; };

    // Strongest caching BS seen by the receiver.
    for (std::size_t b = 0; b < d.bs.size(); ++b) {
        if (!caches_file(static_cast<int>(b))) continue;
        sel.cache_hit = true;
        const double p = biased_power(d, cfg, NodeKind::bs, static_cast<int>(b), d.bs[b],
                                      where, NodeKind::ue, ue_index);
        if (p > sel.power_bs0) {
            sel.power_bs0 = p;
            sel.bs0 = static_cast<int>(b);
        }
    }
    if (!sel.cache_hit) return sel;  // no BS anywhere caches the file

    // Candidate relays must beat the direct link on their access hop, then
    // the best relay maximizes the weaker of its two hops.
    for (std::size_t r = 0; r < d.rn.size(); ++r) {
        const double p_access = biased_power(d, cfg, NodeKind::rn, static_cast<int>(r),
                                             d.rn[r], where, NodeKind::ue, ue_index);
        if (p_access <= sel.power_bs0) continue;
        double p_backhaul = 0.0;
        int best_bs = -1;
        for (std::size_t b = 0; b < d.bs.size(); ++b) {
            if (!caches_file(static_cast<int>(b))) continue;
            const double p = biased_power(d, cfg, NodeKind::bs, static_cast<int>(b),
                                          d.bs[b], d.rn[r], NodeKind::rn,
                                          static_cast<int>(r));
            if (p > p_backhaul) {
                p_backhaul = p;
                best_bs = static_cast<int>(b);
            }
        }
        const double two_hop = std::min(p_access, p_backhaul);
        if (two_hop > sel.power_two_hop) {
            sel.power_two_hop = two_hop;
            sel.rn0 = static_cast<int>(r);
            sel.bs_r0 = best_bs;
        }
    }
    sel.assoc = sel.power_two_hop > sel.power_bs0 ? Association::two_hop
                                                  : Association::one_hop;
    return sel;
}

namespace {

struct FadingContext {
    std::mt19937_64 rng;
    const NetworkConfig* cfg;
    const GainPattern* gains;

    double fading(bool los) {
        const int n = los ? cfg->n_los : cfg->n_nlos;
        std::gamma_distribution<double> g(n, 1.0 / n);
        return g(rng);
    }
    double interferer_gain() {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        if (u < gains->mm.prob) return gains->mm.gain;
        if (u < gains->mm.prob + gains->ms.prob) return gains->ms.gain;
        return gains->ss.gain;
    }
};

// SINR of one hop: aligned serving beam with fresh fading, every other
// transmitter of both tiers interferes with a random gain pattern.
double hop_sinr(const Deployment& d, const NetworkConfig& cfg, FadingContext& ctx,
                NodeKind srv_kind, int srv_idx, Vec2 rx, NodeKind rx_kind, int rx_idx,
                int skip_bs, int skip_rn) {
    const Vec2 srv_pos = srv_kind == NodeKind::bs ? d.bs[srv_idx] : d.rn[srv_idx];
    const double r = std::max(dist(srv_pos, rx), 1.0);
    const bool los = d.is_los(srv_kind, srv_idx, rx_kind, rx_idx, srv_pos, rx);
    const double alpha = los ? cfg.alpha_los : cfg.alpha_nlos;
    const double p_tx = srv_kind == NodeKind::bs ? cfg.p_bs : cfg.p_rn;
    const double signal = p_tx * cfg.aligned_gain() * cfg.gamma_intercept *
                          std::pow(r, -alpha) * ctx.fading(los);

    double interference = 0.0;
    auto add_tier = [&](const std::vector<Vec2>& nodes, NodeKind kind, double power,
                        int skip) {
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (static_cast<int>(j) == skip) continue;
            const double rj = std::max(dist(nodes[j], rx), 1.0);
            const bool lj = d.is_los(kind, static_cast<int>(j), rx_kind, rx_idx, nodes[j], rx);
            const double aj = lj ? cfg.alpha_los : cfg.alpha_nlos;
            interference += power * ctx.interferer_gain() * cfg.gamma_intercept *
                            std::pow(rj, -aj) * ctx.fading(lj);
        }
    };
    add_tier(d.bs, NodeKind::bs, cfg.p_bs, skip_bs);
    add_tier(d.rn, NodeKind::rn, cfg.p_rn, skip_rn);
    return signal / (interference + cfg.noise_power);
}

TrialOutcome run_one_trial(const NetworkConfig& cfg, const ContentCatalog& catalog,
                           const CachingPolicy& policy, uint64_t seed, long index,
                           const GainPattern& gains) {
    Deployment d;
    // Degenerate empty-BS draws are discarded and resampled from a fresh stream.
    for (uint64_t attempt = 0;; ++attempt) {
        d = sample_deployment(cfg, mix_seed(seed, 0xde9107ull, index, attempt));
        if (!d.bs.empty()) break;
    }
    place_caches(d, policy, catalog, mix_seed(seed, 0x11eaf'5ull, index));

    std::mt19937_64 rng(mix_seed(seed, 0x7a1a1ull, index));
    std::discrete_distribution<int> file_draw(catalog.popularity.begin(),
                                              catalog.popularity.end());
    TrialOutcome out;
    out.requested_file = file_draw(rng);
    const double nu = catalog.sinr_thresholds[out.requested_file];

    const Selection sel = select_nodes(d, out.requested_file, cfg, d.ue, 0);
    out.assoc = sel.cache_hit ? sel.assoc : Association::none;
    if (!sel.cache_hit) return out;

    FadingContext ctx{std::mt19937_64(mix_seed(seed, 0xfad1ull, index)), &cfg, &gains};
    if (sel.assoc == Association::one_hop) {
        out.sinr_direct = hop_sinr(d, cfg, ctx, NodeKind::bs, sel.bs0, d.ue, NodeKind::ue,
                                   0, sel.bs0, -1);
        out.offload_success = out.sinr_direct > nu;
    } else {
        // Two time slots: interference fields of the hops are independent.
        out.sinr_backhaul = hop_sinr(d, cfg, ctx, NodeKind::bs, sel.bs_r0, d.rn[sel.rn0],
                                     NodeKind::rn, sel.rn0, sel.bs_r0, sel.rn0);
        out.sinr_access = hop_sinr(d, cfg, ctx, NodeKind::rn, sel.rn0, d.ue, NodeKind::ue,
                                   0, -1, sel.rn0);
        out.offload_success = out.sinr_backhaul > nu && out.sinr_access > nu;
    }
    return out;
}

}  // namespace

TrialStats run_trials(const NetworkConfig& cfg, const ContentCatalog& catalog,
                      const CachingPolicy& policy, long n_deployments, uint64_t seed,
                      std::vector<TrialOutcome>* outcomes, int n_threads) {
    cfg.validate();
    catalog.validate();
    policy.validate(catalog.cache_size);
    if (n_deployments < 1)
        throw std::invalid_argument("run_trials: need at least one deployment");
    const GainPattern gains = gain_distribution(cfg.theta, cfg.gain_main, cfg.gain_side);

    std::vector<TrialOutcome> all(n_deployments);
    if (n_threads <= 1) {
        for (long i = 0; i < n_deployments; ++i)
            all[i] = run_one_trial(cfg, catalog, policy, seed, i, gains);
    } else {
        std::atomic<long> next{0};
        auto worker = [&]() {
            for (;;) {
                const long i = next.fetch_add(1);
                if (i >= n_deployments) return;
                all[i] = run_one_trial(cfg, catalog, policy, seed, i, gains);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    TrialStats stats;
    stats.n_trials = n_deployments;
    stats.per_file_trials.assign(catalog.f_count, 0);
    stats.per_file_successes.assign(catalog.f_count, 0);
    long successes = 0;
    for (const auto& o : all) {
        stats.per_file_trials[o.requested_file]++;
        if (o.offload_success) {
            successes++;
            stats.per_file_successes[o.requested_file]++;
        }
        switch (o.assoc) {
            case Association::one_hop: stats.n_one_hop++; break;
            case Association::two_hop: stats.n_two_hop++; break;
            case Association::none: stats.n_no_cache++; break;
        }
    }
    stats.sbop = static_cast<double>(successes) / n_deployments;
    stats.std_err = std::sqrt(std::max(stats.sbop * (1.0 - stats.sbop), 0.0) /
                              n_deployments);
    if (outcomes) *outcomes = std::move(all);
    return stats;
}

std::vector<UeAssociationRow> association_snapshot(const NetworkConfig& cfg,
                                                   const ContentCatalog& catalog,
                                                   const CachingPolicy& policy,
                                                   uint64_t seed, int n_ues) {
    cfg.validate();
    catalog.validate();
    policy.validate(catalog.cache_size);
    if (n_ues < 1) throw std::invalid_argument("association_snapshot: need n_ues >= 1");

    Deployment d;
    for (uint64_t attempt = 0;; ++attempt) {
        d = sample_deployment(cfg, mix_seed(seed, 0x5a490ull, 0, attempt));
        if (!d.bs.empty()) break;
    }
    place_caches(d, policy, catalog, mix_seed(seed, 0x11eaf'5ull, 0));
    const GainPattern gains = gain_distribution(cfg.theta, cfg.gain_main, cfg.gain_side);

    std::mt19937_64 rng(mix_seed(seed, 0x0e5ull, 1));
    std::uniform_real_distribution<double> pos(0.0, cfg.area_side);
    std::discrete_distribution<int> file_draw(catalog.popularity.begin(),
                                              catalog.popularity.end());

    std::vector<UeAssociationRow> rows(n_ues);
    for (int u = 0; u < n_ues; ++u) {
        UeAssociationRow& row = rows[u];
        row.ue_id = u;
        row.position = {pos(rng), pos(rng)};
        const int file = file_draw(rng);
        const double nu = catalog.sinr_thresholds[file];

        const Selection sel = select_nodes(d, file, cfg, row.position, u);
        bool success = false;
        FadingContext ctx{std::mt19937_64(mix_seed(seed, 0xfad1ull, 1000 + u)), &cfg,
                          &gains};
        if (sel.cache_hit) {
            if (sel.assoc == Association::one_hop) {
                success = hop_sinr(d, cfg, ctx, NodeKind::bs, sel.bs0, row.position,
                                   NodeKind::ue, u, sel.bs0, -1) > nu;
            } else {
                const double bh = hop_sinr(d, cfg, ctx, NodeKind::bs, sel.bs_r0,
                                           d.rn[sel.rn0], NodeKind::rn, sel.rn0,
                                           sel.bs_r0, sel.rn0);
                const double ra = hop_sinr(d, cfg, ctx, NodeKind::rn, sel.rn0,
                                           row.position, NodeKind::ue, u, -1, sel.rn0);
                success = bh > nu && ra > nu;
            }
        }
        row.offload_success = success;

        Selection serving = sel;
        if (!success) {
            // Cache miss or rate failure: reselect over the full BS tier.
            serving = select_nodes(d, -1, cfg, row.position, u);
        }
        if (serving.assoc == Association::two_hop) {
            row.serving_kind = NodeKind::rn;
            row.serving_id = serving.rn0;
            row.hop_count = 2;
        } else {
            row.serving_kind = NodeKind::bs;
            row.serving_id = serving.bs0;
            row.hop_count = 1;
        }
    }
    return rows;
}

}  // namespace mmwc

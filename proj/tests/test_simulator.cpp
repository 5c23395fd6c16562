#include <doctest.h>

#include <cmath>
#include <random>

#include "mmwcache/simulate.hpp"

using namespace mmwc;

namespace {

// Brute-force reimplementation of the selection rule used as an oracle:
// scan all candidate triplets directly.
Selection select_oracle(const Deployment& d, int file, const NetworkConfig& cfg,
                        Vec2 ue) {
    auto biased = [&](NodeKind kind, int idx, Vec2 node, Vec2 at, NodeKind at_kind,
                      int at_idx) {
        const double r = std::max(std::hypot(node.x - at.x, node.y - at.y), 1.0);
        const bool los = d.is_los(kind, idx, at_kind, at_idx, node, at);
        const double alpha = los ? cfg.alpha_los : cfg.alpha_nlos;
        const double p = kind == NodeKind::bs ? cfg.p_bs : cfg.p_rn;
        const double b = kind == NodeKind::bs ? cfg.bias_bs : cfg.bias_rn;
        return p * b * cfg.aligned_gain() * cfg.gamma_intercept * std::pow(r, -alpha);
    };
    Selection sel;
    for (std::size_t b = 0; b < d.bs.size(); ++b) {
        if (file >= 0 && !d.cache[b][file]) continue;
        sel.cache_hit = true;
        const double p = biased(NodeKind::bs, b, d.bs[b], ue, NodeKind::ue, 0);
        if (p > sel.power_bs0) {
            sel.power_bs0 = p;
            sel.bs0 = static_cast<int>(b);
        }
    }
    if (!sel.cache_hit) return sel;
    for (std::size_t r = 0; r < d.rn.size(); ++r) {
        const double pa = biased(NodeKind::rn, r, d.rn[r], ue, NodeKind::ue, 0);
        if (pa <= sel.power_bs0) continue;
        // strongest backhaul first, then the weaker of the two hops
        double best_backhaul = 0.0;
        int best_bs = -1;
        for (std::size_t b = 0; b < d.bs.size(); ++b) {
            if (file >= 0 && !d.cache[b][file]) continue;
            const double pb = biased(NodeKind::bs, b, d.bs[b], d.rn[r], NodeKind::rn, r);
            if (pb > best_backhaul) {
                best_backhaul = pb;
                best_bs = static_cast<int>(b);
            }
        }
        const double mn = std::min(pa, best_backhaul);
        if (mn > sel.power_two_hop) {
            sel.power_two_hop = mn;
            sel.rn0 = static_cast<int>(r);
            sel.bs_r0 = best_bs;
        }
    }
    sel.assoc = sel.power_two_hop > sel.power_bs0 ? Association::two_hop
                                                  : Association::one_hop;
    return sel;
}

}  // namespace

TEST_CASE("deployment sampling: Poisson counts and determinism") {
    NetworkConfig cfg;
    const double area = cfg.area_side * cfg.area_side;

    long total_bs = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        const auto d = sample_deployment(cfg, 100 + i);
        total_bs += d.bs.size();
        for (const auto& p : d.bs) {
            CHECK(p.x >= 0.0);
            CHECK(p.x <= cfg.area_side);
        }
    }
    const double mean = double(total_bs) / n;
    const double expected = cfg.lambda_bs * area;  // 6.4 per deployment
    const double se = std::sqrt(expected / n);
    CHECK(std::abs(mean - expected) < 3.0 * se);

    // Determinism: same seed, same layout.
    const auto a = sample_deployment(cfg, 7);
    const auto b = sample_deployment(cfg, 7);
    REQUIRE(a.bs.size() == b.bs.size());
    for (std::size_t i = 0; i < a.bs.size(); ++i) {
        CHECK(a.bs[i].x == b.bs[i].x);
        CHECK(a.bs[i].y == b.bs[i].y);
    }

    NetworkConfig none = cfg;
    none.lambda_rn = 0.0;
    CHECK(sample_deployment(none, 3).rn.empty());
}

TEST_CASE("blockage states follow exp(-beta r) and are stable per link") {
    NetworkConfig cfg;
    cfg.area_side = 4000.0;
    long los = 0, total = 0;
    const double r_lo = 200.0, r_hi = 220.0;
    for (int i = 0; i < 400; ++i) {
        const auto d = sample_deployment(cfg, 9000 + i);
        for (std::size_t b = 0; b < d.bs.size(); ++b) {
            const double r = std::hypot(d.bs[b].x - d.ue.x, d.bs[b].y - d.ue.y);
            if (r < r_lo || r > r_hi) continue;
            const bool l = d.is_los(NodeKind::bs, b, NodeKind::ue, 0, d.bs[b], d.ue);
            CHECK(d.is_los(NodeKind::bs, b, NodeKind::ue, 0, d.bs[b], d.ue) == l);
            los += l;
            total++;
        }
    }
    REQUIRE(total > 500);
    const double expected = std::exp(-cfg.beta * 0.5 * (r_lo + r_hi));
    const double se = std::sqrt(expected * (1.0 - expected) / total);
    CHECK(std::abs(double(los) / total - expected) < 3.0 * se);
}

TEST_CASE("fading draws are normalized gamma") {
    // The simulator draws |h|^2 ~ Gamma(N, 1/N); check the normalization.
    std::mt19937_64 rng(5);
    for (int shape : {2, 3}) {
        std::gamma_distribution<double> g(shape, 1.0 / shape);
        double sum = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) sum += g(rng);
        const double se = 1.0 / std::sqrt(double(n) * shape);
        CHECK(std::abs(sum / n - 1.0) < 3.0 * se);
    }
}

TEST_CASE("cache placement: exact marginals under the capacity bound") {
    NetworkConfig cfg;
    cfg.lambda_bs = 1e-4;  // plenty of BSs per deployment
    auto cat = ContentCatalog::make(2, 0.0, 1, 4e7, 1e9, 1e8);

    CachingPolicy half;
    half.probs = {0.5, 0.5};
    long first = 0, total = 0;
    for (int i = 0; i < 200; ++i) {
        auto d = sample_deployment(cfg, 40 + i);
        place_caches(d, half, cat, 40 + i);
        for (const auto& cache : d.cache) {
            const int count = cache[0] + cache[1];
            CHECK(count == 1);  // capacity 1, total probability 1
            first += cache[0];
            total++;
        }
    }
    REQUIRE(total > 10000);
    CHECK(std::abs(double(first) / total - 0.5) < 0.02);

    // p_n = 1 puts the file everywhere; p = 0 nowhere.
    auto cat3 = ContentCatalog::make(3, 0.0, 2, 4e7, 1e9, 1e8);
    CachingPolicy fixed;
    fixed.probs = {1.0, 0.0, 0.7};
    auto d = sample_deployment(cfg, 99);
    place_caches(d, fixed, cat3, 99);
    for (const auto& cache : d.cache) {
        CHECK(cache[0] == 1);
        CHECK(cache[1] == 0);
    }

    CachingPolicy zero;
    zero.probs = {0.0, 0.0, 0.0};
    place_caches(d, zero, cat3, 99);
    for (const auto& cache : d.cache) CHECK(cache[0] + cache[1] + cache[2] == 0);
}

TEST_CASE("node selection on hand-built layouts") {
    NetworkConfig cfg;
    cfg.beta = 0.0;  // all links LOS: powers are pure geometry
    Deployment d;
    d.beta = 0.0;
    d.seed = 1;
    d.ue = {400.0, 400.0};

    // Caching BS 100 m east; relay 50 m west whose only backhaul candidate is
    // that same BS at 150 m: the backhaul hop is weaker than the direct link.
    d.bs = {{500.0, 400.0}};
    d.rn = {{350.0, 400.0}};
    d.cache = {{1}};
    auto sel = select_nodes(d, 0, cfg, d.ue);
    CHECK(sel.cache_hit);
    CHECK(sel.assoc == Association::one_hop);
    CHECK(sel.bs0 == 0);

    // Add a caching BS 10 m from the relay: the relayed path now wins on both
    // hops and must be chosen, with the recorded powers consistent.
    d.bs.push_back({340.0, 400.0});
    d.cache.push_back({1});
    sel = select_nodes(d, 0, cfg, d.ue);
    CHECK(sel.assoc == Association::two_hop);
    CHECK(sel.rn0 == 0);
    CHECK(sel.bs_r0 == 1);
    CHECK(sel.power_two_hop > sel.power_bs0);

    // Without relays the association is always direct.
    d.rn.clear();
    sel = select_nodes(d, 0, cfg, d.ue);
    CHECK(sel.assoc == Association::one_hop);

    // File cached nowhere: offload fails, cache-blind selection still works.
    d.cache = {{0}, {0}};
    sel = select_nodes(d, 0, cfg, d.ue);
    CHECK(!sel.cache_hit);
    const auto blind = select_nodes(d, -1, cfg, d.ue);
    CHECK(blind.cache_hit);
    CHECK(blind.bs0 >= 0);
}

TEST_CASE("node selection agrees with a brute-force oracle") {
    NetworkConfig cfg;
    auto cat = ContentCatalog::make(4, 0.8, 2, 4e7, 1e9, 1e8);
    CachingPolicy pol;
    pol.probs = {0.9, 0.6, 0.3, 0.2};
    int two_hops = 0;
    for (int i = 0; i < 300; ++i) {
        auto d = sample_deployment(cfg, 7000 + i);
        if (d.bs.empty()) continue;
        place_caches(d, pol, cat, 7000 + i);
        for (int file = 0; file < 4; ++file) {
            const auto a = select_nodes(d, file, cfg, d.ue);
            const auto b = select_oracle(d, file, cfg, d.ue);
            CHECK(a.cache_hit == b.cache_hit);
            if (!a.cache_hit) continue;
            CHECK(a.assoc == b.assoc);
            CHECK(a.bs0 == b.bs0);
            if (a.assoc == Association::two_hop) {
                two_hops++;
                CHECK(a.rn0 == b.rn0);
                CHECK(a.bs_r0 == b.bs_r0);
                CHECK(a.power_two_hop > a.power_bs0);  // association consistency
            }
        }
    }
    CHECK(two_hops > 50);  // the two-hop branch was actually exercised
}

TEST_CASE("run_trials is deterministic and threading does not change results") {
    NetworkConfig cfg;
    auto cat = ContentCatalog::make(10, 0.8, 5, 4e7, 1e9, 1e8);
    const auto pol = mpc_policy(cat);

    const auto a = run_trials(cfg, cat, pol, 400, 11, nullptr, 1);
    const auto b = run_trials(cfg, cat, pol, 400, 11, nullptr, 1);
    const auto c = run_trials(cfg, cat, pol, 400, 11, nullptr, 4);
    CHECK(a.sbop == b.sbop);
    CHECK(a.sbop == c.sbop);
    CHECK(a.n_two_hop == c.n_two_hop);

    const auto d = run_trials(cfg, cat, pol, 400, 12, nullptr, 1);
    CHECK(a.sbop != d.sbop);  // different seed, different draws

    CHECK_THROWS_AS(run_trials(cfg, cat, pol, 0, 1), std::invalid_argument);
}

TEST_CASE("impossible thresholds never offload") {
    NetworkConfig cfg;
    auto cat = ContentCatalog::make(3, 0.0, 3, 4e7, 1e9, 1e8);
    for (auto& nu : cat.sinr_thresholds) nu = 1e12;
    const auto pol = mpc_policy(cat);
    const auto stats = run_trials(cfg, cat, pol, 300, 21);
    CHECK(stats.sbop == 0.0);
}

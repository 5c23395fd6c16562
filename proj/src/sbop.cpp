#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "mmwcache/analytic.hpp"
#include "mmwcache/units.hpp"

namespace mmwc {

namespace {

constexpr double kIntensityTail = 45.0;

// One interfering tier as seen by the receiver of the link under study.
struct InterfererTier {
    double density;       // nodes/m^2 after caching thinning
    double tx_power;      // W
    bool excluded;        // carve out nodes stronger than the serving one
    double assoc_p_bar;   // association metric scale of this tier
};

std::array<InterfererTier, 3> interferer_tiers(Link link, double p_n,
                                               const NetworkConfig& cfg, int& count) {
    const double pbar_bs = cfg.gamma_intercept * cfg.p_bs * cfg.aligned_gain() * cfg.bias_bs;
    const double pbar_rn = cfg.gamma_intercept * cfg.p_rn * cfg.aligned_gain() * cfg.bias_rn;
    std::array<InterfererTier, 3> tiers{};
    switch (link) {
        case Link::one_hop:
            tiers[0] = {cfg.lambda_bs * p_n, cfg.p_bs, true, pbar_bs};
            tiers[1] = {cfg.lambda_bs * (1.0 - p_n), cfg.p_bs, false, pbar_bs};
            tiers[2] = {cfg.lambda_rn, cfg.p_rn, false, pbar_rn};
            count = 3;
            break;
        case Link::backhaul:
            // First relaying slot: only BSs transmit.
            tiers[0] = {cfg.lambda_bs * p_n, cfg.p_bs, true, pbar_bs};
            tiers[1] = {cfg.lambda_bs * (1.0 - p_n), cfg.p_bs, false, pbar_bs};
            count = 2;
            break;
        case Link::relay_access:
            tiers[0] = {cfg.lambda_rn, cfg.p_rn, true, pbar_rn};
            tiers[1] = {cfg.lambda_bs, cfg.p_bs, false, pbar_bs};
            count = 2;
            break;
    }
    return tiers;
}

// Exponent contribution of one (tier, link-state, gain) cell:
//   int_d^inf (1 - (1 + A x^-alpha / N)^-N) rho(x) x dx,
// where A collects the Laplace argument and the interferer EIRP. The range
// beyond the numeric window is added back with the small-argument tail.
double exclusion_integral(double A, double alpha, int shape, bool los, double beta,
                          double d, double abs_tol) {
    if (!(A > 0.0)) return 0.0;
    if (!los && beta == 0.0) return 0.0;  // no blockages, no NLOS links
    if (los && beta == 0.0 && alpha <= 2.0 + 1e-12)
        throw numeric_error("interference integral diverges for alpha_los <= 2 without blockage");

    const double n = shape;
    auto integrand = [&](double x) {
        const double z = A * std::pow(x, -alpha) / n;
        const double mgf = std::pow(1.0 + z, -n);
        const double rho = los ? std::exp(-beta * x) : -std::expm1(-beta * x);
        return (1.0 - mgf) * rho * x;
    };

    // z = A x^-alpha falls to 1e-4 at x_z; past there the integrand is the
    // linearized tail A x^(1-alpha) rho(x).
    const double x_z = std::pow(A * 1e4, 1.0 / alpha);
    double upper;
    double tail = 0.0;
    if (los) {
        upper = beta > 0.0 ? std::max(x_z, 70.0 / beta) : x_z;
        if (beta == 0.0) tail = A * std::pow(upper, 2.0 - alpha) / (alpha - 2.0);
    } else {
        upper = std::max(x_z, 70.0 / beta);
        tail = A * std::pow(upper, 2.0 - alpha) / (alpha - 2.0);
    }
    if (upper <= d) {
        // Entire numeric window excluded; keep the analytic remainder only.
        if (!los || beta == 0.0) return A * std::pow(d, 2.0 - alpha) / (alpha - 2.0);
        return 0.0;
    }
    return integrate_adaptive(integrand, d, upper, abs_tol, 1024) + tail;
}

double laplace_exponent(Link link, double p_n, double s, double t_excl,
                        const NetworkConfig& cfg, const GainPattern& gains) {
    int count = 0;
    const auto tiers = interferer_tiers(link, p_n, cfg, count);
    const std::array<GainPattern::Entry, 3> entries{gains.mm, gains.ms, gains.ss};
    double exponent = 0.0;
    for (int c = 0; c < count; ++c) {
        const InterfererTier& tier = tiers[c];
        if (tier.density <= 0.0) continue;
        for (int state = 0; state < 2; ++state) {
            const bool los = state == 0;
            const double alpha = los ? cfg.alpha_los : cfg.alpha_nlos;
            const int shape = los ? cfg.n_los : cfg.n_nlos;
            const double d =
                tier.excluded ? std::pow(t_excl * tier.assoc_p_bar, 1.0 / alpha) : 0.0;
            for (const auto& entry : entries) {
                if (entry.prob <= 0.0) continue;
                const double A = s * cfg.gamma_intercept * tier.tx_power * entry.gain;
                const double coef = 2.0 * M_PI * tier.density * entry.prob;
                // Error budget on the exponent itself, not the raw integral.
                const double tol = std::clamp(2e-8 / coef, 1e-12, 1e9);
                exponent += coef *
                            exclusion_integral(A, alpha, shape, los, cfg.beta, d, tol);
            }
        }
        if (exponent > 745.0) return exponent;  // transform already underflows
    }
    return exponent;
}

// Alzer coefficient eta = N (N!)^(-1/N).
double alzer_eta(int n) {
    return n * std::pow(std::tgamma(n + 1.0), -1.0 / n);
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

struct HopSpec {
    Link link;
    double serving_bias;  // bias of the serving tier, enters the SINR scale
};

// Conditional success probability of one hop, integrated over the weighted
// serving-link distribution by Gauss-Laguerre applied in the intensity
// variable x = Lambda(t); there the serving density is exactly exp(-x).
// The node axis is compressed linearly when the integrand dies well before
// the first nodes would sample it (hard thresholds, mismatched tier
// densities), keeping the rule's nodes inside the effective support.
double hop_success(const HopSpec& hop, double p_n, double nu, const NetworkConfig& cfg,
                   const QuadratureRule& rule, const GainPattern& gains) {
    if (!(nu > 0.0)) throw std::invalid_argument("sinr threshold must be > 0");
    const InversePowerDist bs_n{TierSpec::bs_tier(cfg, p_n)};
    const InversePowerDist rn{TierSpec::rn_tier(cfg)};
    const InversePowerDist& serving = hop.link == Link::relay_access ? rn : bs_n;
    if (serving.tier().density == 0.0)
        throw numeric_error("hop_success: serving tier is empty");

    const double z_norm = weighted_pdf_normalizer(hop.link, p_n, cfg);
    const double eta[2] = {alzer_eta(cfg.n_los), alzer_eta(cfg.n_nlos)};
    const int shape[2] = {cfg.n_los, cfg.n_nlos};

    auto chi_at = [&](double t) {
        switch (hop.link) {
            case Link::one_hop: return chi_one_hop(bs_n, rn, t);
            case Link::backhaul: return chi_backhaul(bs_n, rn, t);
            case Link::relay_access: return chi_relay_access(bs_n, t);
        }
        return 0.0;
    };

    // Effective support of the integrand from a cheap proxy (association
    // weight times the dominant noise attenuation, no interference).
    const int probes = 25;
    double proxy[probes];
    double peak = 0.0;
    for (int j = 0; j < probes; ++j) {
        const double x = kIntensityTail * std::pow(10.0, -6.0 * (probes - 1 - j) /
                                                             (probes - 1));
        const double t = serving.intensity_inverse(x);
        proxy[j] = chi_at(t) * std::exp(-eta[0] * nu * t * hop.serving_bias *
                                        cfg.noise_power);
        peak = std::max(peak, proxy[j]);
    }
    double x_eff = kIntensityTail;
    for (int j = probes - 1; j >= 0; --j) {
        if (proxy[j] >= 1e-9 * peak) break;
        x_eff = kIntensityTail *
                std::pow(10.0, -6.0 * (probes - 1 - j) / (probes - 1));
    }
    const double scale =
        std::min(1.0, 1.3 * std::max(x_eff, 1e-7) / rule.nodes.back());

    double sum = 0.0;
    for (int i = 0; i < rule.order; ++i) {
        const double x = scale * rule.nodes[i];
        if (x >= kIntensityTail) break;
        // scaled-node weight s w_i e^{(1-s) y_i}, assembled in log space
        const double weight = std::exp(std::log(rule.weights[i]) +
                                       rule.nodes[i] * (1.0 - scale) +
                                       std::log(scale));
        const double t = serving.intensity_inverse(x);
        const double chi = chi_at(t);
        if (chi * weight < 1e-15) continue;
        const double share_los = serving.los_share(t);
        const double share[2] = {share_los, 1.0 - share_los};
        double success = 0.0;
        for (int k = 0; k < 2; ++k) {
            if (share[k] <= 0.0) continue;
            double acc = 0.0;
            for (int u = 1; u <= shape[k]; ++u) {
                const double s = u * eta[k] * nu * t * hop.serving_bias;
                const double noise_factor = std::exp(-s * cfg.noise_power);
                if (noise_factor < 1e-17) continue;
                const double sign = (u % 2 == 1) ? 1.0 : -1.0;
                const double lap =
                    std::exp(-laplace_exponent(hop.link, p_n, s, t, cfg, gains));
                acc += sign * binom(shape[k], u) * noise_factor * lap;
            }
            success += share[k] * acc;
        }
        sum += weight * chi * success;
    }
    return std::clamp(sum / z_norm, 0.0, 1.0);
}

}  // namespace

double laplace_interference(Link link, double p_n, double s, double t_excl,
                            const NetworkConfig& cfg, const GainPattern& gains) {
    if (s < 0.0) throw std::invalid_argument("laplace argument must be >= 0");
    if (t_excl < 0.0) throw std::invalid_argument("exclusion level must be >= 0");
    if (s == 0.0) return 1.0;
    return std::exp(-laplace_exponent(link, p_n, s, t_excl, cfg, gains));
}

double laplace_interference(Link link, double p_n, double s, double t_excl,
                            const NetworkConfig& cfg) {
    return laplace_interference(link, p_n, s, t_excl, cfg,
                                gain_distribution(cfg.theta, cfg.gain_main, cfg.gain_side));
}

double sbop_one_hop(double p_n, double nu_n, const NetworkConfig& cfg,
                    const QuadratureRule& rule) {
    if (p_n < 0.0 || p_n > 1.0) throw std::invalid_argument("p_n must lie in [0, 1]");
    if (p_n == 0.0) return 0.0;  // no caching BS can serve the file
    const GainPattern gains = gain_distribution(cfg.theta, cfg.gain_main, cfg.gain_side);
    return hop_success({Link::one_hop, cfg.bias_bs}, p_n, nu_n, cfg, rule, gains);
}

double sbop_two_hop(double p_n, double nu_n, const NetworkConfig& cfg,
                    const QuadratureRule& rule) {
    if (p_n < 0.0 || p_n > 1.0) throw std::invalid_argument("p_n must lie in [0, 1]");
    if (p_n == 0.0) return 0.0;
    const GainPattern gains = gain_distribution(cfg.theta, cfg.gain_main, cfg.gain_side);
    const double backhaul =
        hop_success({Link::backhaul, cfg.bias_bs}, p_n, nu_n, cfg, rule, gains);
    const double access =
        hop_success({Link::relay_access, cfg.bias_rn}, p_n, nu_n, cfg, rule, gains);
    return std::clamp(backhaul * access, 0.0, 1.0);
}

SbopEngine::SbopEngine(NetworkConfig cfg, ContentCatalog catalog, int quadrature_order)
    : cfg_(std::move(cfg)),
      catalog_(std::move(catalog)),
      rule_(gauss_laguerre(quadrature_order)),
      gains_(gain_distribution(cfg_.theta, cfg_.gain_main, cfg_.gain_side)) {
    cfg_.validate();
    catalog_.validate();
    p_two_hop_ = two_hop_probability(cfg_);
}

std::pair<double, double> SbopEngine::file_sbop(int file_index, double p_n) const {
    if (file_index < 0 || file_index >= catalog_.f_count)
        throw std::invalid_argument("file index out of range");
    if (p_n <= 0.0) return {0.0, 0.0};
    const uint64_t key = (static_cast<uint64_t>(file_index) * 0x9e3779b97f4a7c15ull) ^
                         std::bit_cast<uint64_t>(p_n);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const double nu = catalog_.sinr_thresholds[file_index];
    const double one = hop_success({Link::one_hop, cfg_.bias_bs}, p_n, nu, cfg_, rule_, gains_);
    double two = 0.0;
    if (p_two_hop_ > 0.0) {
        const double bh =
            hop_success({Link::backhaul, cfg_.bias_bs}, p_n, nu, cfg_, rule_, gains_);
        const double ra =
            hop_success({Link::relay_access, cfg_.bias_rn}, p_n, nu, cfg_, rule_, gains_);
        two = std::clamp(bh * ra, 0.0, 1.0);
    }
    const std::pair<double, double> out{one, two};
    memo_.emplace(key, out);
    return out;
}

SbopBreakdown SbopEngine::total_sbop(const CachingPolicy& policy) const {
    // Range check only: the closed forms are well-defined for any p in
    // [0,1]^F, and optimizer upper bounds evaluate above the cache budget.
    for (double p : policy.probs)
        if (!(p >= 0.0) || !(p <= 1.0))
            throw std::invalid_argument("policy: probabilities must lie in [0, 1]");
    if (static_cast<int>(policy.probs.size()) != catalog_.f_count)
        throw std::invalid_argument("policy length does not match catalog");
    SbopBreakdown b;
    b.p_two_hop = p_two_hop_;
    b.p_one_hop = 1.0 - p_two_hop_;
    b.per_file_one_hop.resize(catalog_.f_count);
    b.per_file_two_hop.resize(catalog_.f_count);
    double total = 0.0;
    for (int n = 0; n < catalog_.f_count; ++n) {
        const auto [one, two] = file_sbop(n, policy.probs[n]);
        b.per_file_one_hop[n] = one;
        b.per_file_two_hop[n] = two;
        total += catalog_.popularity[n] * (b.p_one_hop * one + b.p_two_hop * two);
    }
    b.total = std::clamp(total, 0.0, 1.0);
    return b;
}

SbopBreakdown total_sbop(const CachingPolicy& policy, const ContentCatalog& catalog,
                         const NetworkConfig& cfg, const QuadratureRule& rule) {
    SbopEngine engine(cfg, catalog, rule.order);
    return engine.total_sbop(policy);
}

}  // namespace mmwc

#include <algorithm>
#include <cmath>

#include "mmwcache/analytic.hpp"
#include "mmwcache/units.hpp"

namespace mmwc {

namespace {

// Intensity mass beyond which the serving-link CDF is treated as 1.
constexpr double kIntensityTail = 45.0;

// h(x) = (1 - exp(-x)(1+x)) / x^2, the normalized blocked-annulus integral
// int_0^a v exp(-beta v) dv = a^2 h(beta a). Series near 0 avoids cancellation.
double annulus_h(double x) {
    if (x < 1e-3) {
        // sum_j (-1)^j (j+1) x^j / (j+2)!
        return 0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0;
    }
    return (1.0 - std::exp(-x) * (1.0 + x)) / (x * x);
}

}  // namespace

TierSpec TierSpec::bs_tier(const NetworkConfig& cfg, double p_n) {
    TierSpec t;
    t.density = cfg.lambda_bs * p_n;
    t.p_bar = cfg.gamma_intercept * cfg.p_bs * cfg.aligned_gain() * cfg.bias_bs;
    t.alpha_los = cfg.alpha_los;
    t.alpha_nlos = cfg.alpha_nlos;
    t.beta = cfg.beta;
    return t;
}

TierSpec TierSpec::rn_tier(const NetworkConfig& cfg) {
    TierSpec t;
    t.density = cfg.lambda_rn;
    t.p_bar = cfg.gamma_intercept * cfg.p_rn * cfg.aligned_gain() * cfg.bias_rn;
    t.alpha_los = cfg.alpha_los;
    t.alpha_nlos = cfg.alpha_nlos;
    t.beta = cfg.beta;
    return t;
}

InversePowerDist::InversePowerDist(TierSpec tier) : tier_(tier) {
    if (tier_.density < 0.0) throw std::invalid_argument("tier density must be >= 0");
    if (!(tier_.p_bar > 0.0)) throw std::invalid_argument("tier p_bar must be > 0");
}

double InversePowerDist::intensity(double t) const {
    if (t < 0.0) throw std::invalid_argument("inverse power must be >= 0");
    if (t == 0.0 || tier_.density == 0.0) return 0.0;
    const double a_los = std::pow(t * tier_.p_bar, 1.0 / tier_.alpha_los);
    double mass = a_los * a_los * annulus_h(tier_.beta * a_los);
    if (tier_.include_nlos) {
        const double a_nlos = std::pow(t * tier_.p_bar, 1.0 / tier_.alpha_nlos);
        mass += a_nlos * a_nlos * (0.5 - annulus_h(tier_.beta * a_nlos));
    }
    return 2.0 * M_PI * tier_.density * mass;
}

double InversePowerDist::intensity_deriv_los(double t) const {
    if (tier_.density == 0.0 || !(t > 0.0)) return 0.0;
    const double e = 2.0 / tier_.alpha_los;
    const double a_los = std::pow(t * tier_.p_bar, 1.0 / tier_.alpha_los);
    return M_PI * tier_.density * e * std::pow(tier_.p_bar, e) * std::pow(t, e - 1.0) *
           std::exp(-tier_.beta * a_los);
}

double InversePowerDist::intensity_deriv_nlos(double t) const {
    if (!tier_.include_nlos || tier_.density == 0.0 || !(t > 0.0) || tier_.beta == 0.0)
        return 0.0;
    const double e = 2.0 / tier_.alpha_nlos;
    const double a_nlos = std::pow(t * tier_.p_bar, 1.0 / tier_.alpha_nlos);
    return M_PI * tier_.density * e * std::pow(tier_.p_bar, e) * std::pow(t, e - 1.0) *
           (-std::expm1(-tier_.beta * a_nlos));
}

double InversePowerDist::intensity_deriv(double t) const {
    return intensity_deriv_los(t) + intensity_deriv_nlos(t);
}

double InversePowerDist::cdf(double t) const { return -std::expm1(-intensity(t)); }

double InversePowerDist::ccdf(double t) const { return std::exp(-intensity(t)); }

double InversePowerDist::pdf(double t) const {
    if (tier_.density == 0.0 || !(t > 0.0)) return 0.0;
    return intensity_deriv(t) * std::exp(-intensity(t));
}

double InversePowerDist::intensity_inverse(double x) const {
    if (x < 0.0) throw std::invalid_argument("intensity value must be >= 0");
    if (x == 0.0) return 0.0;
    if (tier_.density == 0.0)
        throw numeric_error("intensity_inverse: empty tier has no inverse");
    // Bracket from the single-state solutions, then safeguarded Newton.
    const double disc = x / (M_PI * tier_.density);
    double guess_los = std::pow(disc, tier_.alpha_los / 2.0) / tier_.p_bar;
    double lo = guess_los;
    double hi = guess_los;
    if (tier_.include_nlos) {
        const double guess_nlos = std::pow(2.0 * disc, tier_.alpha_nlos / 2.0) / tier_.p_bar;
        lo = std::min(lo, guess_nlos);
        hi = std::max(hi, guess_nlos);
    }
    for (int i = 0; i < 2000 && intensity(lo) > x; ++i) lo *= 0.5;
    for (int i = 0; i < 2000 && intensity(hi) < x; ++i) hi *= 2.0;
    if (intensity(lo) > x || intensity(hi) < x)
        throw numeric_error("intensity_inverse: failed to bracket");
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double g = intensity(t) - x;
        if (g > 0.0)
            hi = t;
        else
            lo = t;
        const double d = intensity_deriv(t);
        double step = d > 0.0 ? g / d : 0.0;
        double next = t - step;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-13 * std::max(t, 1e-300)) return next;
        t = next;
    }
    return t;
}

double InversePowerDist::truncation_point(double tail_mass) const {
    return intensity_inverse(-std::log(tail_mass));
}

double InversePowerDist::los_share(double t) const {
    const double dl = intensity_deriv_los(t);
    const double dn = intensity_deriv_nlos(t);
    const double d = dl + dn;
    if (d <= 0.0) return 1.0;
    return dl / d;
}

double chi_one_hop(const InversePowerDist& bs_n, const InversePowerDist& rn, double t) {
    return rn.ccdf(t) * bs_n.cdf(t) + bs_n.ccdf(t);
}

double chi_backhaul(const InversePowerDist& bs_n, const InversePowerDist& rn, double t) {
    if (bs_n.tier().density == 0.0 || rn.tier().density == 0.0) return 0.0;
    const double x0 = bs_n.intensity(t);
    if (x0 >= kIntensityTail) return 0.0;
    return integrate_adaptive(
        [&](double x) { return std::exp(-x) * rn.cdf(bs_n.intensity_inverse(x)); }, x0,
        kIntensityTail, 1e-9);
}

double chi_relay_access(const InversePowerDist& bs_n, double t) {
    if (bs_n.tier().density == 0.0) return 0.0;
    // int_t^inf pdf_bs(x) cdf_bs(x) dx has a closed form in the intensity.
    const double e = std::exp(-bs_n.intensity(t));
    return e - 0.5 * e * e;
}

UarProbabilities uar_probabilities(double p_n, double t, const NetworkConfig& cfg) {
    if (p_n < 0.0 || p_n > 1.0) throw std::invalid_argument("p_n must lie in [0, 1]");
    if (t < 0.0) throw std::invalid_argument("inverse power must be >= 0");
    const InversePowerDist bs_n{TierSpec::bs_tier(cfg, p_n)};
    const InversePowerDist rn{TierSpec::rn_tier(cfg)};
    UarProbabilities out;
    out.chi_bu = chi_one_hop(bs_n, rn, t);
    out.chi_br = chi_backhaul(bs_n, rn, t);
    out.chi_ru = chi_relay_access(bs_n, t);
    return out;
}

namespace {

struct LinkDists {
    InversePowerDist serving;
    InversePowerDist bs_n;
    InversePowerDist rn;
};

LinkDists make_dists(Link link, double p_n, const NetworkConfig& cfg) {
    InversePowerDist bs_n{TierSpec::bs_tier(cfg, p_n)};
    InversePowerDist rn{TierSpec::rn_tier(cfg)};
    InversePowerDist serving = (link == Link::relay_access) ? rn : bs_n;
    return {serving, bs_n, rn};
}

double chi_for(Link link, const LinkDists& d, double t) {
    switch (link) {
        case Link::one_hop: return chi_one_hop(d.bs_n, d.rn, t);
        case Link::backhaul: return chi_backhaul(d.bs_n, d.rn, t);
        case Link::relay_access: return chi_relay_access(d.bs_n, t);
    }
    return 0.0;
}

}  // namespace

double weighted_pdf_normalizer(Link link, double p_n, const NetworkConfig& cfg) {
    const LinkDists d = make_dists(link, p_n, cfg);
    if (d.serving.tier().density == 0.0)
        throw numeric_error("weighted_pdf: serving tier is empty");
    double z = 0.0;
    if (link == Link::backhaul) {
        // Swap the order of the nested integrals: the inner cumulative of the
        // serving pdf is just its CDF, leaving one integral.
        z = integrate_adaptive(
            [&](double x) {
                return std::exp(-x) * (1.0 - std::exp(-x)) *
                       d.rn.cdf(d.bs_n.intensity_inverse(x));
            },
            0.0, kIntensityTail, 1e-9);
    } else {
        z = integrate_adaptive(
            [&](double x) {
                return std::exp(-x) * chi_for(link, d, d.serving.intensity_inverse(x));
            },
            0.0, kIntensityTail, 1e-9);
    }
    if (!(z > 1e-14))
        throw numeric_error("weighted_pdf: association weight is degenerate for this link");
    return z;
}

double weighted_pdf(Link link, double p_n, double t, const NetworkConfig& cfg) {
    const LinkDists d = make_dists(link, p_n, cfg);
    const double z = weighted_pdf_normalizer(link, p_n, cfg);
    return d.serving.pdf(t) * chi_for(link, d, t) / z;
}

double two_hop_probability(const NetworkConfig& cfg) {
    cfg.validate();
    if (cfg.lambda_rn == 0.0) return 0.0;
    const InversePowerDist bs{TierSpec::bs_tier(cfg, 1.0)};
    const InversePowerDist rn{TierSpec::rn_tier(cfg)};
    return 0.5 * integrate_adaptive(
                     [&](double x) {
                         return std::exp(-x) * rn.cdf(bs.intensity_inverse(x));
                     },
                     0.0, kIntensityTail, 1e-9);
}

}  // namespace mmwc

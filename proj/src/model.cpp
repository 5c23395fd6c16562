#include "mmwcache/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mmwc {

void NetworkConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    if (!(lambda_bs > 0.0)) fail("lambda_bs must be > 0");
    if (lambda_rn < 0.0) fail("lambda_rn must be >= 0");
    if (lambda_ue < 0.0) fail("lambda_ue must be >= 0");
    if (!(p_bs > 0.0) || !(p_rn > 0.0)) fail("transmit powers must be > 0");
    if (!(bias_bs > 0.0) || !(bias_rn > 0.0)) fail("bias coefficients must be > 0");
    if (!(bandwidth > 0.0)) fail("bandwidth must be > 0");
    if (!(alpha_los >= 2.0)) fail("alpha_los must be >= 2");
    if (!(alpha_nlos > alpha_los)) fail("alpha_nlos must exceed alpha_los");
    if (beta < 0.0) fail("beta must be >= 0");
    if (!(theta > 0.0) || !(theta < 2.0 * M_PI)) fail("theta must lie in (0, 2pi)");
    if (!(gain_main > gain_side) || !(gain_side > 0.0)) fail("need gain_main > gain_side > 0");
    if (n_los < 1 || n_nlos < 1) fail("Nakagami shapes must be positive integers");
    if (!(gamma_intercept > 0.0)) fail("gamma_intercept must be > 0");
    if (!(noise_power > 0.0)) fail("noise_power must be > 0");
    if (!(area_side > 0.0)) fail("area_side must be > 0");
}

ContentCatalog ContentCatalog::make(int f_count, double delta, double cache_size,
                                    double tau_min, double tau_max, double bandwidth) {
    if (f_count < 1) throw std::invalid_argument("catalog: f_count must be >= 1");
    if (!(tau_min > 0.0) || tau_max < tau_min)
        throw std::invalid_argument("catalog: need 0 < tau_min <= tau_max");
    ContentCatalog c;
    c.f_count = f_count;
    c.delta = delta;
    c.cache_size = cache_size;
    c.popularity = zipf_popularity(f_count, delta);
    c.target_rates.resize(f_count);
    c.sinr_thresholds.resize(f_count);
    // Evenly spaced target rates, descending with the file index: the most
    // requested content carries the highest rate demand.
    for (int n = 0; n < f_count; ++n) {
        const double frac = f_count > 1 ? static_cast<double>(n) / (f_count - 1) : 0.0;
        c.target_rates[n] = tau_max - frac * (tau_max - tau_min);
        c.sinr_thresholds[n] = std::exp2(c.target_rates[n] / bandwidth) - 1.0;
    }
    c.validate();
    return c;
}

void ContentCatalog::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("catalog: " + msg); };
    if (f_count < 1) fail("f_count must be >= 1");
    if (static_cast<int>(popularity.size()) != f_count) fail("popularity size mismatch");
    if (static_cast<int>(target_rates.size()) != f_count) fail("target_rates size mismatch");
    if (static_cast<int>(sinr_thresholds.size()) != f_count) fail("sinr_thresholds size mismatch");
    if (!(cache_size >= 1.0) || cache_size > f_count) fail("need 1 <= cache_size <= f_count");
    const double sum = std::accumulate(popularity.begin(), popularity.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12) fail("popularity must sum to 1");
    for (int n = 0; n < f_count; ++n) {
        if (delta > 0.0 && n > 0 && !(popularity[n] < popularity[n - 1]))
            fail("popularity must be strictly decreasing for delta > 0");
        if (!(sinr_thresholds[n] > 0.0)) fail("sinr thresholds must be > 0");
    }
}

double CachingPolicy::total() const {
    return std::accumulate(probs.begin(), probs.end(), 0.0);
}

void CachingPolicy::validate(double cache_size) const {
    for (double p : probs)
        if (!(p >= 0.0) || !(p <= 1.0))
            throw std::invalid_argument("policy: probabilities must lie in [0, 1]");
    if (total() > cache_size + 1e-9)
        throw std::invalid_argument("policy: total probability exceeds cache size");
}

std::vector<double> zipf_popularity(int f_count, double delta) {
    if (f_count < 1) throw std::invalid_argument("zipf_popularity: f_count must be >= 1");
    if (delta < 0.0) throw std::invalid_argument("zipf_popularity: delta must be >= 0");
    std::vector<double> a(f_count);
    double norm = 0.0;
    for (int n = 1; n <= f_count; ++n) norm += std::pow(n, -delta);
    for (int n = 1; n <= f_count; ++n) a[n - 1] = std::pow(n, -delta) / norm;
    return a;
}

double los_probability(double r, double beta) {
    if (r < 0.0) throw std::invalid_argument("los_probability: r must be >= 0");
    if (beta < 0.0) throw std::invalid_argument("los_probability: beta must be >= 0");
    return std::exp(-beta * r);
}

GainPattern gain_distribution(double theta, double gain_main, double gain_side) {
    if (!(theta > 0.0) || !(theta < 2.0 * M_PI))
        throw std::invalid_argument("gain_distribution: theta must lie in (0, 2pi)");
    const double f = theta / (2.0 * M_PI);
    GainPattern g;
    g.mm = {gain_main * gain_main, f * f};
    g.ms = {gain_main * gain_side, 2.0 * f * (1.0 - f)};
    g.ss = {gain_side * gain_side, (1.0 - f) * (1.0 - f)};
    return g;
}

double path_loss(double r, double alpha, double gamma_intercept) {
    if (!(r > 0.0)) throw std::invalid_argument("path_loss: r must be > 0");
    return gamma_intercept * std::pow(r, -alpha);
}

CachingPolicy mpc_policy(const ContentCatalog& catalog) {
    catalog.validate();
    CachingPolicy p;
    p.probs.assign(catalog.f_count, 0.0);
    const int c = static_cast<int>(catalog.cache_size);
    for (int n = 0; n < c && n < catalog.f_count; ++n) p.probs[n] = 1.0;
    return p;
}

CachingPolicy uc_policy(const ContentCatalog& catalog) {
    catalog.validate();
    CachingPolicy p;
    p.probs.assign(catalog.f_count, catalog.cache_size / catalog.f_count);
    return p;
}

}  // namespace mmwc

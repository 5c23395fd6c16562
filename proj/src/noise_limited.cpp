#include "mmwcache/noise_limited.hpp"

#include <algorithm>
#include <cmath>

#include "mmwcache/quadrature.hpp"

namespace mmwc {

namespace {

// Regularized upper incomplete gamma Q(n, z) for integer n:
// exp(-z) sum_{j<n} z^j / j!.
double upper_gamma_reg(int n, double z) {
    if (z <= 0.0) return 1.0;
    double term = std::exp(-z);
    double sum = term;
    for (int j = 1; j < n; ++j) {
        term *= z / j;
        sum += term;
    }
    return sum;
}

}  // namespace

double coverage_prefactor(double density, double kappa, int n_los) {
    return M_PI * density * kappa * std::tgamma(kappa + n_los) /
           (std::pow(n_los, kappa) * std::tgamma(static_cast<double>(n_los)));
}

double coverage_correction(double density, double alpha_los, double alpha_nlos,
                           double beta, int n_los, int n_nlos, double xi) {
    if (density == 0.0 || !(xi > 0.0)) return 0.0;
    double total = 0.0;
    const double alphas[2] = {alpha_los, alpha_nlos};
    const int shapes[2] = {n_los, n_nlos};
    for (int k = 0; k < 2; ++k) {
        const double alpha = alphas[k];
        const int shape = shapes[k];
        auto integrand = [&](double v) {
            return v * std::exp(-beta * v) *
                   upper_gamma_reg(shape, shape * std::pow(v, alpha) / xi);
        };
        // Both factors die: blockage past ~60/beta, the gamma tail past the
        // scale where v^alpha ~ 60 xi / shape.
        double upper = std::pow(60.0 * xi / shape, 1.0 / alpha);
        if (beta > 0.0) upper = std::min(upper, 70.0 / beta);
        if (!(upper > 0.0)) continue;
        total += 2.0 * M_PI * density * integrate_adaptive(integrand, 0.0, upper, 1e-12);
    }
    if (!std::isfinite(total))
        throw numeric_error("coverage_correction: integral did not converge");
    return total;
}

KktCoefficients compute_kkt_coefficients(const ContentCatalog& catalog,
                                         const NetworkConfig& cfg) {
    cfg.validate();
    catalog.validate();
    const double kappa = 2.0 / cfg.alpha_nlos;
    const double c_bs = coverage_prefactor(cfg.lambda_bs, kappa, cfg.n_los);
    const double c_rn = coverage_prefactor(cfg.lambda_rn, kappa, cfg.n_los);
    const double p2 = two_hop_probability(cfg);
    const double p1 = 1.0 - p2;
    const double g0 = cfg.aligned_gain();

    KktCoefficients out;
    out.k.resize(catalog.f_count);
    out.t.resize(catalog.f_count);
    for (int n = 0; n < catalog.f_count; ++n) {
        const double nu = catalog.sinr_thresholds[n];
        const double xi_bs = cfg.gamma_intercept * cfg.p_bs * g0 / (cfg.noise_power * nu);
        const double xi_rn = cfg.gamma_intercept * cfg.p_rn * g0 / (cfg.noise_power * nu);
        out.t[n] = c_bs * std::pow(xi_bs, kappa) +
                   coverage_correction(cfg.lambda_bs, cfg.alpha_los, cfg.alpha_nlos,
                                       cfg.beta, cfg.n_los, cfg.n_nlos, xi_bs);
        double relay_cov = 0.0;
        if (cfg.lambda_rn > 0.0) {
            const double exponent =
                c_rn * std::pow(xi_rn, kappa) +
                coverage_correction(cfg.lambda_rn, cfg.alpha_los, cfg.alpha_nlos,
                                    cfg.beta, cfg.n_los, cfg.n_nlos, xi_rn);
            relay_cov = -std::expm1(-exponent);
        }
        out.k[n] = p1 + relay_cov * p2;
    }
    return out;
}

double sbop_noise_limited(const CachingPolicy& policy, const ContentCatalog& catalog,
                          const KktCoefficients& coeffs) {
    if (policy.probs.size() != coeffs.k.size() ||
        static_cast<int>(policy.probs.size()) != catalog.f_count)
        throw std::invalid_argument("noise-limited: size mismatch");
    double total = 0.0;
    for (int n = 0; n < catalog.f_count; ++n)
        total += coeffs.k[n] * catalog.popularity[n] *
                 (-std::expm1(-policy.probs[n] * coeffs.t[n]));
    return std::clamp(total, 0.0, 1.0);
}

double sbop_noise_limited(const CachingPolicy& policy, const ContentCatalog& catalog,
                          const NetworkConfig& cfg) {
    return sbop_noise_limited(policy, catalog, compute_kkt_coefficients(catalog, cfg));
}

}  // namespace mmwc

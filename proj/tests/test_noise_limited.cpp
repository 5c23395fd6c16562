#include <doctest.h>

#include <cmath>
#include <vector>

#include "mmwcache/noise_limited.hpp"

using namespace mmwc;

namespace {

// Literal two-dimensional form of the coverage correction: for each link
// state, a dense log-spaced trapezoid over (psi, xi_hat).
double coverage_oracle(double density, double alpha_los, double alpha_nlos, double beta,
                       int n_los, int n_nlos, double xi, int n_psi = 3000,
                       int n_xi = 1200) {
    double total = 0.0;
    const double alphas[2] = {alpha_los, alpha_nlos};
    const int shapes[2] = {n_los, n_nlos};
    for (int k = 0; k < 2; ++k) {
        const double alpha = alphas[k];
        const int n = shapes[k];
        const double prefactor = 2.0 * M_PI * std::pow(double(n), n) * density /
                                 (alpha * std::tgamma(double(n)));
        double psi_hi = xi * 1e5;
        if (beta > 0.0) psi_hi = std::min(psi_hi, std::pow(80.0 / beta, alpha));
        const double psi_lo = xi * 1e-9;
        if (!(psi_hi > psi_lo)) continue;

        auto inner = [&](double psi) {
            // int_0^xi exp(-n psi / x) / x^(n+1) dx, log-trapezoid
            const double x_hi = xi;
            const double x_lo = std::min(xi, n * psi) * 1e-7;
            const double lr = std::log(x_hi / x_lo);
            double acc = 0.0;
            double prev = 0.0;
            for (int i = 0; i <= n_xi; ++i) {
                const double x = x_lo * std::exp(lr * i / n_xi);
                const double f = std::exp(-n * psi / x) * std::pow(x, -(n + 1.0)) * x;
                if (i > 0) acc += 0.5 * (prev + f) * (lr / n_xi);
                prev = f;
            }
            return acc;
        };

        const double lpsi = std::log(psi_hi / psi_lo);
        double acc = 0.0;
        double prev = 0.0;
        for (int i = 0; i <= n_psi; ++i) {
            const double psi = psi_lo * std::exp(lpsi * i / n_psi);
            const double f = std::pow(psi, 2.0 / alpha + n - 1.0) *
                             std::exp(-beta * std::pow(psi, 1.0 / alpha)) * inner(psi) *
                             psi;
            if (i > 0) acc += 0.5 * (prev + f) * (lpsi / n_psi);
            prev = f;
        }
        total += prefactor * acc;
    }
    return total;
}

}  // namespace

TEST_CASE("coverage correction matches the dense-grid oracle") {
    NetworkConfig cfg;
    const auto cat = ContentCatalog::make(20, 0.8, 10, 4e7, 1e9, 1e8);
    const double g0 = cfg.aligned_gain();
    for (int n : {0, 9, 19}) {
        const double xi = cfg.gamma_intercept * cfg.p_bs * g0 /
                          (cfg.noise_power * cat.sinr_thresholds[n]);
        const double prod = coverage_correction(cfg.lambda_bs, cfg.alpha_los,
                                                cfg.alpha_nlos, cfg.beta, cfg.n_los,
                                                cfg.n_nlos, xi);
        const double oracle = coverage_oracle(cfg.lambda_bs, cfg.alpha_los, cfg.alpha_nlos,
                                              cfg.beta, cfg.n_los, cfg.n_nlos, xi);
        CHECK(prod == doctest::Approx(oracle).epsilon(1e-4));
    }
}

TEST_CASE("coverage prefactor arithmetic") {
    // kappa = 2 / alpha_nlos = 0.5 at the default exponents.
    const double c = coverage_prefactor(1e-5, 0.5, 3);
    const double expected = M_PI * 1e-5 * 0.5 * std::tgamma(3.5) /
                            (std::sqrt(3.0) * std::tgamma(3.0));
    CHECK(c == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kkt coefficients: no relays means K = 1") {
    NetworkConfig cfg;
    cfg.lambda_rn = 0.0;
    const auto cat = ContentCatalog::make(5, 0.8, 3, 4e7, 1e9, 1e8);
    const auto coeffs = compute_kkt_coefficients(cat, cfg);
    for (double k : coeffs.k) CHECK(k == doctest::Approx(1.0).epsilon(1e-12));
    for (double t : coeffs.t) CHECK(t > 0.0);
}

TEST_CASE("noise-limited objective: zero policy, monotone and concave in p") {
    NetworkConfig cfg;
    const auto cat = ContentCatalog::make(10, 0.8, 5, 4e7, 1e9, 1e8);
    const auto coeffs = compute_kkt_coefficients(cat, cfg);

    CachingPolicy zero;
    zero.probs.assign(10, 0.0);
    CHECK(sbop_noise_limited(zero, cat, coeffs) == 0.0);

    for (int n : {0, 4, 9}) {
        double prev = 0.0;
        double prev_gain = 1e9;
        for (double p = 0.1; p <= 1.0; p += 0.1) {
            auto pol = zero;
            pol.probs[n] = p;
            const double v = sbop_noise_limited(pol, cat, coeffs);
            CHECK(v > prev);                    // strictly increasing in p_n
            CHECK(v - prev < prev_gain + 1e-15);  // diminishing returns
            prev_gain = v - prev;
            prev = v;
        }
    }
}

#pragma once

#include <vector>

#include "mmwcache/analytic.hpp"
#include "mmwcache/model.hpp"

namespace mmwc {

// Per-file coefficients of the noise-limited offloading probability
//   P = sum_n K_n a_n (1 - exp(-p_n T_n)).
// K_n folds the association split and the relay-hop coverage; T_n is the
// effective coverage exponent of the direct hop.
struct KktCoefficients {
    std::vector<double> k;  // K_n
    std::vector<double> t;  // T_n
};

// Blockage-correction integral of the coverage exponent. Reduced to a single
// integral over distance: the inner reciprocal-scale integral has a
// closed form through the upper incomplete gamma function.
double coverage_correction(double density, double alpha_los, double alpha_nlos,
                           double beta, int n_los, int n_nlos, double xi);

// c_omega = pi lambda kappa Gamma(kappa + N_L) / (N_L^kappa Gamma(N_L)).
double coverage_prefactor(double density, double kappa, int n_los);

KktCoefficients compute_kkt_coefficients(const ContentCatalog& catalog,
                                         const NetworkConfig& cfg);

double sbop_noise_limited(const CachingPolicy& policy, const ContentCatalog& catalog,
                          const KktCoefficients& coeffs);

double sbop_noise_limited(const CachingPolicy& policy, const ContentCatalog& catalog,
                          const NetworkConfig& cfg);

}  // namespace mmwc

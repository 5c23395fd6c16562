#pragma once

#include <functional>
#include <vector>

#include "mmwcache/model.hpp"
#include "mmwcache/noise_limited.hpp"

namespace mmwc {

using Objective = std::function<double(const std::vector<double>&)>;

// Projects a point of the shifted domain (p + 1) onto the boundary of the
// normal hull of the feasible set {sum max(y_i - 1, 0) <= C, y <= 2} by
// bisection on the scaling factor. Returns gamma0 * y.
std::vector<double> project_to_boundary(const std::vector<double>& y, double cache_size,
                                        double tol = 1e-9);

struct PoaOptions {
    double epsilon = 0.01;       // relative gap termination
    int max_iterations = 10000;
    std::size_t max_vertices = 100000;
    bool check_monotone = true;  // spot finite-difference checks on the objective
};

struct PoaResult {
    CachingPolicy policy;
    double value = 0.0;
    double upper_bound = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Global caching placement by polyblock outer approximation. The objective
// must be nondecreasing in every coordinate over [0,1]^F.
PoaResult cp_poa(const Objective& objective, int f_count, double cache_size,
                 const PoaOptions& options = {});

// p_n(eps) from the stationarity condition, clamped to [0, 1].
std::vector<double> caching_prob_from_multiplier(double eps_mult,
                                                 const KktCoefficients& coeffs,
                                                 const std::vector<double>& popularity);

struct CoResult {
    CachingPolicy policy;
    double value = 0.0;       // noise-limited objective at the output
    double multiplier = 0.0;  // budget multiplier at termination
    int iterations = 0;
};

// Caching placement for the noise-limited model: bisection on the cache
// budget multiplier until the budget residual falls below `tolerance`.
CoResult cp_co(const ContentCatalog& catalog, const NetworkConfig& cfg,
               double tolerance = 1e-6);
CoResult cp_co(const KktCoefficients& coeffs, const std::vector<double>& popularity,
               double cache_size, double tolerance = 1e-6);

}  // namespace mmwc

#include "mmwcache/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numeric>

namespace mmwc {

namespace {

bool in_normal_hull(const std::vector<double>& y, double cache_size) {
    double budget = 0.0;
    for (double v : y) {
        if (v > 2.0 + 1e-12) return false;
        budget += std::max(v - 1.0, 0.0);
    }
    return budget <= cache_size + 1e-12;
}

std::vector<double> clamp_policy(const std::vector<double>& y) {
    std::vector<double> p(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        p[i] = std::clamp(y[i] - 1.0, 0.0, 1.0);
    return p;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

std::vector<double> project_to_boundary(const std::vector<double>& y, double cache_size,
                                        double tol) {
    if (!(cache_size > 0.0))
        throw std::invalid_argument("project_to_boundary: cache size must be > 0");
    for (double v : y)
        if (!(v > 0.0))
            throw std::invalid_argument("project_to_boundary: vertex must be positive");
    auto scaled = [&](double g) {
        std::vector<double> out(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) out[i] = g * y[i];
        return out;
    };
    if (in_normal_hull(y, cache_size)) return y;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (in_normal_hull(scaled(mid), cache_size))
            lo = mid;
        else
            hi = mid;
    }
    return scaled(lo);
}

namespace {

struct PoaVertex {
    std::vector<double> coords;      // shifted domain
    std::vector<double> projection;  // onto the feasible boundary
    double projected_value = 0.0;    // objective at clamp(projection - 1)
    double vertex_value = 0.0;       // objective at clamp(coords - 1), upper bound
};

bool dominated(const PoaVertex& a, const PoaVertex& b) {
    // a dominated by b when a <= b coordinate-wise
    for (std::size_t i = 0; i < a.coords.size(); ++i)
        if (a.coords[i] > b.coords[i] + 1e-12) return false;
    return true;
}

}  // namespace

PoaResult cp_poa(const Objective& objective, int f_count, double cache_size,
                 const PoaOptions& options) {
    if (f_count < 1) throw std::invalid_argument("cp_poa: f_count must be >= 1");
    if (!(cache_size > 0.0)) throw std::invalid_argument("cp_poa: cache size must be > 0");
    if (!(options.epsilon > 0.0)) throw std::invalid_argument("cp_poa: epsilon must be > 0");

    auto eval = [&](const std::vector<double>& y) { return objective(clamp_policy(y)); };

    if (options.check_monotone) {
        // Spot finite differences at a few feasible points.
        const double step = 1e-3;
        const std::vector<std::vector<double>> probes = {
            std::vector<double>(f_count, 0.25 * std::min(1.0, cache_size / f_count)),
            std::vector<double>(f_count, 0.75 * std::min(1.0, cache_size / f_count))};
        for (const auto& p : probes) {
            const double base = objective(p);
            for (int i = 0; i < std::min(f_count, 4); ++i) {
                auto q = p;
                q[i] += step;
                if (objective(q) < base - 1e-6)
                    throw std::invalid_argument(
                        "cp_poa: objective is not nondecreasing in every coordinate");
            }
        }
    }

    PoaResult result;
    auto make_vertex = [&](std::vector<double> coords) {
        PoaVertex v;
        v.projection = project_to_boundary(coords, cache_size);
        v.coords = std::move(coords);
        v.projected_value = eval(v.projection);
        v.vertex_value = eval(v.coords);
        return v;
    };

    std::list<PoaVertex> vertices;
    vertices.push_back(make_vertex(std::vector<double>(f_count, 2.0)));

    std::vector<double> best_point = vertices.front().projection;
    double best_value = vertices.front().projected_value;

    for (int k = 0; k < options.max_iterations; ++k) {
        auto best_it = vertices.begin();
        double bound = 0.0;
        for (auto it = vertices.begin(); it != vertices.end(); ++it) {
            if (it->projected_value > best_it->projected_value) best_it = it;
            bound = std::max(bound, it->vertex_value);
        }

        if (best_it->projected_value > best_value) {
            best_value = best_it->projected_value;
            best_point = best_it->projection;
        }
        result.iterations = k + 1;
        result.upper_bound = bound;

        std::vector<double> diff(f_count);
        for (int i = 0; i < f_count; ++i)
            diff[i] = best_it->coords[i] - best_it->projection[i];
        if (norm2(diff) / norm2(best_it->coords) <= options.epsilon) {
            best_value = std::max(best_value, best_it->projected_value);
            best_point = best_it->projection;
            result.converged = true;
            break;
        }

        PoaVertex parent = std::move(*best_it);
        vertices.erase(best_it);
        for (int i = 0; i < f_count; ++i) {
            if (parent.projection[i] >= parent.coords[i] - 1e-12) continue;
            auto child = parent.coords;
            child[i] = parent.projection[i];
            PoaVertex v = make_vertex(std::move(child));
            if (v.projected_value > best_value) {
                best_value = v.projected_value;
                best_point = v.projection;
            }
            bool keep = true;
            for (const auto& other : vertices)
                if (dominated(v, other)) {
                    keep = false;
                    break;
                }
            if (keep) vertices.push_back(std::move(v));
        }
        if (vertices.empty()) {
            result.converged = true;
            break;
        }
        if (vertices.size() > options.max_vertices) {
            vertices.sort([](const PoaVertex& a, const PoaVertex& b) {
                return a.projected_value > b.projected_value;
            });
            vertices.resize(options.max_vertices);
        }
    }

    result.policy.probs = clamp_policy(best_point);
    result.value = best_value;
    if (result.upper_bound == 0.0) result.upper_bound = best_value;
    return result;
}

std::vector<double> caching_prob_from_multiplier(double eps_mult,
                                                 const KktCoefficients& coeffs,
                                                 const std::vector<double>& popularity) {
    if (eps_mult < 0.0)
        throw std::invalid_argument("caching_prob_from_multiplier: multiplier must be >= 0");
    const std::size_t f = popularity.size();
    std::vector<double> p(f);
    for (std::size_t n = 0; n < f; ++n) {
        const double kat = coeffs.k[n] * popularity[n] * coeffs.t[n];
        const double mu = std::max(kat * std::exp(-coeffs.t[n]) - eps_mult, 0.0);
        if (mu > 0.0 || eps_mult == 0.0) {
            // Saturated regime: eps + mu collapses to kat e^-T and p to 1.
            p[n] = 1.0;
            continue;
        }
        p[n] = std::clamp(std::log(kat / eps_mult) / coeffs.t[n], 0.0, 1.0);
    }
    return p;
}

CoResult cp_co(const KktCoefficients& coeffs, const std::vector<double>& popularity,
               double cache_size, double tolerance) {
    const std::size_t f = popularity.size();
    if (coeffs.k.size() != f || coeffs.t.size() != f)
        throw std::invalid_argument("cp_co: coefficient size mismatch");
    if (cache_size > static_cast<double>(f) + 1e-12)
        throw std::invalid_argument("cp_co: cache size exceeds catalog");

    CoResult out;
    // Saturated vector already fits: budget never binds.
    if (static_cast<double>(f) <= cache_size + tolerance) {
        out.policy.probs.assign(f, 1.0);
        out.multiplier = 0.0;
        return out;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t n = 0; n < f; ++n) {
        const double kat = coeffs.k[n] * popularity[n] * coeffs.t[n];
        lo = std::min(lo, kat * std::exp(-coeffs.t[n]));
        hi = std::max(hi, kat);
    }
    double eps = 0.5 * (lo + hi);
    std::vector<double> p = caching_prob_from_multiplier(eps, coeffs, popularity);
    int iter = 0;
    for (; iter < 200; ++iter) {
        const double total = std::accumulate(p.begin(), p.end(), 0.0);
        if (std::abs(total - cache_size) < tolerance) break;
        if (total > cache_size)
            lo = eps;
        else
            hi = eps;
        eps = 0.5 * (lo + hi);
        p = caching_prob_from_multiplier(eps, coeffs, popularity);
    }
    // The bisection residual may leave the budget a hair above C; shave the
    // excess off interior coordinates so the vector is strictly feasible.
    double excess = std::accumulate(p.begin(), p.end(), 0.0) - cache_size;
    for (std::size_t n = 0; n < f && excess > 0.0; ++n) {
        if (p[n] <= 0.0 || p[n] >= 1.0) continue;
        const double cut = std::min(excess, p[n]);
        p[n] -= cut;
        excess -= cut;
    }
    out.policy.probs = std::move(p);
    out.multiplier = eps;
    out.iterations = iter;
    return out;
}

CoResult cp_co(const ContentCatalog& catalog, const NetworkConfig& cfg, double tolerance) {
    const KktCoefficients coeffs = compute_kkt_coefficients(catalog, cfg);
    CoResult out = cp_co(coeffs, catalog.popularity, catalog.cache_size, tolerance);
    out.value = sbop_noise_limited(out.policy, catalog, coeffs);
    return out;
}

}  // namespace mmwc

#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "mmwcache/model.hpp"
#include "mmwcache/quadrature.hpp"

namespace mmwc {

// One tier of transmitters as seen through the association metric
// t = d^alpha / p_bar (inverse biased received power). Smaller t means a
// stronger candidate. p_bar folds the intercept, transmit power, aligned
// antenna gain and the bias coefficient.
struct TierSpec {
    double density = 0.0;      // nodes/m^2 (already thinned for per-file tiers)
    double p_bar = 1.0;        // gamma * P * G0 * B (linear)
    double alpha_los = 2.5;
    double alpha_nlos = 4.0;
    double beta = 0.0;         // blockage density (1/m)
    bool include_nlos = true;  // disable to study the LOS-only regime

    static TierSpec bs_tier(const NetworkConfig& cfg, double p_n);
    static TierSpec rn_tier(const NetworkConfig& cfg);
};

// Distribution of the minimum inverse biased received power over one tier.
// The intensity measure of the mapped 1-D point process has a closed form;
// the CDF is its void probability.
class InversePowerDist {
  public:
    explicit InversePowerDist(TierSpec tier);

    const TierSpec& tier() const { return tier_; }

    // Intensity measure Lambda([0, t]) of the mapped process.
    double intensity(double t) const;
    // dLambda/dt split by the originating link state.
    double intensity_deriv_los(double t) const;
    double intensity_deriv_nlos(double t) const;
    double intensity_deriv(double t) const;

    double cdf(double t) const;   // F(t) = 1 - exp(-Lambda)
    double ccdf(double t) const;
    double pdf(double t) const;   // Lambda'(t) exp(-Lambda(t))

    // Inverse of the intensity measure (monotone; defined for density > 0).
    double intensity_inverse(double x) const;

    // t beyond which the CDF exceeds 1 - tail_mass.
    double truncation_point(double tail_mass = 1e-8) const;

    // P[serving link is LOS | its inverse power equals t].
    double los_share(double t) const;

  private:
    TierSpec tier_;
};

// User association probabilities conditioned on the serving-link inverse
// power, and the weighted serving-link distributions they induce.
// bs corresponds to the file-thinned caching tier, rn to the relay tier.
struct UarProbabilities {
    double chi_bu = 0.0;
    double chi_br = 0.0;
    double chi_ru = 0.0;
};

double chi_one_hop(const InversePowerDist& bs_n, const InversePowerDist& rn, double t);
double chi_backhaul(const InversePowerDist& bs_n, const InversePowerDist& rn, double t);
double chi_relay_access(const InversePowerDist& bs_n, double t);

UarProbabilities uar_probabilities(double p_n, double t, const NetworkConfig& cfg);

enum class Link { one_hop, backhaul, relay_access };

// Normalizer of the weighted serving distribution for one link type,
// int_0^inf pdf(t) chi(t) dt. Throws numeric_error when degenerate.
double weighted_pdf_normalizer(Link link, double p_n, const NetworkConfig& cfg);

// Association-weighted serving density, pdf(t) chi(t) / normalizer.
double weighted_pdf(Link link, double p_n, double t, const NetworkConfig& cfg);

// Probability that the typical UE is served over two hops; uses the full
// (unthinned) BS tier.
double two_hop_probability(const NetworkConfig& cfg);

// Laplace transform of the aggregate interference seen by the receiver of
// the given link, evaluated at s. t_excl is the serving-link inverse power;
// same-tier interferers closer than the serving node in the association
// metric are excluded per link state.
double laplace_interference(Link link, double p_n, double s, double t_excl,
                            const NetworkConfig& cfg);
// As above with an explicit gain pattern (tests exercise single-pattern cases).
double laplace_interference(Link link, double p_n, double s, double t_excl,
                            const NetworkConfig& cfg, const GainPattern& gains);

// Per-file conditional offloading probabilities via Gauss-Laguerre quadrature
// over the serving-link distribution.
double sbop_one_hop(double p_n, double nu_n, const NetworkConfig& cfg,
                    const QuadratureRule& rule);
double sbop_two_hop(double p_n, double nu_n, const NetworkConfig& cfg,
                    const QuadratureRule& rule);

struct SbopBreakdown {
    double total = 0.0;
    double p_one_hop = 0.0;
    double p_two_hop = 0.0;
    std::vector<double> per_file_one_hop;  // conditional on one-hop service
    std::vector<double> per_file_two_hop;  // conditional on two-hop service
};

// Evaluates the full SBOP for a policy. Results for repeated (file, p_n)
// pairs are memoized, which makes coordinate-wise optimizer sweeps cheap:
// the objective is a popularity-weighted sum of per-file terms and file n
// depends on the policy only through p_n.
class SbopEngine {
  public:
    SbopEngine(NetworkConfig cfg, ContentCatalog catalog, int quadrature_order = 30);

    SbopBreakdown total_sbop(const CachingPolicy& policy) const;

    // Conditional pair (one-hop, two-hop) for a single file.
    std::pair<double, double> file_sbop(int file_index, double p_n) const;

    double p_two_hop() const { return p_two_hop_; }
    const NetworkConfig& config() const { return cfg_; }
    const ContentCatalog& catalog() const { return catalog_; }
    const QuadratureRule& rule() const { return rule_; }

  private:
    NetworkConfig cfg_;
    ContentCatalog catalog_;
    QuadratureRule rule_;
    GainPattern gains_;
    double p_two_hop_ = 0.0;
    mutable std::unordered_map<uint64_t, std::pair<double, double>> memo_;
};

SbopBreakdown total_sbop(const CachingPolicy& policy, const ContentCatalog& catalog,
                         const NetworkConfig& cfg, const QuadratureRule& rule);

}  // namespace mmwc

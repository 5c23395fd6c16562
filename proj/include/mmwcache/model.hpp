#pragma once

#include <stdexcept>
#include <vector>

namespace mmwc {

// Raised when an iterative numeric routine fails to converge or an integral
// cannot be evaluated within its error budget.
class numeric_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Sectored-antenna gain pattern between a transmitter/receiver pair whose
// beams are not mutually aligned. Three combined patterns: main-main,
// main-side, side-side.
struct GainPattern {
    struct Entry {
        double gain;  // linear combined tx*rx gain
        double prob;
    };
    Entry mm;  // both mainlobes
    Entry ms;  // one main, one side
    Entry ss;  // both sidelobes

    double mean_gain() const {
        return mm.gain * mm.prob + ms.gain * ms.prob + ss.gain * ss.prob;
    }
};

// Physical and geometric parameters of one network scenario. All values are
// linear units; conversion from dB/dBm happens when a config file is parsed.
struct NetworkConfig {
    double lambda_bs = 1e-5;   // BS density (nodes/m^2)
    double lambda_rn = 1e-5;   // RN density (nodes/m^2)
    double lambda_ue = 1e-4;   // UE density (nodes/m^2)
    double p_bs = 1.0;         // BS transmit power (W)
    double p_rn = 1.0;         // RN transmit power (W)
    double bias_bs = 1.0;      // association bias coefficients
    double bias_rn = 1.0;
    double bandwidth = 1e8;    // per-UE bandwidth (Hz)
    double alpha_los = 2.5;    // path-loss exponents
    double alpha_nlos = 4.0;
    double beta = 4e-4;        // blockage density (1/m)
    double theta = 0.5235987755982988;  // mainlobe beamwidth (rad), 30 deg
    double gain_main = 10.0;   // mainlobe gain (linear)
    double gain_side = 0.1;    // sidelobe gain (linear)
    int n_los = 3;             // Nakagami shape, LOS
    int n_nlos = 2;            // Nakagami shape, NLOS
    double gamma_intercept = 7.259481705540117e-7;  // path loss at 1 m, 28 GHz free space
    double noise_power = 3.9810717055349695e-12;    // W over `bandwidth`, 10 dB NF
    double area_side = 800.0;  // Monte Carlo deployment square side (m)

    // Combined tx*rx gain under perfect beam alignment.
    double aligned_gain() const { return gain_main * gain_main; }

    // Throws std::invalid_argument when a field is out of its domain.
    void validate() const;
};

// File catalog: Zipf popularity, per-file target rates and the SINR
// thresholds they imply for the configured bandwidth.
struct ContentCatalog {
    int f_count = 0;
    double delta = 0.0;                  // Zipf skew
    double cache_size = 0.0;             // per-BS capacity C (files)
    std::vector<double> popularity;      // a_n, sums to 1
    std::vector<double> target_rates;    // tau_n (bit/s)
    std::vector<double> sinr_thresholds; // nu_n = 2^(tau_n / B) - 1

    // Builds a catalog with target rates evenly spaced over [tau_min, tau_max],
    // descending with file index (popular files demand the highest rates).
    static ContentCatalog make(int f_count, double delta, double cache_size,
                               double tau_min, double tau_max, double bandwidth);

    void validate() const;
};

// Probabilistic placement vector p, one entry per file.
struct CachingPolicy {
    std::vector<double> probs;

    double total() const;
    void validate(double cache_size) const;
};

// Zipf popularity a_n = n^(-delta) / sum_m m^(-delta).
std::vector<double> zipf_popularity(int f_count, double delta);

// P[link of length r is LOS] = exp(-beta r).
double los_probability(double r, double beta);

// Distribution of the combined antenna gain between a transmitter and a
// receiver with independently oriented beams of width theta.
GainPattern gain_distribution(double theta, double gain_main, double gain_side);

// L(r) = gamma * r^(-alpha). r must be strictly positive.
double path_loss(double r, double alpha, double gamma_intercept);

// Benchmark placements: C most popular files, and uniform C/F.
CachingPolicy mpc_policy(const ContentCatalog& catalog);
CachingPolicy uc_policy(const ContentCatalog& catalog);

}  // namespace mmwc

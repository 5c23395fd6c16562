#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmwcache/model.hpp"

namespace mmwc {

// One experiment: a base scenario in boundary units (dB/dBm, degrees) plus
// the sweep plan. Field names match the flat key=value config file format.
struct ExperimentSpec {
    // scenario
    double lambda_bs = 1e-5;
    double lambda_rn = 1e-5;
    double lambda_ue = 1e-4;
    double p_bs_dbm = 30.0;
    double p_rn_dbm = 30.0;
    double bias_bs = 1.0;
    double bias_rn = 1.0;
    double bandwidth_hz = 1e8;
    double alpha_los = 2.5;
    double alpha_nlos = 4.0;
    double theta_deg = 30.0;
    double gain_main_db = 10.0;
    double gain_side_db = -10.0;
    double beta = 4e-4;
    int n_los = 3;
    int n_nlos = 2;
    int f_count = 20;
    double delta = 0.8;
    double cache_size = 10.0;
    double tau_min_bps = 4e7;
    double tau_max_bps = 1e9;
    double carrier_hz = 28e9;
    double noise_figure_db = 10.0;
    double area_side_m = 800.0;
    // numerics
    int quadrature_order = 30;
    double poa_epsilon = 0.01;
    double co_tolerance = 1e-6;
    std::string poa_objective = "noise_limited";  // or "analytic"
    // plan
    std::string sweep_var = "lambda_rn";  // lambda_rn | lambda_bs | sinr_threshold_db
                                          // | beta | cache_size | delta
    std::vector<double> sweep_values = {1e-5};
    std::vector<std::string> policies = {"cp_co", "mpc", "uc"};
    std::vector<std::string> modes = {"analytic"};
    long n_deployments = 2000;
    uint64_t seed = 1;
    int workers = 1;
    std::string out_path;

    void validate() const;

    NetworkConfig network() const;
    ContentCatalog content() const;

    // Canonical text form; from_text(to_text()) reproduces the plan exactly.
    std::string to_text() const;
    static ExperimentSpec from_text(const std::string& text);
    static ExperimentSpec from_file(const std::string& path);

    // FNV-1a over the canonical text, echoed in every output row.
    uint64_t config_hash() const;
};

struct ResultRow {
    std::string sweep_var;
    double sweep_value = 0.0;
    std::string policy;
    std::string mode;
    double sbop = 0.0;
    double std_err = -1.0;     // < 0 when not applicable
    double wall_ms = 0.0;
    long iterations = -1;      // < 0 when not applicable
    uint64_t config_hash = 0;
};

// Resolves policies per sweep value (optimizers re-run), evaluates every
// requested mode, and returns one row per cell in deterministic order.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

void write_result_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void write_result_csv(const std::vector<ResultRow>& rows, const std::string& path);

// One-deployment association snapshot (ue id, position, serving node, hops,
// offload flag) written as CSV; byte-identical across runs for a fixed spec.
void emit_association_snapshot(const ExperimentSpec& spec, const std::string& policy,
                               const std::string& path, int n_ues = 60);

// Resolves a named policy (mpc, uc, cp_co, cp_poa) for the given scenario.
CachingPolicy resolve_policy(const std::string& name, const ExperimentSpec& spec,
                             const NetworkConfig& cfg, const ContentCatalog& catalog,
                             long* iterations = nullptr);

}  // namespace mmwc

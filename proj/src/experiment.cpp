#include "mmwcache/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "mmwcache/analytic.hpp"
#include "mmwcache/noise_limited.hpp"
#include "mmwcache/optimize.hpp"
#include "mmwcache/simulate.hpp"
#include "mmwcache/units.hpp"

namespace mmwc {

namespace {

const char* kSweepVars[] = {"lambda_rn", "lambda_bs", "sinr_threshold_db",
                            "beta", "cache_size", "delta"};
const char* kPolicies[] = {"cp_poa", "cp_co", "mpc", "uc"};
const char* kModes[] = {"analytic", "noise_limited", "monte_carlo"};

template <typename C>
bool contains(const C& c, const std::string& v) {
    return std::find(std::begin(c), std::end(c), v) != std::end(c);
}

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string join_values(const std::vector<double>& vals) {
    std::vector<std::string> parts;
    parts.reserve(vals.size());
    for (double v : vals) parts.push_back(format_g(v));
    return join(parts, ',');
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void ExperimentSpec::validate() const {
    network().validate();
    content().validate();
    if (!contains(kSweepVars, sweep_var))
        throw std::invalid_argument("spec: unknown sweep_var '" + sweep_var + "'");
    if (sweep_values.empty()) throw std::invalid_argument("spec: sweep_values is empty");
    if (policies.empty()) throw std::invalid_argument("spec: policies is empty");
    if (modes.empty()) throw std::invalid_argument("spec: modes is empty");
    for (const auto& p : policies)
        if (!contains(kPolicies, p))
            throw std::invalid_argument("spec: unknown policy '" + p + "'");
    for (const auto& m : modes)
        if (!contains(kModes, m))
            throw std::invalid_argument("spec: unknown mode '" + m + "'");
    if (contains(modes, std::string("monte_carlo")) && n_deployments < 1)
        throw std::invalid_argument("spec: n_deployments must be >= 1 for monte_carlo");
    if (quadrature_order < 1 || quadrature_order > 128)
        throw std::invalid_argument("spec: quadrature_order must lie in [1, 128]");
    if (!(poa_epsilon > 0.0)) throw std::invalid_argument("spec: poa_epsilon must be > 0");
    if (!(co_tolerance > 0.0)) throw std::invalid_argument("spec: co_tolerance must be > 0");
    if (poa_objective != "noise_limited" && poa_objective != "analytic")
        throw std::invalid_argument("spec: poa_objective must be noise_limited or analytic");
    if (workers < 1) throw std::invalid_argument("spec: workers must be >= 1");
}

NetworkConfig ExperimentSpec::network() const {
    NetworkConfig cfg;
    cfg.lambda_bs = lambda_bs;
    cfg.lambda_rn = lambda_rn;
    cfg.lambda_ue = lambda_ue;
    cfg.p_bs = dbm_to_watts(p_bs_dbm);
    cfg.p_rn = dbm_to_watts(p_rn_dbm);
    cfg.bias_bs = bias_bs;
    cfg.bias_rn = bias_rn;
    cfg.bandwidth = bandwidth_hz;
    cfg.alpha_los = alpha_los;
    cfg.alpha_nlos = alpha_nlos;
    cfg.beta = beta;
    cfg.theta = theta_deg * M_PI / 180.0;
    cfg.gain_main = db_to_linear(gain_main_db);
    cfg.gain_side = db_to_linear(gain_side_db);
    cfg.n_los = n_los;
    cfg.n_nlos = n_nlos;
    cfg.gamma_intercept = free_space_intercept(carrier_hz);
    cfg.noise_power = noise_power_watts(bandwidth_hz, noise_figure_db);
    cfg.area_side = area_side_m;
    return cfg;
}

ContentCatalog ExperimentSpec::content() const {
    return ContentCatalog::make(f_count, delta, cache_size, tau_min_bps, tau_max_bps,
                                bandwidth_hz);
}

std::string ExperimentSpec::to_text() const {
    std::ostringstream os;
    os << "lambda_bs = " << format_g(lambda_bs) << "\n";
    os << "lambda_rn = " << format_g(lambda_rn) << "\n";
    os << "lambda_ue = " << format_g(lambda_ue) << "\n";
    os << "p_bs_dbm = " << format_g(p_bs_dbm) << "\n";
    os << "p_rn_dbm = " << format_g(p_rn_dbm) << "\n";
    os << "bias_bs = " << format_g(bias_bs) << "\n";
    os << "bias_rn = " << format_g(bias_rn) << "\n";
    os << "bandwidth_hz = " << format_g(bandwidth_hz) << "\n";
    os << "alpha_los = " << format_g(alpha_los) << "\n";
    os << "alpha_nlos = " << format_g(alpha_nlos) << "\n";
    os << "theta_deg = " << format_g(theta_deg) << "\n";
    os << "gain_main_db = " << format_g(gain_main_db) << "\n";
    os << "gain_side_db = " << format_g(gain_side_db) << "\n";
    os << "beta = " << format_g(beta) << "\n";
    os << "n_los = " << n_los << "\n";
    os << "n_nlos = " << n_nlos << "\n";
    os << "f_count = " << f_count << "\n";
    os << "delta = " << format_g(delta) << "\n";
    os << "cache_size = " << format_g(cache_size) << "\n";
    os << "tau_min_bps = " << format_g(tau_min_bps) << "\n";
    os << "tau_max_bps = " << format_g(tau_max_bps) << "\n";
    os << "carrier_hz = " << format_g(carrier_hz) << "\n";
    os << "noise_figure_db = " << format_g(noise_figure_db) << "\n";
    os << "area_side_m = " << format_g(area_side_m) << "\n";
    os << "quadrature_order = " << quadrature_order << "\n";
    os << "poa_epsilon = " << format_g(poa_epsilon) << "\n";
    os << "co_tolerance = " << format_g(co_tolerance) << "\n";
    os << "poa_objective = " << poa_objective << "\n";
    os << "sweep_var = " << sweep_var << "\n";
    os << "sweep_values = " << join_values(sweep_values) << "\n";
    os << "policies = " << join(policies, ',') << "\n";
    os << "modes = " << join(modes, ',') << "\n";
    os << "n_deployments = " << n_deployments << "\n";
    os << "seed = " << seed << "\n";
    os << "workers = " << workers << "\n";
    return os.str();
}

ExperimentSpec ExperimentSpec::from_text(const std::string& text) {
    ExperimentSpec spec;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto num = [&]() {
            try {
                return std::stod(value);
            } catch (const std::exception&) {
                throw std::invalid_argument("config: field '" + key +
                                            "' has a non-numeric value '" + value + "'");
            }
        };
        if (key == "lambda_bs") spec.lambda_bs = num();
        else if (key == "lambda_rn") spec.lambda_rn = num();
        else if (key == "lambda_ue") spec.lambda_ue = num();
        else if (key == "p_bs_dbm") spec.p_bs_dbm = num();
        else if (key == "p_rn_dbm") spec.p_rn_dbm = num();
        else if (key == "bias_bs") spec.bias_bs = num();
        else if (key == "bias_rn") spec.bias_rn = num();
        else if (key == "bandwidth_hz") spec.bandwidth_hz = num();
        else if (key == "alpha_los") spec.alpha_los = num();
        else if (key == "alpha_nlos") spec.alpha_nlos = num();
        else if (key == "theta_deg") spec.theta_deg = num();
        else if (key == "gain_main_db") spec.gain_main_db = num();
        else if (key == "gain_side_db") spec.gain_side_db = num();
        else if (key == "beta") spec.beta = num();
        else if (key == "n_los") spec.n_los = static_cast<int>(num());
        else if (key == "n_nlos") spec.n_nlos = static_cast<int>(num());
        else if (key == "f_count") spec.f_count = static_cast<int>(num());
        else if (key == "delta") spec.delta = num();
        else if (key == "cache_size") spec.cache_size = num();
        else if (key == "tau_min_bps") spec.tau_min_bps = num();
        else if (key == "tau_max_bps") spec.tau_max_bps = num();
        else if (key == "carrier_hz") spec.carrier_hz = num();
        else if (key == "noise_figure_db") spec.noise_figure_db = num();
        else if (key == "area_side_m") spec.area_side_m = num();
        else if (key == "quadrature_order") spec.quadrature_order = static_cast<int>(num());
        else if (key == "poa_epsilon") spec.poa_epsilon = num();
        else if (key == "co_tolerance") spec.co_tolerance = num();
        else if (key == "poa_objective") spec.poa_objective = value;
        else if (key == "sweep_var") spec.sweep_var = value;
        else if (key == "sweep_values") {
            spec.sweep_values.clear();
            for (const auto& part : split(value, ','))
                spec.sweep_values.push_back(std::stod(trim(part)));
        } else if (key == "policies") {
            spec.policies.clear();
            for (const auto& part : split(value, ',')) spec.policies.push_back(trim(part));
        } else if (key == "modes") {
            spec.modes.clear();
            for (const auto& part : split(value, ',')) spec.modes.push_back(trim(part));
        } else if (key == "n_deployments") spec.n_deployments = static_cast<long>(num());
        else if (key == "seed") spec.seed = static_cast<uint64_t>(num());
        else if (key == "workers") spec.workers = static_cast<int>(num());
        else throw std::invalid_argument("config: unknown field '" + key + "'");
    }
    return spec;
}

ExperimentSpec ExperimentSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

uint64_t ExperimentSpec::config_hash() const {
    const std::string text = to_text();
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

// Applies one sweep value to a copy of the scenario.
void apply_sweep(const std::string& var, double value, NetworkConfig& cfg,
                 ContentCatalog& catalog, const ExperimentSpec& spec) {
    if (var == "lambda_rn") {
        cfg.lambda_rn = value;
    } else if (var == "lambda_bs") {
        cfg.lambda_bs = value;
    } else if (var == "beta") {
        cfg.beta = value;
    } else if (var == "cache_size") {
        catalog.cache_size = value;
    } else if (var == "delta") {
        catalog = ContentCatalog::make(spec.f_count, value, catalog.cache_size,
                                       spec.tau_min_bps, spec.tau_max_bps,
                                       spec.bandwidth_hz);
    } else if (var == "sinr_threshold_db") {
        const double nu = db_to_linear(value);
        for (int n = 0; n < catalog.f_count; ++n) {
            catalog.sinr_thresholds[n] = nu;
            catalog.target_rates[n] = spec.bandwidth_hz * std::log2(1.0 + nu);
        }
    } else {
        throw std::invalid_argument("spec: unknown sweep_var '" + var + "'");
    }
}

}  // namespace

CachingPolicy resolve_policy(const std::string& name, const ExperimentSpec& spec,
                             const NetworkConfig& cfg, const ContentCatalog& catalog,
                             long* iterations) {
    if (iterations) *iterations = -1;
    if (name == "mpc") return mpc_policy(catalog);
    if (name == "uc") return uc_policy(catalog);
    if (name == "cp_co") {
        CoResult r = cp_co(catalog, cfg, spec.co_tolerance);
        if (iterations) *iterations = r.iterations;
        return r.policy;
    }
    if (name == "cp_poa") {
        PoaOptions opt;
        opt.epsilon = spec.poa_epsilon;
        PoaResult r;
        if (spec.poa_objective == "analytic") {
            SbopEngine engine(cfg, catalog, spec.quadrature_order);
            r = cp_poa(
                [&](const std::vector<double>& p) {
                    CachingPolicy pol{p};
                    return engine.total_sbop(pol).total;
                },
                catalog.f_count, catalog.cache_size, opt);
        } else {
            const KktCoefficients coeffs = compute_kkt_coefficients(catalog, cfg);
            r = cp_poa(
                [&](const std::vector<double>& p) {
                    double total = 0.0;
                    for (int n = 0; n < catalog.f_count; ++n)
                        total += coeffs.k[n] * catalog.popularity[n] *
                                 (-std::expm1(-p[n] * coeffs.t[n]));
                    return total;
                },
                catalog.f_count, catalog.cache_size, opt);
        }
        if (iterations) *iterations = r.iterations;
        return r.policy;
    }
    throw std::invalid_argument("spec: unknown policy '" + name + "'");
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const uint64_t hash = spec.config_hash();
    const std::size_t n_values = spec.sweep_values.size();
    std::vector<std::vector<ResultRow>> per_value(n_values);

    std::atomic<std::size_t> next{0};
    auto run_value = [&](std::size_t vi) {
        NetworkConfig cfg = spec.network();
        ContentCatalog catalog = spec.content();
        apply_sweep(spec.sweep_var, spec.sweep_values[vi], cfg, catalog, spec);
        cfg.validate();
        catalog.validate();

        std::vector<ResultRow>& rows = per_value[vi];
        for (const auto& policy_name : spec.policies) {
            long iterations = -1;
            const auto t0 = std::chrono::steady_clock::now();
            const CachingPolicy policy =
                resolve_policy(policy_name, spec, cfg, catalog, &iterations);
            for (const auto& mode : spec.modes) {
                ResultRow row;
                row.sweep_var = spec.sweep_var;
                row.sweep_value = spec.sweep_values[vi];
                row.policy = policy_name;
                row.mode = mode;
                row.iterations = iterations;
                row.config_hash = hash;
                const auto m0 = std::chrono::steady_clock::now();
                if (mode == "analytic") {
                    SbopEngine engine(cfg, catalog, spec.quadrature_order);
                    row.sbop = engine.total_sbop(policy).total;
                } else if (mode == "noise_limited") {
                    row.sbop = sbop_noise_limited(policy, catalog, cfg);
                } else {
                    const TrialStats stats = run_trials(cfg, catalog, policy,
                                                        spec.n_deployments,
                                                        spec.seed + vi, nullptr, 1);
                    row.sbop = stats.sbop;
                    row.std_err = stats.std_err;
                }
                const auto m1 = std::chrono::steady_clock::now();
                row.wall_ms =
                    std::chrono::duration<double, std::milli>(m1 - m0).count() +
                    (mode == spec.modes.front()
                         ? std::chrono::duration<double, std::milli>(m0 - t0).count()
                         : 0.0);
                rows.push_back(std::move(row));
            }
        }
    };

    if (spec.workers <= 1 || n_values == 1) {
        for (std::size_t vi = 0; vi < n_values; ++vi) run_value(vi);
    } else {
        auto worker = [&]() {
            for (;;) {
                const std::size_t vi = next.fetch_add(1);
                if (vi >= n_values) return;
                run_value(vi);
            }
        };
        std::vector<std::thread> pool;
        const int n = std::min<std::size_t>(spec.workers, n_values);
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<ResultRow> rows;
    for (auto& v : per_value)
        for (auto& r : v) rows.push_back(std::move(r));
    if (!spec.out_path.empty()) write_result_csv(rows, spec.out_path);
    return rows;
}

void write_result_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    os << "sweep_var,sweep_value,policy,mode,sbop,std_err,wall_ms,iterations,config_hash\n";
    for (const auto& r : rows) {
        os << r.sweep_var << ',' << format_g(r.sweep_value) << ',' << r.policy << ','
           << r.mode << ',' << format_g(r.sbop) << ','
           << (r.std_err >= 0.0 ? format_g(r.std_err) : "") << ','
           << format_g(r.wall_ms) << ','
           << (r.iterations >= 0 ? std::to_string(r.iterations) : "") << ','
           << r.config_hash << '\n';
    }
}

void write_result_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output path '" + path + "'");
    write_result_csv(rows, out);
    if (!out.good()) throw std::runtime_error("failed while writing '" + path + "'");
}

void emit_association_snapshot(const ExperimentSpec& spec, const std::string& policy_name,
                               const std::string& path, int n_ues) {
    const NetworkConfig cfg = spec.network();
    const ContentCatalog catalog = spec.content();
    const CachingPolicy policy = resolve_policy(policy_name, spec, cfg, catalog);
    const auto rows = association_snapshot(cfg, catalog, policy, spec.seed, n_ues);
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output path '" + path + "'");
    out << "ue_id,x,y,serving_type,serving_id,hop_count,offload_success,config_hash\n";
    const uint64_t hash = spec.config_hash();
    for (const auto& r : rows) {
        out << r.ue_id << ',' << format_g(r.position.x) << ',' << format_g(r.position.y)
            << ',' << (r.serving_kind == NodeKind::rn ? "rn" : "bs") << ',' << r.serving_id
            << ',' << r.hop_count << ',' << (r.offload_success ? 1 : 0) << ',' << hash
            << '\n';
    }
    if (!out.good()) throw std::runtime_error("failed while writing '" + path + "'");
}

}  // namespace mmwc

// Command-line front end: analytic evaluation, placement optimization,
// Monte Carlo simulation, parameter sweeps and association snapshots.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmwcache/analytic.hpp"
#include "mmwcache/experiment.hpp"
#include "mmwcache/noise_limited.hpp"
#include "mmwcache/optimize.hpp"
#include "mmwcache/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct CommonArgs {
    std::string config_path;
    std::string policy = "mpc";
    std::string out_path;
    uint64_t seed = 0;
    bool seed_set = false;
    long deployments = 0;
    int workers = 0;
    int quadrature_order = 0;
    double epsilon = 0.0;
};

mmwc::ExperimentSpec load_spec(const CommonArgs& args) {
    mmwc::ExperimentSpec spec;
    if (!args.config_path.empty()) spec = mmwc::ExperimentSpec::from_file(args.config_path);
    if (args.seed_set) spec.seed = args.seed;
    if (args.deployments > 0) spec.n_deployments = args.deployments;
    if (args.workers > 0) spec.workers = args.workers;
    if (args.quadrature_order > 0) spec.quadrature_order = args.quadrature_order;
    if (args.epsilon > 0.0) spec.poa_epsilon = args.epsilon;
    if (!args.out_path.empty()) spec.out_path = args.out_path;
    return spec;
}

void print_policy(const mmwc::CachingPolicy& policy) {
    std::printf("file,p\n");
    for (std::size_t n = 0; n < policy.probs.size(); ++n)
        std::printf("%zu,%.9g\n", n + 1, policy.probs[n]);
}

int cmd_analyze(const CommonArgs& args) {
    const auto spec = load_spec(args);
    const auto cfg = spec.network();
    const auto catalog = spec.content();
    const auto policy = mmwc::resolve_policy(args.policy, spec, cfg, catalog);
    mmwc::SbopEngine engine(cfg, catalog, spec.quadrature_order);
    const auto b = engine.total_sbop(policy);
    const double nl = mmwc::sbop_noise_limited(policy, catalog, cfg);
    std::printf("policy %s\n", args.policy.c_str());
    std::printf("sbop_analytic %.9g\n", b.total);
    std::printf("sbop_noise_limited %.9g\n", nl);
    std::printf("p_one_hop %.9g\np_two_hop %.9g\n", b.p_one_hop, b.p_two_hop);
    if (!spec.out_path.empty()) {
        std::ofstream out(spec.out_path);
        if (!out) throw std::invalid_argument("cannot open '" + spec.out_path + "'");
        out << "file,p,sbop_one_hop_cond,sbop_two_hop_cond,config_hash\n";
        for (int n = 0; n < catalog.f_count; ++n) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%llu\n", n + 1,
                          policy.probs[n], b.per_file_one_hop[n], b.per_file_two_hop[n],
                          static_cast<unsigned long long>(spec.config_hash()));
            out << buf;
        }
    }
    return kExitOk;
}

int cmd_optimize(const CommonArgs& args, const std::string& algo) {
    auto spec = load_spec(args);
    const auto cfg = spec.network();
    const auto catalog = spec.content();
    long iterations = -1;
    const auto policy = mmwc::resolve_policy(algo, spec, cfg, catalog, &iterations);
    const double nl = mmwc::sbop_noise_limited(policy, catalog, cfg);
    std::fprintf(stderr, "algorithm %s iterations %ld objective_noise_limited %.9g\n",
                 algo.c_str(), iterations, nl);
    print_policy(policy);
    return kExitOk;
}

int cmd_simulate(const CommonArgs& args) {
    const auto spec = load_spec(args);
    const auto cfg = spec.network();
    const auto catalog = spec.content();
    const auto policy = mmwc::resolve_policy(args.policy, spec, cfg, catalog);
    std::vector<mmwc::TrialOutcome> outcomes;
    const auto stats =
        mmwc::run_trials(cfg, catalog, policy, spec.n_deployments, spec.seed,
                         spec.out_path.empty() ? nullptr : &outcomes, spec.workers);
    std::printf("policy %s deployments %ld\n", args.policy.c_str(), stats.n_trials);
    std::printf("sbop %.9g std_err %.9g\n", stats.sbop, stats.std_err);
    std::printf("assoc one_hop %ld two_hop %ld no_cache %ld\n", stats.n_one_hop,
                stats.n_two_hop, stats.n_no_cache);
    if (!spec.out_path.empty()) {
        std::ofstream out(spec.out_path);
        if (!out) throw std::invalid_argument("cannot open '" + spec.out_path + "'");
        out << "deployment,file,association,sinr_direct,sinr_backhaul,sinr_access,"
               "success,config_hash\n";
        const auto hash = static_cast<unsigned long long>(spec.config_hash());
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            const auto& o = outcomes[i];
            const char* assoc = o.assoc == mmwc::Association::one_hop   ? "one_hop"
                                : o.assoc == mmwc::Association::two_hop ? "two_hop"
                                                                        : "none";
            char buf[240];
            std::snprintf(buf, sizeof(buf), "%zu,%d,%s,%.9g,%.9g,%.9g,%d,%llu\n", i,
                          o.requested_file + 1, assoc, o.sinr_direct, o.sinr_backhaul,
                          o.sinr_access, o.offload_success ? 1 : 0, hash);
            out << buf;
        }
    }
    return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::string& sweep_arg,
              const std::string& policies, const std::string& modes) {
    auto spec = load_spec(args);
    if (!sweep_arg.empty()) {
        const auto eq = sweep_arg.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--sweep expects var=v1,v2,...");
        spec.sweep_var = sweep_arg.substr(0, eq);
        spec.sweep_values.clear();
        std::string rest = sweep_arg.substr(eq + 1);
        std::size_t pos = 0;
        while (pos != std::string::npos) {
            const auto comma = rest.find(',', pos);
            const std::string tok = rest.substr(pos, comma - pos);
            if (!tok.empty()) spec.sweep_values.push_back(std::stod(tok));
            pos = comma == std::string::npos ? comma : comma + 1;
        }
    }
    auto parse_list = [](const std::string& s) {
        std::vector<std::string> out;
        std::size_t pos = 0;
        while (pos != std::string::npos) {
            const auto comma = s.find(',', pos);
            const std::string tok = s.substr(pos, comma - pos);
            if (!tok.empty()) out.push_back(tok);
            pos = comma == std::string::npos ? comma : comma + 1;
        }
        return out;
    };
    if (!policies.empty()) spec.policies = parse_list(policies);
    if (!modes.empty()) spec.modes = parse_list(modes);
    const auto rows = mmwc::run_experiment(spec);
    if (spec.out_path.empty()) mmwc::write_result_csv(rows, std::cout);
    return kExitOk;
}

int cmd_snapshot(const CommonArgs& args, int n_ues) {
    const auto spec = load_spec(args);
    if (spec.out_path.empty())
        throw std::invalid_argument("snapshot requires --out <path>");
    mmwc::emit_association_snapshot(spec, args.policy, spec.out_path, n_ues);
    std::printf("wrote %s\n", spec.out_path.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Backhaul offloading toolkit for cache-enabled relay-assisted "
                 "mmWave networks"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string algo = "cp_co";
    std::string sweep_arg, policies, modes;
    int n_ues = 60;

    auto add_common = [&](CLI::App* cmd, bool with_policy) {
        cmd->add_option("--config", args.config_path, "flat key=value config file");
        cmd->add_option("--out", args.out_path, "output CSV path");
        cmd->add_option("--seed", args.seed, "RNG seed")->each([&](const std::string&) {
            args.seed_set = true;
        });
        cmd->add_option("--deployments", args.deployments, "Monte Carlo deployments");
        cmd->add_option("--workers", args.workers, "worker threads");
        cmd->add_option("--quadrature-order", args.quadrature_order,
                        "Gauss-Laguerre order");
        cmd->add_option("--epsilon", args.epsilon, "CP-POA termination tolerance");
        if (with_policy)
            cmd->add_option("--policy", args.policy, "mpc | uc | cp_co | cp_poa");
    };

    auto* analyze = app.add_subcommand("analyze", "analytic SBOP of a policy");
    add_common(analyze, true);
    auto* optimize = app.add_subcommand("optimize", "run a placement optimizer");
    add_common(optimize, false);
    optimize->add_option("--algo", algo, "cp_poa | cp_co");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo SBOP estimate");
    add_common(simulate, true);
    auto* sweep = app.add_subcommand("sweep", "full experiment sweep");
    add_common(sweep, false);
    sweep->add_option("--sweep", sweep_arg, "var=v1,v2,... (overrides config)");
    sweep->add_option("--policies", policies, "comma list of policies");
    sweep->add_option("--modes", modes, "comma list of evaluation modes");
    auto* snapshot = app.add_subcommand("snapshot", "association snapshot CSV");
    add_common(snapshot, true);
    snapshot->add_option("--ues", n_ues, "number of UEs in the snapshot");

    try {
        app.parse(argc, argv);
        if (analyze->parsed()) return cmd_analyze(args);
        if (optimize->parsed()) return cmd_optimize(args, algo);
        if (simulate->parsed()) return cmd_simulate(args);
        if (sweep->parsed()) return cmd_sweep(args, sweep_arg, policies, modes);
        if (snapshot->parsed()) return cmd_snapshot(args, n_ues);
        return kExitValidation;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    } catch (const mmwc::numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
}

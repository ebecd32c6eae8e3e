#include "loocv/claims.hpp"
#include "loocv/config.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace loocv;

int cmd_run(const std::string& config_path, const std::string& out_dir, int threads, bool svg) {
    ExperimentConfig cfg = load_config_file(config_path);
    if (threads > 0) cfg.threads = threads;
    const ExperimentResult result = run_experiment(cfg);
    emit_csv(result, out_dir);
    if (!cfg.eps_bound_grid.empty()) emit_bound_sweep_csv(result, out_dir);
    if (svg) emit_svg(result, out_dir);

    // Echo of the resolved configuration, including the bound z-sample
    // stream, so a run can be reproduced from its output directory alone.
    const auto meta = std::filesystem::path(out_dir) / (cfg.name + "_config.txt");
    std::ofstream out(meta);
    out << config_to_text(cfg);
    out << "# z-sample stream: substream(base_seed, {tag="
        << static_cast<std::uint64_t>(StreamTag::z_samples) << "}), count = " << cfg.z_samples
        << "\n";

    std::cout << "wrote " << result.records.size() << " records over " << cfg.n_grid.size()
              << " grid points to " << out_dir << "\n";
    return 0;
}

int cmd_presets(const std::string& emit) {
    if (!emit.empty()) {
        std::cout << config_to_text(preset_config(emit));
        return 0;
    }
    for (const std::string& name : preset_names()) {
        const ExperimentConfig cfg = preset_config(name);
        std::cout << name << ": generator=" << to_string(cfg.generator.kind());
        for (double p : cfg.generator.params()) std::cout << " " << format_double(p);
        std::cout << ", estimator=" << to_string(cfg.estimator.kind);
        if (cfg.estimator.kind == EstimatorKind::kde ||
            cfg.estimator.kind == EstimatorKind::nw_kernel_stabilized)
            std::cout << " h=" << format_double(cfg.estimator.bandwidth);
        if (cfg.estimator.kind == EstimatorKind::nw_kernel_stabilized ||
            cfg.estimator.kind == EstimatorKind::ols_stabilized)
            std::cout << " delta=" << format_double(cfg.estimator.stabilizer);
        std::cout << ", loss=" << to_string(cfg.loss.kind)
                  << ", eps_tail=" << format_double(cfg.eps_tail) << ", reps=" << cfg.reps
                  << ", oracle_m=" << cfg.oracle_m << "\n";
    }
    return 0;
}

int cmd_stability(const std::string& config_path, const std::string& out_path) {
    const ExperimentConfig cfg = load_config_file(config_path);
    std::ostringstream out;
    out << "n,delta1_hat,delta2_hat,probes,violations,delta3_hat,delta3_se\n";
    for (Index n : cfg.n_grid) {
        const EnvelopeFit env = fit_envelope(cfg.estimator, cfg.loss, cfg.generator, n,
                                             cfg.profile_probes, cfg.base_seed);
        const Delta3Estimate d3 = estimate_delta3(cfg.estimator, cfg.loss, cfg.generator, n,
                                                  cfg.delta3_reps, 1, cfg.base_seed);
        out << n << ',' << format_double(env.delta1_hat) << ',' << format_double(env.delta2_hat)
            << ',' << env.probes << ',' << env.violations << ',' << format_double(d3.value) << ','
            << format_double(d3.std_error) << '\n';
    }
    if (out_path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot write " + out_path);
        f << out.str();
    }
    return 0;
}

int cmd_bounds(const std::string& config_path, const std::vector<double>& eps_grid) {
    ExperimentConfig cfg = load_config_file(config_path);
    if (!eps_grid.empty()) cfg.eps_bound_grid = eps_grid;
    if (cfg.eps_bound_grid.empty()) throw ConfigError("bounds: provide --eps or eps_bound_grid");

    std::vector<Observation> zs;
    Rng zrng = substream(cfg.base_seed, {static_cast<std::uint64_t>(StreamTag::z_samples)});
    for (int i = 0; i < cfg.z_samples; ++i) zs.push_back(cfg.generator.sample_observation(zrng));

    std::cout << "n,eps,bound_main,valid_main,bound_data_dependent\n";
    for (Index n : cfg.n_grid) {
        BoundSpec spec;
        spec.sigma2_mu = cfg.generator.sigma2_mu();
        spec.second_moment = cfg.generator.second_moment();
        spec.growth = cfg.growth;
        spec.lipschitz_const = cfg.lipschitz_const;
        spec.c_l = cfg.c_l;
        spec.c_q = cfg.c_q;
        spec.n = n;
        const StabilityProfile profile =
            has_analytic_profile(cfg.estimator, cfg.loss)
                ? analytic_profile(cfg.estimator, cfg.generator)
                : fitted_profile(cfg.estimator, cfg.loss, cfg.generator, n, cfg.profile_probes,
                                 cfg.delta3_reps, cfg.base_seed);
        std::optional<RestrictionSet> rset;
        if (cfg.restriction)
            rset = estimate_restriction_set(cfg.estimator, cfg.loss, cfg.generator, n,
                                            cfg.restriction->eps_k, cfg.restriction->reps,
                                            cfg.base_seed);
        for (double eps : cfg.eps_bound_grid) {
            const TailBound b = bound_main(spec, eps, profile, zs);
            const double v = cfg.two_sided ? std::min(1.0, 2.0 * b.value) : b.value;
            std::cout << n << ',' << format_double(eps) << ',' << format_double(v) << ','
                      << (b.valid ? 1 : 0) << ',';
            if (rset) {
                const TailBound dd = bound_data_dependent(spec, eps, *rset, zs, rset->slice_prob);
                std::cout << format_double(cfg.two_sided ? std::min(1.0, 2.0 * dd.value) : dd.value);
            }
            std::cout << '\n';
        }
    }
    return 0;
}

int cmd_verify(std::uint64_t seed, const std::string& out_path) {
    const std::vector<ClaimCheck> checks = verify_all(seed);
    const std::string csv = claims_to_csv(checks);
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot write " + out_path);
        f << csv;
    }
    std::cout << csv;
    int failed = 0;
    for (const ClaimCheck& c : checks)
        if (!c.pass) ++failed;
    std::cout << (failed == 0 ? "all claims pass" : std::to_string(failed) + " claim(s) FAILED")
              << " (" << checks.size() << " total)\n";
    return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LOO cross-validation concentration experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", out_path, preset_emit;
    int threads = 0;
    bool svg = false;
    std::uint64_t seed = 7;
    std::vector<double> eps_grid;

    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--threads", threads, "worker threads (default: LOO_CERTIFY_THREADS or cores)");
    run->add_flag("--svg", svg, "emit minimal SVG charts");

    auto* presets = app.add_subcommand("presets", "list built-in experiment presets");
    presets->add_option("--emit", preset_emit, "print the named preset as a config file");

    auto* stability = app.add_subcommand("stability", "emit envelope and delta3 tables");
    stability->add_option("--config", config_path, "config file")->required();
    stability->add_option("--out", out_path, "output file (default: stdout)");

    auto* bounds = app.add_subcommand("bounds", "evaluate bounds standalone");
    bounds->add_option("--config", config_path, "config file")->required();
    bounds->add_option("--eps", eps_grid, "epsilon grid")->delimiter(',');

    auto* verify = app.add_subcommand("verify", "run the per-estimator claim checks");
    verify->add_option("--seed", seed, "probe seed");
    verify->add_option("--out", out_path, "also write the claim CSV here");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmd_run(config_path, out_dir, threads, svg);
        if (presets->parsed()) return cmd_presets(preset_emit);
        if (stability->parsed()) return cmd_stability(config_path, out_path);
        if (bounds->parsed()) return cmd_bounds(config_path, eps_grid);
        if (verify->parsed()) return cmd_verify(seed, out_path);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const loocv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

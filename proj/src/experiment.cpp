#include "loocv/experiment.hpp"

#include "loocv/parallel.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

namespace loocv {

void ExperimentConfig::validate() const {
    if (name.empty()) throw ConfigError("config: name must be nonempty");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1]) throw ConfigError("config: n_grid must be strictly increasing");
    if (n_grid.empty()) throw ConfigError("config: n_grid must be nonempty");
    if (n_grid.front() < 2) throw ConfigError("config: n must be >= 2");
    if (reps < 1) throw ConfigError("config: reps must be >= 1");
    if (oracle_m < 2) throw ConfigError("config: oracle_m must be >= 2");
    if (!(eps_tail > 0.0)) throw ConfigError("config: eps_tail must be positive");
    if (z_samples < 1) throw ConfigError("config: z_samples must be >= 1");
    estimator.validate();
    if (restriction && restriction->reps < 500)
        throw ConfigError("config: restriction_reps must be >= 500");
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LOO_CERTIFY_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<int>(v);
    }
    return default_thread_count();
}

namespace {

double doubled_if(double value, bool two_sided) {
    return two_sided ? std::min(1.0, 2.0 * value) : value;
}

BoundSpec bound_spec_for(const ExperimentConfig& cfg, Index n) {
    BoundSpec spec;
    spec.sigma2_mu = cfg.generator.sigma2_mu();
    spec.second_moment = cfg.generator.second_moment();
    spec.growth = cfg.growth;
    spec.lipschitz_const = cfg.lipschitz_const;
    spec.c_l = cfg.c_l;
    spec.c_q = cfg.c_q;
    spec.n = n;
    return spec;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const int threads = resolve_threads(cfg.threads);

    ExperimentResult result;
    result.config = cfg;

    const std::int64_t items =
        static_cast<std::int64_t>(cfg.n_grid.size()) * static_cast<std::int64_t>(cfg.reps);
    result.records.resize(static_cast<std::size_t>(items));

    parallel_for(items, threads, [&](std::int64_t idx) {
        const Index n = cfg.n_grid[static_cast<std::size_t>(idx / cfg.reps)];
        const int rep = static_cast<int>(idx % cfg.reps);
        Rng sample_rng = substream(cfg.base_seed, {static_cast<std::uint64_t>(n),
                                                   static_cast<std::uint64_t>(rep),
                                                   static_cast<std::uint64_t>(StreamTag::sample)});
        Rng oracle_rng = substream(cfg.base_seed, {static_cast<std::uint64_t>(n),
                                                   static_cast<std::uint64_t>(rep),
                                                   static_cast<std::uint64_t>(StreamTag::oracle)});
        Dataset d = sample_dataset(cfg.generator, n, sample_rng);
        LooResult loo;
        try {
            loo = loo_fast(cfg.estimator, cfg.loss, d);
        } catch (const FoldError& e) {
            throw ContractError("run_experiment: n=" + std::to_string(n) + " rep=" +
                                std::to_string(rep) + ": " + e.what());
        }
        const RiskOracleResult oracle =
            risk_oracle(cfg.estimator, cfg.loss, d, cfg.generator, cfg.oracle_m, oracle_rng);

        ExperimentRecord& r = result.records[static_cast<std::size_t>(idx)];
        r.n = n;
        r.rep = rep;
        r.loo_estimate = loo.loo_estimate;
        r.risk = oracle.risk;
        r.error = oracle.risk - loo.loo_estimate;
        r.oracle_se = oracle.std_error;
    });

    // Shared z-sample set for the bound expectations.
    std::vector<Observation> zs;
    zs.reserve(static_cast<std::size_t>(cfg.z_samples));
    {
        Rng zrng = substream(cfg.base_seed, {static_cast<std::uint64_t>(StreamTag::z_samples)});
        for (int i = 0; i < cfg.z_samples; ++i) zs.push_back(cfg.generator.sample_observation(zrng));
    }

    const bool analytic = has_analytic_profile(cfg.estimator, cfg.loss);
    for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
        const Index n = cfg.n_grid[gi];
        NSummary s;
        s.n = n;

        double sum = 0.0;
        int tail = 0;
        const std::size_t lo = gi * static_cast<std::size_t>(cfg.reps);
        for (int rep = 0; rep < cfg.reps; ++rep) sum += result.records[lo + rep].error;
        const double mean = sum / cfg.reps;
        double ss = 0.0;
        for (int rep = 0; rep < cfg.reps; ++rep) {
            const double e = result.records[lo + rep].error;
            ss += (e - mean) * (e - mean);
            if (std::abs(e) > cfg.eps_tail) ++tail;
        }
        s.std_dev = cfg.reps > 1 ? std::sqrt(ss / (cfg.reps - 1)) : 0.0;
        s.tail_freq = static_cast<double>(tail) / cfg.reps;
        s.tail_se = std::sqrt(s.tail_freq * (1.0 - s.tail_freq) / cfg.reps);

        const StabilityProfile profile =
            analytic ? analytic_profile(cfg.estimator, cfg.generator)
                     : fitted_profile(cfg.estimator, cfg.loss, cfg.generator, n,
                                      cfg.profile_probes, cfg.delta3_reps, cfg.base_seed);
        const BoundSpec spec = bound_spec_for(cfg, n);

        const TailBound main_b = bound_main(spec, cfg.eps_tail, profile, zs);
        s.bound_main_value = doubled_if(main_b.value, cfg.two_sided);
        s.valid_main = main_b.valid;

        double d2max = 0.0;
        for (const Observation& z : zs) d2max = std::max(d2max, profile.delta2(n, z));
        if (cfg.growth == Growth::linear && d2max == 0.0) {
            const TailBound simp =
                bound_simplified(spec, cfg.eps_tail, profile.delta1, profile.delta3(n), zs);
            s.bound_simplified_value = doubled_if(simp.value, cfg.two_sided);
        }

        std::optional<RestrictionSet> rset;
        if (cfg.restriction) {
            rset = estimate_restriction_set(cfg.estimator, cfg.loss, cfg.generator, n,
                                            cfg.restriction->eps_k, cfg.restriction->reps,
                                            cfg.base_seed);
            const TailBound dd = bound_data_dependent(spec, cfg.eps_tail, *rset, zs, rset->slice_prob);
            s.bound_data_dependent_value = doubled_if(dd.value, cfg.two_sided);
        }
        result.summaries.push_back(s);

        for (double eps : cfg.eps_bound_grid) {
            BoundSweepRow row;
            row.n = n;
            row.eps = eps;
            const TailBound mb = bound_main(spec, eps, profile, zs);
            row.bound_main_value = doubled_if(mb.value, cfg.two_sided);
            row.valid_main = mb.valid;
            if (rset) {
                const TailBound dd = bound_data_dependent(spec, eps, *rset, zs, rset->slice_prob);
                row.bound_data_dependent_value = doubled_if(dd.value, cfg.two_sided);
            }
            result.bound_sweep.push_back(row);
        }
    }
    return result;
}

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ContractError("linear_fit: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double xbar = sx / n, ybar = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
        syy += (y[i] - ybar) * (y[i] - ybar);
    }
    if (!(sxx > 0.0)) throw ContractError("linear_fit: degenerate x values");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = ybar - f.slope * xbar;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

LineFit fit_loglog_slope(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 3) throw ContractError("fit_loglog_slope: need >= 3 pairs");
    std::vector<double> lx, ly;
    for (const auto& [n, v] : pairs) {
        if (!(v > 0.0)) throw ContractError("fit_loglog_slope: values must be positive");
        lx.push_back(std::log(n));
        ly.push_back(std::log(v));
    }
    return linear_fit(lx, ly);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::string opt_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

}  // namespace

void emit_csv(const ExperimentResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string base = (fs::path(dir) / result.config.name).string();

    {
        std::ofstream out = open_out(base + "_records.csv");
        out << "n,rep,loo_estimate,risk,error,oracle_se\n";
        for (const ExperimentRecord& r : result.records) {
            out << r.n << ',' << r.rep << ',' << format_double(r.loo_estimate) << ','
                << format_double(r.risk) << ',' << format_double(r.error) << ','
                << format_double(r.oracle_se) << '\n';
        }
        if (!out) throw std::runtime_error("write failed: " + base + "_records.csv");
    }
    {
        std::ofstream out = open_out(base + "_summary.csv");
        out << "n,std_dev,tail_freq,tail_se,bound_main,bound_simplified,bound_data_dependent,"
               "valid_main\n";
        for (const NSummary& s : result.summaries) {
            out << s.n << ',' << format_double(s.std_dev) << ',' << format_double(s.tail_freq)
                << ',' << format_double(s.tail_se) << ',' << opt_field(s.bound_main_value) << ','
                << opt_field(s.bound_simplified_value) << ','
                << opt_field(s.bound_data_dependent_value) << ',' << (s.valid_main ? 1 : 0) << '\n';
        }
        if (!out) throw std::runtime_error("write failed: " + base + "_summary.csv");
    }
}

void emit_bound_sweep_csv(const ExperimentResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string path = (fs::path(dir) / (result.config.name + "_bounds.csv")).string();
    std::ofstream out = open_out(path);
    out << "n,eps,bound_main,valid_main,bound_data_dependent\n";
    for (const BoundSweepRow& r : result.bound_sweep) {
        out << r.n << ',' << format_double(r.eps) << ',' << format_double(r.bound_main_value) << ','
            << (r.valid_main ? 1 : 0) << ',' << opt_field(r.bound_data_dependent_value) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_svg(const ExperimentResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    const auto write_chart = [&](const std::string& column,
                                 const std::vector<std::pair<double, double>>& pts) {
        std::vector<std::pair<double, double>> kept;
        for (const auto& p : pts)
            if (p.second > 0.0) kept.push_back({std::log10(p.first), std::log10(p.second)});
        if (kept.size() < 2) return;
        double xmin = kept[0].first, xmax = kept[0].first, ymin = kept[0].second, ymax = kept[0].second;
        for (const auto& p : kept) {
            xmin = std::min(xmin, p.first);
            xmax = std::max(xmax, p.first);
            ymin = std::min(ymin, p.second);
            ymax = std::max(ymax, p.second);
        }
        if (xmax == xmin) xmax = xmin + 1.0;
        if (ymax == ymin) ymax = ymin + 1.0;
        const double w = 480.0, hgt = 320.0, pad = 40.0;
        std::string path =
            (fs::path(dir) / (result.config.name + "_" + column + ".svg")).string();
        std::ofstream out = open_out(path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << hgt
            << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out << "<text x=\"" << pad << "\" y=\"20\" font-size=\"13\">" << result.config.name << " "
            << column << " (log-log vs n)</text>\n<polyline fill=\"none\" stroke=\"black\" points=\"";
        for (const auto& p : kept) {
            const double px = pad + (p.first - xmin) / (xmax - xmin) * (w - 2 * pad);
            const double py = hgt - pad - (p.second - ymin) / (ymax - ymin) * (hgt - 2 * pad);
            out << format_double(px) << ',' << format_double(py) << ' ';
        }
        out << "\"/>\n</svg>\n";
    };

    std::vector<std::pair<double, double>> stds, tails, mains;
    for (const NSummary& s : result.summaries) {
        stds.push_back({static_cast<double>(s.n), s.std_dev});
        tails.push_back({static_cast<double>(s.n), s.tail_freq});
        if (s.bound_main_value) mains.push_back({static_cast<double>(s.n), *s.bound_main_value});
    }
    write_chart("std_dev", stds);
    write_chart("tail_freq", tails);
    write_chart("bound_main", mains);
}

}  // namespace loocv

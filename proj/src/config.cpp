#include "loocv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace loocv {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + s);
    }
}

long parse_long(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for '" + key + "': " + s);
    }
}

bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("config: bad boolean value for '" + key + "': " + s);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (kv.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
        kv[key] = value;
    }

    ExperimentConfig cfg;
    std::vector<double> gen_params;
    std::string gen_name = "uniform_sine";
    double sigma2_override = 0.0;
    bool have_sigma2 = false;
    std::string est_name = "kde";
    double bandwidth = 0.1, stabilizer = 0.01, truncation = 1.0;
    bool have_restriction_eps = false;
    RestrictionParams restriction;

    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("name")) cfg.name = *v;
    if (auto v = take("generator")) gen_name = *v;
    if (auto v = take("generator_params"))
        for (const auto& p : split_list(*v)) gen_params.push_back(parse_double("generator_params", p));
    if (auto v = take("sigma2_mu")) {
        sigma2_override = parse_double("sigma2_mu", *v);
        have_sigma2 = true;
    }
    if (auto v = take("estimator")) est_name = *v;
    if (auto v = take("bandwidth")) bandwidth = parse_double("bandwidth", *v);
    if (auto v = take("stabilizer")) stabilizer = parse_double("stabilizer", *v);
    if (auto v = take("truncation")) truncation = parse_double("truncation", *v);
    if (auto v = take("loss")) cfg.loss.kind = loss_kind_from_string(*v);
    if (auto v = take("n_grid")) {
        cfg.n_grid.clear();
        for (const auto& p : split_list(*v)) cfg.n_grid.push_back(parse_long("n_grid", p));
    }
    if (auto v = take("reps")) cfg.reps = static_cast<int>(parse_long("reps", *v));
    if (auto v = take("oracle_m")) cfg.oracle_m = parse_long("oracle_m", *v);
    if (auto v = take("eps_tail")) cfg.eps_tail = parse_double("eps_tail", *v);
    if (auto v = take("eps_bound_grid")) {
        cfg.eps_bound_grid.clear();
        for (const auto& p : split_list(*v))
            cfg.eps_bound_grid.push_back(parse_double("eps_bound_grid", p));
    }
    if (auto v = take("base_seed"))
        cfg.base_seed = static_cast<std::uint64_t>(parse_long("base_seed", *v));
    if (auto v = take("two_sided")) cfg.two_sided = parse_bool("two_sided", *v);
    if (auto v = take("growth")) cfg.growth = growth_from_string(*v);
    if (auto v = take("lipschitz_const")) cfg.lipschitz_const = parse_double("lipschitz_const", *v);
    if (auto v = take("c_l")) cfg.c_l = parse_double("c_l", *v);
    if (auto v = take("c_q")) cfg.c_q = parse_double("c_q", *v);
    if (auto v = take("restriction_eps_k")) {
        restriction.eps_k = parse_double("restriction_eps_k", *v);
        have_restriction_eps = true;
    }
    if (auto v = take("restriction_reps"))
        restriction.reps = static_cast<int>(parse_long("restriction_reps", *v));
    if (auto v = take("profile_probes"))
        cfg.profile_probes = static_cast<int>(parse_long("profile_probes", *v));
    if (auto v = take("delta3_reps")) cfg.delta3_reps = static_cast<int>(parse_long("delta3_reps", *v));
    if (auto v = take("z_samples")) cfg.z_samples = static_cast<int>(parse_long("z_samples", *v));
    if (auto v = take("threads")) cfg.threads = static_cast<int>(parse_long("threads", *v));

    if (!kv.empty()) {
        std::string keys;
        for (const auto& [k, _] : kv) {
            if (!keys.empty()) keys += ", ";
            keys += "'" + k + "'";
        }
        throw ConfigError("config: unknown key(s): " + keys);
    }

    cfg.generator = DataGenerator(generator_kind_from_string(gen_name), std::move(gen_params));
    if (have_sigma2) cfg.generator.set_sigma2_mu(sigma2_override);

    const EstimatorKind ek = estimator_kind_from_string(est_name);
    switch (ek) {
        case EstimatorKind::empirical_mean: cfg.estimator = Estimator::empirical_mean(); break;
        case EstimatorKind::kde: cfg.estimator = Estimator::kde(bandwidth); break;
        case EstimatorKind::ols_simple: cfg.estimator = Estimator::ols_simple(); break;
        case EstimatorKind::ols_stabilized:
            cfg.estimator = Estimator::ols_stabilized(stabilizer, truncation);
            break;
        case EstimatorKind::nw_kernel_stabilized:
            cfg.estimator = Estimator::nw_kernel_stabilized(bandwidth, stabilizer);
            break;
    }
    if (have_restriction_eps) cfg.restriction = restriction;

    try {
        cfg.validate();
    } catch (const ContractError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_to_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "name = " << cfg.name << "\n";
    out << "generator = " << to_string(cfg.generator.kind()) << "\n";
    if (!cfg.generator.params().empty()) {
        out << "generator_params = ";
        const auto& ps = cfg.generator.params();
        for (std::size_t i = 0; i < ps.size(); ++i) out << (i ? "," : "") << format_double(ps[i]);
        out << "\n";
    }
    out << "sigma2_mu = " << format_double(cfg.generator.sigma2_mu()) << "\n";
    out << "estimator = " << to_string(cfg.estimator.kind) << "\n";
    const bool kernel = cfg.estimator.kind == EstimatorKind::kde ||
                        cfg.estimator.kind == EstimatorKind::nw_kernel_stabilized;
    if (kernel) out << "bandwidth = " << format_double(cfg.estimator.bandwidth) << "\n";
    if (cfg.estimator.kind == EstimatorKind::ols_stabilized ||
        cfg.estimator.kind == EstimatorKind::nw_kernel_stabilized)
        out << "stabilizer = " << format_double(cfg.estimator.stabilizer) << "\n";
    if (cfg.estimator.kind == EstimatorKind::ols_stabilized)
        out << "truncation = " << format_double(cfg.estimator.truncation) << "\n";
    out << "loss = " << to_string(cfg.loss.kind) << "\n";
    out << "n_grid = ";
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) out << (i ? "," : "") << cfg.n_grid[i];
    out << "\n";
    out << "reps = " << cfg.reps << "\n";
    out << "oracle_m = " << cfg.oracle_m << "\n";
    out << "eps_tail = " << format_double(cfg.eps_tail) << "\n";
    if (!cfg.eps_bound_grid.empty()) {
        out << "eps_bound_grid = ";
        for (std::size_t i = 0; i < cfg.eps_bound_grid.size(); ++i)
            out << (i ? "," : "") << format_double(cfg.eps_bound_grid[i]);
        out << "\n";
    }
    out << "base_seed = " << cfg.base_seed << "\n";
    out << "two_sided = " << (cfg.two_sided ? "true" : "false") << "\n";
    out << "growth = " << to_string(cfg.growth) << "\n";
    if (cfg.growth == Growth::linear)
        out << "lipschitz_const = " << format_double(cfg.lipschitz_const) << "\n";
    else
        out << "c_l = " << format_double(cfg.c_l) << "\nc_q = " << format_double(cfg.c_q) << "\n";
    if (cfg.restriction) {
        out << "restriction_eps_k = " << format_double(cfg.restriction->eps_k) << "\n";
        out << "restriction_reps = " << cfg.restriction->reps << "\n";
    }
    out << "profile_probes = " << cfg.profile_probes << "\n";
    out << "delta3_reps = " << cfg.delta3_reps << "\n";
    out << "z_samples = " << cfg.z_samples << "\n";
    return out.str();
}

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.eps_bound_grid = {0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
    if (name == "kde-sine") {
        cfg.generator = DataGenerator::uniform_sine();
        cfg.estimator = Estimator::kde(0.1);
        cfg.loss.kind = LossKind::identity_abs;
        cfg.growth = Growth::linear;
        // sup_z |E g_hat'(z)| <= sup|K'| / h^2 for the Gaussian kernel.
        cfg.lipschitz_const = gaussian_kernel_deriv_sup() / (0.1 * 0.1);
        cfg.base_seed = 51'0001;
    } else if (name == "ols-gaussian") {
        cfg.generator = DataGenerator::gaussian_linear(5.0);
        cfg.estimator = Estimator::ols_simple();
        cfg.loss.kind = LossKind::absolute;
        cfg.growth = Growth::linear;
        // |d f / dy| <= 1 and |d f / dx| <= E|slope estimate| ~ |slope|;
        // conservative envelope sqrt(1 + (slope^2 + 2)).
        cfg.lipschitz_const = std::sqrt(1.0 + 27.0);
        cfg.restriction = RestrictionParams{0.5, 500};
        // The universal constant in the restricted sub-Gaussian bound makes
        // the conditioned bound informative only at large deviation scales.
        cfg.eps_bound_grid = {0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 1e2, 1e3, 1e4, 1e5};
        cfg.base_seed = 52'0001;
    } else if (name == "nw-stabilized") {
        cfg.generator = DataGenerator::gaussian_sine();
        cfg.estimator = Estimator::nw_kernel_stabilized(0.01, 0.01);
        cfg.loss.kind = LossKind::absolute;
        cfg.growth = Growth::linear;
        // Conservative: the h = 1/100, delta = 0.01 gradient envelope of the
        // smoothed loss is of order sup|K'|/(h^2 delta); vacuous but sound.
        cfg.lipschitz_const = gaussian_kernel_deriv_sup() / (0.01 * 0.01 * 0.01);
        cfg.base_seed = 53'0001;
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    return cfg;
}

std::vector<std::string> preset_names() { return {"kde-sine", "ols-gaussian", "nw-stabilized"}; }

}  // namespace loocv

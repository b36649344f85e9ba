#include "nsgapinn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "nsgapinn/results_io.hpp"

namespace fs = std::filesystem;

namespace nsgapinn::cli {

namespace {

bool pendulum_family(ExperimentKind kind) {
    return kind == ExperimentKind::pendulum ||
           kind == ExperimentKind::pendulum_noisy ||
           kind == ExperimentKind::survival_rate;
}

template <class T>
T field(const nlohmann::json& j, const std::string& key,
        const std::string& prefix = "") {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(prefix + key, std::string("invalid or missing: ") + e.what());
    }
}

void merge_into(nlohmann::json& dst, const nlohmann::json& src,
                const std::string& prefix) {
    for (const auto& [key, value] : src.items()) {
        if (!dst.contains(key))
            throw ConfigError(prefix + key, "unknown configuration key");
        if (dst[key].is_object() && value.is_object())
            merge_into(dst[key], value, prefix + key + ".");
        else
            dst[key] = value;
    }
}

problems::Problem make_problem(ExperimentKind kind, const nlohmann::json& p) {
    const std::string pre = "problem.";
    const double noise_mean = field<double>(p, "noise_mean", pre);
    const double noise_sigma = field<double>(p, "noise_sigma", pre);
    if (noise_sigma < 0.0)
        throw ConfigError("problem.noise_sigma", "must be non-negative");
    const auto noise_seed = field<std::uint64_t>(p, "noise_seed", pre);
    std::optional<problems::GaussianNoise> noise;
    if (noise_sigma > 0.0)
        noise = problems::GaussianNoise{noise_mean, noise_sigma, noise_seed};

    if (pendulum_family(kind)) {
        problems::PendulumOptions o;
        o.k_true = field<double>(p, "k_true", pre);
        const auto tr = field<std::vector<double>>(p, "theta0_range", pre);
        const auto om = field<std::vector<double>>(p, "omega0_range", pre);
        if (tr.size() != 2 || om.size() != 2)
            throw ConfigError("problem.theta0_range",
                              "ranges must be two-element arrays [lo, hi]");
        o.theta0_range = {tr[0], tr[1]};
        o.omega0_range = {om[0], om[1]};
        o.n_collocation = field<int>(p, "n_collocation", pre);
        o.n_ics = field<int>(p, "n_ics", pre);
        if (o.n_collocation < 1)
            throw ConfigError("problem.n_collocation", "must be positive");
        if (o.n_ics < 1) throw ConfigError("problem.n_ics", "must be positive");
        o.seed = field<std::uint64_t>(p, "seed", pre);
        o.noise = noise;
        return problems::make_pendulum(o);
    }
    problems::BurgersOptions o;
    o.viscosity = field<double>(p, "viscosity", pre);
    if (!(o.viscosity > 0.0))
        throw ConfigError("problem.viscosity", "must be positive");
    o.n_collocation = field<int>(p, "n_collocation", pre);
    o.n_boundary = field<int>(p, "n_boundary", pre);
    if (o.n_collocation < 1)
        throw ConfigError("problem.n_collocation", "must be positive");
    if (o.n_boundary < 3)
        throw ConfigError("problem.n_boundary", "must be at least 3");
    o.seed = field<std::uint64_t>(p, "seed", pre);
    o.noise = noise;
    return problems::make_burgers(o);
}

}  // namespace

ExperimentKind experiment_from_string(const std::string& s) {
    if (s == "pendulum") return ExperimentKind::pendulum;
    if (s == "pendulum_noisy") return ExperimentKind::pendulum_noisy;
    if (s == "burgers") return ExperimentKind::burgers;
    if (s == "burgers_noisy") return ExperimentKind::burgers_noisy;
    if (s == "survival_rate") return ExperimentKind::survival_rate;
    throw ConfigError("experiment",
                      "unknown experiment '" + s +
                          "' (expected pendulum, pendulum_noisy, burgers, "
                          "burgers_noisy or survival_rate)");
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::pendulum: return "pendulum";
        case ExperimentKind::pendulum_noisy: return "pendulum_noisy";
        case ExperimentKind::burgers: return "burgers";
        case ExperimentKind::burgers_noisy: return "burgers_noisy";
        case ExperimentKind::survival_rate: return "survival_rate";
    }
    throw Error("to_string: invalid experiment value");
}

nlohmann::json default_config(ExperimentKind kind) {
    nlohmann::json j;
    j["experiment"] = to_string(kind);
    j["repetitions"] = kind == ExperimentKind::survival_rate ? 50 : 1;
    j["mode"] = "nsga_pinn";
    j["refine"] = "pool";
    j["population_size"] = 20;
    j["max_generations"] = kind == ExperimentKind::survival_rate ? 10 : 20;
    j["inner_adam_steps"] = 50;
    j["lr"] = 1e-3;
    j["master_seed"] = 0;
    j["sigma_perturb"] = 0.01;
    j["duplicate_jitter"] = 1e-3;

    nlohmann::json net;
    if (pendulum_family(kind))
        net["hidden_layers"] = std::vector<int>{32, 32};
    else
        net["hidden_layers"] = std::vector<int>{20, 20, 20, 20};
    j["network"] = std::move(net);

    nlohmann::json p;
    if (pendulum_family(kind)) {
        p["k_true"] = 1.0;
        p["theta0_range"] = std::vector<double>{-M_PI, M_PI};
        p["omega0_range"] = std::vector<double>{0.0, M_PI};
        p["n_collocation"] = 1000;
        p["n_ics"] = 100;
        p["noise_sigma"] = kind == ExperimentKind::pendulum_noisy ? 0.1 : 0.0;
    } else {
        p["viscosity"] = 0.01 / M_PI;
        p["n_collocation"] = 10000;
        p["n_boundary"] = 100;
        p["noise_sigma"] = kind == ExperimentKind::burgers_noisy ? 0.2 : 0.0;
    }
    p["noise_mean"] = 0.0;
    p["noise_seed"] = 1;
    p["seed"] = 0;
    j["problem"] = std::move(p);
    return j;
}

nlohmann::json resolve_config_json(const nlohmann::json& user) {
    if (!user.is_object())
        throw ConfigError("config", "top level must be a JSON object");
    if (!user.contains("experiment"))
        throw ConfigError("experiment", "required key is missing");
    const auto kind =
        experiment_from_string(field<std::string>(user, "experiment"));
    nlohmann::json resolved = default_config(kind);
    merge_into(resolved, user, "");
    return resolved;
}

void apply_override(nlohmann::json& resolved, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set",
                          "expected key.path=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    nlohmann::json* node = &resolved;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string token =
            path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (!node->is_object() || !node->contains(token))
            throw ConfigError(path, "unknown configuration key");
        if (dot == std::string::npos) {
            nlohmann::json parsed =
                nlohmann::json::parse(value, nullptr, /*allow_exceptions=*/false);
            (*node)[token] =
                parsed.is_discarded() ? nlohmann::json(value) : std::move(parsed);
            return;
        }
        node = &(*node)[token];
        start = dot + 1;
    }
}

ResolvedExperiment build_experiment(const nlohmann::json& resolved) {
    ResolvedExperiment exp;
    exp.kind = experiment_from_string(field<std::string>(resolved, "experiment"));
    exp.repetitions = field<int>(resolved, "repetitions");
    if (exp.repetitions < 1)
        throw ConfigError("repetitions", "must be at least 1");
    exp.manifest = resolved;

    trainer::RunConfig cfg;
    cfg.population_size = field<int>(resolved, "population_size");
    cfg.max_generations = field<int>(resolved, "max_generations");
    cfg.inner_adam_steps = field<int>(resolved, "inner_adam_steps");
    cfg.lr = field<double>(resolved, "lr");
    cfg.master_seed = field<std::uint64_t>(resolved, "master_seed");
    cfg.mode = trainer::mode_from_string(field<std::string>(resolved, "mode"));
    cfg.refine = trainer::refine_from_string(field<std::string>(resolved, "refine"));
    cfg.sigma_perturb = field<double>(resolved, "sigma_perturb");
    cfg.duplicate_jitter = field<double>(resolved, "duplicate_jitter");
    const auto net = field<nlohmann::json>(resolved, "network");
    cfg.hidden = field<std::vector<int>>(net, "hidden_layers", "network.");
    cfg.problem =
        make_problem(exp.kind, field<nlohmann::json>(resolved, "problem"));
    cfg.validate();
    exp.base = std::move(cfg);
    return exp;
}

nlohmann::json load_json_file(const fs::path& path) {
    const std::string text = read_text_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON in ") +
                                        path.string() + ": " + e.what());
    }
}

std::string prediction_csv(const ResolvedExperiment& exp,
                           const trainer::RunConfig& cfg,
                           std::span<const nsga::Individual> population) {
    const ad::MlpConfig net = cfg.network();
    std::string out;
    if (pendulum_family(exp.kind)) {
        const auto& prob = std::get<problems::PendulumProblem>(cfg.problem);
        const auto& times = prob.data_mesh;
        Eigen::MatrixXd q(3, static_cast<Eigen::Index>(times.size()));
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            q(0, j) = prob.data_theta0;
            q(1, j) = prob.data_omega0;
            q(2, j) = times[static_cast<std::size_t>(j)];
        }
        const auto pred = trainer::ensemble_predict(net, population, q);
        const Eigen::MatrixXd ref = problems::pendulum_reference(
            prob.data_theta0, prob.data_omega0, prob.opt.k_true, times);
        out = "t,channel,mean,lo95,hi95,reference\n";
        const char* channel[2] = {"theta", "omega"};
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            for (int d = 0; d < 2; ++d) {
                out += format_real(q(2, j));
                out += ',';
                out += channel[d];
                out += ',';
                out += format_real(pred.mean(d, j));
                out += ',';
                out += format_real(pred.lower(d, j));
                out += ',';
                out += format_real(pred.upper(d, j));
                out += ',';
                out += format_real(ref(d, j));
                out += '\n';
            }
        }
        return out;
    }

    const auto& prob = std::get<problems::BurgersProblem>(cfg.problem);
    const std::vector<double> slices{0.25, 0.5, 0.75};
    const int nx = 101;
    std::vector<double> ts, xs;
    ts.reserve(slices.size() * nx);
    xs.reserve(slices.size() * nx);
    for (double t : slices) {
        for (int i = 0; i < nx; ++i) {
            ts.push_back(t);
            xs.push_back(-1.0 + 2.0 * i / (nx - 1));
        }
    }
    Eigen::MatrixXd q(2, static_cast<Eigen::Index>(ts.size()));
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        q(0, j) = ts[static_cast<std::size_t>(j)];
        q(1, j) = xs[static_cast<std::size_t>(j)];
    }
    const auto pred = trainer::ensemble_predict(net, population, q);
    const Eigen::VectorXd ref =
        problems::burgers_reference(prob.opt.viscosity, ts, xs);
    out = "t,x,mean,lo95,hi95,reference\n";
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        out += format_real(q(0, j));
        out += ',';
        out += format_real(q(1, j));
        out += ',';
        out += format_real(pred.mean(0, j));
        out += ',';
        out += format_real(pred.lower(0, j));
        out += ',';
        out += format_real(pred.upper(0, j));
        out += ',';
        out += format_real(ref(j));
        out += '\n';
    }
    return out;
}

void run_experiment(const ResolvedExperiment& exp, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError(out_dir.string(), "cannot create directory: " + ec.message(),
                      false);
    write_text_file(out_dir / "manifest.json", exp.manifest.dump(2) + "\n");

    for (int r = 0; r < exp.repetitions; ++r) {
        trainer::RunConfig cfg = exp.base;
        cfg.master_seed = exp.base.master_seed + static_cast<std::uint64_t>(r);
        const auto result = trainer::run(cfg);

        char name[16];
        std::snprintf(name, sizeof(name), "rep_%03d", r);
        const fs::path rep = out_dir / name;
        fs::create_directories(rep, ec);
        if (ec)
            throw IoError(rep.string(), "cannot create directory: " + ec.message(),
                          false);

        write_text_file(rep / "generations.csv", generations_csv(result.records));

        const auto obj = problems::evaluate_objectives(cfg.problem, cfg.network(),
                                                       result.best.params);
        MethodLosses losses;
        losses.method = trainer::to_string(cfg.mode);
        for (std::size_t i = 0; i < 3; ++i) {
            losses.names[i] = obj.components[i].name;
            losses.values[i] = obj.components[i].value;
        }
        write_text_file(rep / "final_losses.json",
                        final_losses_json(std::span(&losses, 1)));
        write_text_file(rep / "population.json",
                        population_to_json(result.population));
        write_text_file(rep / "prediction.csv",
                        prediction_csv(exp, cfg, result.population));
    }
}

std::string survival_report_csv(const fs::path& out_dir) {
    std::error_code ec;
    if (!fs::is_directory(out_dir, ec))
        throw IoError(out_dir.string(), "no such directory", true);
    std::vector<fs::path> reps;
    for (const auto& entry : fs::directory_iterator(out_dir)) {
        if (entry.is_directory() &&
            entry.path().filename().string().rfind("rep_", 0) == 0)
            reps.push_back(entry.path());
    }
    if (reps.empty())
        throw IoError(out_dir.string(), "no rep_* repetition outputs found", true);
    std::sort(reps.begin(), reps.end());

    std::vector<int> gens;
    std::vector<double> sums;
    for (const auto& rep : reps) {
        const auto records =
            parse_generations_csv(read_text_file(rep / "generations.csv"));
        if (gens.empty()) {
            for (const auto& rec : records) {
                gens.push_back(rec.generation);
                sums.push_back(0.0);
            }
        } else if (records.size() != gens.size()) {
            throw Error("report: repetition " + rep.string() + " has " +
                        std::to_string(records.size()) + " generations, expected " +
                        std::to_string(gens.size()));
        }
        for (std::size_t i = 0; i < records.size(); ++i)
            sums[i] += records[i].survival_rate;
    }
    std::string out = "gen,mean_survival_rate\n";
    for (std::size_t i = 0; i < gens.size(); ++i) {
        out += std::to_string(gens[i]);
        out += ',';
        out += format_real(sums[i] / static_cast<double>(reps.size()));
        out += '\n';
    }
    return out;
}

}  // namespace nsgapinn::cli

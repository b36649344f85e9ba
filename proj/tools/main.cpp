#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsgapinn/experiments.hpp"
#include "nsgapinn/reference.hpp"
#include "nsgapinn/results_io.hpp"

namespace cli = nsgapinn::cli;

namespace {

// exit codes: 0 ok, 1 other failure, 2 unknown flag / bad invocation,
// 3 malformed configuration, 4 missing file
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitMissing = 4;

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

void emit_error(const std::string& message, int code) {
    nlohmann::json j;
    j["error"] = one_line(message);
    j["code"] = code;
    std::cerr << j.dump() << "\n";
}

struct RunArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir = "out";
    std::int64_t seed = 0;
    bool seed_given = false;
    std::string mode;
};

nlohmann::json resolve_with_overrides(const RunArgs& args) {
    const nlohmann::json user = cli::load_json_file(args.config_path);
    nlohmann::json resolved = cli::resolve_config_json(user);
    for (const auto& assignment : args.sets)
        cli::apply_override(resolved, assignment);
    if (args.seed_given) resolved["master_seed"] = args.seed;
    if (!args.mode.empty()) resolved["mode"] = args.mode;
    return resolved;
}

int run_command(const RunArgs& args) {
    const auto resolved = resolve_with_overrides(args);
    const auto exp = cli::build_experiment(resolved);
    cli::run_experiment(exp, args.out_dir);
    nlohmann::json j;
    j["status"] = "ok";
    j["out_dir"] = args.out_dir;
    j["repetitions"] = exp.repetitions;
    std::cout << j.dump() << "\n";
    return 0;
}

int validate_command(const RunArgs& args) {
    const auto resolved = resolve_with_overrides(args);
    (void)cli::build_experiment(resolved);
    nlohmann::json j;
    j["status"] = "ok";
    j["experiment"] = resolved.at("experiment");
    std::cout << j.dump() << "\n";
    return 0;
}

int oracle_sort_command(const std::string& input_path) {
    const auto in = cli::load_json_file(input_path);
    std::vector<nsgapinn::nsga::Individual> pop;
    try {
        const auto& objectives = in.at("objectives");
        for (std::size_t i = 0; i < objectives.size(); ++i) {
            nsgapinn::nsga::Individual ind;
            ind.label = i;
            ind.objectives = objectives[i].get<std::vector<double>>();
            pop.push_back(std::move(ind));
        }
    } catch (const nlohmann::json::exception& e) {
        throw nsgapinn::ConfigError(
            "objectives", std::string("expected an array of objective vectors: ") +
                              e.what());
    }
    const auto fronts = nsgapinn::nsga::brute_force_sort(pop);
    nlohmann::json out;
    out["fronts"] = fronts.fronts;
    std::cout << out.dump() << "\n";
    return 0;
}

int oracle_loss_command(const std::string& config_path,
                        const std::string& params_path) {
    RunArgs args;
    args.config_path = config_path;
    const auto resolved = resolve_with_overrides(args);
    const auto exp = cli::build_experiment(resolved);

    const auto pj = cli::load_json_file(params_path);
    std::vector<double> params;
    try {
        params = pj.is_array() ? pj.get<std::vector<double>>()
                               : pj.at("params").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw nsgapinn::ConfigError(
            "params", std::string("expected an array of reals: ") + e.what());
    }

    const auto obj = nsgapinn::problems::oracle_objectives(
        exp.base.problem, exp.base.network(), params);
    nlohmann::json out;
    for (const auto& c : obj.components) out[c.name] = c.value;
    out["total"] = obj.total();
    std::cout << out.dump() << "\n";
    return 0;
}

int report_command(const std::string& dir, std::string output) {
    const std::string csv = cli::survival_report_csv(dir);
    if (output.empty())
        output = (std::filesystem::path(dir) / "report.csv").string();
    cli::write_text_file(output, csv);
    nlohmann::json j;
    j["status"] = "ok";
    j["output"] = output;
    std::cout << j.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NSGA-PINN: multi-objective evolutionary training for "
                 "physics-informed neural networks"};
    app.require_subcommand(1);

    RunArgs args;

    auto add_config_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", args.config_path, "JSON experiment config")
            ->required();
        cmd->add_option("--set", args.sets,
                        "override a config key, e.g. --set problem.seed=3");
        cmd->add_option("--seed", args.seed, "override master_seed")
            ->each([&](const std::string&) { args.seed_given = true; });
        cmd->add_option("--mode", args.mode,
                        "override mode: nsga_pinn, adam_only or nsga_only");
    };

    auto* run = app.add_subcommand("run", "execute an experiment");
    add_config_flags(run);
    run->add_option("--out", args.out_dir, "output directory (default: out)");

    auto* validate =
        app.add_subcommand("validate-config", "resolve and check a config");
    add_config_flags(validate);

    auto* oracle =
        app.add_subcommand("oracle", "reference oracles for cross-checks");
    oracle->require_subcommand(1);
    std::string oracle_input, oracle_params;
    auto* oracle_sort = oracle->add_subcommand(
        "sort", "brute-force non-dominated sort of objective vectors");
    oracle_sort->add_option("--input", oracle_input, "JSON {\"objectives\": [[...]]}")
        ->required();
    auto* oracle_loss = oracle->add_subcommand(
        "loss", "finite-difference loss components for given parameters");
    oracle_loss->add_option("--config", args.config_path, "JSON experiment config")
        ->required();
    oracle_loss->add_option("--params", oracle_params, "JSON array of parameters")
        ->required();

    auto* report = app.add_subcommand(
        "report", "aggregate per-generation survival rates over repetitions");
    std::string report_dir, report_output;
    report->add_option("--dir", report_dir, "experiment output directory")
        ->required();
    report->add_option("--output", report_output,
                       "report path (default: <dir>/report.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error(e.what(), kExitUsage);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(run)) return run_command(args);
        if (app.got_subcommand(validate)) return validate_command(args);
        if (app.got_subcommand(report)) return report_command(report_dir, report_output);
        if (oracle->got_subcommand(oracle_sort))
            return oracle_sort_command(oracle_input);
        if (oracle->got_subcommand(oracle_loss))
            return oracle_loss_command(args.config_path, oracle_params);
        emit_error("no subcommand selected", kExitUsage);
        return kExitUsage;
    } catch (const cli::IoError& e) {
        const int code = e.missing ? kExitMissing : 1;
        emit_error(e.what(), code);
        return code;
    } catch (const nsgapinn::ConfigError& e) {
        emit_error(e.what(), kExitConfig);
        return kExitConfig;
    } catch (const std::exception& e) {
        emit_error(e.what(), 1);
        return 1;
    }
}

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "nsgapinn/trainer.hpp"

namespace nsgapinn::cli {

enum class ExperimentKind {
    pendulum,
    pendulum_noisy,
    burgers,
    burgers_noisy,
    survival_rate,  // pendulum repeated many times for selection telemetry
};

ExperimentKind experiment_from_string(const std::string& s);
std::string to_string(ExperimentKind kind);

/// The complete configuration tree for an experiment with every key
/// present; user configs and --set overrides may only touch keys that
/// exist here.
nlohmann::json default_config(ExperimentKind kind);

/// Defaults overlaid with the user config. Unknown keys are rejected with
/// the offending dotted path; the result is a full, self-contained config.
nlohmann::json resolve_config_json(const nlohmann::json& user);

/// Applies one "dotted.path=value" assignment onto a resolved config; the
/// path must already exist. The value is parsed as JSON when possible and
/// taken as a string otherwise.
void apply_override(nlohmann::json& resolved, const std::string& assignment);

struct ResolvedExperiment {
    ExperimentKind kind = ExperimentKind::pendulum;
    int repetitions = 1;
    nlohmann::json manifest;  // the resolved config; rewriting it re-runs identically
    trainer::RunConfig base;  // master_seed is the base; repetition r adds r
};

/// Type-checks a resolved config and builds the problem instance.
ResolvedExperiment build_experiment(const nlohmann::json& resolved);

/// Reads and parses a JSON file (missing file and parse errors are
/// distinguished for exit codes).
nlohmann::json load_json_file(const std::filesystem::path& path);

/// Executes all repetitions and writes manifest.json plus per-repetition
/// rep_NNN/{generations.csv, final_losses.json, prediction.csv,
/// population.json} under out_dir.
void run_experiment(const ResolvedExperiment& exp,
                    const std::filesystem::path& out_dir);

/// Per-generation mean survival rate over every rep_NNN/generations.csv
/// under out_dir; columns gen,mean_survival_rate.
std::string survival_report_csv(const std::filesystem::path& out_dir);

/// The ensemble prediction table for one finished repetition (written by
/// run_experiment as prediction.csv). Exposed for tests.
std::string prediction_csv(const ResolvedExperiment& exp,
                           const trainer::RunConfig& cfg,
                           std::span<const nsga::Individual> population);

}  // namespace nsgapinn::cli

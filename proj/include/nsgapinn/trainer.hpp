#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nsgapinn/mlp.hpp"
#include "nsgapinn/nsga.hpp"
#include "nsgapinn/problem.hpp"

namespace nsgapinn::trainer {

enum class Mode { nsga_pinn, adam_only, nsga_only };

/// Whether the whole mating pool is Adam-refined each generation or only
/// the single lowest-total-loss member.
enum class Refine { pool, best_only };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode mode);
Refine refine_from_string(const std::string& s);
std::string to_string(Refine refine);

struct RunConfig {
    int population_size = 20;  // N, even, >= 2
    int max_generations = 20;  // generation cap
    int inner_adam_steps = 10;
    double lr = 1e-3;
    std::uint64_t master_seed = 0;
    problems::Problem problem;
    std::vector<int> hidden = {32, 32};
    Mode mode = Mode::nsga_pinn;
    Refine refine = Refine::pool;
    double sigma_perturb = 0.01;     // nsga_only variation operator
    double duplicate_jitter = 1e-3;  // applied to repeated mating-pool copies

    /// Throws ConfigError naming the offending field.
    void validate() const;
    ad::MlpConfig network() const;
};

struct GenerationRecord {
    int generation = 0;  // 1-based
    std::vector<double> min_objectives;
    std::vector<double> mean_objectives;
    double min_total = 0.0;
    double survival_rate = 0.0;          // offspring among survivors / N
    std::vector<std::size_t> front_sizes;  // of the merged parent+offspring set
    long adam_steps = 0;                 // gradient steps spent this generation
};

struct RunResult {
    nsga::Individual best;  // lowest total loss seen, ties by label
    std::vector<GenerationRecord> records;
    std::vector<nsga::Individual> population;
    long total_adam_steps = 0;
};

/// The main loop. nsga_pinn: per generation evaluate the parents, sort and
/// crowd, tournament-select a mating pool of N, Adam-refine each pool copy
/// into an offspring, merge with the parents and keep the best N.
/// adam_only: one network trained N * max_generations * inner_adam_steps
/// steps in max_generations equal chunks (matched gradient budget).
/// nsga_only: the same loop with zero Adam steps and Gaussian parameter
/// perturbation as the variation operator.
/// Evaluation failures carry the generation index and individual label.
RunResult run(const RunConfig& config);

/// Same loop started from an existing population (exactly N members with
/// unique labels for the nsga modes; adam_only trains population.front()).
RunResult run(const RunConfig& config, std::vector<nsga::Individual> population);

/// The starting population: Glorot-initialized networks with labels
/// 0..N-1, each from its own (master_seed, label) stream.
std::vector<nsga::Individual> initial_population(const RunConfig& config);

/// Fraction of survivors that are offspring of this generation.
double survival_rate(std::span<const std::uint64_t> parent_labels,
                     std::span<const std::uint64_t> survivor_labels,
                     std::span<const std::uint64_t> offspring_labels);

struct EnsemblePrediction {
    Eigen::MatrixXd mean;   // output_dim x n_points
    Eigen::MatrixXd lower;  // empirical 2.5 percentile, clamped to <= mean
    Eigen::MatrixXd upper;  // empirical 97.5 percentile, clamped to >= mean
};

/// Pointwise ensemble statistics of the population's forward outputs at
/// query_points (input_dim x n_points).
EnsemblePrediction ensemble_predict(const ad::MlpConfig& cfg,
                                    std::span<const nsga::Individual> population,
                                    const Eigen::MatrixXd& query_points);

/// Worker count: NSGA_PINN_THREADS when set and positive, otherwise the
/// hardware concurrency (at least 1). The value 0 also means auto.
int thread_budget();

namespace detail {
/// Runs fn(task, worker) for task in [0, n) on up to thread_budget()
/// workers with a deterministic contiguous partition. The lowest-index
/// exception wins when several tasks fail.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);
}  // namespace detail

}  // namespace nsgapinn::trainer

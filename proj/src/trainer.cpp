#include "nsgapinn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "nsgapinn/adam.hpp"

namespace nsgapinn::trainer {

namespace {

std::vector<double> extra_init_for(const problems::Problem& problem) {
    return std::visit(
        [](const auto& p) -> std::vector<double> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, problems::PendulumProblem>) {
                (void)p;
                return {0.5};  // starting guess for the unknown coefficient
            } else {
                return {};
            }
        },
        problem);
}

[[noreturn]] void rethrow_with_context(int generation, std::uint64_t label,
                                       const std::exception& e) {
    throw Error("generation " + std::to_string(generation) + " individual " +
                std::to_string(label) + ": " + e.what());
}

bool better_by_total(const nsga::Individual& a, const nsga::Individual& b) {
    const double ta = a.total();
    const double tb = b.total();
    if (ta != tb) return ta < tb;
    return a.label < b.label;
}

void add_gaussian(std::vector<double>& params, double sigma, std::mt19937_64& rng) {
    if (sigma <= 0.0) return;
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& p : params) p += noise(rng);
}

GenerationRecord summarize(int generation,
                           const std::vector<nsga::Individual>& population,
                           double srate, std::vector<std::size_t> front_sizes,
                           long adam_steps) {
    GenerationRecord rec;
    rec.generation = generation;
    rec.survival_rate = srate;
    rec.front_sizes = std::move(front_sizes);
    rec.adam_steps = adam_steps;
    const std::size_t m = population.front().objectives.size();
    rec.min_objectives.assign(m, std::numeric_limits<double>::infinity());
    rec.mean_objectives.assign(m, 0.0);
    rec.min_total = std::numeric_limits<double>::infinity();
    for (const auto& ind : population) {
        for (std::size_t i = 0; i < m; ++i) {
            rec.min_objectives[i] = std::min(rec.min_objectives[i], ind.objectives[i]);
            rec.mean_objectives[i] += ind.objectives[i];
        }
        rec.min_total = std::min(rec.min_total, ind.total());
    }
    for (double& v : rec.mean_objectives) v /= static_cast<double>(population.size());
    return rec;
}

std::vector<problems::Evaluator> make_worker_evaluators(const RunConfig& cfg,
                                                        std::size_t n_tasks) {
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(thread_budget()),
                              std::max<std::size_t>(n_tasks, 1));
    std::vector<problems::Evaluator> evals;
    evals.reserve(workers);
    const ad::MlpConfig net = cfg.network();
    for (std::size_t w = 0; w < workers; ++w)
        evals.push_back(problems::make_evaluator(cfg.problem, net));
    return evals;
}

void ensure_objectives(std::vector<nsga::Individual>& population,
                       std::vector<problems::Evaluator>& evals, int generation) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < population.size(); ++i)
        if (population[i].objectives.empty()) todo.push_back(i);
    detail::parallel_for(todo.size(), [&](std::size_t task, std::size_t w) {
        nsga::Individual& ind = population[todo[task]];
        try {
            const auto obj = evals[w].evaluate(ind.params).values();
            ind.objectives.assign(obj.begin(), obj.end());
        } catch (const std::exception& e) {
            rethrow_with_context(generation, ind.label, e);
        }
    });
}

RunResult run_evolution(const RunConfig& cfg, std::vector<nsga::Individual> population) {
    const std::size_t n = static_cast<std::size_t>(cfg.population_size);
    auto evals = make_worker_evaluators(cfg, n);
    std::uint64_t next_label = 0;
    for (const auto& ind : population) next_label = std::max(next_label, ind.label + 1);

    RunResult result;
    result.records.reserve(static_cast<std::size_t>(cfg.max_generations));

    for (int gen = 1; gen <= cfg.max_generations; ++gen) {
        ensure_objectives(population, evals, gen);
        const auto fronts = nsga::non_dominated_sort(population);
        nsga::assign_crowding(population, fronts);

        // mating pool
        std::vector<std::uint64_t> pool;
        if (cfg.refine == Refine::best_only) {
            pool.push_back(
                std::min_element(population.begin(), population.end(), better_by_total)
                    ->label);
        } else {
            auto rng = make_stream(cfg.master_seed, 0, static_cast<std::uint64_t>(gen),
                                   StreamKind::tournament);
            pool = nsga::tournament_select(population, n, rng);
        }

        std::unordered_map<std::uint64_t, const nsga::Individual*> by_label;
        for (const auto& ind : population) by_label.emplace(ind.label, &ind);

        // stage the offspring sequentially so every stochastic draw comes
        // from a stream keyed by (master_seed, child label, generation)
        std::vector<nsga::Individual> offspring(pool.size());
        std::unordered_set<std::uint64_t> seen;
        for (std::size_t j = 0; j < pool.size(); ++j) {
            nsga::Individual child;
            child.label = next_label++;
            child.params = by_label.at(pool[j])->params;
            if (cfg.mode == Mode::nsga_only) {
                auto rng = make_stream(cfg.master_seed, child.label,
                                       static_cast<std::uint64_t>(gen),
                                       StreamKind::perturb);
                add_gaussian(child.params, cfg.sigma_perturb, rng);
            } else if (!seen.insert(pool[j]).second) {
                // repeated pool picks start from identical parameters and
                // full-batch refinement is deterministic, so nudge the
                // copies apart before refining
                auto rng = make_stream(cfg.master_seed, child.label,
                                       static_cast<std::uint64_t>(gen),
                                       StreamKind::jitter);
                add_gaussian(child.params, cfg.duplicate_jitter, rng);
            }
            offspring[j] = std::move(child);
        }

        const int inner = cfg.mode == Mode::nsga_only ? 0 : cfg.inner_adam_steps;
        detail::parallel_for(offspring.size(), [&](std::size_t j, std::size_t w) {
            nsga::Individual& child = offspring[j];
            try {
                if (inner > 0) {
                    auto refined = optim::train(evals[w], child.params, inner, cfg.lr);
                    child.params = std::move(refined.params);
                }
                const auto obj = evals[w].evaluate(child.params).values();
                child.objectives.assign(obj.begin(), obj.end());
            } catch (const std::exception& e) {
                rethrow_with_context(gen, child.label, e);
            }
        });
        const long gen_steps = static_cast<long>(offspring.size()) * inner;
        result.total_adam_steps += gen_steps;

        // merge, record front structure, pick survivors
        std::vector<nsga::Individual> merged = population;
        merged.insert(merged.end(), offspring.begin(), offspring.end());
        std::vector<std::size_t> front_sizes;
        {
            auto merged_copy = merged;
            for (const auto& f : nsga::non_dominated_sort(merged_copy).fronts)
                front_sizes.push_back(f.size());
        }
        std::vector<nsga::Individual> survivors =
            merged.size() == 2 * n ? nsga::environmental_select(merged, n)
                                   : nsga::truncate_population(merged, n);

        // crowding truncation may drop the lowest-total member of an
        // overfull front; swap it back so the population minimum never rises
        const nsga::Individual& best_merged =
            *std::min_element(merged.begin(), merged.end(), better_by_total);
        const bool kept = std::any_of(
            survivors.begin(), survivors.end(),
            [&](const nsga::Individual& s) { return s.label == best_merged.label; });
        if (!kept) {
            auto worst = std::max_element(
                survivors.begin(), survivors.end(),
                [](const nsga::Individual& a, const nsga::Individual& b) {
                    const double ta = a.total();
                    const double tb = b.total();
                    if (ta != tb) return ta < tb;
                    return a.label < b.label;
                });
            *worst = best_merged;
        }

        std::vector<std::uint64_t> parent_labels, survivor_labels, offspring_labels;
        for (const auto& ind : population) parent_labels.push_back(ind.label);
        for (const auto& ind : survivors) survivor_labels.push_back(ind.label);
        for (const auto& ind : offspring) offspring_labels.push_back(ind.label);
        const double srate =
            survival_rate(parent_labels, survivor_labels, offspring_labels);

        population = std::move(survivors);
        result.records.push_back(
            summarize(gen, population, srate, std::move(front_sizes), gen_steps));
    }

    result.best =
        *std::min_element(population.begin(), population.end(), better_by_total);
    result.population = std::move(population);
    return result;
}

RunResult run_adam_only(const RunConfig& cfg, std::vector<nsga::Individual> seed_pop) {
    const ad::MlpConfig net = cfg.network();
    nsga::Individual current;
    if (seed_pop.empty()) {
        auto rng = make_stream(cfg.master_seed, 0, 0, StreamKind::init);
        const auto extras = extra_init_for(cfg.problem);
        current.params = ad::xavier_init(net, rng, extras);
    } else {
        current = std::move(seed_pop.front());
        current.objectives.clear();
    }
    current.label = 0;

    auto evaluator = problems::make_evaluator(cfg.problem, net);
    const long chunk =
        static_cast<long>(cfg.population_size) * cfg.inner_adam_steps;

    RunResult result;
    for (int gen = 1; gen <= cfg.max_generations; ++gen) {
        try {
            auto out = optim::train(evaluator, current.params,
                                    static_cast<int>(chunk), cfg.lr);
            current.params = std::move(out.params);
            const auto obj = evaluator.evaluate(current.params).values();
            current.objectives.assign(obj.begin(), obj.end());
        } catch (const std::exception& e) {
            rethrow_with_context(gen, current.label, e);
        }
        result.total_adam_steps += chunk;
        const std::vector<nsga::Individual> snapshot{current};
        result.records.push_back(summarize(gen, snapshot, 0.0, {1}, chunk));
    }
    // plain training has no retention mechanism: the result is the final
    // network, not the lowest checkpoint seen along the way
    result.best = current;
    result.population = {std::move(current)};
    return result;
}

}  // namespace

Mode mode_from_string(const std::string& s) {
    if (s == "nsga_pinn") return Mode::nsga_pinn;
    if (s == "adam_only") return Mode::adam_only;
    if (s == "nsga_only") return Mode::nsga_only;
    throw ConfigError("mode", "unknown mode '" + s +
                                  "' (expected nsga_pinn, adam_only or nsga_only)");
}

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::nsga_pinn: return "nsga_pinn";
        case Mode::adam_only: return "adam_only";
        case Mode::nsga_only: return "nsga_only";
    }
    throw Error("to_string: invalid mode value");
}

Refine refine_from_string(const std::string& s) {
    if (s == "pool") return Refine::pool;
    if (s == "best_only") return Refine::best_only;
    throw ConfigError("refine", "unknown refinement '" + s +
                                    "' (expected pool or best_only)");
}

std::string to_string(Refine refine) {
    switch (refine) {
        case Refine::pool: return "pool";
        case Refine::best_only: return "best_only";
    }
    throw Error("to_string: invalid refine value");
}

void RunConfig::validate() const {
    if (population_size < 2 || population_size % 2 != 0)
        throw ConfigError("population_size", "must be an even integer >= 2");
    if (max_generations < 1)
        throw ConfigError("max_generations", "must be a positive integer");
    if (inner_adam_steps < 1)
        throw ConfigError("inner_adam_steps", "must be a positive integer");
    if (!(lr > 0.0)) throw ConfigError("lr", "must be positive");
    if (!(sigma_perturb >= 0.0))
        throw ConfigError("sigma_perturb", "must be non-negative");
    if (!(duplicate_jitter >= 0.0))
        throw ConfigError("duplicate_jitter", "must be non-negative");
    for (int h : hidden)
        if (h < 1)
            throw ConfigError("network.hidden_layers", "widths must be positive");
}

ad::MlpConfig RunConfig::network() const {
    return std::visit([&](const auto& p) { return p.network(hidden); }, problem);
}

std::vector<nsga::Individual> initial_population(const RunConfig& config) {
    config.validate();
    const ad::MlpConfig net = config.network();
    const auto extras = extra_init_for(config.problem);
    std::vector<nsga::Individual> population;
    population.reserve(static_cast<std::size_t>(config.population_size));
    for (int i = 0; i < config.population_size; ++i) {
        nsga::Individual ind;
        ind.label = static_cast<std::uint64_t>(i);
        auto rng = make_stream(config.master_seed, ind.label, 0, StreamKind::init);
        ind.params = ad::xavier_init(net, rng, extras);
        population.push_back(std::move(ind));
    }
    return population;
}

RunResult run(const RunConfig& config) {
    config.validate();
    if (config.mode == Mode::adam_only) return run_adam_only(config, {});
    return run_evolution(config, initial_population(config));
}

RunResult run(const RunConfig& config, std::vector<nsga::Individual> population) {
    config.validate();
    if (population.empty()) throw Error("run: starting population is empty");
    const std::size_t want = config.network().parameter_count();
    std::unordered_set<std::uint64_t> labels;
    for (const auto& ind : population) {
        if (ind.params.size() != want)
            throw DimensionError("run: parameter length", static_cast<long>(want),
                                 static_cast<long>(ind.params.size()));
        if (!labels.insert(ind.label).second)
            throw Error("run: duplicate label " + std::to_string(ind.label) +
                        " in starting population");
    }
    if (config.mode == Mode::adam_only)
        return run_adam_only(config, std::move(population));
    if (population.size() != static_cast<std::size_t>(config.population_size))
        throw DimensionError("run: population size", config.population_size,
                             static_cast<long>(population.size()));
    return run_evolution(config, std::move(population));
}

double survival_rate(std::span<const std::uint64_t> parent_labels,
                     std::span<const std::uint64_t> survivor_labels,
                     std::span<const std::uint64_t> offspring_labels) {
    if (survivor_labels.empty())
        throw Error("survival_rate: empty survivor set");
    const std::unordered_set<std::uint64_t> parents(parent_labels.begin(),
                                                    parent_labels.end());
    const std::unordered_set<std::uint64_t> offspring(offspring_labels.begin(),
                                                      offspring_labels.end());
    std::size_t from_offspring = 0;
    for (std::uint64_t s : survivor_labels) {
        const bool is_offspring = offspring.count(s) > 0;
        if (!is_offspring && parents.count(s) == 0)
            throw Error("survival_rate: survivor label " + std::to_string(s) +
                        " is neither a parent nor an offspring");
        if (is_offspring) ++from_offspring;
    }
    return static_cast<double>(from_offspring) /
           static_cast<double>(survivor_labels.size());
}

namespace {
double sorted_quantile(const std::vector<double>& v, double p) {
    const double h = static_cast<double>(v.size() - 1) * p;
    const auto i = static_cast<std::size_t>(h);
    if (i + 1 >= v.size()) return v.back();
    const double frac = h - static_cast<double>(i);
    return v[i] + frac * (v[i + 1] - v[i]);
}
}  // namespace

EnsemblePrediction ensemble_predict(const ad::MlpConfig& cfg,
                                    std::span<const nsga::Individual> population,
                                    const Eigen::MatrixXd& query_points) {
    if (population.empty()) throw Error("ensemble_predict: population is empty");
    if (query_points.rows() != cfg.input_dim)
        throw DimensionError("ensemble_predict: query row count", cfg.input_dim,
                             query_points.rows());
    const std::size_t k = population.size();
    const Eigen::Index n_pts = query_points.cols();
    const int od = cfg.output_dim;
    const std::size_t want = cfg.parameter_count();
    for (const auto& ind : population)
        if (ind.params.size() != want)
            throw DimensionError("ensemble_predict: parameter length",
                                 static_cast<long>(want),
                                 static_cast<long>(ind.params.size()));

    std::vector<Eigen::MatrixXd> outputs(k, Eigen::MatrixXd(od, n_pts));
    std::vector<double> x(static_cast<std::size_t>(cfg.input_dim));
    for (std::size_t m = 0; m < k; ++m) {
        for (Eigen::Index j = 0; j < n_pts; ++j) {
            for (int d = 0; d < cfg.input_dim; ++d) x[static_cast<std::size_t>(d)] = query_points(d, j);
            const auto y = ad::forward(cfg, population[m].params, x);
            for (int d = 0; d < od; ++d) outputs[m](d, j) = y[static_cast<std::size_t>(d)];
        }
    }

    EnsemblePrediction pred;
    pred.mean = Eigen::MatrixXd::Zero(od, n_pts);
    for (const auto& out : outputs) pred.mean += out;
    pred.mean /= static_cast<double>(k);
    pred.lower.resize(od, n_pts);
    pred.upper.resize(od, n_pts);
    std::vector<double> vals(k);
    for (int d = 0; d < od; ++d) {
        for (Eigen::Index j = 0; j < n_pts; ++j) {
            for (std::size_t m = 0; m < k; ++m) vals[m] = outputs[m](d, j);
            std::sort(vals.begin(), vals.end());
            // small skewed samples can put the mean outside the percentile
            // band; the contract is lower <= mean <= upper
            pred.lower(d, j) = std::min(sorted_quantile(vals, 0.025), pred.mean(d, j));
            pred.upper(d, j) = std::max(sorted_quantile(vals, 0.975), pred.mean(d, j));
        }
    }
    return pred;
}

int thread_budget() {
    if (const char* env = std::getenv("NSGA_PINN_THREADS"); env && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 0)
            throw ConfigError("NSGA_PINN_THREADS",
                              "must be a non-negative integer");
        if (v > 0) return static_cast<int>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace detail {

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t workers =
        std::min(static_cast<std::size_t>(thread_budget()), n);
    std::vector<std::exception_ptr> errors(n);
    auto run_chunk = [&](std::size_t w) {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        for (std::size_t i = begin; i < end; ++i) {
            try {
                fn(i, w);
            } catch (...) {
                errors[i] = std::current_exception();
                return;
            }
        }
    };
    if (workers == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(run_chunk, w);
        run_chunk(0);
        for (auto& t : threads) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

}  // namespace nsgapinn::trainer

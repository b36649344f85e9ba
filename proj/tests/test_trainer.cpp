#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <random>
#include <vector>

#include "nsgapinn/adam.hpp"
#include "nsgapinn/trainer.hpp"

namespace tr = nsgapinn::trainer;
namespace pr = nsgapinn::problems;
namespace ad = nsgapinn::ad;
namespace ns = nsgapinn::nsga;
using nsgapinn::ConfigError;
using nsgapinn::StreamKind;

namespace {

tr::RunConfig tiny_pendulum_config() {
    pr::PendulumOptions opt;
    opt.n_collocation = 30;
    opt.n_ics = 10;
    opt.seed = 11;
    tr::RunConfig cfg;
    cfg.population_size = 4;
    cfg.max_generations = 3;
    cfg.inner_adam_steps = 5;
    cfg.lr = 2e-3;
    cfg.master_seed = 42;
    cfg.problem = pr::make_pendulum(opt);
    cfg.hidden = {8};
    return cfg;
}

bool same_records(const std::vector<tr::GenerationRecord>& a,
                  const std::vector<tr::GenerationRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].generation != b[i].generation) return false;
        if (a[i].min_objectives != b[i].min_objectives) return false;
        if (a[i].mean_objectives != b[i].mean_objectives) return false;
        if (a[i].min_total != b[i].min_total) return false;
        if (a[i].survival_rate != b[i].survival_rate) return false;
        if (a[i].front_sizes != b[i].front_sizes) return false;
        if (a[i].adam_steps != b[i].adam_steps) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("RunConfig::validate names the offending field") {
    auto cfg = tiny_pendulum_config();
    cfg.population_size = 3;
    CHECK_THROWS_WITH_AS(cfg.validate(),
                         doctest::Contains("population_size"), ConfigError);
    cfg = tiny_pendulum_config();
    cfg.max_generations = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(),
                         doctest::Contains("max_generations"), ConfigError);
    cfg = tiny_pendulum_config();
    cfg.inner_adam_steps = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(),
                         doctest::Contains("inner_adam_steps"), ConfigError);
    cfg = tiny_pendulum_config();
    cfg.lr = 0.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("lr"), ConfigError);
    cfg = tiny_pendulum_config();
    cfg.sigma_perturb = -1.0;
    CHECK_THROWS_WITH_AS(cfg.validate(),
                         doctest::Contains("sigma_perturb"), ConfigError);
    cfg = tiny_pendulum_config();
    cfg.hidden = {8, 0};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("mode and refine names round-trip") {
    for (auto m : {tr::Mode::nsga_pinn, tr::Mode::adam_only, tr::Mode::nsga_only})
        CHECK(tr::mode_from_string(tr::to_string(m)) == m);
    for (auto r : {tr::Refine::pool, tr::Refine::best_only})
        CHECK(tr::refine_from_string(tr::to_string(r)) == r);
    CHECK_THROWS_AS(tr::mode_from_string("sgd"), ConfigError);
    CHECK_THROWS_AS(tr::refine_from_string("all"), ConfigError);
}

TEST_CASE("initial_population: labels, shapes, coefficient seed, determinism") {
    auto cfg = tiny_pendulum_config();
    const auto pop = tr::initial_population(cfg);
    REQUIRE(pop.size() == 4);
    const auto net = cfg.network();
    for (std::size_t i = 0; i < pop.size(); ++i) {
        CHECK(pop[i].label == i);
        CHECK(pop[i].params.size() == net.parameter_count());
        CHECK(pop[i].objectives.empty());
        // the trainable coefficient starts at 0.5 for the pendulum
        CHECK(pop[i].params[net.extra_offset(0)] == 0.5);
    }
    CHECK(pop[0].params != pop[1].params);  // per-label streams differ
    const auto again = tr::initial_population(cfg);
    for (std::size_t i = 0; i < pop.size(); ++i)
        CHECK(pop[i].params == again[i].params);
}

TEST_CASE("survival_rate arithmetic and label tracing") {
    const std::vector<std::uint64_t> parents{0, 1, 2, 3};
    const std::vector<std::uint64_t> offspring{4, 5, 6, 7};
    CHECK(tr::survival_rate(parents, std::vector<std::uint64_t>{0, 1, 2, 3},
                            offspring) == 0.0);
    CHECK(tr::survival_rate(parents, std::vector<std::uint64_t>{4, 5, 6, 7},
                            offspring) == 1.0);
    CHECK(tr::survival_rate(parents, std::vector<std::uint64_t>{0, 1, 4, 5},
                            offspring) == 0.5);
    CHECK_THROWS_AS(tr::survival_rate(parents, std::vector<std::uint64_t>{0, 99},
                                      offspring),
                    nsgapinn::Error);
    CHECK_THROWS_AS(tr::survival_rate(parents, std::vector<std::uint64_t>{},
                                      offspring),
                    nsgapinn::Error);
}

TEST_CASE("run(nsga_pinn): telemetry, budget, elitism, determinism") {
    const auto cfg = tiny_pendulum_config();
    const auto res = tr::run(cfg);

    REQUIRE(res.records.size() == 3);
    CHECK(res.population.size() == 4);
    CHECK(res.total_adam_steps == 3 * 4 * 5);

    double prev_min = std::numeric_limits<double>::infinity();
    for (const auto& rec : res.records) {
        CHECK(rec.min_objectives.size() == 3);
        CHECK(rec.mean_objectives.size() == 3);
        for (std::size_t m = 0; m < 3; ++m) {
            CHECK(rec.min_objectives[m] <= rec.mean_objectives[m]);
            CHECK(rec.min_objectives[m] >= 0.0);
        }
        CHECK(rec.survival_rate >= 0.0);
        CHECK(rec.survival_rate <= 1.0);
        CHECK(rec.adam_steps == 4 * 5);
        std::size_t merged = 0;
        for (auto s : rec.front_sizes) merged += s;
        CHECK(merged == 8);  // parents plus offspring
        CHECK(rec.min_total <= prev_min);  // elitism
        prev_min = rec.min_total;
    }

    // the reported best is the final population's minimum-total member
    double best_total = std::numeric_limits<double>::infinity();
    for (const auto& ind : res.population)
        best_total = std::min(best_total, ind.total());
    CHECK(res.best.total() == best_total);
    CHECK(res.best.total() == res.records.back().min_total);

    const auto res2 = tr::run(cfg);
    CHECK(same_records(res.records, res2.records));
    CHECK(res.best.params == res2.best.params);
}

TEST_CASE("run(nsga_pinn): training makes progress on the tiny problem") {
    auto cfg = tiny_pendulum_config();
    cfg.max_generations = 6;
    const auto res = tr::run(cfg);
    CHECK(res.records.back().min_total < res.records.front().min_total);
}

TEST_CASE("run(adam_only): matched budget equals plain training") {
    auto cfg = tiny_pendulum_config();
    cfg.population_size = 2;
    cfg.max_generations = 2;
    cfg.inner_adam_steps = 3;
    cfg.mode = tr::Mode::adam_only;
    const auto res = tr::run(cfg);
    CHECK(res.total_adam_steps == 2 * 2 * 3);
    REQUIRE(res.records.size() == 2);
    for (const auto& rec : res.records) {
        CHECK(rec.survival_rate == 0.0);
        CHECK(rec.front_sizes == std::vector<std::size_t>{1});
        CHECK(rec.adam_steps == 6);
        CHECK(rec.min_objectives == rec.mean_objectives);
    }
    REQUIRE(res.population.size() == 1);

    // replay by hand: same init stream, same chunked full-batch steps
    const auto net = cfg.network();
    auto rng = nsgapinn::make_stream(cfg.master_seed, 0, 0, StreamKind::init);
    const std::vector<double> extras{0.5};
    auto params = ad::xavier_init(net, rng, extras);
    auto evaluator = pr::make_evaluator(cfg.problem, net);
    auto r1 = nsgapinn::optim::train(evaluator, params, 6, cfg.lr);
    auto r2 = nsgapinn::optim::train(evaluator, r1.params, 6, cfg.lr);
    CHECK(res.population[0].params == r2.params);
    // plain training reports the final network, not a best-seen checkpoint
    CHECK(res.best.params == r2.params);
    CHECK(res.best.total() == res.records.back().min_total);
}

TEST_CASE("run(nsga_only): zero gradient budget, perturbation drives variation") {
    auto cfg = tiny_pendulum_config();
    cfg.mode = tr::Mode::nsga_only;
    cfg.sigma_perturb = 0.05;
    const auto res = tr::run(cfg);
    CHECK(res.total_adam_steps == 0);
    for (const auto& rec : res.records) CHECK(rec.adam_steps == 0);
    // elitism still holds
    for (std::size_t i = 1; i < res.records.size(); ++i)
        CHECK(res.records[i].min_total <= res.records[i - 1].min_total);
}

TEST_CASE("run(best_only): one offspring per generation") {
    auto cfg = tiny_pendulum_config();
    cfg.refine = tr::Refine::best_only;
    const auto res = tr::run(cfg);
    CHECK(res.total_adam_steps == 3 * 5);
    for (const auto& rec : res.records) {
        CHECK(rec.adam_steps == 5);
        std::size_t merged = 0;
        for (auto s : rec.front_sizes) merged += s;
        CHECK(merged == 5);  // N parents + 1 offspring
        CHECK(rec.survival_rate <= 0.25 + 1e-15);  // at most 1 of N=4
    }
    CHECK(res.population.size() == 4);
}

TEST_CASE("run with clone parents: survival rate is quantized") {
    auto cfg = tiny_pendulum_config();
    cfg.population_size = 2;
    cfg.max_generations = 1;
    auto pop = tr::initial_population(cfg);
    pop[1].params = pop[0].params;  // identical clones
    const auto res = tr::run(cfg, std::move(pop));
    const double s = res.records.front().survival_rate;
    CHECK((s == 0.0 || s == 0.5 || s == 1.0));
}

TEST_CASE("run: evaluation failure carries generation and label") {
    auto cfg = tiny_pendulum_config();
    cfg.population_size = 2;
    cfg.max_generations = 1;
    auto pop = tr::initial_population(cfg);
    pop[0].label = 3;
    pop[1].label = 7;
    const auto net = cfg.network();
    // a huge coefficient overflows the residual loss for individual 7
    pop[1].params[net.extra_offset(0)] = 1e200;
    CHECK_THROWS_WITH_AS(tr::run(cfg, std::move(pop)),
                         doctest::Contains("generation 1 individual 7"),
                         nsgapinn::Error);
}

TEST_CASE("run: injected population contracts") {
    auto cfg = tiny_pendulum_config();
    auto pop = tr::initial_population(cfg);
    pop.pop_back();
    CHECK_THROWS_AS(tr::run(cfg, std::move(pop)), nsgapinn::DimensionError);
    auto pop2 = tr::initial_population(cfg);
    pop2[1].label = pop2[0].label;
    CHECK_THROWS_AS(tr::run(cfg, std::move(pop2)), nsgapinn::Error);
    auto pop3 = tr::initial_population(cfg);
    pop3[2].params.pop_back();
    CHECK_THROWS_AS(tr::run(cfg, std::move(pop3)), nsgapinn::DimensionError);
}

TEST_CASE("ensemble_predict: identical members give zero-width bands") {
    ad::MlpConfig net{3, 2, {6}, 1};
    std::mt19937_64 rng(5);
    const auto params = ad::xavier_init(net, rng, std::vector<double>{0.5});
    std::vector<ns::Individual> pop(3);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pop[i].label = i;
        pop[i].params = params;
    }
    Eigen::MatrixXd queries(3, 4);
    queries << 0.1, 0.2, 0.3, 0.4, 1.0, 1.1, 1.2, 1.3, 0.0, 0.3, 0.6, 0.9;
    const auto pred = tr::ensemble_predict(net, pop, queries);
    const auto single = ad::forward(net, params, std::vector<double>{0.1, 1.0, 0.0});
    // mean of three identical values can differ from them by one ulp
    CHECK(pred.mean(0, 0) == doctest::Approx(single[0]).epsilon(1e-14));
    CHECK(pred.mean(1, 0) == doctest::Approx(single[1]).epsilon(1e-14));
    CHECK((pred.upper - pred.lower).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((pred.mean - pred.lower).minCoeff() >= 0.0);
    CHECK((pred.upper - pred.mean).minCoeff() >= 0.0);
}

TEST_CASE("ensemble_predict: two members average") {
    ad::MlpConfig net{1, 1, {}, 0};  // y = w x + b
    std::vector<ns::Individual> pop(2);
    pop[0].label = 0;
    pop[0].params = {0.0, 1.0};  // constant 1
    pop[1].label = 1;
    pop[1].params = {0.0, 3.0};  // constant 3
    Eigen::MatrixXd queries(1, 1);
    queries << 0.0;
    const auto pred = tr::ensemble_predict(net, pop, queries);
    CHECK(pred.mean(0, 0) == 2.0);
    CHECK(pred.lower(0, 0) >= 1.0);
    CHECK(pred.upper(0, 0) <= 3.0);
    CHECK(pred.lower(0, 0) <= pred.mean(0, 0));
    CHECK(pred.upper(0, 0) >= pred.mean(0, 0));
}

TEST_CASE("ensemble_predict: bands match the normal quantiles") {
    // constant networks y = b with b ~ N(0,1): the 95% band of the member
    // outputs must straddle +-1.96
    ad::MlpConfig net{1, 1, {}, 0};
    std::mt19937_64 rng(99);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<ns::Individual> pop(1000);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pop[i].label = i;
        pop[i].params = {0.0, normal(rng)};
    }
    Eigen::MatrixXd queries(1, 1);
    queries << 0.0;
    const auto pred = tr::ensemble_predict(net, pop, queries);
    CHECK(pred.lower(0, 0) == doctest::Approx(-1.96).epsilon(0.06));
    CHECK(pred.upper(0, 0) == doctest::Approx(1.96).epsilon(0.06));
    CHECK(std::abs(pred.mean(0, 0)) < 0.1);
}

TEST_CASE("ensemble_predict: input contracts") {
    ad::MlpConfig net{2, 1, {4}, 0};
    std::vector<ns::Individual> pop;
    Eigen::MatrixXd q(2, 1);
    q << 0.0, 0.0;
    CHECK_THROWS_AS(tr::ensemble_predict(net, pop, q), nsgapinn::Error);
    std::mt19937_64 rng(1);
    ns::Individual ind;
    ind.params = ad::xavier_init(net, rng);
    pop.push_back(ind);
    Eigen::MatrixXd bad(3, 1);
    bad << 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(tr::ensemble_predict(net, pop, bad), nsgapinn::DimensionError);
}

TEST_CASE("thread budget: environment override and worker invariance") {
    const char* saved = std::getenv("NSGA_PINN_THREADS");
    const std::string saved_value = saved ? saved : "";

    setenv("NSGA_PINN_THREADS", "3", 1);
    CHECK(tr::thread_budget() == 3);
    setenv("NSGA_PINN_THREADS", "0", 1);
    CHECK(tr::thread_budget() >= 1);
    setenv("NSGA_PINN_THREADS", "abc", 1);
    CHECK_THROWS_AS(tr::thread_budget(), ConfigError);

    // the result must not depend on the worker count
    const auto cfg = tiny_pendulum_config();
    setenv("NSGA_PINN_THREADS", "1", 1);
    const auto serial = tr::run(cfg);
    setenv("NSGA_PINN_THREADS", "2", 1);
    const auto threaded = tr::run(cfg);
    CHECK(same_records(serial.records, threaded.records));
    CHECK(serial.best.params == threaded.best.params);

    if (saved)
        setenv("NSGA_PINN_THREADS", saved_value.c_str(), 1);
    else
        unsetenv("NSGA_PINN_THREADS");
}

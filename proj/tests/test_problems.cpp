#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "nsgapinn/problem.hpp"
#include "nsgapinn/reference.hpp"

namespace ad = nsgapinn::ad;
namespace pr = nsgapinn::problems;
using nsgapinn::ConfigError;
using nsgapinn::NonFiniteError;

namespace {

double rel_err(double a, double b, double floor_ = 1e-8) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor_});
}

pr::PendulumProblem small_pendulum(std::uint64_t seed = 3,
                                   double noise_sigma = 0.0) {
    pr::PendulumOptions opt;
    opt.n_collocation = 40;
    opt.n_ics = 15;
    opt.seed = seed;
    if (noise_sigma > 0.0) opt.noise = pr::GaussianNoise{0.0, noise_sigma, 99};
    return pr::make_pendulum(opt);
}

pr::BurgersProblem small_burgers(std::uint64_t seed = 4, double noise_sigma = 0.0) {
    pr::BurgersOptions opt;
    opt.n_collocation = 40;
    opt.n_boundary = 12;
    opt.seed = seed;
    if (noise_sigma > 0.0) opt.noise = pr::GaussianNoise{0.0, noise_sigma, 98};
    return pr::make_burgers(opt);
}

}  // namespace

TEST_CASE("pendulum_reference: equilibrium stays at the fixed point") {
    std::vector<double> times = {0.0, 0.25, 0.5, 1.0};
    const auto traj = pr::pendulum_reference(0.0, 0.0, 1.0, times);
    CHECK(traj.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pendulum_reference: small angle matches the linearized solution") {
    std::vector<double> times(101);
    for (int i = 0; i <= 100; ++i) times[static_cast<std::size_t>(i)] = i * 0.01;
    const auto traj = pr::pendulum_reference(0.01, 0.0, 1.0, times);
    double max_dev = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double want = 0.01 * std::cos(times[static_cast<std::size_t>(i)]);
        max_dev = std::max(max_dev, std::abs(traj(0, i) - want));
    }
    CHECK(max_dev < 1e-5);
}

TEST_CASE("pendulum_reference: energy conserved along the trajectory") {
    std::vector<double> times(101);
    for (int i = 0; i <= 100; ++i) times[static_cast<std::size_t>(i)] = i * 0.01;
    const double k = 1.0;
    const auto traj = pr::pendulum_reference(2.1, 0.8, k, times);
    const auto energy = [&](double th, double om) {
        return 0.5 * om * om + k * (1.0 - std::cos(th));
    };
    const double e0 = energy(2.1, 0.8);
    for (int i = 0; i <= 100; ++i)
        CHECK(std::abs(energy(traj(0, i), traj(1, i)) - e0) < 1e-8);
}

TEST_CASE("pendulum_reference: unsorted times rejected") {
    std::vector<double> bad = {0.5, 0.2};
    CHECK_THROWS_AS(pr::pendulum_reference(1.0, 0.0, 1.0, bad), nsgapinn::Error);
}

TEST_CASE("latin_hypercube: shape, bounds, one point per stratum") {
    std::mt19937_64 rng(17);
    const std::vector<std::pair<double, double>> box = {{-2.0, 2.0}, {0.0, 10.0}};
    const auto pts = pr::latin_hypercube(rng, 25, box);
    REQUIRE(pts.rows() == 2);
    REQUIRE(pts.cols() == 25);
    for (int d = 0; d < 2; ++d) {
        std::vector<int> seen(25, 0);
        for (int j = 0; j < 25; ++j) {
            const auto [lo, hi] = box[static_cast<std::size_t>(d)];
            CHECK(pts(d, j) >= lo);
            CHECK(pts(d, j) <= hi);
            const int stratum = std::min(
                24, static_cast<int>((pts(d, j) - lo) / (hi - lo) * 25.0));
            seen[static_cast<std::size_t>(stratum)] += 1;
        }
        for (int s = 0; s < 25; ++s) CHECK(seen[static_cast<std::size_t>(s)] == 1);
    }
}

TEST_CASE("latin_hypercube: seeded determinism") {
    const std::vector<std::pair<double, double>> box = {{0.0, 1.0}};
    std::mt19937_64 a(5), b(5), c(6);
    CHECK(pr::latin_hypercube(a, 10, box) == pr::latin_hypercube(b, 10, box));
    CHECK(pr::latin_hypercube(a, 10, box) != pr::latin_hypercube(c, 10, box));
}

TEST_CASE("apply_noise: zero sigma is the identity") {
    const std::vector<double> data = {1.0, -2.5, 3.25};
    const auto out = pr::apply_noise(data, pr::GaussianNoise{0.0, 0.0, 42});
    CHECK(out == data);
}

TEST_CASE("apply_noise: sample statistics at sigma 0.1") {
    std::vector<double> zeros(100000, 0.0);
    const auto out = pr::apply_noise(zeros, pr::GaussianNoise{0.0, 0.1, 7});
    double mean = 0.0;
    for (double x : out) mean += x;
    mean /= static_cast<double>(out.size());
    double var = 0.0;
    for (double x : out) var += (x - mean) * (x - mean);
    var /= static_cast<double>(out.size() - 1);
    CHECK(std::abs(mean) < 0.002);
    CHECK(std::sqrt(var) > 0.098);
    CHECK(std::sqrt(var) < 0.102);
}

TEST_CASE("apply_noise: fixed seed reproduces the identical vector") {
    std::vector<double> data(50, 1.0);
    const auto a = pr::apply_noise(data, pr::GaussianNoise{0.0, 0.2, 11});
    const auto b = pr::apply_noise(data, pr::GaussianNoise{0.0, 0.2, 11});
    const auto c = pr::apply_noise(data, pr::GaussianNoise{0.0, 0.2, 12});
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a.size() == data.size());
}

TEST_CASE("make_pendulum: sample sets deterministic in the problem seed") {
    const auto a = small_pendulum(3);
    const auto b = small_pendulum(3);
    const auto c = small_pendulum(4);
    CHECK(a.collocation == b.collocation);
    CHECK(a.ics == b.ics);
    CHECK(a.data_targets == b.data_targets);
    CHECK(a.data_theta0 == b.data_theta0);
    CHECK(a.collocation != c.collocation);
}

TEST_CASE("make_pendulum: mesh and box invariants") {
    const auto p = small_pendulum();
    REQUIRE(p.data_mesh.size() == 101);
    CHECK(p.data_mesh.front() == 0.0);
    CHECK(p.data_mesh.back() == doctest::Approx(1.0));
    for (std::size_t i = 0; i < p.data_mesh.size(); ++i)
        CHECK(p.data_mesh[i] == doctest::Approx(0.01 * static_cast<double>(i)));
    for (Eigen::Index j = 0; j < p.collocation.cols(); ++j) {
        CHECK(p.collocation(0, j) >= -M_PI);
        CHECK(p.collocation(0, j) <= M_PI);
        CHECK(p.collocation(1, j) >= 0.0);
        CHECK(p.collocation(1, j) <= M_PI);
        CHECK(p.collocation(2, j) >= 0.0);
        CHECK(p.collocation(2, j) <= 1.0);
    }
}

TEST_CASE("make_pendulum: noise perturbs exactly the data targets") {
    const auto clean = small_pendulum(3, 0.0);
    const auto noisy = small_pendulum(3, 0.1);
    CHECK(clean.collocation == noisy.collocation);
    CHECK(clean.ics == noisy.ics);
    CHECK(clean.data_targets != noisy.data_targets);
    const double max_shift =
        (clean.data_targets - noisy.data_targets).cwiseAbs().maxCoeff();
    CHECK(max_shift > 0.0);
    CHECK(max_shift < 1.0);  // 0.1 sigma will not move values by order 1
}

TEST_CASE("make_burgers: edge split, anchors and targets") {
    pr::BurgersOptions opt;
    opt.n_collocation = 30;
    opt.n_boundary = 100;
    opt.seed = 9;
    const auto b = pr::make_burgers(opt);
    CHECK(b.boundary.cols() == 67);   // 34 at x=-1, 33 at x=+1
    CHECK(b.initial_points.cols() == 33);
    for (Eigen::Index j = 0; j < 34; ++j) CHECK(b.boundary(1, j) == -1.0);
    for (Eigen::Index j = 34; j < 67; ++j) CHECK(b.boundary(1, j) == 1.0);
    for (Eigen::Index j = 0; j < b.initial_points.cols(); ++j) {
        CHECK(b.initial_points(0, j) == 0.0);
        CHECK(b.initial_targets(j) ==
              doctest::Approx(-std::sin(M_PI * b.initial_points(1, j))));
    }
}

TEST_CASE("evaluate_objectives: pendulum zero network closed forms") {
    const auto p = small_pendulum();
    const auto cfg = p.network({5, 5});
    std::vector<double> params(cfg.parameter_count(), 0.0);  // k-hat 0 too
    const auto obj = pr::evaluate_objectives(pr::Problem(p), cfg, params);
    CHECK(obj.components[0].name == "residual");
    CHECK(obj.components[0].value == 0.0);

    double want_init = 0.0;
    for (Eigen::Index j = 0; j < p.ics.cols(); ++j)
        want_init += p.ics(0, j) * p.ics(0, j) + p.ics(1, j) * p.ics(1, j);
    want_init /= static_cast<double>(p.ics.cols());
    CHECK(obj.components[1].value == doctest::Approx(want_init).epsilon(1e-12));

    const double want_data =
        p.data_targets.array().square().sum() / p.data_targets.cols();
    CHECK(obj.components[2].value == doctest::Approx(want_data).epsilon(1e-12));
}

TEST_CASE("evaluate_objectives: Burgers zero network closed forms") {
    pr::BurgersOptions opt;
    opt.n_collocation = 25;
    opt.n_boundary = 3000;  // dense initial samples push the mean toward 0.5
    opt.seed = 2;
    const auto b = pr::make_burgers(opt);
    const auto cfg = b.network({6, 6});
    std::vector<double> params(cfg.parameter_count(), 0.0);
    const auto obj = pr::evaluate_objectives(pr::Problem(b), cfg, params);
    CHECK(obj.components[0].value == 0.0);  // u == 0 satisfies the equation
    CHECK(obj.components[1].value == 0.0);  // and the walls
    double want = 0.0;
    for (Eigen::Index j = 0; j < b.initial_points.cols(); ++j)
        want += std::pow(std::sin(M_PI * b.initial_points(1, j)), 2);
    want /= static_cast<double>(b.initial_points.cols());
    CHECK(obj.components[2].value == doctest::Approx(want).epsilon(1e-12));
    CHECK(obj.components[2].value == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("evaluate_objectives: matches the straight-loop oracle") {
    const auto pend = small_pendulum();
    const auto burg = small_burgers();
    const auto run = [&](const pr::Problem& problem, const ad::MlpConfig& cfg,
                         std::vector<double> extras) {
        for (unsigned seed = 0; seed < 20; ++seed) {
            std::mt19937_64 rng(seed);
            const auto params = ad::xavier_init(cfg, rng, extras);
            const auto got = pr::evaluate_objectives(problem, cfg, params);
            const auto want = pr::oracle_objectives(problem, cfg, params);
            for (int i = 0; i < 3; ++i) {
                CHECK(got.components[static_cast<std::size_t>(i)].value >= 0.0);
                CHECK(rel_err(got.components[static_cast<std::size_t>(i)].value,
                              want.components[static_cast<std::size_t>(i)].value) <
                      1e-4);
            }
        }
    };
    run(pr::Problem(pend), pend.network({6, 6}), {0.5});
    run(pr::Problem(burg), burg.network({6, 6}), {});
}

TEST_CASE("evaluate_objectives: non-finite component names itself") {
    const auto p = small_pendulum();
    const auto cfg = p.network({4});
    std::mt19937_64 rng(1);
    auto params = ad::xavier_init(cfg, rng, std::vector<double>{0.5});
    params[cfg.extra_offset(0)] = 1e200;  // k-hat blows up the residual
    try {
        pr::evaluate_objectives(pr::Problem(p), cfg, params);
        FAIL("expected NonFiniteError");
    } catch (const NonFiniteError& e) {
        CHECK(e.quantity == "residual");
    }
}

TEST_CASE("evaluate_objectives: rejects mismatched network signatures") {
    const auto p = small_pendulum();
    ad::MlpConfig wrong{2, 2, {4}, 1};
    std::vector<double> params(wrong.parameter_count(), 0.0);
    CHECK_THROWS_AS(pr::evaluate_objectives(pr::Problem(p), wrong, params),
                    ConfigError);
}

TEST_CASE("burgers_reference: initial slice and odd symmetry") {
    std::vector<double> ts = {0.0, 0.0, 0.4, 0.4, 0.8, 0.8};
    std::vector<double> xs = {0.37, -0.37, 0.61, -0.61, 0.25, -0.25};
    const auto u = pr::burgers_reference(0.01 / M_PI, ts, xs, 401, 1e-3);
    CHECK(u[0] == doctest::Approx(-std::sin(M_PI * 0.37)).epsilon(1e-4));
    CHECK(u[0] == doctest::Approx(-u[1]).epsilon(1e-7));
    CHECK(u[2] == doctest::Approx(-u[3]).epsilon(1e-7));
    CHECK(u[4] == doctest::Approx(-u[5]).epsilon(1e-7));
}

TEST_CASE("burgers_reference: grid self-convergence away from the front") {
    std::vector<double> ts = {0.5, 0.75};
    std::vector<double> xs = {0.5, -0.6};
    const auto coarse = pr::burgers_reference(0.01 / M_PI, ts, xs, 401, 1e-3);
    const auto fine = pr::burgers_reference(0.01 / M_PI, ts, xs, 1201, 2e-4);
    CHECK(std::abs(coarse[0] - fine[0]) < 2e-3);
    CHECK(std::abs(coarse[1] - fine[1]) < 2e-3);
}

TEST_CASE("burgers_reference: amplitude decays in time") {
    std::vector<double> ts = {0.1, 0.9};
    std::vector<double> xs = {0.5, 0.5};
    const auto u = pr::burgers_reference(0.01 / M_PI, ts, xs, 401, 1e-3);
    CHECK(std::abs(u[1]) < std::abs(u[0]));
}

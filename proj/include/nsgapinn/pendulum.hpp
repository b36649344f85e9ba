#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "nsgapinn/mlp.hpp"
#include "nsgapinn/sampling.hpp"

namespace nsgapinn::problems {

/// theta' = omega, omega' = -k sin(theta), integrated with classical RK4.
/// Base step 0.01, substepping so every query time is hit exactly.
/// times must be sorted ascending within [0,1]; returns a 2 x |times| matrix
/// with rows (theta, omega).
Eigen::MatrixXd pendulum_reference(double theta0, double omega0, double k,
                                   std::span<const double> times);

struct PendulumOptions {
    double k_true = 1.0;
    // box the initial conditions are drawn from
    std::pair<double, double> theta0_range{-M_PI, M_PI};
    std::pair<double, double> omega0_range{0.0, M_PI};
    int n_collocation = 1000;
    int n_ics = 100;
    std::optional<GaussianNoise> noise;  // perturbs the data targets
    std::uint64_t seed = 0;              // sampling stream
};

/// Inverse pendulum problem: the network maps (theta0, omega0, t) to
/// (theta(t), omega(t)) and carries one extra trainable scalar, the
/// estimated restoring coefficient k. Sample sets are frozen at
/// construction; instances are immutable afterwards.
struct PendulumProblem {
    PendulumOptions opt;
    Eigen::MatrixXd collocation;    // 3 x n_collocation, rows (theta0, omega0, t)
    Eigen::MatrixXd ics;            // 2 x n_ics
    std::vector<double> data_mesh;  // times 0..1 step 0.01 (101 points)
    double data_theta0 = 0.0;       // the one trajectory behind the data loss
    double data_omega0 = 0.0;
    Eigen::MatrixXd data_targets;   // 2 x 101: reference values, noise applied

    /// Network signature for this problem: 3 inputs, 2 outputs, k appended.
    ad::MlpConfig network(std::vector<int> hidden) const {
        return ad::MlpConfig{3, 2, std::move(hidden), 1};
    }
};

PendulumProblem make_pendulum(const PendulumOptions& opt);

}  // namespace nsgapinn::problems

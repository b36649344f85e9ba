#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "nsgapinn/mlp.hpp"
#include "nsgapinn/sampling.hpp"

namespace nsgapinn::problems {

struct BurgersOptions {
    double viscosity = 0.01 / M_PI;
    int n_collocation = 10000;
    int n_boundary = 100;  // split evenly across x=-1, x=+1 and t=0
    std::optional<GaussianNoise> noise;  // perturbs the initial targets
    std::uint64_t seed = 0;
};

/// Viscous Burgers problem on (t,x) in [0,1] x [-1,1]:
/// u_t + u u_x = nu u_xx, u(t, +-1) = 0, u(0,x) = -sin(pi x).
/// The network maps (t,x) to u. Sample sets frozen at construction.
struct BurgersProblem {
    BurgersOptions opt;
    Eigen::MatrixXd collocation;      // 2 x n_collocation, rows (t, x)
    Eigen::MatrixXd boundary;         // 2 x nb at x = +-1; target 0
    Eigen::MatrixXd initial_points;   // 2 x ni at t = 0
    Eigen::VectorXd initial_targets;  // -sin(pi x), noise applied

    ad::MlpConfig network(std::vector<int> hidden) const {
        return ad::MlpConfig{2, 1, std::move(hidden), 0};
    }
};

BurgersProblem make_burgers(const BurgersOptions& opt);

/// Fine-grid method-of-lines reference for u(t,x), used only when reporting
/// predictions. Central differences on nx grid points, classical RK4 with
/// time step dt; queries (ts[i], xs[i]) are answered by integrating to each
/// needed time and interpolating linearly in x.
Eigen::VectorXd burgers_reference(double viscosity, std::span<const double> ts,
                                  std::span<const double> xs, int nx = 2001,
                                  double dt = 1.5e-4);

}  // namespace nsgapinn::problems

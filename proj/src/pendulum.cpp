#include "nsgapinn/pendulum.hpp"

#include <array>
#include <cmath>

namespace nsgapinn::problems {

namespace {

constexpr double kBaseStep = 0.01;

std::array<double, 2> rhs(double theta, double omega, double k) {
    return {omega, -k * std::sin(theta)};
}

void rk4_step(double& theta, double& omega, double k, double dt) {
    const auto k1 = rhs(theta, omega, k);
    const auto k2 = rhs(theta + 0.5 * dt * k1[0], omega + 0.5 * dt * k1[1], k);
    const auto k3 = rhs(theta + 0.5 * dt * k2[0], omega + 0.5 * dt * k2[1], k);
    const auto k4 = rhs(theta + dt * k3[0], omega + dt * k3[1], k);
    theta += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    omega += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
}

}  // namespace

Eigen::MatrixXd pendulum_reference(double theta0, double omega0, double k,
                                   std::span<const double> times) {
    Eigen::MatrixXd out(2, static_cast<Eigen::Index>(times.size()));
    double t = 0.0, theta = theta0, omega = omega0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double target = times[i];
        if (target < t || target < 0.0)
            throw Error("pendulum_reference: times must be sorted ascending from 0");
        if (target > t) {
            const int n_sub =
                std::max(1, static_cast<int>(std::ceil((target - t) / kBaseStep - 1e-12)));
            const double dt = (target - t) / n_sub;
            for (int s = 0; s < n_sub; ++s) rk4_step(theta, omega, k, dt);
            t = target;
        }
        out(0, static_cast<Eigen::Index>(i)) = theta;
        out(1, static_cast<Eigen::Index>(i)) = omega;
    }
    return out;
}

PendulumProblem make_pendulum(const PendulumOptions& opt) {
    if (opt.n_collocation <= 0) throw ConfigError("n_collocation", "must be positive");
    if (opt.n_ics <= 0) throw ConfigError("n_ics", "must be positive");

    PendulumProblem p;
    p.opt = opt;
    auto rng = make_stream(opt.seed, 0, 0, StreamKind::sampling);

    const std::vector<std::pair<double, double>> box3 = {
        opt.theta0_range, opt.omega0_range, {0.0, 1.0}};
    p.collocation = latin_hypercube(rng, opt.n_collocation, box3);

    const std::vector<std::pair<double, double>> box2 = {opt.theta0_range,
                                                         opt.omega0_range};
    p.ics = latin_hypercube(rng, opt.n_ics, box2);

    p.data_mesh.resize(101);
    for (int i = 0; i <= 100; ++i) p.data_mesh[static_cast<std::size_t>(i)] = i * 0.01;

    const Eigen::MatrixXd pair = latin_hypercube(rng, 1, box2);
    p.data_theta0 = pair(0, 0);
    p.data_omega0 = pair(1, 0);
    p.data_targets =
        pendulum_reference(p.data_theta0, p.data_omega0, opt.k_true, p.data_mesh);

    if (opt.noise && opt.noise->sigma > 0.0) {
        // flatten row by row (all theta values, then all omega values)
        std::vector<double> flat(2 * p.data_mesh.size());
        for (int r = 0; r < 2; ++r)
            for (std::size_t j = 0; j < p.data_mesh.size(); ++j)
                flat[static_cast<std::size_t>(r) * p.data_mesh.size() + j] =
                    p.data_targets(r, static_cast<Eigen::Index>(j));
        flat = apply_noise(flat, *opt.noise);
        for (int r = 0; r < 2; ++r)
            for (std::size_t j = 0; j < p.data_mesh.size(); ++j)
                p.data_targets(r, static_cast<Eigen::Index>(j)) =
                    flat[static_cast<std::size_t>(r) * p.data_mesh.size() + j];
    }
    return p;
}

}  // namespace nsgapinn::problems

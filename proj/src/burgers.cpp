#include "nsgapinn/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nsgapinn::problems {

BurgersProblem make_burgers(const BurgersOptions& opt) {
    if (opt.n_collocation <= 0) throw ConfigError("n_collocation", "must be positive");
    if (opt.n_boundary < 3)
        throw ConfigError("n_boundary", "needs at least one point per edge");
    if (!(opt.viscosity > 0.0)) throw ConfigError("viscosity", "must be positive");

    BurgersProblem b;
    b.opt = opt;
    auto rng = make_stream(opt.seed, 0, 0, StreamKind::sampling);

    const std::vector<std::pair<double, double>> box = {{0.0, 1.0}, {-1.0, 1.0}};
    b.collocation = latin_hypercube(rng, opt.n_collocation, box);

    // budget split evenly across the three condition edges, remainder in
    // order (x=-1, x=+1, t=0)
    const int base = opt.n_boundary / 3;
    const int rem = opt.n_boundary % 3;
    const int n_left = base + (rem > 0 ? 1 : 0);
    const int n_right = base + (rem > 1 ? 1 : 0);
    const int n_init = base;

    const std::vector<std::pair<double, double>> t_range = {{0.0, 1.0}};
    const std::vector<std::pair<double, double>> x_range = {{-1.0, 1.0}};
    const Eigen::MatrixXd t_left = latin_hypercube(rng, n_left, t_range);
    const Eigen::MatrixXd t_right = latin_hypercube(rng, n_right, t_range);
    const Eigen::MatrixXd x_init = latin_hypercube(rng, n_init, x_range);

    b.boundary.resize(2, n_left + n_right);
    for (int j = 0; j < n_left; ++j) {
        b.boundary(0, j) = t_left(0, j);
        b.boundary(1, j) = -1.0;
    }
    for (int j = 0; j < n_right; ++j) {
        b.boundary(0, n_left + j) = t_right(0, j);
        b.boundary(1, n_left + j) = 1.0;
    }

    b.initial_points.resize(2, n_init);
    std::vector<double> targets(static_cast<std::size_t>(n_init));
    for (int j = 0; j < n_init; ++j) {
        b.initial_points(0, j) = 0.0;
        b.initial_points(1, j) = x_init(0, j);
        targets[static_cast<std::size_t>(j)] = -std::sin(M_PI * x_init(0, j));
    }
    if (opt.noise && opt.noise->sigma > 0.0) targets = apply_noise(targets, *opt.noise);
    b.initial_targets =
        Eigen::Map<const Eigen::VectorXd>(targets.data(), n_init);
    return b;
}

namespace {

Eigen::VectorXd burgers_rhs(const Eigen::VectorXd& u, double nu, double dx) {
    const Eigen::Index n = u.size();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double ux = (u[i + 1] - u[i - 1]) / (2.0 * dx);
        const double uxx = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dx * dx);
        f[i] = -u[i] * ux + nu * uxx;
    }
    return f;
}

void rk4_step(Eigen::VectorXd& u, double nu, double dx, double dt) {
    const Eigen::VectorXd k1 = burgers_rhs(u, nu, dx);
    const Eigen::VectorXd k2 = burgers_rhs(u + 0.5 * dt * k1, nu, dx);
    const Eigen::VectorXd k3 = burgers_rhs(u + 0.5 * dt * k2, nu, dx);
    const Eigen::VectorXd k4 = burgers_rhs(u + dt * k3, nu, dx);
    u += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Eigen::VectorXd burgers_reference(double viscosity, std::span<const double> ts,
                                  std::span<const double> xs, int nx, double dt) {
    if (ts.size() != xs.size())
        throw DimensionError("query coordinate lengths", static_cast<long>(ts.size()),
                             static_cast<long>(xs.size()));
    if (nx < 3) throw ConfigError("nx", "grid needs at least 3 points");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < 0.0 || ts[i] > 1.0)
            throw ConfigError("ts", "query times must lie in [0,1]");
        if (xs[i] < -1.0 || xs[i] > 1.0)
            throw ConfigError("xs", "query positions must lie in [-1,1]");
    }

    std::vector<std::size_t> order(ts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ts[a] < ts[b]; });

    const double dx = 2.0 / (nx - 1);
    Eigen::VectorXd u(nx);
    for (int i = 0; i < nx; ++i) u[i] = -std::sin(M_PI * (-1.0 + i * dx));
    u[0] = 0.0;
    u[nx - 1] = 0.0;

    Eigen::VectorXd out(static_cast<Eigen::Index>(ts.size()));
    double t = 0.0;
    for (std::size_t qi : order) {
        const double target = ts[qi];
        if (target > t) {
            const int n_sub =
                std::max(1, static_cast<int>(std::ceil((target - t) / dt - 1e-12)));
            const double step = (target - t) / n_sub;
            for (int s = 0; s < n_sub; ++s) rk4_step(u, viscosity, dx, step);
            t = target;
        }
        const double pos = (xs[qi] + 1.0) / dx;
        const int i0 = std::min(nx - 2, static_cast<int>(pos));
        const double w = pos - i0;
        out[static_cast<Eigen::Index>(qi)] = (1.0 - w) * u[i0] + w * u[i0 + 1];
    }
    return out;
}

}  // namespace nsgapinn::problems

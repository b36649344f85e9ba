#include "nsgapinn/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsgapinn::nsga {

FrontPartition brute_force_sort(std::span<const Individual> population) {
    if (population.empty()) throw Error("brute_force_sort: empty population");
    std::vector<std::size_t> remaining(population.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

    FrontPartition out;
    while (!remaining.empty()) {
        std::vector<std::size_t> front;
        for (std::size_t p : remaining) {
            bool dominated_by_any = false;
            for (std::size_t q : remaining) {
                if (q == p) continue;
                if (dominates(population[q].objectives, population[p].objectives)) {
                    dominated_by_any = true;
                    break;
                }
            }
            if (!dominated_by_any) front.push_back(p);
        }
        std::vector<std::uint64_t> labels;
        labels.reserve(front.size());
        for (std::size_t p : front) labels.push_back(population[p].label);
        out.fronts.push_back(std::move(labels));

        std::vector<std::size_t> rest;
        for (std::size_t p : remaining)
            if (std::find(front.begin(), front.end(), p) == front.end())
                rest.push_back(p);
        remaining = std::move(rest);
    }
    return out;
}

std::vector<double> brute_force_crowding(std::span<const Individual> front) {
    const std::size_t n = front.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(n, 0.0);
    if (n <= 2) {
        std::fill(d.begin(), d.end(), inf);
        return d;
    }
    const std::size_t n_obj = front[0].objectives.size();
    for (std::size_t m = 0; m < n_obj; ++m) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (front[a].objectives[m] != front[b].objectives[m])
                return front[a].objectives[m] < front[b].objectives[m];
            return front[a].label < front[b].label;
        });
        d[idx[0]] = inf;
        d[idx[n - 1]] = inf;
        const double lo = front[idx[0]].objectives[m];
        const double hi = front[idx[n - 1]].objectives[m];
        if (hi == lo) continue;
        for (std::size_t i = 1; i + 1 < n; ++i)
            d[idx[i]] += (front[idx[i + 1]].objectives[m] -
                          front[idx[i - 1]].objectives[m]) /
                         (hi - lo);
    }
    return d;
}

std::vector<std::uint64_t> brute_force_select(std::span<const Individual> combined,
                                              std::size_t n) {
    const FrontPartition partition = brute_force_sort(combined);
    std::vector<std::uint64_t> survivors;
    for (const auto& labels : partition.fronts) {
        if (survivors.size() == n) break;
        if (survivors.size() + labels.size() <= n) {
            survivors.insert(survivors.end(), labels.begin(), labels.end());
            continue;
        }
        // materialize the front and truncate by descending crowding
        std::vector<Individual> front;
        for (std::uint64_t label : labels)
            for (const Individual& ind : combined)
                if (ind.label == label) front.push_back(ind);
        const std::vector<double> d = brute_force_crowding(front);
        std::vector<std::size_t> order(front.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (d[a] != d[b]) return d[a] > d[b];
            return front[a].label < front[b].label;
        });
        for (std::size_t i : order) {
            if (survivors.size() == n) break;
            survivors.push_back(front[i].label);
        }
    }
    std::sort(survivors.begin(), survivors.end());
    return survivors;
}

}  // namespace nsgapinn::nsga

namespace nsgapinn::problems {

namespace {

std::vector<double> net_out(const ad::MlpConfig& cfg, std::span<const double> params,
                            std::initializer_list<double> x) {
    return ad::forward(cfg, params, std::vector<double>(x));
}

ObjectiveVector pendulum_oracle(const PendulumProblem& prob, const ad::MlpConfig& cfg,
                                std::span<const double> params, double h1) {
    const double k_hat = params[cfg.extra_offset(0)];

    double res = 0.0;
    for (Eigen::Index j = 0; j < prob.collocation.cols(); ++j) {
        const double a = prob.collocation(0, j), b = prob.collocation(1, j),
                     t = prob.collocation(2, j);
        const auto y = net_out(cfg, params, {a, b, t});
        const auto yp = net_out(cfg, params, {a, b, t + h1});
        const auto ym = net_out(cfg, params, {a, b, t - h1});
        const double th_t = (yp[0] - ym[0]) / (2.0 * h1);
        const double om_t = (yp[1] - ym[1]) / (2.0 * h1);
        const double r1 = th_t - y[1];
        const double r2 = om_t + k_hat * std::sin(y[0]);
        res += r1 * r1 + r2 * r2;
    }
    res /= static_cast<double>(prob.collocation.cols());

    double init = 0.0;
    for (Eigen::Index j = 0; j < prob.ics.cols(); ++j) {
        const double a = prob.ics(0, j), b = prob.ics(1, j);
        const auto y = net_out(cfg, params, {a, b, 0.0});
        init += (y[0] - a) * (y[0] - a) + (y[1] - b) * (y[1] - b);
    }
    init /= static_cast<double>(prob.ics.cols());

    double data = 0.0;
    for (std::size_t j = 0; j < prob.data_mesh.size(); ++j) {
        const auto y = net_out(cfg, params,
                               {prob.data_theta0, prob.data_omega0, prob.data_mesh[j]});
        const double d0 = y[0] - prob.data_targets(0, static_cast<Eigen::Index>(j));
        const double d1 = y[1] - prob.data_targets(1, static_cast<Eigen::Index>(j));
        data += d0 * d0 + d1 * d1;
    }
    data /= static_cast<double>(prob.data_mesh.size());

    return ObjectiveVector{{{{"residual", res}, {"initial", init}, {"data", data}}}};
}

ObjectiveVector burgers_oracle(const BurgersProblem& prob, const ad::MlpConfig& cfg,
                               std::span<const double> params, double h1, double h2) {
    const double nu = prob.opt.viscosity;

    double res = 0.0;
    for (Eigen::Index j = 0; j < prob.collocation.cols(); ++j) {
        const double t = prob.collocation(0, j), x = prob.collocation(1, j);
        const double u = net_out(cfg, params, {t, x})[0];
        const double ut = (net_out(cfg, params, {t + h1, x})[0] -
                           net_out(cfg, params, {t - h1, x})[0]) /
                          (2.0 * h1);
        const double ux = (net_out(cfg, params, {t, x + h1})[0] -
                           net_out(cfg, params, {t, x - h1})[0]) /
                          (2.0 * h1);
        const double uxx = (net_out(cfg, params, {t, x + h2})[0] - 2.0 * u +
                            net_out(cfg, params, {t, x - h2})[0]) /
                           (h2 * h2);
        const double r = ut + u * ux - nu * uxx;
        res += r * r;
    }
    res /= static_cast<double>(prob.collocation.cols());

    double bc = 0.0;
    for (Eigen::Index j = 0; j < prob.boundary.cols(); ++j) {
        const double u =
            net_out(cfg, params, {prob.boundary(0, j), prob.boundary(1, j)})[0];
        bc += u * u;
    }
    bc /= static_cast<double>(prob.boundary.cols());

    double init = 0.0;
    for (Eigen::Index j = 0; j < prob.initial_points.cols(); ++j) {
        const double u = net_out(cfg, params,
                                 {prob.initial_points(0, j), prob.initial_points(1, j)})[0];
        const double d = u - prob.initial_targets(j);
        init += d * d;
    }
    init /= static_cast<double>(prob.initial_points.cols());

    return ObjectiveVector{{{{"residual", res}, {"boundary", bc}, {"initial", init}}}};
}

}  // namespace

ObjectiveVector oracle_objectives(const Problem& problem, const ad::MlpConfig& cfg,
                                  std::span<const double> params, double h1,
                                  double h2) {
    if (const auto* p = std::get_if<PendulumProblem>(&problem))
        return pendulum_oracle(*p, cfg, params, h1);
    return burgers_oracle(std::get<BurgersProblem>(problem), cfg, params, h1, h2);
}

}  // namespace nsgapinn::problems

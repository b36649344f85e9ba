#include "nsgapinn/problem.hpp"

namespace nsgapinn::problems {

namespace {

void require_signature(const ad::MlpConfig& cfg, int in, int out, int extra,
                       const char* which) {
    if (cfg.input_dim != in)
        throw ConfigError("network.input_dim",
                          std::string(which) + " needs input_dim " + std::to_string(in));
    if (cfg.output_dim != out)
        throw ConfigError("network.output_dim", std::string(which) +
                                                    " needs output_dim " +
                                                    std::to_string(out));
    if (cfg.n_extra != extra)
        throw ConfigError("network.n_extra", std::string(which) + " needs " +
                                                 std::to_string(extra) +
                                                 " extra scalar(s)");
}

// mean over samples of the squared column norm: mean_all averages over all
// entries, so multiply back by the number of rows
ad::Program::NodeId mean_sq_norm(ad::Program& p, ad::Program::NodeId diff, int rows) {
    const auto m = p.mean_all(p.square(diff));
    return rows == 1 ? m : p.scale(m, static_cast<double>(rows));
}

}  // namespace

Evaluator::Evaluator(const PendulumProblem& problem, const ad::MlpConfig& cfg)
    : cfg_(cfg),
      names_{"residual", "initial", "data"},
      programs_{ad::Program("residual"), ad::Program("initial"), ad::Program("data")} {
    require_signature(cfg, 3, 2, 1, "pendulum");
    const std::size_t n_params = cfg.parameter_count();

    {
        ad::Program& p = programs_[0];
        auto net = ad::record_net(p, cfg, problem.collocation);
        const auto d1 = ad::record_jet1(p, net, 2);  // d/dt
        const auto k = p.param(1, 1, cfg.extra_offset(0));
        const auto r1 = p.sub(p.row(d1, 0), p.row(net.output, 1));
        const auto r2 = p.add(p.row(d1, 1),
                              p.mul_scalar(p.sin(p.row(net.output, 0)), k));
        p.finish(p.add(p.mean_all(p.square(r1)), p.mean_all(p.square(r2))), n_params);
    }
    {
        ad::Program& p = programs_[1];
        Eigen::MatrixXd inputs(3, problem.ics.cols());
        inputs.topRows(2) = problem.ics;
        inputs.row(2).setZero();
        auto net = ad::record_net(p, cfg, inputs);
        const auto diff = p.sub(net.output, p.constant(problem.ics));
        p.finish(mean_sq_norm(p, diff, 2), n_params);
    }
    {
        ad::Program& p = programs_[2];
        const auto n_mesh = static_cast<Eigen::Index>(problem.data_mesh.size());
        Eigen::MatrixXd inputs(3, n_mesh);
        inputs.row(0).setConstant(problem.data_theta0);
        inputs.row(1).setConstant(problem.data_omega0);
        for (Eigen::Index j = 0; j < n_mesh; ++j)
            inputs(2, j) = problem.data_mesh[static_cast<std::size_t>(j)];
        auto net = ad::record_net(p, cfg, inputs);
        const auto diff = p.sub(net.output, p.constant(problem.data_targets));
        p.finish(mean_sq_norm(p, diff, 2), n_params);
    }
}

Evaluator::Evaluator(const BurgersProblem& problem, const ad::MlpConfig& cfg)
    : cfg_(cfg),
      names_{"residual", "boundary", "initial"},
      programs_{ad::Program("residual"), ad::Program("boundary"),
                ad::Program("initial")} {
    require_signature(cfg, 2, 1, 0, "burgers");
    const std::size_t n_params = cfg.parameter_count();

    {
        ad::Program& p = programs_[0];
        auto net = ad::record_net(p, cfg, problem.collocation);
        const auto d1t = ad::record_jet1(p, net, 0);
        const auto [d1x, d2x] = ad::record_jet2(p, net, 1);
        const auto r = p.sub(p.add(d1t, p.mul(net.output, d1x)),
                             p.scale(d2x, problem.opt.viscosity));
        p.finish(p.mean_all(p.square(r)), n_params);
    }
    {
        ad::Program& p = programs_[1];
        auto net = ad::record_net(p, cfg, problem.boundary);
        p.finish(p.mean_all(p.square(net.output)), n_params);
    }
    {
        ad::Program& p = programs_[2];
        auto net = ad::record_net(p, cfg, problem.initial_points);
        const auto diff =
            p.sub(net.output, p.constant(problem.initial_targets.transpose()));
        p.finish(p.mean_all(p.square(diff)), n_params);
    }
}

ObjectiveVector Evaluator::pack(const std::array<double, 3>& vals) const {
    ObjectiveVector out;
    for (std::size_t i = 0; i < 3; ++i) out.components[i] = {names_[i], vals[i]};
    return out;
}

ObjectiveVector Evaluator::evaluate(std::span<const double> params) {
    std::array<double, 3> vals{};
    for (std::size_t i = 0; i < 3; ++i) vals[i] = programs_[i].forward(params);
    return pack(vals);
}

ObjectiveVector Evaluator::evaluate_with_grad(std::span<const double> params,
                                              std::span<double> grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::array<double, 3> vals{};
    for (std::size_t i = 0; i < 3; ++i)
        vals[i] = programs_[i].value_and_grad(params, grad);
    return pack(vals);
}

Evaluator make_evaluator(const Problem& problem, const ad::MlpConfig& cfg) {
    return std::visit([&](const auto& p) { return Evaluator(p, cfg); }, problem);
}

ObjectiveVector evaluate_objectives(const Problem& problem, const ad::MlpConfig& cfg,
                                    std::span<const double> params) {
    return make_evaluator(problem, cfg).evaluate(params);
}

}  // namespace nsgapinn::problems

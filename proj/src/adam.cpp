#include "nsgapinn/adam.hpp"

#include <cmath>

#include "json.hpp"

namespace nsgapinn::optim {

AdamState AdamState::init(std::size_t n, double lr) {
    AdamState s;
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
    s.lr = lr;
    return s;
}

namespace detail {

void step_inplace(AdamState& state, std::vector<double>& params,
                  std::span<const double> gradient) {
    const std::size_t n = params.size();
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = gradient[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

}  // namespace detail

std::pair<AdamState, std::vector<double>> adam_step(const AdamState& state,
                                                    std::span<const double> params,
                                                    std::span<const double> gradient) {
    if (state.m.size() != params.size())
        throw DimensionError("adam state length", static_cast<long>(params.size()),
                             static_cast<long>(state.m.size()));
    if (gradient.size() != params.size())
        throw DimensionError("gradient length", static_cast<long>(params.size()),
                             static_cast<long>(gradient.size()));
    for (double g : gradient)
        if (!std::isfinite(g)) throw NonFiniteError("gradient", g);
    AdamState next = state;
    std::vector<double> out(params.begin(), params.end());
    detail::step_inplace(next, out, gradient);
    return {std::move(next), std::move(out)};
}

std::string adam_state_to_json(const AdamState& state) {
    nlohmann::json j;
    j["m"] = state.m;
    j["v"] = state.v;
    j["step_count"] = state.step_count;
    j["lr"] = state.lr;
    j["beta1"] = state.beta1;
    j["beta2"] = state.beta2;
    j["eps"] = state.eps;
    return j.dump();
}

AdamState adam_state_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    AdamState s;
    s.m = j.at("m").get<std::vector<double>>();
    s.v = j.at("v").get<std::vector<double>>();
    s.step_count = j.at("step_count").get<long>();
    s.lr = j.at("lr").get<double>();
    s.beta1 = j.at("beta1").get<double>();
    s.beta2 = j.at("beta2").get<double>();
    s.eps = j.at("eps").get<double>();
    if (s.m.size() != s.v.size())
        throw DimensionError("adam state length", static_cast<long>(s.m.size()),
                             static_cast<long>(s.v.size()));
    return s;
}

TrainResult train(problems::Evaluator& evaluator, std::span<const double> params,
                  int n_steps, double lr) {
    if (n_steps < 0) throw ConfigError("n_steps", "must be non-negative");
    TrainResult result;
    result.params.assign(params.begin(), params.end());
    result.loss_history.reserve(static_cast<std::size_t>(n_steps) + 1);
    AdamState state = AdamState::init(result.params.size(), lr);
    std::vector<double> grad(result.params.size(), 0.0);
    for (int step = 0; step < n_steps; ++step) {
        const auto obj = evaluator.evaluate_with_grad(result.params, grad);
        result.loss_history.push_back(obj.total());
        for (double g : grad)
            if (!std::isfinite(g)) throw NonFiniteError("gradient", g);
        detail::step_inplace(state, result.params, grad);
    }
    result.loss_history.push_back(evaluator.evaluate(result.params).total());
    return result;
}

TrainResult train(const problems::Problem& problem, const ad::MlpConfig& cfg,
                  std::span<const double> params, int n_steps, double lr,
                  std::uint64_t) {
    auto evaluator = problems::make_evaluator(problem, cfg);
    return train(evaluator, params, n_steps, lr);
}

}  // namespace nsgapinn::optim

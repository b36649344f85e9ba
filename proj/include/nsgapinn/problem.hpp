#pragma once

#include <array>
#include <span>
#include <string>
#include <variant>

#include "nsgapinn/burgers.hpp"
#include "nsgapinn/graph.hpp"
#include "nsgapinn/pendulum.hpp"

namespace nsgapinn::problems {

struct LossComponent {
    std::string name;
    double value = 0.0;  // mean of squared terms, so >= 0 and finite
};

/// The three loss components in objective order: f1 = residual,
/// f2 = initial (pendulum) / boundary (Burgers), f3 = data / initial.
struct ObjectiveVector {
    std::array<LossComponent, 3> components;

    std::array<double, 3> values() const {
        return {components[0].value, components[1].value, components[2].value};
    }
    double total() const {
        return components[0].value + components[1].value + components[2].value;
    }
};

using Problem = std::variant<PendulumProblem, BurgersProblem>;

/// Holds the recorded loss programs for one (problem, network shape) pair.
/// Construction validates the network signature and records the three loss
/// graphs once; evaluation then only loads parameters and sweeps them.
/// Copy an Evaluator per thread when evaluating individuals in parallel.
class Evaluator {
public:
    Evaluator(const PendulumProblem& problem, const ad::MlpConfig& cfg);
    Evaluator(const BurgersProblem& problem, const ad::MlpConfig& cfg);

    const ad::MlpConfig& config() const { return cfg_; }
    const std::array<std::string, 3>& names() const { return names_; }

    /// Forward passes only.
    ObjectiveVector evaluate(std::span<const double> params);
    /// Also accumulates the gradient of the unit-weight total loss into
    /// grad (overwritten). Returns the components.
    ObjectiveVector evaluate_with_grad(std::span<const double> params,
                                       std::span<double> grad);

private:
    ObjectiveVector pack(const std::array<double, 3>& vals) const;

    ad::MlpConfig cfg_;
    std::array<std::string, 3> names_;
    std::array<ad::Program, 3> programs_;
};

Evaluator make_evaluator(const Problem& problem, const ad::MlpConfig& cfg);

/// Convenience wrapper building a throwaway Evaluator; prefer holding an
/// Evaluator when evaluating repeatedly.
ObjectiveVector evaluate_objectives(const Problem& problem, const ad::MlpConfig& cfg,
                                    std::span<const double> params);

}  // namespace nsgapinn::problems

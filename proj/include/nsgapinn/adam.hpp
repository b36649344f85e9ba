#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nsgapinn/problem.hpp"

namespace nsgapinn::optim {

struct AdamState {
    std::vector<double> m;  // first-moment estimate
    std::vector<double> v;  // second-moment estimate, componentwise >= 0
    long step_count = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState init(std::size_t n, double lr = 1e-3);
};

/// One bias-corrected Adam update. Pure: inputs untouched, returns the new
/// state and parameters. Rejects non-finite gradients.
std::pair<AdamState, std::vector<double>> adam_step(const AdamState& state,
                                                    std::span<const double> params,
                                                    std::span<const double> gradient);

/// State serialization for resumable runs; values round-trip exactly.
std::string adam_state_to_json(const AdamState& state);
AdamState adam_state_from_json(const std::string& text);

struct TrainResult {
    std::vector<double> params;
    std::vector<double> loss_history;  // n_steps + 1 entries, initial loss first
};

/// n_steps full-batch Adam steps on the unit-weight total loss. The under-
/// lying gradients are deterministic, so no randomness enters here.
TrainResult train(problems::Evaluator& evaluator, std::span<const double> params,
                  int n_steps, double lr);

/// Convenience overload matching the problem-level interface; seed is
/// accepted for signature stability but full-batch training draws nothing.
TrainResult train(const problems::Problem& problem, const ad::MlpConfig& cfg,
                  std::span<const double> params, int n_steps, double lr,
                  std::uint64_t seed = 0);

namespace detail {
/// In-place step shared by the public functions; gradient already validated.
void step_inplace(AdamState& state, std::vector<double>& params,
                  std::span<const double> gradient);
}  // namespace detail

}  // namespace nsgapinn::optim

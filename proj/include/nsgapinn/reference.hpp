#pragma once

#include "nsgapinn/nsga.hpp"
#include "nsgapinn/problem.hpp"

// Deliberately naive reference implementations. They trade speed for
// obviousness and exist to cross-check the production code paths; tests and
// the `oracle` subcommand compare against them.

namespace nsgapinn::nsga {

/// Front partition by repeated peeling: scan all remaining individuals,
/// collect the ones dominated by nobody, remove, repeat. Quadratic per
/// front. Does not touch ranks.
FrontPartition brute_force_sort(std::span<const Individual> population);

/// Crowding by the textbook formula, one objective at a time, no shared
/// index bookkeeping with the production code.
std::vector<double> brute_force_crowding(std::span<const Individual> front);

/// Survivor labels (sorted ascending) of front-by-front elitist selection
/// with crowding truncation, reimplemented from scratch.
std::vector<std::uint64_t> brute_force_select(std::span<const Individual> combined,
                                              std::size_t n);

}  // namespace nsgapinn::nsga

namespace nsgapinn::problems {

/// Loss components recomputed with per-sample scalar loops and central
/// finite differences instead of the recorded graphs; agreement with
/// evaluate_objectives is expected to ~1e-4 relative.
ObjectiveVector oracle_objectives(const Problem& problem, const ad::MlpConfig& cfg,
                                  std::span<const double> params, double h1 = 1e-4,
                                  double h2 = 1e-3);

}  // namespace nsgapinn::problems

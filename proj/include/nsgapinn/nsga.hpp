#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "nsgapinn/common.hpp"

namespace nsgapinn::nsga {

/// One candidate solution. For the PINN application, params is the flat
/// network parameter vector; the selection machinery only reads label,
/// objectives, rank and crowding and works for any objective count.
struct Individual {
    std::uint64_t label = 0;
    std::vector<double> params;
    std::vector<double> objectives;  // all minimized; finite
    int rank = 0;                    // 0 = unset; fronts are 1-based
    double crowding = -1.0;          // -1 = unset

    double total() const {
        double s = 0.0;
        for (double f : objectives) s += f;
        return s;
    }
};

/// Pareto dominance for minimization: a <= b everywhere and a < b somewhere.
bool dominates(std::span<const double> a, std::span<const double> b);

/// Front labels in peel order: fronts[0] is the non-dominated set.
struct FrontPartition {
    std::vector<std::vector<std::uint64_t>> fronts;
};

/// Fast non-dominated sort: domination counts and dominated-sets per
/// individual, then iterative front peeling. Assigns rank (1-based) on each
/// individual and returns the partition.
FrontPartition non_dominated_sort(std::span<Individual> population);

/// Crowding distances within one front, written onto the members: boundary
/// points per objective get +infinity, interior points sum the normalized
/// neighbor gaps; a zero objective range contributes nothing.
void crowding_distance(std::span<Individual> front);

/// Applies crowding_distance per front of an already-sorted population.
void assign_crowding(std::span<Individual> population, const FrontPartition& fronts);

/// Crowded binary tournament: shuffle the candidates into pairs, keep the
/// lower rank (tie: higher crowding, tie: coin flip), repeat with
/// replacement until the pool holds pool_size labels. An unpaired leftover
/// carries into the next round. Requires ranks and crowding assigned.
std::vector<std::uint64_t> tournament_select(std::span<const Individual> population,
                                             std::size_t pool_size,
                                             std::mt19937_64& rng);

/// Keep the best n of any pool: whole fronts while they fit, then the
/// overflowing front truncated by descending crowding (ties by label).
/// Ranks and crowding are (re)computed on the pool.
std::vector<Individual> truncate_population(std::vector<Individual> pool,
                                            std::size_t n);

/// Elitist survivor selection over a merged parent+offspring population of
/// exactly 2n individuals.
std::vector<Individual> environmental_select(std::span<const Individual> combined,
                                             std::size_t n);

}  // namespace nsgapinn::nsga

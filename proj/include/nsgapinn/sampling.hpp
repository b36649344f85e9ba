#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "nsgapinn/common.hpp"

namespace nsgapinn::problems {

/// Latin hypercube sample of n points over an axis-aligned box; one point
/// per stratum per dimension, strata permuted independently. Columns are
/// points, rows are dimensions.
Eigen::MatrixXd latin_hypercube(std::mt19937_64& rng, int n,
                                std::span<const std::pair<double, double>> ranges);

/// Additive measurement noise on experimental data values. Applied exactly
/// once, when the dataset is constructed.
struct GaussianNoise {
    double mean = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

/// data + eps with eps i.i.d. Normal(mean, sigma^2) from the noise seed.
/// sigma = 0 degenerates to adding the (usually zero) mean.
std::vector<double> apply_noise(std::span<const double> data,
                                const GaussianNoise& noise);

}  // namespace nsgapinn::problems

#include "nsgapinn/sampling.hpp"

#include <algorithm>
#include <numeric>

namespace nsgapinn::problems {

Eigen::MatrixXd latin_hypercube(std::mt19937_64& rng, int n,
                                std::span<const std::pair<double, double>> ranges) {
    if (n <= 0) throw ConfigError("sample count", "must be positive");
    const int dim = static_cast<int>(ranges.size());
    if (dim == 0) throw ConfigError("ranges", "must be non-empty");
    Eigen::MatrixXd out(dim, n);
    std::vector<int> strata(static_cast<std::size_t>(n));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int d = 0; d < dim; ++d) {
        const auto [lo, hi] = ranges[static_cast<std::size_t>(d)];
        if (!(hi >= lo)) throw ConfigError("ranges", "upper bound below lower bound");
        std::iota(strata.begin(), strata.end(), 0);
        std::shuffle(strata.begin(), strata.end(), rng);
        for (int j = 0; j < n; ++j) {
            const double frac = (strata[static_cast<std::size_t>(j)] + u01(rng)) / n;
            out(d, j) = lo + (hi - lo) * frac;
        }
    }
    return out;
}

std::vector<double> apply_noise(std::span<const double> data,
                                const GaussianNoise& noise) {
    if (noise.sigma < 0.0)
        throw ConfigError("noise.sigma", "must be non-negative");
    std::vector<double> out(data.begin(), data.end());
    if (noise.sigma == 0.0) {
        if (noise.mean != 0.0)
            for (double& x : out) x += noise.mean;
        return out;
    }
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> normal(noise.mean, noise.sigma);
    for (double& x : out) x += normal(rng);
    return out;
}

}  // namespace nsgapinn::problems

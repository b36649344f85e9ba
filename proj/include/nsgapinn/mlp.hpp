#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "nsgapinn/common.hpp"
#include "nsgapinn/jet.hpp"

namespace nsgapinn::ad {

enum class Activation { Tanh };

/// Fully connected network shape. Parameters live in one flat vector:
/// for each layer, the weight matrix rows (out x in, row-major) followed
/// by the bias, then any extra trainable scalars appended at the end.
struct MlpConfig {
    int input_dim = 1;
    int output_dim = 1;
    std::vector<int> hidden_layers;
    int n_extra = 0;
    Activation activation = Activation::Tanh;

    std::vector<int> layer_dims() const;
    std::size_t parameter_count() const;
    /// Flat offset of extra scalar i.
    std::size_t extra_offset(int i) const;
};

/// Glorot uniform weights, zero biases; extras come from extra_init,
/// whose length must equal n_extra.
std::vector<double> xavier_init(const MlpConfig& cfg, std::mt19937_64& rng,
                                std::span<const double> extra_init = {});

std::vector<double> forward(const MlpConfig& cfg, std::span<const double> params,
                            std::span<const double> input);

/// Forward pass carrying first and second derivatives with respect to
/// input coordinate seed_index. Value channel matches forward() exactly.
std::vector<Jet2> forward_jet(const MlpConfig& cfg, std::span<const double> params,
                              std::span<const double> input, int seed_index);

namespace detail {

/// Shared scalar evaluation core. T is double or Jet2; both paths execute
/// the same sequence of operations so value channels agree bit for bit.
template <class T>
void mlp_eval(const MlpConfig& cfg, std::span<const double> params,
              const std::vector<T>& input, std::vector<T>& output) {
    const std::vector<int> dims = cfg.layer_dims();
    std::vector<T> cur = input;
    std::vector<T> next;
    std::size_t off = 0;
    for (std::size_t layer = 0; layer + 1 < dims.size(); ++layer) {
        const int fan_in = dims[layer];
        const int fan_out = dims[layer + 1];
        next.assign(static_cast<std::size_t>(fan_out), T{});
        for (int r = 0; r < fan_out; ++r) {
            T acc = params[off + static_cast<std::size_t>(fan_out) * fan_in + r];
            const std::size_t row = off + static_cast<std::size_t>(r) * fan_in;
            for (int c = 0; c < fan_in; ++c) acc += params[row + c] * cur[c];
            next[r] = acc;
        }
        off += static_cast<std::size_t>(fan_in + 1) * fan_out;
        const bool last = layer + 2 == dims.size();
        if (!last) {
            for (auto& x : next) x = tanh(x);
        }
        cur.swap(next);
    }
    output = std::move(cur);
}

}  // namespace detail

}  // namespace nsgapinn::ad

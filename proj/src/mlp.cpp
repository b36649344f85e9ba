#include "nsgapinn/mlp.hpp"

#include <cmath>

namespace nsgapinn::ad {

std::vector<int> MlpConfig::layer_dims() const {
    if (input_dim <= 0) throw ConfigError("input_dim", "must be positive");
    if (output_dim <= 0) throw ConfigError("output_dim", "must be positive");
    for (int h : hidden_layers)
        if (h <= 0) throw ConfigError("hidden_layers", "widths must be positive");
    if (n_extra < 0) throw ConfigError("n_extra", "must be non-negative");
    std::vector<int> dims;
    dims.reserve(hidden_layers.size() + 2);
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden_layers.begin(), hidden_layers.end());
    dims.push_back(output_dim);
    return dims;
}

std::size_t MlpConfig::parameter_count() const {
    const std::vector<int> dims = layer_dims();
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i)
        n += static_cast<std::size_t>(dims[i] + 1) * dims[i + 1];
    return n + static_cast<std::size_t>(n_extra);
}

std::size_t MlpConfig::extra_offset(int i) const {
    if (i < 0 || i >= n_extra) throw DimensionError("extra index", n_extra, i);
    return parameter_count() - n_extra + i;
}

std::vector<double> xavier_init(const MlpConfig& cfg, std::mt19937_64& rng,
                                std::span<const double> extra_init) {
    if (static_cast<int>(extra_init.size()) != cfg.n_extra)
        throw DimensionError("extra_init length", cfg.n_extra,
                             static_cast<int>(extra_init.size()));
    const std::vector<int> dims = cfg.layer_dims();
    std::vector<double> params(cfg.parameter_count(), 0.0);
    std::size_t off = 0;
    for (std::size_t layer = 0; layer + 1 < dims.size(); ++layer) {
        const int fan_in = dims[layer];
        const int fan_out = dims[layer + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> u(-limit, limit);
        const std::size_t n_w = static_cast<std::size_t>(fan_in) * fan_out;
        for (std::size_t i = 0; i < n_w; ++i) params[off + i] = u(rng);
        // biases stay zero
        off += n_w + static_cast<std::size_t>(fan_out);
    }
    for (int i = 0; i < cfg.n_extra; ++i) params[off + i] = extra_init[i];
    return params;
}

namespace {

void check_call(const MlpConfig& cfg, std::span<const double> params,
                std::span<const double> input) {
    if (params.size() != cfg.parameter_count())
        throw DimensionError("parameter vector length",
                             static_cast<long>(cfg.parameter_count()),
                             static_cast<long>(params.size()));
    if (static_cast<int>(input.size()) != cfg.input_dim)
        throw DimensionError("input length", cfg.input_dim,
                             static_cast<int>(input.size()));
}

}  // namespace

std::vector<double> forward(const MlpConfig& cfg, std::span<const double> params,
                            std::span<const double> input) {
    check_call(cfg, params, input);
    std::vector<double> in(input.begin(), input.end());
    std::vector<double> out;
    detail::mlp_eval(cfg, params, in, out);
    return out;
}

std::vector<Jet2> forward_jet(const MlpConfig& cfg, std::span<const double> params,
                              std::span<const double> input, int seed_index) {
    check_call(cfg, params, input);
    if (seed_index < 0 || seed_index >= cfg.input_dim)
        throw DimensionError("seed index", cfg.input_dim, seed_index);
    std::vector<Jet2> in(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) in[i] = Jet2(input[i]);
    in[static_cast<std::size_t>(seed_index)] = Jet2::variable(input[seed_index]);
    std::vector<Jet2> out;
    detail::mlp_eval(cfg, params, in, out);
    return out;
}

}  // namespace nsgapinn::ad

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace nsgapinn {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape/length mismatch between an expected and an actual size.
class DimensionError : public Error {
public:
    DimensionError(const std::string& what_name, long expected, long actual)
        : Error(what_name + ": expected length " + std::to_string(expected) +
                ", got " + std::to_string(actual)),
          expected(expected), actual(actual) {}
    long expected;
    long actual;
};

/// A computed quantity came out NaN or infinite.
class NonFiniteError : public Error {
public:
    NonFiniteError(const std::string& name, double value)
        : Error("non-finite value in " + name + ": " + std::to_string(value)),
          quantity(name), value(value) {}
    std::string quantity;
    double value;
};

/// Invalid run configuration; carries the offending field name.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : Error("config field '" + field + "': " + message), field(field) {}
    std::string field;
};

/// Roles for derived RNG streams, so that unrelated draws never share a stream.
enum class StreamKind : std::uint64_t {
    init = 1,        // network weight initialization
    tournament = 2,  // shuffles and coin flips in selection
    jitter = 3,      // divergence of duplicated mating-pool entries
    perturb = 4,     // parameter perturbation in the gradient-free mode
    sampling = 5,    // problem sample sets
    noise = 6,       // measurement noise on data values
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Derive an independent seed from (master, label, generation, kind).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t label,
                                 std::uint64_t generation, StreamKind kind) {
    std::uint64_t h = detail::splitmix64(master);
    h = detail::splitmix64(h ^ label);
    h = detail::splitmix64(h ^ generation);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(kind));
    return h;
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t label,
                                   std::uint64_t generation, StreamKind kind) {
    return std::mt19937_64(derive_seed(master, label, generation, kind));
}

}  // namespace nsgapinn

#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nsgapinn/nsga.hpp"
#include "nsgapinn/trainer.hpp"

namespace nsgapinn::cli {

/// File-system failure with the offending path; missing separates
/// file-not-found from other I/O errors (they map to different exit codes).
class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& message, bool missing_file)
        : Error(path + ": " + message), path(path), missing(missing_file) {}
    const std::string path;
    const bool missing;
};

/// 17 significant digits, enough for 64-bit reals to round-trip exactly.
std::string format_real(double v);

/// One row per generation, columns
/// gen,min_f1,min_f2,min_f3,min_total,survival_rate,front1_size.
/// An empty record list yields the header line only.
std::string generations_csv(std::span<const trainer::GenerationRecord> records);

/// Parses generations_csv output. Only the serialized fields are
/// recovered: objective minima, total minimum, survival rate and the first
/// front size.
std::vector<trainer::GenerationRecord> parse_generations_csv(const std::string& text);

struct MethodLosses {
    std::string method;  // e.g. "nsga_pinn"
    std::array<std::string, 3> names;
    std::array<double, 3> values;
};

/// {"<method>": {"<f1 name>": v1, ..., "total": v1+v2+v3}, ...}
std::string final_losses_json(std::span<const MethodLosses> methods);

/// Population checkpoint; values round-trip exactly.
std::string population_to_json(std::span<const nsga::Individual> population);
std::vector<nsga::Individual> population_from_json(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace nsgapinn::cli

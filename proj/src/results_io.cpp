#include "nsgapinn/results_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nsgapinn::cli {

namespace {

const char* kGenerationsHeader =
    "gen,min_f1,min_f2,min_f3,min_total,survival_rate,front1_size";

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_real(const std::string& cell, const char* what) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
        throw Error(std::string("generations.csv: bad ") + what + " value '" +
                    cell + "'");
    return v;
}

long parse_integer(const std::string& cell, const char* what) {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(cell.c_str(), &end, 10);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
        throw Error(std::string("generations.csv: bad ") + what + " value '" +
                    cell + "'");
    return v;
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string generations_csv(std::span<const trainer::GenerationRecord> records) {
    std::string out = kGenerationsHeader;
    out += '\n';
    for (const auto& rec : records) {
        if (rec.min_objectives.size() != 3)
            throw DimensionError("generations_csv: objective count", 3,
                                 static_cast<long>(rec.min_objectives.size()));
        out += std::to_string(rec.generation);
        for (double v : rec.min_objectives) {
            out += ',';
            out += format_real(v);
        }
        out += ',';
        out += format_real(rec.min_total);
        out += ',';
        out += format_real(rec.survival_rate);
        out += ',';
        out += std::to_string(rec.front_sizes.empty() ? 0 : rec.front_sizes[0]);
        out += '\n';
    }
    return out;
}

std::vector<trainer::GenerationRecord> parse_generations_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kGenerationsHeader)
        throw Error("generations.csv: unexpected header '" + line + "'");
    std::vector<trainer::GenerationRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 7)
            throw Error("generations.csv: expected 7 columns, got " +
                        std::to_string(cells.size()));
        trainer::GenerationRecord rec;
        rec.generation = static_cast<int>(parse_integer(cells[0], "gen"));
        rec.min_objectives = {parse_real(cells[1], "min_f1"),
                              parse_real(cells[2], "min_f2"),
                              parse_real(cells[3], "min_f3")};
        rec.min_total = parse_real(cells[4], "min_total");
        rec.survival_rate = parse_real(cells[5], "survival_rate");
        rec.front_sizes = {
            static_cast<std::size_t>(parse_integer(cells[6], "front1_size"))};
        records.push_back(std::move(rec));
    }
    return records;
}

std::string final_losses_json(std::span<const MethodLosses> methods) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& m : methods) {
        nlohmann::json entry;
        double total = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            entry[m.names[i]] = m.values[i];
            total += m.values[i];
        }
        entry["total"] = total;
        j[m.method] = std::move(entry);
    }
    return j.dump(2) + "\n";
}

std::string population_to_json(std::span<const nsga::Individual> population) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& ind : population) {
        nlohmann::json j;
        j["label"] = ind.label;
        j["params"] = ind.params;
        j["objectives"] = ind.objectives;
        arr.push_back(std::move(j));
    }
    nlohmann::json root;
    root["individuals"] = std::move(arr);
    return root.dump() + "\n";
}

std::vector<nsga::Individual> population_from_json(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
        std::vector<nsga::Individual> out;
        for (const auto& j : root.at("individuals")) {
            nsga::Individual ind;
            ind.label = j.at("label").get<std::uint64_t>();
            ind.params = j.at("params").get<std::vector<double>>();
            ind.objectives = j.at("objectives").get<std::vector<double>>();
            out.push_back(std::move(ind));
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("population checkpoint: ") + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing", false);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError(path.string(), "write failed", false);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec))
        throw IoError(path.string(), "no such file", true);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading", false);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError(path.string(), "read failed", false);
    return buf.str();
}

}  // namespace nsgapinn::cli

// Python surface over the training pipeline. Configs cross the boundary as
// JSON (dict or string); results come back as plain dicts and lists so the
// module has no dependency beyond the interpreter itself.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsgapinn/experiments.hpp"
#include "nsgapinn/nsga.hpp"
#include "nsgapinn/problem.hpp"
#include "nsgapinn/trainer.hpp"

namespace py = pybind11;
namespace ns = nsgapinn::nsga;
namespace tr = nsgapinn::trainer;
namespace cli = nsgapinn::cli;
namespace pr = nsgapinn::problems;

namespace {

nlohmann::json json_in(const py::object& obj) {
    if (py::isinstance<py::str>(obj))
        return nlohmann::json::parse(obj.cast<std::string>());
    const auto dumps = py::module_::import("json").attr("dumps");
    return nlohmann::json::parse(dumps(obj).cast<std::string>());
}

py::object json_out(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(py::str(j.dump()));
}

std::vector<ns::Individual> as_population(
    const std::vector<std::vector<double>>& objectives) {
    std::vector<ns::Individual> pop(objectives.size());
    for (std::size_t i = 0; i < objectives.size(); ++i) {
        pop[i].label = i;
        pop[i].objectives = objectives[i];
    }
    return pop;
}

tr::RunConfig config_from(const py::object& config,
                          std::optional<std::uint64_t> seed,
                          std::optional<std::string> mode) {
    auto cfg = cli::build_experiment(cli::resolve_config_json(json_in(config))).base;
    if (seed) cfg.master_seed = *seed;
    if (mode) cfg.mode = tr::mode_from_string(*mode);
    return cfg;
}

py::dict individual_dict(const ns::Individual& ind) {
    py::dict d;
    d["label"] = ind.label;
    d["params"] = ind.params;
    d["objectives"] = ind.objectives;
    d["total"] = ind.total();
    return d;
}

py::dict run_impl(const py::object& config, std::optional<std::uint64_t> seed,
                  std::optional<std::string> mode) {
    const auto cfg = config_from(config, std::move(seed), std::move(mode));
    tr::RunResult res;
    {
        py::gil_scoped_release release;
        res = tr::run(cfg);
    }
    py::list records;
    for (const auto& r : res.records) {
        py::dict d;
        d["generation"] = r.generation;
        d["min_objectives"] = r.min_objectives;
        d["mean_objectives"] = r.mean_objectives;
        d["min_total"] = r.min_total;
        d["survival_rate"] = r.survival_rate;
        d["front_sizes"] = r.front_sizes;
        d["adam_steps"] = r.adam_steps;
        records.append(d);
    }
    py::list population;
    for (const auto& ind : res.population) population.append(individual_dict(ind));
    py::dict out;
    out["best"] = individual_dict(res.best);
    out["records"] = records;
    out["population"] = population;
    out["total_adam_steps"] = res.total_adam_steps;
    return out;
}

py::dict evaluate_impl(const py::object& config,
                       const std::vector<double>& params) {
    const auto cfg = config_from(config, std::nullopt, std::nullopt);
    auto evaluator = pr::make_evaluator(cfg.problem, cfg.network());
    const auto obj = evaluator.evaluate(params);
    py::dict out;
    for (const auto& c : obj.components) out[py::str(c.name)] = c.value;
    out["total"] = obj.total();
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "multi-objective evolutionary training for physics-informed "
              "networks";
    m.attr("__version__") = "0.1.0";

    m.def("resolve_config",
          [](const py::object& config) {
              return json_out(cli::resolve_config_json(json_in(config)));
          },
          py::arg("config"),
          "Overlay a user config (dict or JSON string) onto the experiment "
          "defaults; rejects unknown keys.");

    m.def("run", &run_impl, py::arg("config"), py::arg("seed") = std::nullopt,
          py::arg("mode") = std::nullopt,
          "Execute one training run for the given config; returns best "
          "individual, per-generation records and the final population.");

    m.def("evaluate", &evaluate_impl, py::arg("config"), py::arg("params"),
          "Loss components of one parameter vector under the config's "
          "problem and network.");

    m.def("initial_population",
          [](const py::object& config, std::optional<std::uint64_t> seed) {
              auto cfg = config_from(config, std::move(seed), std::nullopt);
              py::list out;
              for (const auto& ind : tr::initial_population(cfg))
                  out.append(individual_dict(ind));
              return out;
          },
          py::arg("config"), py::arg("seed") = std::nullopt,
          "The deterministic starting population for a config.");

    m.def("non_dominated_sort",
          [](const std::vector<std::vector<double>>& objectives) {
              auto pop = as_population(objectives);
              return ns::non_dominated_sort(pop).fronts;
          },
          py::arg("objectives"),
          "Pareto fronts (lists of row indices, best front first) of a "
          "matrix of objective rows; all objectives minimized.");

    m.def("crowding_distance",
          [](const std::vector<std::vector<double>>& objectives) {
              auto front = as_population(objectives);
              ns::crowding_distance(front);
              std::vector<double> out(front.size());
              for (std::size_t i = 0; i < front.size(); ++i)
                  out[i] = front[i].crowding;
              return out;
          },
          py::arg("objectives"),
          "Crowding distances of the rows of one front.");

    m.def("environmental_select",
          [](const std::vector<std::vector<double>>& objectives, std::size_t n) {
              const auto pop = as_population(objectives);
              const auto survivors = ns::environmental_select(pop, n);
              std::vector<std::uint64_t> labels;
              for (const auto& s : survivors) labels.push_back(s.label);
              std::sort(labels.begin(), labels.end());
              return labels;
          },
          py::arg("objectives"), py::arg("n"),
          "Row indices (ascending) of the n survivors of elitist selection "
          "over a merged population of exactly 2n rows.");
}

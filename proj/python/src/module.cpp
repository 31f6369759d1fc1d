#include "gpass/judge.hpp"
#include "gpass/metrics.hpp"
#include "gpass/report.hpp"
#include "gpass/simulation.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;

namespace {

gpass::Language language(const std::string& s) {
  const auto lang = gpass::parse_language(s);
  if (!lang) throw py::value_error("language must be 'en' or 'cn'");
  return *lang;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stability-aware pass metrics for repeated LLM generations";

  m.def("pass_at_k", &gpass::pass_at_k, py::arg("n"), py::arg("c"), py::arg("k"));
  m.def("g_pass_at_k", &gpass::g_pass_at_k, py::arg("n"), py::arg("c"), py::arg("k"));
  m.def("g_pass_at_k_tau", &gpass::g_pass_at_k_tau, py::arg("n"), py::arg("c"), py::arg("k"), py::arg("tau"));
  m.def("mg_pass_at_k", &gpass::mg_pass_at_k, py::arg("n"), py::arg("c"), py::arg("k"));
  m.def("threshold_count", &gpass::threshold_count, py::arg("tau"), py::arg("k"));

  m.def(
      "compute_report",
      [](const std::vector<std::tuple<std::string, std::int64_t, std::int64_t>>& tallies,
         std::vector<std::int64_t> k_values, std::vector<double> tau_values, bool include_pass_at_k,
         bool include_mg_pass, unsigned threads) {
        gpass::TallySet set;
        for (const auto& [id, n, c] : tallies) set.push_back({id, n, c});
        gpass::MetricGrid grid{std::move(k_values), std::move(tau_values), include_pass_at_k, include_mg_pass};
        gpass::MetricReport report;
        {
          py::gil_scoped_release release;
          report = gpass::compute_report(set, grid, {threads, "-"});
        }
        py::dict aggregate;
        for (std::size_t i = 0; i < report.keys.size(); ++i) aggregate[py::str(report.keys[i].label())] = report.aggregate[i];
        py::list rows;
        for (const auto& q : report.per_question) {
          py::dict values;
          for (std::size_t i = 0; i < report.keys.size(); ++i) values[py::str(report.keys[i].label())] = q.values[i];
          rows.append(py::dict(py::arg("question_id") = q.question_id, py::arg("n") = q.n, py::arg("c") = q.c,
                               py::arg("values") = values));
        }
        return py::dict(py::arg("aggregate") = aggregate, py::arg("per_question") = rows,
                        py::arg("warnings") = report.warnings);
      },
      py::arg("tallies"), py::arg("k_values") = std::vector<std::int64_t>{4, 8, 16},
      py::arg("tau_values") = std::vector<double>{0.25, 0.5, 0.75, 1.0}, py::arg("include_pass_at_k") = true,
      py::arg("include_mg_pass") = true, py::arg("threads") = 1u,
      "Metrics for (question_id, n, c) tallies; values keyed by column label.");

  m.def("true_expected_g_pass", &gpass::true_expected_g_pass, py::arg("p_star"), py::arg("n"), py::arg("k"),
        py::arg("tau"));
  m.def("true_estimator_std", &gpass::true_estimator_std, py::arg("p_star"), py::arg("n"), py::arg("k"),
        py::arg("tau"));
  m.def(
      "unbiasedness_study",
      [](double p_star, std::vector<std::int64_t> n_values, std::int64_t k, std::vector<double> tau_values,
         std::int64_t trials, std::uint64_t seed, unsigned threads) {
        gpass::SimConfig cfg;
        cfg.p_star = p_star;
        cfg.n_values = std::move(n_values);
        cfg.k = k;
        cfg.tau_values = std::move(tau_values);
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.threads = threads;
        gpass::SimResult r;
        {
          py::gil_scoped_release release;
          r = gpass::run_unbiasedness_study(cfg);
        }
        py::list cells;
        for (const auto& c : r.cells) {
          cells.append(py::dict(py::arg("n") = c.n, py::arg("tau") = c.tau, py::arg("mean") = c.estimator_mean,
                                py::arg("std") = c.estimator_std, py::arg("true_value") = c.true_value,
                                py::arg("trials") = c.trials_used));
        }
        return cells;
      },
      py::arg("p_star") = 0.4, py::arg("n_values") = std::vector<std::int64_t>{16, 32, 48, 128, 240},
      py::arg("k") = 16, py::arg("tau_values") = std::vector<double>{0.25, 0.5, 0.75, 1.0},
      py::arg("trials") = 20000, py::arg("seed") = 0, py::arg("threads") = 1u);

  m.def("drop_percentage", &gpass::drop_percentage, py::arg("baseline"), py::arg("degraded"));
  m.def("format_percent", py::overload_cast<std::optional<double>>(&gpass::format_percent), py::arg("percent"));
  m.def(
      "tau_slope",
      [](const std::vector<std::pair<double, double>>& points) { return gpass::tau_slope(points).slope; },
      py::arg("points"), "Least-squares slope of value against tau for (tau, value) pairs.");

  m.def(
      "render_judge_prompt",
      [](const std::string& question, const std::string& reference, const std::string& candidate,
         const std::string& lang) { return gpass::render_judge_prompt(question, reference, candidate, language(lang)); },
      py::arg("question"), py::arg("reference_answer"), py::arg("candidate_answer"), py::arg("language") = "en");
  m.def(
      "parse_verdict", [](const std::string& raw) { return gpass::to_string(gpass::parse_verdict(raw)); },
      py::arg("raw_text"), "'yes', 'no' or 'unparseable'.");

  m.attr("__version__") = GPASS_VERSION;
}

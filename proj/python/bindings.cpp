#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <stdexcept>

#include "elicit/api.hpp"
#include "elicit/cooke.hpp"
#include "elicit/error.hpp"
#include "elicit/serialize.hpp"
#include "elicit/store.hpp"

namespace py = pybind11;
using namespace elicit;
using json::Json;

namespace {

// Engine errors cross into Python as their JSON error document.
struct EngineFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
auto engine(F f) {
  try {
    return f();
  } catch (const Error& e) {
    throw EngineFailure(json::render(api::error_json(e)));
  } catch (const nlohmann::json::exception& e) {
    throw EngineFailure(json::render(api::error_json(ErrorCode::validation, e.what())));
  }
}

// JSON text in, JSON text out; the Python layer does the (de)serialization.
std::string call(Json (*f)(const Json&), const std::string& body) {
  return engine([&] { return json::render(f(json::parse(body))); });
}

store::SeedDataset dataset(const std::string& csv, const std::string& id) {
  std::istringstream in(csv);
  return store::load_seed_csv(in, id);
}

std::string fold_options(const std::string& options) { return options.empty() ? "{}" : options; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<EngineFailure>(m, "EngineError", PyExc_ValueError);

  m.def("fit", [](const std::string& body) { return call(api::fit, body); });
  m.def("pool", [](const std::string& body) { return call(api::pool, body); });
  m.def("scores", [](const std::string& body) { return call(api::scores, body); });
  m.def("correlations", [](const std::string& body) { return call(api::correlations, body); });

  m.def("cm_weights", [](const std::string& csv, const std::string& id, const std::string& options) {
    return engine([&] {
      return json::render(api::cm_weights(dataset(csv, id), api::cv_options(json::parse(fold_options(options)))));
    });
  });
  m.def(
      "crossval",
      [](const std::string& csv, const std::string& id, const std::string& options, const std::string& consensus) {
        return engine([&] {
          std::vector<ElicitedJudgment> shelf;
          if (!consensus.empty()) {
            std::istringstream in(consensus);
            shelf = store::load_consensus_csv(in);
          }
          return json::render(api::crossval(dataset(csv, id), api::cv_options(json::parse(fold_options(options))),
                                            consensus.empty() ? nullptr : &shelf));
        });
      },
      py::arg("csv"), py::arg("dataset_id"), py::arg("options") = "", py::arg("consensus") = "");

  m.def("dataset", [](const std::string& csv, const std::string& id, bool facilitator) {
    return engine([&] {
      return json::render(
          store::to_json(dataset(csv, id), facilitator ? store::View::facilitator : store::View::expert));
    });
  });

  m.def("checks", [](const std::string& params, int total, int draws, double level, std::uint64_t seed) {
    return engine([&] {
      return json::render(api::checks(json::trial_parameters_from_json(json::parse(params)),
                                      api::CheckOptions{total, draws, level, seed}));
    });
  });

  m.def("relative_entropy", [](const std::vector<double>& s, const std::vector<double>& p) {
    return engine([&] { return cooke::relative_entropy_statistic(s, p); });
  });
  m.def(
      "calibration_score",
      [](double relent, int q, int r) { return engine([&] { return cooke::calibration_score(relent, q, r); }); },
      py::arg("relent"), py::arg("q"), py::arg("r") = cooke::kRanges);

  m.def("bundle", [](const std::vector<std::pair<std::string, std::string>>& entries) {
    return py::bytes(engine([&] { return store::bundle_bytes(entries); }));
  });
}

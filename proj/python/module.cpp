#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "reception/error.hpp"
#include "reception/evaluator.hpp"
#include "reception/mock_backend.hpp"
#include "reception/preview.hpp"
#include "reception/protocol.hpp"
#include "reception/reports.hpp"
#include "reception/special_functions.hpp"
#include "reception/statlab.hpp"
#include "reception/text.hpp"

namespace py = pybind11;
using namespace reception;

namespace {

stats::BinCounts counts_from(const std::vector<std::size_t>& c) {
  if (c.size() != 3) throw ValidationError("bin counts need three entries (negative, neutral, positive)");
  return {c[0], c[1], c[2]};
}

}  // namespace

PYBIND11_MODULE(_reception, m) {
  m.doc() = "Response-reception evaluation core";

  static py::exception<Error> base(m, "ReceptionError", PyExc_RuntimeError);
  static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
  static py::exception<CapabilityError> capability(m, "CapabilityError", base.ptr());
  static py::exception<TransportError> transport(m, "TransportError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      validation(e.what());
    } catch (const ParseError& e) {
      validation(e.what());
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const CapabilityError& e) {
      capability(e.what());
    } catch (const TransportError& e) {
      transport(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  m.def("clean_text", &text::clean_text, py::arg("raw"), "Strip links and emoji, collapse whitespace.");
  m.def("sentiment_from_probs", &protocol::sentiment_from_probs, py::arg("p_neg"), py::arg("p_neu"), py::arg("p_pos"));
  m.def(
      "bin_sentiment", [](double s) { return std::string(stats::to_string(stats::bin_sentiment(s))); }, py::arg("s"));

  m.def("model_pct_difference", &eval::model_pct_difference, py::arg("model"), py::arg("reference"),
        py::arg("random"), "100 * (model - random) / (reference - random); None when undefined.");

  m.def(
      "rec_curve",
      [](const std::vector<double>& errors, double e_max) {
        const auto c = stats::rec_curve(errors, e_max);
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : c.points) pts.emplace_back(p.tolerance, p.accuracy);
        return py::make_tuple(pts, c.auc);
      },
      py::arg("errors"), py::arg("e_max"), "Returns ([(tolerance, accuracy), ...], auc).");
  m.def(
      "paired_t_test",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto r = stats::paired_t_test(a, b);
        py::dict d;
        d["mean_diff"] = r.mean_diff;
        d["t"] = r.t;
        d["df"] = r.df;
        d["p"] = r.p;
        return d;
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "pearson",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto r = stats::pearson(a, b);
        return py::make_tuple(r.r, r.p);
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "chi_square",
      [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
        const auto r = stats::chi_square_homogeneity(counts_from(a), counts_from(b));
        return py::make_tuple(r.statistic, r.df, r.p);
      },
      py::arg("a"), py::arg("b"), "2x3 homogeneity test on (negative, neutral, positive) counts.");
  m.def("student_t_cdf", &stats::student_t_cdf, py::arg("t"), py::arg("df"));
  m.def("student_t_two_tailed", &stats::student_t_two_tailed, py::arg("t"), py::arg("df"));
  m.def("chi_square_cdf", &stats::chi_square_cdf, py::arg("x"), py::arg("df"));
  m.def("chi_square_sf", &stats::chi_square_sf, py::arg("x"), py::arg("df"));

  m.def("format_mean_sd", &preview::format_mean_sd, py::arg("mean"), py::arg("sd"));
  m.def("format_delta", &preview::format_delta, py::arg("delta"));

  m.def(
      "mock_sentiment",
      [](const std::vector<std::string>& texts) {
        const protocol::MockBackend mock;
        std::vector<double> out;
        for (const auto& s : mock.sentiment(texts)) out.push_back(s.s);
        return out;
      },
      py::arg("texts"), "Sentiment s of each text under the deterministic mock backend.");
  m.def(
      "mock_embed",
      [](const std::string& text) { return protocol::MockBackend().embed_one(text); }, py::arg("text"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the reception command line in-process. Returns (exit_code, stdout, stderr).");
}

// Python bindings for the check-in core. Values cross the boundary as plain
// dicts, lists and strings; enums use their wire names.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nora/behavior.h"
#include "nora/config.h"
#include "nora/empathy.h"
#include "nora/expression.h"
#include "nora/nlu.h"
#include "nora/session.h"
#include "nora/stats.h"
#include "nora/wire.h"

namespace py = pybind11;
using namespace nora;

namespace {

template <class T>
py::object opt(const std::optional<T>& v) {
  return v ? py::cast(*v) : py::none();
}

Phase phase_arg(const std::string& name) {
  const auto p = parse_phase(name);
  if (!p) throw py::value_error("unknown phase '" + name + "'");
  return *p;
}

ExpressionClass expression_arg(const std::string& name) {
  const auto e = parse_expression(name);
  if (!e) throw py::value_error("unknown expression '" + name + "'");
  return *e;
}

py::dict nlu_dict(const NluResult& r) {
  py::dict slots;
  slots["temperature_c"] = opt(r.slots.temperature_c);
  slots["polarity"] = r.slots.polarity ? py::cast(std::string(to_string(*r.slots.polarity)))
                                       : py::none();
  slots["profession"] = opt(r.slots.profession);
  slots["mood_word"] = opt(r.slots.mood_word);
  slots["activity"] =
      r.slots.activity ? py::cast(std::string(to_string(*r.slots.activity))) : py::none();
  py::dict d;
  d["intent"] = std::string(to_string(r.intent));
  d["slots"] = slots;
  d["confidence"] = r.confidence;
  d["utterance"] = r.utterance;
  return d;
}

py::dict scores_dict(const EmpathyScores& s) {
  py::dict d;
  d["sentiment"] = s.sentiment;
  d["stress"] = s.stress;
  d["emotion"] = std::string(to_string(s.emotion));
  return d;
}

std::string winner_name(stats::Winner w) {
  switch (w) {
    case stats::Winner::kA: return "a";
    case stats::Winner::kB: return "b";
    case stats::Winner::kTie: break;
  }
  return "tie";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Empathetic check-in dialogue core";

  auto base = py::register_exception<Error>(m, "NoraError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<InvalidConfig>(m, "InvalidConfig", base.ptr());
  py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());
  py::register_exception<MissingSlot>(m, "MissingSlot", base.ptr());
  py::register_exception<DuplicateSession>(m, "DuplicateSession", base.ptr());

  m.def(
      "understand",
      [](const std::string& text, const std::string& phase) {
        return nlu_dict(understand(text, phase_arg(phase)));
      },
      py::arg("text"), py::arg("phase"),
      "Intent and slots of a user utterance in the given dialogue phase.");

  m.def(
      "score_turn", [](const std::string& text) { return scores_dict(score_turn(text)); },
      py::arg("text"), "Lexicon sentiment, stress and emotion of a user utterance.");

  m.def(
      "predict_expression",
      [](const std::string& text, double sentiment, double stress, const std::string& emotion) {
        return std::string(to_string(
            predict_expression(text, {sentiment, stress, expression_arg(emotion)})));
      },
      py::arg("text"), py::arg("sentiment") = 0.0, py::arg("stress") = 0.0,
      py::arg("emotion") = "neutral",
      "Facial expression for a system utterance given the user's scores.");

  m.def(
      "sample_gaze",
      [](std::uint64_t seed, int n) {
        if (n < 0) throw py::value_error("n must be >= 0");
        Rng rng(seed);
        const BehaviorConfig cfg;
        std::vector<std::tuple<double, double, double>> out;
        out.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
          const GazePoint p = sample_gaze_point(rng, cfg);
          out.emplace_back(p.x, p.y, p.z);
        }
        return out;
      },
      py::arg("seed"), py::arg("n"),
      "n gaze targets (x, y, z) in meters, uniform over the hollow cylinder.");

  m.def(
      "select_gestures",
      [](std::uint64_t seed, int n) {
        if (n < 0) throw py::value_error("n must be >= 0");
        Rng rng(seed);
        const BehaviorConfig cfg;
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out.push_back(select_gesture(rng, cfg));
        return out;
      },
      py::arg("seed"), py::arg("n"), "n uniform gesture ids in [0, 4).");

  m.def("binomial_tail", &stats::binomial_tail, py::arg("n"), py::arg("k"),
        "P(X >= k) for X ~ Binomial(n, 1/2).");

  m.def(
      "binomial_tail_exact",
      [](int n, int k) {
        const auto t = stats::binomial_tail_exact(n, k);
        return py::make_tuple(py::int_(py::str(t.numerator)), t.log2_denominator);
      },
      py::arg("n"), py::arg("k"), "(numerator, log2 denominator) of P(X >= k).");

  m.def(
      "significance_table",
      [](const std::vector<std::tuple<std::string, int, int>>& tallies, double alpha) {
        std::vector<stats::PreferenceTally> in;
        for (const auto& [q, n, w] : tallies) in.push_back({q, n, w});
        py::list rows;
        for (const auto& r : stats::significance_table(in, alpha)) {
          py::dict d;
          d["question"] = r.question;
          d["winner"] = winner_name(r.winner);
          d["win_rate_pct"] = r.win_rate_pct;
          d["rate_a_pct"] = r.rate_a_pct;
          d["rate_b_pct"] = r.rate_b_pct;
          d["p_value"] = r.p_value;
          d["significant"] = r.significant;
          rows.append(d);
        }
        return rows;
      },
      py::arg("tallies"), py::arg("alpha") = 0.1,
      "One-sided sign test per (question, n, wins_a) tally.");

  m.def(
      "replay",
      [](const std::string& trace, std::uint64_t seed, std::int64_t tick_ms) {
        RuntimeConfig cfg;
        cfg.seed = seed;
        cfg.tick_ms = tick_ms;
        std::istringstream in(trace);
        const auto inbound = read_trace(in);
        Store store;
        SessionHost host(store, cfg);
        std::ostringstream out;
        write_trace(out, replay(inbound, host));
        return out.str();
      },
      py::arg("trace"), py::arg("seed") = 0, py::arg("tick_ms") = 50,
      "Runs an inbound trace against an in-memory store; returns the outbound trace.");
}

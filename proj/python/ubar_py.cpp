#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ubar/cli.hpp"
#include "ubar/corpus.hpp"
#include "ubar/delex.hpp"
#include "ubar/error.hpp"
#include "ubar/eval.hpp"
#include "ubar/normalize.hpp"
#include "ubar/spans.hpp"

namespace py = pybind11;
using namespace ubar;

namespace {

// Python side: {domain: {slot: value}}, insertion order kept.
using PyBelief = std::vector<std::pair<std::string, std::map<std::string, std::string>>>;
// {domain: {act: [slot, ...]}}
using PyAct = std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::vector<std::string>>>>>;

BeliefState to_belief(const py::dict& d) {
  BeliefState b;
  for (const auto& [domain, slots] : d) {
    for (const auto& [slot, value] : slots.cast<py::dict>()) {
      b.set(domain.cast<std::string>(), slot.cast<std::string>(), value.cast<std::string>());
    }
  }
  return b;
}

py::dict from_belief(const BeliefState& b) {
  py::dict out;
  for (const auto& d : b.domains()) {
    py::dict slots;
    for (const auto& [slot, value] : d.slots) slots[py::str(slot)] = value;
    out[py::str(d.name)] = slots;
  }
  return out;
}

ActFrame to_act(const py::dict& d) {
  ActFrame a;
  for (const auto& [domain, acts] : d) {
    for (const auto& [act, slots] : acts.cast<py::dict>()) {
      const std::string name = act.cast<std::string>();
      auto type = parse_act_type(name);
      if (!type) throw UnknownActType(name);
      a.add(domain.cast<std::string>(), *type);
      for (const auto& s : slots) a.add_slot(domain.cast<std::string>(), *type, s.cast<std::string>());
    }
  }
  return a;
}

py::dict from_act(const ActFrame& a) {
  py::dict out;
  for (const auto& d : a.domains()) {
    py::dict acts;
    for (const auto& act : d.acts) acts[py::str(std::string(act_name(act.type)))] = act.slots;
    out[py::str(d.name)] = acts;
  }
  return out;
}

Strictness strictness(bool strict) { return strict ? Strictness::kStrict : Strictness::kTolerant; }

Entity to_entity(const std::map<std::string, std::string>& m) { return Entity(m.begin(), m.end()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the ubar dialog toolkit";
  m.attr("REGISTRY_VERSION") = std::string(kRegistryVersion);

  // Translators run newest first, so the base class goes in first.
  auto& error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<DecoderError>(m, "DecoderError", error.ptr());

  m.def("registry", [] { return tokens::registry(); }, "Special tokens in registry order.");

  m.def("normalize_value", [](const std::string& domain, const std::string& slot, const std::string& raw,
                              const std::string& version) { return normalize_value(domain, slot, raw, version); },
        py::arg("domain"), py::arg("slot"), py::arg("value"), py::arg("version") = "2.0");

  m.def("encode_belief", [](const py::dict& b) { return encode_belief(to_belief(b)).str(); });
  m.def("parse_belief",
        [](const std::string& text, bool strict) {
          return from_belief(parse_belief(TokenSeq::from_text(text), strictness(strict)).value);
        },
        py::arg("text"), py::arg("strict") = true);
  m.def("encode_act", [](const py::dict& a) { return encode_act(to_act(a)).str(); });
  m.def("parse_act",
        [](const std::string& text, bool strict) {
          return from_act(parse_act(TokenSeq::from_text(text), strictness(strict)).value);
        },
        py::arg("text"), py::arg("strict") = true);

  m.def("delexicalize",
        [](const std::string& text, const py::dict& belief, const std::string& domain,
           const std::map<std::string, std::string>& entity) {
          std::vector<DomainEntity> es;
          if (!entity.empty()) es.push_back({domain, to_entity(entity)});
          return delexicalize(text, to_belief(belief), {}, es).text;
        },
        py::arg("text"), py::arg("belief") = py::dict(), py::arg("domain") = "",
        py::arg("entity") = std::map<std::string, std::string>{});
  m.def("lexicalize",
        [](const std::string& text, const std::map<std::string, std::string>& entity, const py::dict& belief,
           std::optional<std::string> booking_ref) {
          Entity e = to_entity(entity);
          return lexicalize(text, entity.empty() ? nullptr : &e, to_belief(belief), booking_ref).text;
        },
        py::arg("text"), py::arg("entity") = std::map<std::string, std::string>{},
        py::arg("belief") = py::dict(), py::arg("booking_ref") = py::none());

  m.def("bleu", &bleu, py::arg("candidates"), py::arg("references"));
  m.def("combined", &combined, py::arg("inform"), py::arg("success"), py::arg("bleu"));
  m.def("joint_goal_accuracy",
        [](const std::vector<py::dict>& pred, const std::vector<py::dict>& gold, const std::string& version) {
          std::vector<BeliefState> p;
          std::vector<BeliefState> g;
          for (const auto& b : pred) p.push_back(to_belief(b));
          for (const auto& b : gold) g.push_back(to_belief(b));
          return joint_goal_accuracy(p, g, version);
        },
        py::arg("pred"), py::arg("gold"), py::arg("version") = "2.0");

  m.def("corpus_summary",
        [](const std::string& path) {
          CorpusFormat f = detect_format(path);
          Corpus c = load_corpus(path, f);
          py::dict out;
          out["version"] = c.version;
          out["sessions"] = c.sessions.size();
          std::size_t turns = 0;
          for (const auto& s : c.sessions) turns += s.turns.size();
          out["turns"] = turns;
          out["violations"] = validate(c).violations.size();
          return out;
        },
        py::arg("path"));

  m.def("cli",
        [](const std::vector<std::string>& args, const std::string& input) {
          std::istringstream in(input);
          std::ostringstream out;
          std::ostringstream err;
          int code;
          {
            py::gil_scoped_release release;
            code = cli::main(args, in, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), py::arg("input") = "",
        "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}

#include "ubar/serialize.hpp"

#include "ubar/error.hpp"

namespace ubar::json {
namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string str(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where, "expected a string");
  return j.get<std::string>();
}

void check_domain(const std::string& d, bool allow_general) {
  if (allow_general ? !schema::is_act_domain(d) : !schema::is_domain(d)) throw UnknownDomain(d);
}

}  // namespace

Json belief_to_json(const BeliefState& b) {
  Json arr = Json::array();
  for (const auto& d : b.domains()) {
    Json slots = Json::object();
    for (const auto& [k, v] : d.slots) slots[k] = v;
    arr.push_back(Json{{"domain", d.name}, {"slots", std::move(slots)}});
  }
  return arr;
}

Json act_to_json(const ActFrame& a) {
  Json arr = Json::array();
  for (const auto& d : a.domains()) {
    Json acts = Json::array();
    for (const auto& act : d.acts) {
      acts.push_back(Json{{"act", std::string(act_name(act.type))}, {"slots", act.slots}});
    }
    arr.push_back(Json{{"domain", d.name}, {"acts", std::move(acts)}});
  }
  return arr;
}

Json goal_to_json(const Goal& g) {
  Json arr = Json::array();
  for (const auto& d : g.domains) {
    Json inf = Json::object();
    for (const auto& [k, v] : d.informable) inf[k] = v;
    arr.push_back(Json{{"domain", d.domain},
                       {"informable", std::move(inf)},
                       {"requestable", d.requestable},
                       {"book", d.book}});
  }
  return arr;
}

Json turn_to_json(const Turn& t, std::size_t index) {
  Json j = Json::object();
  j["turn"] = index;
  j["user"] = t.user;
  j["belief"] = belief_to_json(t.belief);
  j["db_match"] = t.db_match ? Json(*t.db_match) : Json(nullptr);
  j["act"] = act_to_json(t.act);
  j["response_delex"] = t.response_delex;
  j["response_lex"] = t.response_lex;
  return j;
}

Json session_to_json(const DialogSession& s) {
  Json turns = Json::array();
  for (std::size_t i = 0; i < s.turns.size(); ++i) turns.push_back(turn_to_json(s.turns[i], i));
  return Json{{"session_id", s.session_id},
              {"split", s.split},
              {"goal", goal_to_json(s.goal)},
              {"turns", std::move(turns)}};
}

Json ontology_to_json(const Ontology& o) {
  Json j = Json::object();
  for (const auto& [domain, slots] : o) {
    Json js = Json::object();
    for (const auto& [slot, values] : slots) js[slot] = Json(std::vector<std::string>(values.begin(), values.end()));
    j[domain] = std::move(js);
  }
  return j;
}

Json corpus_to_json(const Corpus& c) {
  Json sessions = Json::array();
  for (const auto& s : c.sessions) sessions.push_back(session_to_json(s));
  return Json{{"version", c.version},
              {"ontology", ontology_to_json(c.ontology)},
              {"sessions", std::move(sessions)}};
}

BeliefState belief_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "belief must be an array");
  BeliefState b;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string w = where + "[" + std::to_string(i) + "]";
    std::string domain = str(field(j[i], "domain", w), w + ".domain");
    check_domain(domain, false);
    const Json& slots = field(j[i], "slots", w);
    if (!slots.is_object() || slots.empty()) throw ParseError(w, "slots must be a non-empty object");
    for (const auto& [k, v] : slots.items()) b.set(domain, k, str(v, w + "." + k));
  }
  return b;
}

ActFrame act_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "act must be an array");
  ActFrame a;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string w = where + "[" + std::to_string(i) + "]";
    std::string domain = str(field(j[i], "domain", w), w + ".domain");
    check_domain(domain, true);
    const Json& acts = field(j[i], "acts", w);
    if (!acts.is_array()) throw ParseError(w, "acts must be an array");
    for (std::size_t k = 0; k < acts.size(); ++k) {
      std::string wa = w + ".acts[" + std::to_string(k) + "]";
      std::string name = str(field(acts[k], "act", wa), wa + ".act");
      auto type = parse_act_type(name);
      if (!type) throw UnknownActType(name);
      a.add(domain, *type);
      const Json& slots = field(acts[k], "slots", wa);
      if (!slots.is_array()) throw ParseError(wa, "slots must be an array");
      for (const auto& s : slots) a.add_slot(domain, *type, str(s, wa + ".slots"));
    }
  }
  return a;
}

Goal goal_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "goal must be an array");
  Goal g;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string w = where + "[" + std::to_string(i) + "]";
    GoalDomain d;
    d.domain = str(field(j[i], "domain", w), w + ".domain");
    check_domain(d.domain, false);
    for (const auto& [k, v] : field(j[i], "informable", w).items()) d.informable[k] = str(v, w + "." + k);
    for (const auto& r : field(j[i], "requestable", w)) d.requestable.push_back(str(r, w + ".requestable"));
    const Json& book = field(j[i], "book", w);
    if (!book.is_boolean()) throw ParseError(w + ".book", "expected a boolean");
    d.book = book.get<bool>();
    g.domains.push_back(std::move(d));
  }
  return g;
}

Turn turn_from_json(const Json& j, const std::string& where) {
  Turn t;
  t.user = str(field(j, "user", where), where + ".user");
  t.belief = belief_from_json(field(j, "belief", where), where + ".belief");
  const Json& db = field(j, "db_match", where);
  if (!db.is_null()) {
    if (!db.is_number_unsigned()) throw ParseError(where + ".db_match", "expected a nonnegative integer");
    t.db_match = db.get<std::size_t>();
  }
  t.act = act_from_json(field(j, "act", where), where + ".act");
  t.response_delex = str(field(j, "response_delex", where), where + ".response_delex");
  t.response_lex = str(field(j, "response_lex", where), where + ".response_lex");
  return t;
}

DialogSession session_from_json(const Json& j, const std::string& where) {
  DialogSession s;
  s.session_id = str(field(j, "session_id", where), where + ".session_id");
  std::string w = where + "(" + s.session_id + ")";
  if (j.contains("split")) s.split = str(j["split"], w + ".split");
  if (s.split != "train" && s.split != "dev" && s.split != "test") {
    throw ParseError(w + ".split", "expected train, dev or test");
  }
  s.goal = goal_from_json(field(j, "goal", w), w + ".goal");
  const Json& turns = field(j, "turns", w);
  if (!turns.is_array() || turns.empty()) throw ParseError(w + ".turns", "expected a non-empty array");
  for (std::size_t i = 0; i < turns.size(); ++i) {
    std::string wt = w + ".turns[" + std::to_string(i) + "]";
    if (turns[i].contains("turn") && turns[i]["turn"] != i) {
      throw ParseError(wt, "turn indices must be contiguous from 0");
    }
    s.turns.push_back(turn_from_json(turns[i], wt));
  }
  return s;
}

Ontology ontology_from_json(const Json& j, const std::string& where) {
  Ontology o;
  if (j.is_null()) return o;
  if (!j.is_object()) throw ParseError(where, "ontology must be an object");
  for (const auto& [domain, slots] : j.items()) {
    check_domain(domain, false);
    for (const auto& [slot, values] : slots.items()) {
      auto& set = o[domain][slot];
      for (const auto& v : values) set.insert(str(v, where + "." + domain + "." + slot));
    }
  }
  return o;
}

Corpus corpus_from_json(const Json& j, const std::string& where) {
  Corpus c;
  if (!j.is_object()) throw ParseError(where, "expected an object");
  if (j.contains("version")) c.version = str(j["version"], where + ".version");
  if (j.contains("ontology")) c.ontology = ontology_from_json(j["ontology"], where + ".ontology");
  const Json& sessions = field(j, "sessions", where);
  if (!sessions.is_array()) throw ParseError(where + ".sessions", "expected an array");
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    c.sessions.push_back(session_from_json(sessions[i], where + ".sessions[" + std::to_string(i) + "]"));
  }
  return c;
}

}  // namespace ubar::json

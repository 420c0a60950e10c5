#include "ubar/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "raw_names.hpp"
#include "ubar/delex.hpp"
#include "ubar/error.hpp"
#include "ubar/normalize.hpp"
#include "ubar/serialize.hpp"
#include "ubar/tokens.hpp"

namespace ubar {
namespace fs = std::filesystem;
using json::Json;

namespace {

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + " (byte " + std::to_string(e.byte) + ")", e.what());
  }
}

void check_unique_ids(const Corpus& c) {
  std::set<std::string> seen;
  for (const auto& s : c.sessions) {
    if (!seen.insert(s.session_id).second) throw DataError("duplicate session_id '" + s.session_id + "'");
  }
}

// ---- raw MultiWOZ adapter ---------------------------------------------------

std::set<std::string> read_id_list(const fs::path& dir, const std::string& stem) {
  std::set<std::string> ids;
  auto strip = [](std::string id) {
    if (id.size() > 5 && id.ends_with(".json")) id.resize(id.size() - 5);
    return id;
  };
  if (fs::exists(dir / (stem + ".json"))) {
    for (const auto& id : read_json(dir / (stem + ".json"))) ids.insert(strip(id.get<std::string>()));
  } else if (fs::exists(dir / (stem + ".txt"))) {
    std::ifstream in(dir / (stem + ".txt"));
    std::string line;
    while (std::getline(in, line)) {
      auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      ids.insert(strip(line.substr(b, line.find_last_not_of(" \t\r") - b + 1)));
    }
  }
  return ids;
}

struct RawAct {
  std::string domain;  // lowercased, may be "booking"
  ActType type;
  std::vector<std::pair<std::string, std::string>> slot_values;
};

std::vector<RawAct> read_raw_acts(const Json& acts, const std::string& where) {
  std::vector<RawAct> out;
  if (!acts.is_object()) return out;  // "No Annotation"
  for (const auto& [key, pairs] : acts.items()) {
    auto dash = key.find('-');
    if (dash == std::string::npos) throw ParseError(where, "malformed act key '" + key + "'");
    RawAct a;
    a.domain = normalize_text(key.substr(0, dash));
    std::string act = normalize_text(key.substr(dash + 1));
    auto type = parse_act_type(act);
    if (!type) throw UnknownActType(act);
    a.type = *type;
    if (a.domain != "booking" && !schema::is_act_domain(a.domain)) throw UnknownDomain(a.domain);
    for (const auto& p : pairs) {
      if (!p.is_array() || p.size() < 2) continue;
      std::string slot = detail::canonical_slot_name(p[0].get<std::string>(), true);
      a.slot_values.emplace_back(slot, p[1].is_string() ? p[1].get<std::string>() : p[1].dump());
    }
    out.push_back(std::move(a));
  }
  return out;
}

Goal read_raw_goal(const Json& goal, const Normalizer& norm, const std::string& where) {
  Goal g;
  if (!goal.is_object()) return g;
  for (auto domain : schema::domains()) {
    auto it = goal.find(std::string(domain));
    if (it == goal.end() || !it->is_object() || it->empty()) continue;
    GoalDomain d;
    d.domain = std::string(domain);
    auto take = [&](const Json& obj) {
      if (!obj.is_object()) return;
      for (const auto& [k, v] : obj.items()) {
        if (!v.is_string()) continue;
        std::string slot = detail::canonical_slot_name(k);
        if (!schema::is_belief_slot(domain, slot)) continue;
        std::string value = norm.normalize(domain, slot, v.get<std::string>());
        if (!value.empty()) d.informable[slot] = value;
      }
    };
    if (it->contains("info")) take((*it)["info"]);
    if (it->contains("book")) {
      const Json& book = (*it)["book"];
      d.book = book.is_object() && !book.empty();
      take(book);
    }
    if (it->contains("reqt")) {
      for (const auto& r : (*it)["reqt"]) {
        std::string slot = detail::canonical_slot_name(r.get<std::string>());
        if (!slot.empty() && std::find(d.requestable.begin(), d.requestable.end(), slot) == d.requestable.end()) {
          d.requestable.push_back(slot);
        }
      }
    }
    g.domains.push_back(std::move(d));
  }
  (void)where;
  return g;
}

// Belief from a system turn's metadata; domain order follows `order`, which
// accumulates first mentions over the session.
BeliefState read_raw_belief(const Json& metadata, const Normalizer& norm,
                            std::vector<std::string>& order) {
  std::vector<std::pair<std::string, SlotMap>> found;
  if (metadata.is_object()) {
    for (auto domain : schema::domains()) {
      auto it = metadata.find(std::string(domain));
      if (it == metadata.end()) continue;
      SlotMap slots;
      for (const char* part : {"semi", "book"}) {
        if (!it->contains(part)) continue;
        for (const auto& [k, v] : (*it)[part].items()) {
          if (!v.is_string()) continue;  // "booked" lists
          std::string slot = detail::canonical_slot_name(k);
          if (!schema::is_belief_slot(domain, slot)) continue;
          std::string value = norm.normalize(domain, slot, v.get<std::string>());
          if (!value.empty()) slots[slot] = value;
        }
      }
      if (!slots.empty()) found.emplace_back(std::string(domain), std::move(slots));
    }
  }
  for (const auto& [d, _] : found) {
    if (std::find(order.begin(), order.end(), d) == order.end()) order.push_back(d);
  }
  BeliefState b;
  for (const auto& d : order) {
    for (const auto& [name, slots] : found) {
      if (name != d) continue;
      for (const auto& [k, v] : slots) b.set(name, k, v);
    }
  }
  return b;
}

Corpus load_raw(const fs::path& path, const LoadOptions& options) {
  fs::path dir = fs::is_directory(path) ? path : path.parent_path();
  fs::path data_path = fs::is_directory(path) ? dir / "data.json" : path;
  const Normalizer& norm = Normalizer::for_version(options.version);
  Json data = read_json(data_path);
  if (!data.is_object()) throw ParseError(data_path.string(), "expected an object of dialogues");
  Json acts_doc;
  if (fs::exists(dir / "dialogue_acts.json")) acts_doc = read_json(dir / "dialogue_acts.json");
  const auto dev_ids = read_id_list(dir, "valListFile");
  const auto test_ids = read_id_list(dir, "testListFile");

  Corpus corpus;
  corpus.version = options.version;
  for (const auto& [key, dialog] : data.items()) {
    DialogSession s;
    s.session_id = key.ends_with(".json") ? key.substr(0, key.size() - 5) : key;
    const std::string where = data_path.string() + ":" + s.session_id;
    s.split = dev_ids.contains(s.session_id) ? "dev" : test_ids.contains(s.session_id) ? "test" : "train";
    if (dialog.contains("goal")) s.goal = read_raw_goal(dialog["goal"], norm, where);
    if (!dialog.contains("log") || !dialog["log"].is_array()) throw ParseError(where, "missing log");
    const Json& log = dialog["log"];
    std::vector<std::string> order;
    std::optional<std::string> prev_domain;
    for (std::size_t i = 0; i + 1 < log.size(); i += 2) {
      const std::string wt = where + " turn " + std::to_string(i / 2);
      const Json& user = log[i];
      const Json& sys = log[i + 1];
      Turn t;
      t.user = normalize_utterance(user.value("text", ""));
      t.belief = read_raw_belief(sys.contains("metadata") ? sys["metadata"] : Json(), norm, order);

      std::vector<RawAct> raw_acts;
      if (sys.contains("dialog_act")) {
        raw_acts = read_raw_acts(sys["dialog_act"], wt);
      } else if (acts_doc.is_object()) {
        std::string sid = s.session_id;
        auto it = acts_doc.find(sid);
        if (it != acts_doc.end()) {
          std::string turn_key = std::to_string(i / 2 + 1);
          if (it->contains(turn_key)) raw_acts = read_raw_acts((*it)[turn_key], wt);
        }
      }
      auto active = active_domain(t.belief, prev_domain);
      Entity informed;
      std::string informed_domain;
      for (const RawAct& a : raw_acts) {
        std::string domain = a.domain;
        if (domain == "booking") {
          if (!active) continue;  // nothing to attach the booking act to
          domain = *active;
        }
        t.act.add(domain, a.type);
        for (const auto& [slot, value] : a.slot_values) {
          if (slot.empty()) continue;
          t.act.add_slot(domain, a.type, slot);
          std::string v = norm.normalize(domain, slot, value);
          if (!v.empty() && v != "?") {
            informed[slot] = v;
            informed_domain = domain;
          }
        }
      }

      t.response_lex = normalize_utterance(sys.value("text", ""));
      std::vector<DomainEntity> entities;
      if (!informed.empty()) entities.push_back({informed_domain, informed});
      if (options.db && active && schema::has_database(*active)) {
        auto results = query(*options.db, t.belief, *active);
        t.db_match = results.size();
        // The entity the system names, if any, grounds the remaining fields.
        if (auto name = informed.find(std::string(schema::offer_slot(*active))); name != informed.end()) {
          for (const Entity* e : results) {
            auto f = e->find(name->first);
            if (f != e->end() && f->second == name->second) {
              entities.push_back({*active, *e});
              break;
            }
          }
        }
      }
      DelexOptions dopts;
      dopts.version = options.version;
      t.response_delex = delexicalize(t.response_lex, t.belief, t.act, entities, dopts).text;
      prev_domain = active;
      s.turns.push_back(std::move(t));
    }
    if (s.turns.empty()) throw ParseError(where, "dialogue has no complete turn");
    corpus.sessions.push_back(std::move(s));
  }

  // Ontology: searchable values from the database when given, everything else
  // from the annotations.
  if (options.db) corpus.ontology = options.db->ontology();
  for (const auto& s : corpus.sessions) {
    for (const auto& t : s.turns) {
      for (const auto& d : t.belief.domains()) {
        for (const auto& [slot, value] : d.slots) {
          if (options.db && schema::is_searchable_slot(d.name, slot) && options.db->has_domain(d.name)) continue;
          corpus.ontology[d.name][slot].insert(value);
        }
      }
    }
  }
  for (auto& [domain, slots] : corpus.ontology) {
    for (auto it = slots.begin(); it != slots.end();) {
      it = schema::is_belief_slot(domain, it->first) ? std::next(it) : slots.erase(it);
    }
  }
  std::erase_if(corpus.ontology, [](const auto& kv) { return kv.second.empty(); });
  check_unique_ids(corpus);
  return corpus;
}

bool word_bounded_contains(std::string_view text, std::string_view value) {
  std::size_t pos = 0;
  auto boundary = [](char c) { return !std::isalnum(static_cast<unsigned char>(c)); };
  while ((pos = text.find(value, pos)) != std::string_view::npos) {
    bool left = pos == 0 || boundary(text[pos - 1]);
    std::size_t end = pos + value.size();
    bool right = end == text.size() || boundary(text[end]);
    if (left && right) return true;
    ++pos;
  }
  return false;
}

}  // namespace

CorpusFormat detect_format(const fs::path& path) {
  if (fs::is_directory(path)) return CorpusFormat::kMultiwozRaw;
  Json doc = read_json(path);
  return doc.is_object() && doc.contains("sessions") && doc["sessions"].is_array() ? CorpusFormat::kCanonical
                                                                                     : CorpusFormat::kMultiwozRaw;
}

void normalize_corpus(Corpus& corpus) {
  const Normalizer& norm = Normalizer::for_version(corpus.version);
  auto norm_belief = [&](const BeliefState& b) {
    BeliefState out;
    for (const auto& d : b.domains()) {
      for (const auto& [slot, value] : d.slots) {
        std::string v = norm.normalize(d.name, slot, value);
        if (!v.empty()) out.set(d.name, slot, std::move(v));
      }
    }
    return out;
  };
  for (auto& s : corpus.sessions) {
    for (auto& g : s.goal.domains) {
      SlotMap inf;
      for (const auto& [slot, value] : g.informable) {
        std::string v = norm.normalize(g.domain, slot, value);
        if (!v.empty()) inf[slot] = std::move(v);
      }
      g.informable = std::move(inf);
    }
    for (auto& t : s.turns) t.belief = norm_belief(t.belief);
  }
  Ontology o;
  for (const auto& [domain, slots] : corpus.ontology) {
    for (const auto& [slot, values] : slots) {
      for (const auto& v : values) {
        std::string n = norm.normalize(domain, slot, v);
        if (!n.empty()) o[domain][slot].insert(std::move(n));
      }
    }
  }
  corpus.ontology = std::move(o);
}

Corpus load_corpus(const fs::path& path, CorpusFormat format, const LoadOptions& options) {
  if (format == CorpusFormat::kMultiwozRaw) return load_raw(path, options);
  Corpus c = json::corpus_from_json(read_json(path), path.string());
  Normalizer::for_version(c.version);  // rejects unknown version tags
  normalize_corpus(c);
  check_unique_ids(c);
  return c;
}

std::string canonical_text(const Corpus& corpus) { return json::corpus_to_json(corpus).dump(2) + "\n"; }

void write_canonical(const Corpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << canonical_text(corpus);
}

std::string normalize_utterance(std::string_view raw) {
  std::string text = normalize_text(raw);
  std::string out;
  out.reserve(text.size() + 8);
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool punct = c == '.' || c == ',' || c == '?' || c == '!' || c == ';';
    bool at_end = i + 1 == text.size() || text[i + 1] == ' ';
    if (punct && at_end && !out.empty() && out.back() != ' ') out.push_back(' ');
    out.push_back(c);
  }
  return out;
}

std::string_view violation_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::kDuplicateSessionId: return "duplicate_session_id";
    case Violation::Kind::kOutOfOntology: return "out_of_ontology";
    case Violation::Kind::kPlaceholderLeak: return "placeholder_leak";
    case Violation::Kind::kMissingPlaceholder: return "missing_placeholder";
    case Violation::Kind::kInvalidPlaceholder: return "invalid_placeholder";
    case Violation::Kind::kInvalidRequestable: return "invalid_requestable";
  }
  return {};
}

std::size_t ValidationReport::count(Violation::Kind k) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == k; }));
}

ValidationReport validate(const Corpus& corpus) {
  using K = Violation::Kind;
  ValidationReport r;
  std::set<std::string> seen;
  for (const auto& s : corpus.sessions) {
    if (!seen.insert(s.session_id).second) r.violations.push_back({K::kDuplicateSessionId, s.session_id, {}, ""});
    for (const auto& g : s.goal.domains) {
      for (const auto& slot : g.requestable) {
        if (!schema::is_requestable_slot(g.domain, slot)) {
          r.violations.push_back({K::kInvalidRequestable, s.session_id, {}, g.domain + "." + slot});
        }
      }
    }
    for (std::size_t t = 0; t < s.turns.size(); ++t) {
      const Turn& turn = s.turns[t];
      for (const auto& d : turn.belief.domains()) {
        for (const auto& [slot, value] : d.slots) {
          if (value == "dontcare") continue;
          auto dom = corpus.ontology.find(d.name);
          bool known = dom != corpus.ontology.end() && dom->second.contains(slot) &&
                       dom->second.at(slot).contains(value);
          if (!known) {
            r.violations.push_back({K::kOutOfOntology, s.session_id, t, d.name + "." + slot + "=" + value});
          }
        }
      }
      for (const auto& slot : placeholders_in(turn.response_lex)) {
        r.violations.push_back({K::kPlaceholderLeak, s.session_id, t, "[value_" + slot + "]"});
      }
      for (const auto& tok : TokenSeq::from_text(turn.response_delex)) {
        std::size_t open = tok.find('[');
        if (open == std::string::npos) continue;
        std::size_t close = tok.find(']', open);
        std::string_view inner = close == std::string::npos ? std::string_view(tok).substr(open)
                                                            : std::string_view(tok).substr(open, close - open + 1);
        auto slot = tokens::placeholder_slot(inner);
        if (!slot || !schema::is_placeholder_slot(*slot)) {
          r.violations.push_back({K::kInvalidPlaceholder, s.session_id, t, std::string(inner)});
        }
      }
      const std::string delex = normalize_text(turn.response_delex);
      for (const auto& d : turn.belief.domains()) {
        for (const auto& [slot, value] : d.slots) {
          if (value == "dontcare" || value == "yes" || value == "no") continue;
          if (word_bounded_contains(delex, value)) {
            r.violations.push_back({K::kMissingPlaceholder, s.session_id, t, d.name + "." + slot + "=" + value});
          }
        }
      }
    }
  }
  return r;
}

Corpus with_sessions(const Corpus& base, std::vector<DialogSession> sessions) {
  Corpus c;
  c.version = base.version;
  c.ontology = base.ontology;
  c.sessions = std::move(sessions);
  return c;
}

StandardSplit split_standard(const Corpus& corpus) {
  std::vector<DialogSession> train, dev, test;
  for (const auto& s : corpus.sessions) {
    (s.split == "dev" ? dev : s.split == "test" ? test : train).push_back(s);
  }
  return {with_sessions(corpus, std::move(train)), with_sessions(corpus, std::move(dev)),
          with_sessions(corpus, std::move(test))};
}

DomainTransferSplit split_leave_one_domain_out(const Corpus& corpus, std::string_view held_out,
                                               std::size_t fewshot_n, std::uint64_t seed) {
  if (!schema::is_eval_domain(held_out)) {
    throw DataError("held-out domain must be one of attraction, hotel, restaurant, taxi, train; got '" +
                    std::string(held_out) + "'");
  }
  std::vector<DialogSession> train_without, eval_in, eval_out;
  std::vector<std::size_t> candidates;  // indices of train sessions mentioning held_out
  for (std::size_t i = 0; i < corpus.sessions.size(); ++i) {
    const auto& s = corpus.sessions[i];
    bool mentions = s.mentions(held_out);
    if (s.split == "test") {
      (mentions ? eval_out : eval_in).push_back(s);
    } else if (s.split == "train") {
      if (mentions) {
        candidates.push_back(i);
      } else {
        train_without.push_back(s);
      }
    }
  }
  if (fewshot_n > candidates.size()) {
    throw DataError("fewshot_n=" + std::to_string(fewshot_n) + " exceeds the " + std::to_string(candidates.size()) +
                    " train sessions mentioning " + std::string(held_out));
  }
  // Partial Fisher-Yates with a portable index draw.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < fewshot_n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(fewshot_n);
  std::sort(candidates.begin(), candidates.end());
  std::vector<DialogSession> fewshot;
  for (std::size_t i : candidates) fewshot.push_back(corpus.sessions[i]);
  return {with_sessions(corpus, std::move(train_without)), with_sessions(corpus, std::move(fewshot)),
          with_sessions(corpus, std::move(eval_in)), with_sessions(corpus, std::move(eval_out))};
}

}  // namespace ubar

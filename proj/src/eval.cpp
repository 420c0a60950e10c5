#include "ubar/eval.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "ubar/delex.hpp"
#include "ubar/error.hpp"
#include "ubar/normalize.hpp"
#include "ubar/parallel.hpp"
#include "ubar/schema.hpp"

namespace ubar {
namespace {

bool has_placeholder(std::string_view response, std::string_view slot) {
  for (const auto& s : placeholders_in(response)) {
    if (s == slot) return true;
  }
  return false;
}

// Offers made in a turn are attributed to its DB domain and to every domain
// its act frame mentions.
bool turn_concerns(const TurnRecord& t, std::string_view domain) {
  if (t.db_domain && *t.db_domain == domain) return true;
  for (const auto& d : t.act.domains()) {
    if (d.name == domain) return true;
  }
  return false;
}

bool books(const TurnRecord& t, std::string_view domain) {
  for (const auto& d : t.act.domains()) {
    if (d.name != domain) continue;
    for (const auto& a : d.acts) {
      if (a.type == ActType::kBook || a.type == ActType::kOfferbooked) return true;
    }
  }
  return false;
}

bool domain_informs(const GeneratedSession& gen, const GoalDomain& goal, const EntityDb& db) {
  if (goal.domain == "taxi") {
    for (const auto& t : gen.turns) {
      const SlotMap* slots = t.belief.slots("taxi");
      if (!slots) continue;
      bool all = true;
      for (const auto& [slot, value] : goal.informable) all = all && slots->count(slot) > 0;
      if (all) return true;
    }
    return goal.informable.empty();
  }
  const std::string_view offer = schema::offer_slot(goal.domain);
  const TurnRecord* last_offer = nullptr;
  for (const auto& t : gen.turns) {
    if (turn_concerns(t, goal.domain) && has_placeholder(t.response, offer)) last_offer = &t;
  }
  if (!last_offer) return false;
  auto offered = query(db, last_offer->belief, goal.domain);
  if (offered.empty()) return false;
  auto wanted = goal_entities(db, goal);
  std::set<const Entity*> wanted_set(wanted.begin(), wanted.end());
  for (const Entity* e : offered) {
    if (wanted_set.count(e)) return true;
  }
  return false;
}

std::vector<std::string> unanswered(const GeneratedSession& gen, const GoalDomain& goal) {
  std::vector<std::string> out;
  for (const auto& slot : goal.requestable) {
    bool booked = false;
    bool found = false;
    for (const auto& t : gen.turns) {
      booked = booked || books(t, goal.domain);
      if (slot == "reference" && !booked) continue;
      if (has_placeholder(t.response, slot)) {
        found = true;
        break;
      }
    }
    if (!found) out.push_back(slot);
  }
  return out;
}

SessionScore score_session(const GeneratedSession& gen, const DialogSession& gold, const EntityDb& db) {
  SessionScore s;
  s.session_id = gen.session_id;
  s.turns = gold.turns.size();
  s.failed = gen.failed;
  bool inform = true;
  bool answered = true;
  for (const auto& g : gold.goal.domains) {
    if (!schema::is_eval_domain(g.domain)) continue;
    bool ok = domain_informs(gen, g, db);
    s.domain_inform[g.domain] = ok;
    inform = inform && ok;
    auto missing = unanswered(gen, g);
    if (!missing.empty()) {
      answered = false;
      s.missing[g.domain] = std::move(missing);
    }
  }
  s.inform = inform && !gen.failed;
  s.success = s.inform && answered;
  return s;
}

std::unordered_map<std::string_view, const DialogSession*> index_gold(const Corpus& gold) {
  std::unordered_map<std::string_view, const DialogSession*> out;
  for (const auto& s : gold.sessions) out.emplace(s.session_id, &s);
  return out;
}

const DialogSession& aligned(const std::unordered_map<std::string_view, const DialogSession*>& index,
                             const GeneratedSession& gen) {
  auto it = index.find(gen.session_id);
  if (it == index.end()) throw AlignmentError("generated session '" + gen.session_id + "' has no gold session");
  if (gen.turns.size() > it->second->turns.size() ||
      (!gen.failed && gen.turns.size() != it->second->turns.size())) {
    throw AlignmentError("session '" + gen.session_id + "' has " + std::to_string(gen.turns.size()) +
                         " generated turns but " + std::to_string(it->second->turns.size()) + " gold turns");
  }
  return *it->second;
}

BeliefState normalized(const BeliefState& b, std::string_view version) {
  BeliefState out;
  for (const auto& d : b.domains()) {
    for (const auto& [slot, value] : d.slots) {
      std::string v = normalize_value(d.name, slot, value, version);
      if (!v.empty()) out.set(d.name, slot, std::move(v));
    }
  }
  return out;
}

double round1(double x) { return std::floor(x * 10.0 + 0.5 + 1e-9) / 10.0; }

}  // namespace

std::vector<const Entity*> goal_entities(const EntityDb& db, const GoalDomain& goal) {
  BeliefState constraints;
  for (const auto& [slot, value] : goal.informable) constraints.set(goal.domain, slot, value);
  return query(db, constraints, goal.domain);
}

InformSuccess inform_success(const std::vector<GeneratedSession>& gen, const Corpus& gold, const EntityDb& db,
                             std::size_t workers) {
  auto index = index_gold(gold);
  std::vector<const DialogSession*> golds;
  golds.reserve(gen.size());
  for (const auto& g : gen) golds.push_back(&aligned(index, g));

  InformSuccess out;
  out.sessions = parallel_map(gen.size(), workers, [&](std::size_t i) { return score_session(gen[i], *golds[i], db); });
  std::size_t inform = 0;
  std::size_t success = 0;
  for (const auto& s : out.sessions) {
    inform += s.inform ? 1 : 0;
    success += s.success ? 1 : 0;
  }
  if (!gen.empty()) {
    out.inform = 100.0 * static_cast<double>(inform) / static_cast<double>(gen.size());
    out.success = 100.0 * static_cast<double>(success) / static_cast<double>(gen.size());
  }
  return out;
}

double bleu(const std::vector<std::string>& candidates, const std::vector<std::string>& references) {
  if (candidates.size() != references.size()) {
    throw AlignmentError("bleu: " + std::to_string(candidates.size()) + " candidates vs " +
                         std::to_string(references.size()) + " references");
  }
  if (candidates.empty()) throw DataError("bleu: empty corpus");
  constexpr std::size_t kMaxN = 4;
  std::array<std::size_t, kMaxN> matches{};
  std::array<std::size_t, kMaxN> totals{};
  std::size_t cand_len = 0;
  std::size_t ref_len = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto cand = TokenSeq::from_text(candidates[i]).tokens();
    const auto ref = TokenSeq::from_text(references[i]).tokens();
    cand_len += cand.size();
    ref_len += ref.size();
    for (std::size_t n = 1; n <= kMaxN; ++n) {
      std::map<std::vector<std::string>, std::size_t> ref_counts;
      for (std::size_t k = 0; k + n <= ref.size(); ++k) {
        ++ref_counts[std::vector<std::string>(ref.begin() + static_cast<std::ptrdiff_t>(k),
                                              ref.begin() + static_cast<std::ptrdiff_t>(k + n))];
      }
      std::map<std::vector<std::string>, std::size_t> cand_counts;
      for (std::size_t k = 0; k + n <= cand.size(); ++k) {
        ++cand_counts[std::vector<std::string>(cand.begin() + static_cast<std::ptrdiff_t>(k),
                                               cand.begin() + static_cast<std::ptrdiff_t>(k + n))];
      }
      for (const auto& [gram, count] : cand_counts) {
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matches[n - 1] += std::min(count, it->second);
        totals[n - 1] += count;
      }
    }
  }
  if (cand_len == 0) return 0.0;
  double log_sum = 0;
  for (std::size_t n = 0; n < kMaxN; ++n) {
    if (matches[n] == 0 || totals[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matches[n]) / static_cast<double>(totals[n]));
  }
  double bp = cand_len > ref_len ? 1.0 : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
  return 100.0 * bp * std::exp(log_sum / kMaxN);
}

double combined(double inform, double success, double bleu_score) {
  return round1(0.5 * (inform + success) + bleu_score);
}

double joint_goal_accuracy(const std::vector<BeliefState>& pred, const std::vector<BeliefState>& gold,
                           std::string_view version) {
  if (pred.size() != gold.size()) {
    throw AlignmentError("joint goal accuracy: " + std::to_string(pred.size()) + " predicted turns vs " +
                         std::to_string(gold.size()) + " gold turns");
  }
  if (pred.empty()) throw DataError("joint goal accuracy: no turns");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (equivalent(normalized(pred[i], version), normalized(gold[i], version))) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

MetricReport evaluate(const std::vector<GeneratedSession>& gen, const Corpus& gold, const EntityDb& db,
                      const EvalOptions& options) {
  InformSuccess is = inform_success(gen, gold, db, options.workers);
  auto index = index_gold(gold);

  std::vector<std::string> candidates;
  std::vector<std::string> references;
  std::vector<BeliefState> pred;
  std::vector<BeliefState> truth;
  MetricReport report;
  for (std::size_t i = 0; i < gen.size(); ++i) {
    const GeneratedSession& g = gen[i];
    const DialogSession& ref = aligned(index, g);
    SessionScore& score = is.sessions[i];
    for (std::size_t t = 0; t < ref.turns.size(); ++t) {
      const Turn& gt = ref.turns[t];
      const TurnRecord* rec = t < g.turns.size() ? &g.turns[t] : nullptr;
      candidates.push_back(rec ? rec->response : std::string());
      references.push_back(options.lexicalized_references ? gt.response_lex : gt.response_delex);
      BeliefState b = rec ? rec->belief : BeliefState{};
      if (equivalent(normalized(b, gold.version), normalized(gt.belief, gold.version))) ++score.belief_matches;
      pred.push_back(std::move(b));
      truth.push_back(gt.belief);
    }
    report.failed_sessions += g.failed ? 1 : 0;
  }

  report.inform = is.inform;
  report.success = is.success;
  report.sessions = gen.size();
  report.turns = candidates.size();
  if (!candidates.empty()) {
    report.bleu = bleu(candidates, references);
    report.joint_goal_accuracy = joint_goal_accuracy(pred, truth, gold.version);
  }
  report.combined = combined(report.inform, report.success, report.bleu);
  report.per_session = std::move(is.sessions);
  return report;
}

nlohmann::ordered_json MetricReport::to_json() const {
  nlohmann::ordered_json j;
  j["inform"] = inform;
  j["success"] = success;
  j["bleu"] = bleu;
  j["combined"] = combined;
  j["joint_goal_accuracy"] = joint_goal_accuracy;
  j["sessions"] = sessions;
  j["turns"] = turns;
  j["failed_sessions"] = failed_sessions;
  auto& per = j["per_session"] = nlohmann::ordered_json::array();
  for (const auto& s : per_session) {
    nlohmann::ordered_json e;
    e["session_id"] = s.session_id;
    e["inform"] = s.inform;
    e["success"] = s.success;
    e["failed"] = s.failed;
    e["turns"] = s.turns;
    e["belief_matches"] = s.belief_matches;
    e["domain_inform"] = nlohmann::ordered_json::object();
    for (const auto& [d, ok] : s.domain_inform) e["domain_inform"][d] = ok;
    e["missing_requestables"] = nlohmann::ordered_json::object();
    for (const auto& [d, slots] : s.missing) e["missing_requestables"][d] = slots;
    per.push_back(std::move(e));
  }
  return j;
}

std::string MetricReport::table() const {
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-10s %10s %10s %10s\n", "Inform", "Success", "BLEU", "Combined");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-10.2f %10.2f %10.2f %10.1f\n", inform, success, bleu, combined);
  out += buf;
  return out;
}

}  // namespace ubar

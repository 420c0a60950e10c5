#pragma once

// Inform, Success, corpus BLEU-4, Combined score and joint goal accuracy.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ubar/dbquery.hpp"
#include "ubar/orchestrator.hpp"
#include "ubar/types.hpp"

namespace ubar {

struct SessionScore {
  std::string session_id;
  bool inform = false;
  bool success = false;
  std::map<std::string, bool> domain_inform;               // per evaluated goal domain
  std::map<std::string, std::vector<std::string>> missing;  // unanswered requestables
  std::size_t turns = 0;
  std::size_t belief_matches = 0;
  bool failed = false;
};

struct InformSuccess {
  double inform = 0;   // percent
  double success = 0;  // percent
  std::vector<SessionScore> sessions;
};

// Sessions are aligned to `gold` by id. Throws AlignmentError when a session
// is missing from `gold` or has more turns than its gold counterpart.
InformSuccess inform_success(const std::vector<GeneratedSession>& gen, const Corpus& gold,
                             const EntityDb& db, std::size_t workers = 1);

// Entities of `domain` satisfying every searchable informable constraint.
std::vector<const Entity*> goal_entities(const EntityDb& db, const GoalDomain& goal);

// Corpus-level BLEU-4 on whitespace tokens, uniform weights, brevity penalty,
// no smoothing, one reference per candidate; scaled to 0..100.
double bleu(const std::vector<std::string>& candidates, const std::vector<std::string>& references);

// 0.5 * (inform + success) + bleu, rounded half-up to one decimal.
double combined(double inform, double success, double bleu_score);

// Fraction of turns whose normalized belief equals the gold one exactly.
double joint_goal_accuracy(const std::vector<BeliefState>& pred, const std::vector<BeliefState>& gold,
                           std::string_view version = "2.0");

struct MetricReport {
  double inform = 0;
  double success = 0;
  double bleu = 0;
  double combined = 0;
  double joint_goal_accuracy = 0;
  std::size_t sessions = 0;
  std::size_t turns = 0;
  std::size_t failed_sessions = 0;
  std::vector<SessionScore> per_session;

  nlohmann::ordered_json to_json() const;
  // Inform / Success / BLEU / Combined as a fixed-width table.
  std::string table() const;
};

struct EvalOptions {
  // Score responses against lexicalized references (dst runs).
  bool lexicalized_references = false;
  std::size_t workers = 1;
};

// Turns missing from failed sessions are scored as empty responses and empty
// beliefs.
MetricReport evaluate(const std::vector<GeneratedSession>& gen, const Corpus& gold, const EntityDb& db,
                      const EvalOptions& options = {});

}  // namespace ubar

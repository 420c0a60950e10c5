#pragma once

// Turn-by-turn session runner: builds the context under a policy and drives a
// decoder through belief, DB, act and response for every user utterance.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ubar/dbquery.hpp"
#include "ubar/sequence.hpp"
#include "ubar/types.hpp"

namespace ubar {

enum class Setting {
  kResponseGeneration,  // oracle B, D, A; R generated
  kPolicyOptimization,  // oracle B, D; A and R generated
  kEndToEnd,            // everything generated
  kDst,                 // B generated; gold act and lexicalized response
};

std::string_view setting_name(Setting s);
std::optional<Setting> parse_setting(std::string_view name);

bool generates_belief(Setting s);
bool generates_act(Setting s);
bool generates_response(Setting s);

enum class Provenance { kOracle, kGenerated };
std::string_view provenance_name(Provenance p);

// ---- decoders ---------------------------------------------------------------

// Identifies the turn being decoded. Replay decoders key on it; language
// models ignore it.
struct DecodeCursor {
  std::string session_id;
  std::size_t turn = 0;
};

struct DecodeRequest {
  TokenSeq context;       // ends with the opener of the component to produce
  std::string stop;       // closing token, e.g. <eos_b>
  std::size_t max_new = 0;
  DecodeCursor cursor;
};

enum class StopReason { kStopToken, kLength };
std::string_view stop_reason_name(StopReason r);

struct Decoded {
  TokenSeq tokens;  // continuation; ends with the stop token iff kStopToken
  StopReason reason = StopReason::kStopToken;
};

// Must tolerate concurrent calls from different sessions.
class Decoder {
 public:
  virtual ~Decoder() = default;
  // Throws DecoderError on transport or protocol failure.
  virtual Decoded generate_until(const DecodeRequest& request) const = 0;
  // Budget measurer matching the decoder's own tokenization, if it has one.
  virtual Measurer measurer() const { return {}; }
};

// Replays gold continuations from `corpus`, re-encoded through the span
// grammar. Response requests are answered with the delexicalized response,
// or the lexicalized one when `lexicalized_responses` is set.
std::shared_ptr<const Decoder> corpus_oracle_decoder(const Corpus& corpus,
                                                     bool lexicalized_responses = false);

// ---- running ----------------------------------------------------------------

struct DecodeLimits {
  std::size_t belief = 80;
  std::size_t act = 40;
  std::size_t response = 120;
};

struct RunOptions {
  Setting setting = Setting::kEndToEnd;
  ContextPolicy policy;
  TokenBudget budget;
  Measurer measure;  // falls back to the decoder's, then whitespace_measurer()
  DecodeLimits limits;
};

struct TurnRecord {
  std::size_t turn = 0;
  std::string user;
  BeliefState belief;
  DbToken db = DbToken::kNoRes;
  std::optional<std::string> db_domain;
  ActFrame act;
  std::string response;
  Provenance belief_source = Provenance::kGenerated;  // B and D
  Provenance act_source = Provenance::kGenerated;
  Provenance response_source = Provenance::kGenerated;
  std::vector<std::string> diagnostics;
  std::size_t context_blocks = 0;   // history blocks kept in the context
  std::size_t dropped_blocks = 0;   // history blocks removed by truncation
};

struct GeneratedSession {
  std::string session_id;
  std::vector<TurnRecord> turns;
  bool failed = false;
  std::string error;
};

// Realized history plus the carried dialog state.
struct SessionState {
  std::vector<HistoryTurn> history;
  std::optional<std::string> last_domain;
};

// What the runner knows about the current turn besides the user utterance.
struct TurnInput {
  std::string user;
  std::optional<GoldComponents> gold;  // required by oracle settings/policies
  DecodeCursor cursor;
};

// One B -> D -> A -> R cycle. Appends the realized turn to `state`.
TurnRecord run_turn(SessionState& state, const TurnInput& input, const Decoder& decoder,
                    const RunOptions& options, const EntityDb& db);

// Folds run_turn over the session's gold user utterances.
GeneratedSession run_session(const DialogSession& session, const Decoder& decoder,
                             const RunOptions& options, const EntityDb& db);

// Runs sessions on `workers` threads; results keep input order. A session
// whose decoder fails is returned with `failed` set and the turns it finished.
std::vector<GeneratedSession> run_sessions(const std::vector<DialogSession>& sessions,
                                           const Decoder& decoder, const RunOptions& options,
                                           const EntityDb& db, std::size_t workers);

// Turn-by-turn equality against the gold session under the setting's
// response surface. Returns the first mismatch, if any.
std::optional<std::string> first_gold_mismatch(const GeneratedSession& gen,
                                               const DialogSession& gold, Setting setting);

}  // namespace ubar

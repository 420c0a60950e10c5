#pragma once

// Session-level (UBDAR), turn-level (UR) and DST sequences, context building
// under a policy, and block-granular pre-truncation.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ubar/dbquery.hpp"
#include "ubar/tokens.hpp"
#include "ubar/types.hpp"

namespace ubar {

enum class SequenceMode {
  kUbarDelex,  // U B D A R with delexicalized responses
  kUrur,       // U R only
  kDstLex,     // U B D A R with lexicalized responses
};

std::string_view mode_name(SequenceMode m);
std::optional<SequenceMode> parse_mode(std::string_view name);

// Maps a token sequence to its length in budget units.
using Measurer = std::function<std::size_t(const TokenSeq&)>;

// Offline estimate of subword length: ceil(whitespace tokens * factor).
Measurer whitespace_measurer(double factor = 1.3);

struct TokenBudget {
  std::size_t max_len = 1024;
};

// A sequence cut at turn boundaries.
struct BlockSeq {
  std::vector<TokenSeq> blocks;
  TokenSeq flatten() const;
};

// Splits a flat sequence into turn blocks: a block starts at any component
// opener that does not come after the previous opener in U,B,D,A,R order.
BlockSeq split_blocks(const TokenSeq& seq);

struct Truncated {
  BlockSeq seq;
  std::size_t dropped = 0;
  bool oversized = false;  // the last block alone exceeds the budget
};

// Drops whole blocks from the front until the measured length fits. The last
// block is always kept, alone and flagged when it does not fit by itself.
Truncated truncate(const BlockSeq& seq, const TokenBudget& budget, const Measurer& measure);
Truncated truncate(const TokenSeq& seq, const TokenBudget& budget, const Measurer& measure);

// Gold database token per turn: bucket(db_match, active domain) with the
// domain carried across turns; db_nores when db_match is absent.
struct GoldDb {
  DbToken token = DbToken::kNoRes;
  std::optional<std::string> domain;
};
std::vector<GoldDb> gold_db(const DialogSession& session);

BlockSeq build_session_blocks(const DialogSession& session, SequenceMode mode);
TokenSeq build_session_sequence(const DialogSession& session, SequenceMode mode);

// ---- context under a policy -------------------------------------------------

enum class Window { kAll, kPrev };
enum class Source { kGenerated, kOracle };
enum class ContentMask { kFull, kUrOnly, kBdaOnly };

struct ContextPolicy {
  Window window = Window::kAll;
  Source belief_source = Source::kGenerated;    // B and D in history
  Source act_resp_source = Source::kGenerated;  // A and R in history
  ContentMask content_mask = ContentMask::kFull;

  // Throws ConfigError for combinations outside the supported grid.
  void check() const;
  // "window=all,belief=gen,actresp=gen,mask=full"
  std::string str() const;
  static ContextPolicy parse(std::string_view text);
  bool operator==(const ContextPolicy&) const = default;
};

// Ground-truth components of a turn, with the response surface chosen by the
// sequence mode.
struct GoldComponents {
  BeliefState belief;
  DbToken db = DbToken::kNoRes;
  ActFrame act;
  std::string response;
  bool operator==(const GoldComponents&) const = default;
};

std::vector<GoldComponents> gold_components(const DialogSession& session, bool lexicalized_responses);

// A completed turn as the system realized it, plus ground truth when known.
struct HistoryTurn {
  std::string user;
  BeliefState belief;
  DbToken db = DbToken::kNoRes;
  ActFrame act;
  std::string response;
  std::optional<GoldComponents> gold;
};

struct ContextOptions {
  TokenBudget budget;
  Measurer measure;  // defaults to whitespace_measurer()
};

struct Context {
  TokenSeq tokens;
  std::size_t history_blocks = 0;
  std::size_t dropped_blocks = 0;
  bool oversized = false;
};

// History blocks (masked, sourced and windowed per policy) followed by
// `<sos_u> user <eos_u> <sos_b>`, then truncated to the budget. Throws
// ConfigError when the policy asks for ground truth a turn does not carry.
Context build_context(const std::vector<HistoryTurn>& history, std::string_view current_user,
                      const ContextPolicy& policy, const ContextOptions& options = {});

// ---- training export --------------------------------------------------------

// One sequence per line, tokens space-separated; writes `<out>.meta.json`
// beside it. Returns the number of sequences.
std::size_t export_training_file(const Corpus& corpus, SequenceMode mode,
                                 const std::filesystem::path& out);

}  // namespace ubar

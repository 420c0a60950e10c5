#pragma once

// Span grammar for belief states, system acts, DB results and plain text
// components:
//
//   <sos_b> [hotel] parking yes stars 4 [train] day monday <eos_b>
//   <sos_a> [hotel] [inform] name area [request] stars <eos_a>
//   <sos_db> [db_2] <eos_db>
//
// Domain, act and DB markers are bracketed special tokens; slot names and
// values are plain words. A value runs until the next slot name of the current
// domain, the next marker, or the closing token.

#include <string>
#include <vector>

#include "ubar/dbquery.hpp"
#include "ubar/tokens.hpp"
#include "ubar/types.hpp"

namespace ubar {

enum class Strictness { kStrict, kTolerant };

template <typename T>
struct Parsed {
  T value;
  std::vector<std::string> diagnostics;
  bool terminated = true;  // closing token was seen
};

TokenSeq encode_belief(const BeliefState& b);
TokenSeq encode_act(const ActFrame& a);
TokenSeq encode_db(DbToken t);
TokenSeq encode_text(Component c, std::string_view text);  // user / response

// Strict mode: `seq` must be exactly one span, opener through closer, and any
// deviation throws MalformedSpan. Tolerant mode never throws: the opener is
// optional, parsing stops at the closer (or sequence end), and unknown or
// misplaced tokens are skipped with a diagnostic.
Parsed<BeliefState> parse_belief(const TokenSeq& seq, Strictness mode);
Parsed<ActFrame> parse_act(const TokenSeq& seq, Strictness mode);
Parsed<DbToken> parse_db(const TokenSeq& seq, Strictness mode);

// Content tokens between `sos(c)` and `eos(c)`; strict framing.
TokenSeq parse_text(const TokenSeq& seq, Component c);

// A flat sequence cut into framed components.
struct ComponentSpan {
  Component component;
  TokenSeq tokens;  // including framing
};

// Splits a sequence into top-level framed components. Throws MalformedSpan on
// unbalanced or interleaved framing.
std::vector<ComponentSpan> split_components(const TokenSeq& seq);

}  // namespace ubar

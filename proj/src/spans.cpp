#include "ubar/spans.hpp"

#include <algorithm>
#include <tuple>

#include "ubar/error.hpp"
#include "ubar/schema.hpp"

namespace ubar {
namespace {

// Strict mode requires `seq` to be exactly one framed span. Returns the
// [begin, end) range of its body.
std::pair<std::size_t, std::size_t> strict_body(const TokenSeq& seq, Component c) {
  const std::string open = sos(c);
  const std::string close = eos(c);
  if (seq.empty() || seq[0] != open) throw MalformedSpan(0, "expected " + open);
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i] == close) {
      if (i + 1 != seq.size()) throw MalformedSpan(i + 1, "tokens after " + close);
      return {1, i};
    }
    if (seq[i] == open) throw MalformedSpan(i, "nested " + open);
  }
  throw MalformedSpan(seq.size(), "missing " + close);
}

// Tolerant mode: skip an optional opener, stop at the first closer.
struct TolerantRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool terminated = false;
};

TolerantRange tolerant_body(const TokenSeq& seq, Component c) {
  TolerantRange r;
  const std::string open = sos(c);
  const std::string close = eos(c);
  r.begin = (!seq.empty() && seq[0] == open) ? 1 : 0;
  r.end = seq.size();
  for (std::size_t i = r.begin; i < seq.size(); ++i) {
    if (seq[i] == close) {
      r.end = i;
      r.terminated = true;
      break;
    }
  }
  return r;
}

std::string at(std::size_t i) { return " at token " + std::to_string(i); }

class BeliefParser {
 public:
  BeliefParser(Strictness mode, Parsed<BeliefState>& out) : strict_(mode == Strictness::kStrict), out_(out) {}

  void token(std::size_t i, const std::string& tok) {
    if (tokens::is_special(tok) || tokens::framing(tok) || tokens::unbracket(tok)) {
      marker(i, tok);
      return;
    }
    if (domain_.empty()) {
      fail(i, "word '" + tok + "' outside any domain");
      return;
    }
    bool is_slot = schema::is_belief_slot(domain_, tok);
    if (is_slot && (slot_.empty() || !value_.empty())) {
      flush(i);
      if (strict_ && out_.value.get(domain_, tok)) throw MalformedSpan(i, "duplicate slot '" + tok + "'");
      slot_ = tok;
      slot_at_ = i;
      return;
    }
    if (slot_.empty()) {
      fail(i, "expected a slot name, got '" + tok + "'");
      return;
    }
    if (!value_.empty()) value_.push_back(' ');
    value_ += tok;
  }

  void finish(std::size_t end) {
    flush(end);
    if (strict_ && !domain_.empty() && !domain_has_slot_) {
      throw MalformedSpan(end, "domain [" + domain_ + "] has no slots");
    }
  }

 private:
  void marker(std::size_t i, const std::string& tok) {
    auto inner = tokens::unbracket(tok);
    if (tokens::role(tok) == TokenRole::kDomain && inner && schema::is_domain(*inner)) {
      flush(i);
      if (strict_) {
        if (!domain_.empty() && !domain_has_slot_) {
          throw MalformedSpan(i, "domain [" + domain_ + "] has no slots");
        }
        if (out_.value.has_domain(*inner)) throw MalformedSpan(i, "repeated domain " + tok);
      }
      domain_ = std::string(*inner);
      domain_has_slot_ = false;
      return;
    }
    flush(i);
    // Anything after an unknown marker cannot be attributed to a domain.
    domain_.clear();
    fail(i, "unexpected token '" + tok + "'");
  }

  void flush(std::size_t i) {
    if (slot_.empty()) return;
    if (value_.empty()) {
      if (strict_) throw MalformedSpan(i, "slot '" + slot_ + "' has no value");
      out_.diagnostics.push_back("dropped slot '" + slot_ + "' with empty value" + at(slot_at_));
    } else {
      out_.value.set(domain_, slot_, value_);
      domain_has_slot_ = true;
    }
    slot_.clear();
    value_.clear();
  }

  void fail(std::size_t i, const std::string& what) {
    if (strict_) throw MalformedSpan(i, what);
    out_.diagnostics.push_back("skipped " + what + at(i));
  }

  bool strict_;
  Parsed<BeliefState>& out_;
  std::string domain_;
  bool domain_has_slot_ = false;
  std::string slot_;
  std::size_t slot_at_ = 0;
  std::string value_;
};

class ActParser {
 public:
  ActParser(Strictness mode, Parsed<ActFrame>& out) : strict_(mode == Strictness::kStrict), out_(out) {}

  void token(std::size_t i, const std::string& tok) {
    auto inner = tokens::unbracket(tok);
    auto role = tokens::role(tok);
    if (role == TokenRole::kDomain) {
      if (strict_) {
        if (!domain_.empty() && !domain_has_act_) throw MalformedSpan(i, "domain [" + domain_ + "] has no acts");
        for (const auto& d : out_.value.domains()) {
          if (d.name == *inner) throw MalformedSpan(i, "repeated domain " + tok);
        }
      }
      domain_ = std::string(*inner);
      domain_has_act_ = false;
      act_.reset();
      return;
    }
    if (role == TokenRole::kAct) {
      if (domain_.empty()) {
        fail(i, "act " + tok + " before any domain");
        return;
      }
      ActType type = *parse_act_type(*inner);
      if (strict_ && out_.value.find(domain_, type)) throw MalformedSpan(i, "repeated act " + tok);
      out_.value.add(domain_, type);
      act_ = type;
      domain_has_act_ = true;
      return;
    }
    if (role || tokens::framing(tok) || inner) {
      act_.reset();
      if (inner && !role) {
        // Bracketed but unregistered: an act or domain outside the vocabulary.
        if (strict_) throw MalformedSpan(i, "unknown marker " + tok);
        out_.diagnostics.push_back("skipped unknown act marker " + tok + at(i));
        return;
      }
      fail(i, "unexpected token '" + tok + "'");
      return;
    }
    if (!act_) {
      fail(i, "slot '" + tok + "' outside any act");
      return;
    }
    const ActFrame::Act* a = out_.value.find(domain_, *act_);
    bool dup = std::find(a->slots.begin(), a->slots.end(), tok) != a->slots.end();
    if (dup) {
      if (strict_) throw MalformedSpan(i, "duplicate slot '" + tok + "'");
      out_.diagnostics.push_back("dropped duplicate slot '" + tok + "'" + at(i));
      return;
    }
    out_.value.add_slot(domain_, *act_, tok);
  }

  void finish(std::size_t end) {
    if (strict_ && !domain_.empty() && !domain_has_act_) {
      throw MalformedSpan(end, "domain [" + domain_ + "] has no acts");
    }
  }

 private:
  void fail(std::size_t i, const std::string& what) {
    if (strict_) throw MalformedSpan(i, what);
    out_.diagnostics.push_back("skipped " + what + at(i));
  }

  bool strict_;
  Parsed<ActFrame>& out_;
  std::string domain_;
  bool domain_has_act_ = false;
  std::optional<ActType> act_;
};

template <typename Parser, typename T>
Parsed<T> run_parser(const TokenSeq& seq, Strictness mode, Component c) {
  Parsed<T> out;
  Parser p(mode, out);
  std::size_t begin, end;
  if (mode == Strictness::kStrict) {
    std::tie(begin, end) = strict_body(seq, c);
  } else {
    TolerantRange r = tolerant_body(seq, c);
    begin = r.begin;
    end = r.end;
    out.terminated = r.terminated;
  }
  for (std::size_t i = begin; i < end; ++i) p.token(i, seq[i]);
  p.finish(end);
  if (!out.terminated) out.diagnostics.push_back("unterminated span closed at sequence end");
  return out;
}

}  // namespace

TokenSeq encode_belief(const BeliefState& b) {
  TokenSeq seq{sos(Component::kBelief)};
  for (const auto& d : b.domains()) {
    seq.push_back(tokens::domain_marker(d.name));
    for (const auto& [slot, value] : d.slots) {
      seq.push_back(slot);
      seq.append_words(value);
    }
  }
  seq.push_back(eos(Component::kBelief));
  return seq;
}

TokenSeq encode_act(const ActFrame& a) {
  TokenSeq seq{sos(Component::kAct)};
  for (const auto& d : a.domains()) {
    seq.push_back(tokens::domain_marker(d.name));
    for (const auto& act : d.acts) {
      seq.push_back(tokens::act_marker(act_name(act.type)));
      for (const auto& s : act.slots) seq.push_back(s);
    }
  }
  seq.push_back(eos(Component::kAct));
  return seq;
}

TokenSeq encode_db(DbToken t) {
  return TokenSeq{sos(Component::kDb), std::string(db_token_surface(t)), eos(Component::kDb)};
}

TokenSeq encode_text(Component c, std::string_view text) {
  TokenSeq seq{sos(c)};
  seq.append_words(text);
  seq.push_back(eos(c));
  return seq;
}

Parsed<BeliefState> parse_belief(const TokenSeq& seq, Strictness mode) {
  return run_parser<BeliefParser, BeliefState>(seq, mode, Component::kBelief);
}

Parsed<ActFrame> parse_act(const TokenSeq& seq, Strictness mode) {
  return run_parser<ActParser, ActFrame>(seq, mode, Component::kAct);
}

Parsed<DbToken> parse_db(const TokenSeq& seq, Strictness mode) {
  Parsed<DbToken> out{DbToken::kNoRes, {}, true};
  if (mode == Strictness::kStrict) {
    auto [begin, end] = strict_body(seq, Component::kDb);
    if (end - begin != 1) throw MalformedSpan(begin, "expected exactly one db token");
    auto t = parse_db_token(seq[begin]);
    if (!t) throw MalformedSpan(begin, "unknown db token '" + seq[begin] + "'");
    out.value = *t;
    return out;
  }
  TolerantRange r = tolerant_body(seq, Component::kDb);
  out.terminated = r.terminated;
  bool found = false;
  for (std::size_t i = r.begin; i < r.end; ++i) {
    auto t = parse_db_token(seq[i]);
    if (t && !found) {
      out.value = *t;
      found = true;
    } else {
      out.diagnostics.push_back("skipped token '" + seq[i] + "'" + at(i));
    }
  }
  if (!found) out.diagnostics.push_back("no db token; using [db_nores]");
  if (!out.terminated) out.diagnostics.push_back("unterminated span closed at sequence end");
  return out;
}

TokenSeq parse_text(const TokenSeq& seq, Component c) {
  auto [begin, end] = strict_body(seq, c);
  for (std::size_t i = begin; i < end; ++i) {
    if (tokens::framing(seq[i])) throw MalformedSpan(i, "framing token inside text");
  }
  return seq.slice(begin, end);
}

std::vector<ComponentSpan> split_components(const TokenSeq& seq) {
  std::vector<ComponentSpan> out;
  std::size_t i = 0;
  while (i < seq.size()) {
    auto f = tokens::framing(seq[i]);
    if (!f || !f->second) throw MalformedSpan(i, "expected a component opener, got '" + seq[i] + "'");
    Component c = f->first;
    std::size_t j = i + 1;
    for (; j < seq.size(); ++j) {
      auto g = tokens::framing(seq[j]);
      if (!g) continue;
      if (g->first == c && !g->second) break;
      throw MalformedSpan(j, "interleaved framing '" + seq[j] + "'");
    }
    if (j == seq.size()) throw MalformedSpan(j, "missing " + eos(c));
    out.push_back({c, seq.slice(i, j + 1)});
    i = j + 1;
  }
  return out;
}

}  // namespace ubar

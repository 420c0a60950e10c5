#include "ubar/sequence.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "ubar/error.hpp"
#include "ubar/normalize.hpp"
#include "ubar/parallel.hpp"
#include "ubar/spans.hpp"

namespace ubar {

std::string_view mode_name(SequenceMode m) {
  switch (m) {
    case SequenceMode::kUbarDelex: return "ubar_delex";
    case SequenceMode::kUrur: return "urur";
    case SequenceMode::kDstLex: return "dst_lex";
  }
  return {};
}

std::optional<SequenceMode> parse_mode(std::string_view name) {
  for (auto m : {SequenceMode::kUbarDelex, SequenceMode::kUrur, SequenceMode::kDstLex}) {
    if (mode_name(m) == name) return m;
  }
  return std::nullopt;
}

Measurer whitespace_measurer(double factor) {
  return [factor](const TokenSeq& seq) {
    return static_cast<std::size_t>(std::ceil(static_cast<double>(seq.size()) * factor - 1e-9));
  };
}

TokenSeq BlockSeq::flatten() const {
  TokenSeq out;
  for (const auto& b : blocks) out.append(b);
  return out;
}

BlockSeq split_blocks(const TokenSeq& seq) {
  BlockSeq out;
  std::optional<int> last_open;
  for (const auto& tok : seq) {
    auto f = tokens::framing(tok);
    if (f && f->second) {
      int order = static_cast<int>(f->first);
      if (!last_open || order <= *last_open) out.blocks.emplace_back();
      last_open = order;
    }
    if (out.blocks.empty()) out.blocks.emplace_back();
    out.blocks.back().push_back(tok);
  }
  return out;
}

Truncated truncate(const BlockSeq& seq, const TokenBudget& budget, const Measurer& measure) {
  Truncated out;
  std::size_t start = 0;
  const std::size_t n = seq.blocks.size();
  auto measure_from = [&](std::size_t from) {
    TokenSeq flat;
    for (std::size_t i = from; i < n; ++i) flat.append(seq.blocks[i]);
    return measure(flat);
  };
  while (start + 1 < n && measure_from(start) > budget.max_len) ++start;
  out.dropped = start;
  out.seq.blocks.assign(seq.blocks.begin() + static_cast<std::ptrdiff_t>(start), seq.blocks.end());
  out.oversized = n > 0 && start + 1 == n && measure_from(start) > budget.max_len;
  return out;
}

Truncated truncate(const TokenSeq& seq, const TokenBudget& budget, const Measurer& measure) {
  return truncate(split_blocks(seq), budget, measure);
}

std::vector<GoldDb> gold_db(const DialogSession& session) {
  std::vector<GoldDb> out;
  std::optional<std::string> domain;
  for (const auto& t : session.turns) {
    domain = active_domain(t.belief, domain);
    GoldDb g;
    g.domain = domain;
    if (t.db_match && domain) g.token = bucket(*t.db_match, *domain);
    out.push_back(g);
  }
  return out;
}

std::vector<GoldComponents> gold_components(const DialogSession& session, bool lexicalized_responses) {
  auto db = gold_db(session);
  std::vector<GoldComponents> out;
  out.reserve(session.turns.size());
  for (std::size_t i = 0; i < session.turns.size(); ++i) {
    const Turn& t = session.turns[i];
    out.push_back({t.belief, db[i].token, t.act, lexicalized_responses ? t.response_lex : t.response_delex});
  }
  return out;
}

BlockSeq build_session_blocks(const DialogSession& session, SequenceMode mode) {
  BlockSeq out;
  auto db = gold_db(session);
  for (std::size_t i = 0; i < session.turns.size(); ++i) {
    const Turn& t = session.turns[i];
    TokenSeq block = encode_text(Component::kUser, t.user);
    if (mode != SequenceMode::kUrur) {
      block.append(encode_belief(t.belief));
      block.append(encode_db(db[i].token));
      block.append(encode_act(t.act));
    }
    const std::string& r = mode == SequenceMode::kDstLex ? t.response_lex : t.response_delex;
    block.append(encode_text(Component::kResponse, r));
    out.blocks.push_back(std::move(block));
  }
  return out;
}

TokenSeq build_session_sequence(const DialogSession& session, SequenceMode mode) {
  return build_session_blocks(session, mode).flatten();
}

// ---- policies ---------------------------------------------------------------

void ContextPolicy::check() const {
  if (content_mask != ContentMask::kFull && window != Window::kAll) {
    throw ConfigError("content masks ur_only and bda_only require window=all");
  }
}

std::string ContextPolicy::str() const {
  auto src = [](Source s) { return s == Source::kOracle ? "oracle" : "gen"; };
  std::string mask = content_mask == ContentMask::kFull     ? "full"
                     : content_mask == ContentMask::kUrOnly ? "ur_only"
                                                            : "bda_only";
  return std::string("window=") + (window == Window::kAll ? "all" : "prev") + ",belief=" + src(belief_source) +
         ",actresp=" + src(act_resp_source) + ",mask=" + mask;
}

ContextPolicy ContextPolicy::parse(std::string_view text) {
  ContextPolicy p;
  auto source = [](std::string_view v) {
    if (v == "gen" || v == "generated") return Source::kGenerated;
    if (v == "oracle" || v == "gt") return Source::kOracle;
    throw ConfigError("unknown context source '" + std::string(v) + "'");
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string_view item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    pos = comma == std::string_view::npos ? text.size() + 1 : comma + 1;
    if (item.empty()) continue;
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("policy item '" + std::string(item) + "' is not key=value");
    std::string_view key = item.substr(0, eq);
    std::string_view value = item.substr(eq + 1);
    if (key == "window") {
      if (value == "all") {
        p.window = Window::kAll;
      } else if (value == "prev") {
        p.window = Window::kPrev;
      } else {
        throw ConfigError("unknown window '" + std::string(value) + "'");
      }
    } else if (key == "belief") {
      p.belief_source = source(value);
    } else if (key == "actresp") {
      p.act_resp_source = source(value);
    } else if (key == "mask") {
      if (value == "full") {
        p.content_mask = ContentMask::kFull;
      } else if (value == "ur_only") {
        p.content_mask = ContentMask::kUrOnly;
      } else if (value == "bda_only") {
        p.content_mask = ContentMask::kBdaOnly;
      } else {
        throw ConfigError("unknown content mask '" + std::string(value) + "'");
      }
    } else {
      throw ConfigError("unknown policy key '" + std::string(key) + "'");
    }
  }
  p.check();
  return p;
}

Context build_context(const std::vector<HistoryTurn>& history, std::string_view current_user,
                      const ContextPolicy& policy, const ContextOptions& options) {
  policy.check();
  std::size_t first = 0;
  if (policy.window == Window::kPrev && !history.empty()) first = history.size() - 1;

  BlockSeq blocks;
  for (std::size_t i = first; i < history.size(); ++i) {
    const HistoryTurn& h = history[i];
    bool need_gold = policy.belief_source == Source::kOracle || policy.act_resp_source == Source::kOracle;
    if (need_gold && !h.gold) {
      throw ConfigError("context policy requests ground truth for history turn " + std::to_string(i) +
                        ", which has none");
    }
    const bool gold_b = policy.belief_source == Source::kOracle;
    const bool gold_a = policy.act_resp_source == Source::kOracle;
    const BeliefState& b = gold_b ? h.gold->belief : h.belief;
    DbToken d = gold_b ? h.gold->db : h.db;
    const ActFrame& a = gold_a ? h.gold->act : h.act;
    const std::string& r = gold_a ? h.gold->response : h.response;

    TokenSeq block;
    if (policy.content_mask != ContentMask::kBdaOnly) block.append(encode_text(Component::kUser, h.user));
    if (policy.content_mask != ContentMask::kUrOnly) {
      block.append(encode_belief(b));
      block.append(encode_db(d));
      block.append(encode_act(a));
    }
    if (policy.content_mask != ContentMask::kBdaOnly) block.append(encode_text(Component::kResponse, r));
    blocks.blocks.push_back(std::move(block));
  }
  TokenSeq current = encode_text(Component::kUser, current_user);
  current.push_back(sos(Component::kBelief));
  blocks.blocks.push_back(std::move(current));

  Measurer measure = options.measure ? options.measure : whitespace_measurer();
  Truncated t = truncate(blocks, options.budget, measure);
  Context ctx;
  ctx.tokens = t.seq.flatten();
  ctx.history_blocks = t.seq.blocks.size() - 1;
  ctx.dropped_blocks = t.dropped;
  ctx.oversized = t.oversized;
  return ctx;
}

std::size_t export_training_file(const Corpus& corpus, SequenceMode mode, const std::filesystem::path& out) {
  auto lines = parallel_map(corpus.sessions.size(), default_parallelism(),
                            [&](std::size_t i) { return build_session_sequence(corpus.sessions[i], mode).str(); });
  std::ofstream f(out, std::ios::binary);
  if (!f) throw DataError("cannot write " + out.string());
  for (const auto& l : lines) f << l << '\n';
  if (!f) throw DataError("write failed for " + out.string());

  nlohmann::ordered_json meta;
  meta["mode"] = std::string(mode_name(mode));
  meta["registry_version"] = std::string(kRegistryVersion);
  meta["corpus_version"] = corpus.version;
  meta["sequences"] = lines.size();
  std::ofstream m(out.string() + ".meta.json", std::ios::binary);
  if (!m) throw DataError("cannot write " + out.string() + ".meta.json");
  m << meta.dump(2) << '\n';
  return lines.size();
}

}  // namespace ubar

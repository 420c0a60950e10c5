#include "ubar/orchestrator.hpp"

#include <unordered_map>

#include "ubar/error.hpp"
#include "ubar/parallel.hpp"
#include "ubar/spans.hpp"

namespace ubar {

std::string_view setting_name(Setting s) {
  switch (s) {
    case Setting::kResponseGeneration: return "response_generation";
    case Setting::kPolicyOptimization: return "policy_optimization";
    case Setting::kEndToEnd: return "end_to_end";
    case Setting::kDst: return "dst";
  }
  return {};
}

std::optional<Setting> parse_setting(std::string_view name) {
  for (auto s : {Setting::kResponseGeneration, Setting::kPolicyOptimization, Setting::kEndToEnd,
                 Setting::kDst}) {
    if (setting_name(s) == name) return s;
  }
  return std::nullopt;
}

bool generates_belief(Setting s) { return s == Setting::kEndToEnd || s == Setting::kDst; }
bool generates_act(Setting s) { return s == Setting::kEndToEnd || s == Setting::kPolicyOptimization; }
bool generates_response(Setting s) { return s != Setting::kDst; }

std::string_view provenance_name(Provenance p) { return p == Provenance::kOracle ? "oracle" : "generated"; }

std::string_view stop_reason_name(StopReason r) { return r == StopReason::kStopToken ? "stop_token" : "length"; }

namespace {

TokenSeq drop_first(const TokenSeq& seq) { return seq.empty() ? seq : seq.slice(1, seq.size()); }

class OracleDecoder final : public Decoder {
 public:
  OracleDecoder(const Corpus& corpus, bool lexicalized) : lexicalized_(lexicalized) {
    for (const auto& s : corpus.sessions) {
      sessions_.emplace(s.session_id, Entry{s, gold_db(s)});
    }
  }

  Decoded generate_until(const DecodeRequest& request) const override {
    auto f = tokens::framing(request.stop);
    if (!f || f->second) throw DecoderError("oracle decoder: stop token '" + request.stop + "' is not a closer");
    auto it = sessions_.find(request.cursor.session_id);
    if (it == sessions_.end()) {
      throw DecoderError("oracle decoder: unknown session '" + request.cursor.session_id + "'");
    }
    const Entry& e = it->second;
    if (request.cursor.turn >= e.session.turns.size()) {
      throw DecoderError("oracle decoder: session '" + request.cursor.session_id + "' has no turn " +
                         std::to_string(request.cursor.turn));
    }
    const Turn& t = e.session.turns[request.cursor.turn];
    TokenSeq span;
    switch (f->first) {
      case Component::kUser: span = encode_text(Component::kUser, t.user); break;
      case Component::kBelief: span = encode_belief(t.belief); break;
      case Component::kDb: span = encode_db(e.db[request.cursor.turn].token); break;
      case Component::kAct: span = encode_act(t.act); break;
      case Component::kResponse:
        span = encode_text(Component::kResponse, lexicalized_ ? t.response_lex : t.response_delex);
        break;
    }
    return {drop_first(span), StopReason::kStopToken};
  }

 private:
  struct Entry {
    DialogSession session;
    std::vector<GoldDb> db;
  };
  bool lexicalized_;
  std::unordered_map<std::string, Entry> sessions_;
};

// Continuation tokens without the trailing stop token.
TokenSeq content_of(const Decoded& d, std::string_view stop) {
  TokenSeq out = d.tokens;
  if (!out.empty() && out.back() == stop) out.pop_back();
  return out;
}

void note(TurnRecord& rec, std::string_view component, const std::vector<std::string>& diags) {
  for (const auto& d : diags) rec.diagnostics.push_back(std::string(component) + ": " + d);
}

}  // namespace

std::shared_ptr<const Decoder> corpus_oracle_decoder(const Corpus& corpus, bool lexicalized_responses) {
  return std::make_shared<OracleDecoder>(corpus, lexicalized_responses);
}

TurnRecord run_turn(SessionState& state, const TurnInput& input, const Decoder& decoder,
                    const RunOptions& options, const EntityDb& db) {
  const Setting setting = options.setting;
  const bool gen_b = generates_belief(setting);
  const bool gen_a = generates_act(setting);
  const bool gen_r = generates_response(setting);
  if ((!gen_b || !gen_a || !gen_r) && !input.gold) {
    throw ConfigError(std::string("setting ") + std::string(setting_name(setting)) +
                      " needs ground truth for the current turn");
  }

  Measurer measure = options.measure;
  if (!measure) measure = decoder.measurer();
  if (!measure) measure = whitespace_measurer();
  Context ctx = build_context(state.history, input.user, options.policy, {options.budget, measure});

  TurnRecord rec;
  rec.turn = input.cursor.turn;
  rec.user = input.user;
  rec.context_blocks = ctx.history_blocks;
  rec.dropped_blocks = ctx.dropped_blocks;
  rec.belief_source = gen_b ? Provenance::kGenerated : Provenance::kOracle;
  rec.act_source = gen_a ? Provenance::kGenerated : Provenance::kOracle;
  rec.response_source = gen_r ? Provenance::kGenerated : Provenance::kOracle;
  if (ctx.oversized) rec.diagnostics.push_back("context: current turn alone exceeds the token budget");

  TokenSeq running = ctx.tokens;  // ends with <sos_b>

  // Belief.
  if (gen_b) {
    const std::string stop = eos(Component::kBelief);
    Decoded d = decoder.generate_until({running, stop, options.limits.belief, input.cursor});
    TokenSeq span{sos(Component::kBelief)};
    span.append(d.tokens);
    auto parsed = parse_belief(span, Strictness::kTolerant);
    note(rec, "belief", parsed.diagnostics);
    if (parsed.value.empty() && !content_of(d, stop).empty()) {
      rec.belief = state.history.empty() ? BeliefState{} : state.history.back().belief;
      rec.diagnostics.push_back("belief: unparseable output, previous belief carried forward");
    } else {
      rec.belief = std::move(parsed.value);
    }
  } else {
    rec.belief = input.gold->belief;
  }
  running.append(drop_first(encode_belief(rec.belief)));

  // Database.
  if (gen_b) {
    DbResult r = lookup(db, rec.belief, state.last_domain);
    rec.db = r.token;
    rec.db_domain = r.domain;
  } else {
    rec.db = input.gold->db;
    rec.db_domain = active_domain(rec.belief, state.last_domain);
  }
  state.last_domain = rec.db_domain;
  running.append(encode_db(rec.db));

  // Act.
  running.push_back(sos(Component::kAct));
  if (gen_a) {
    const std::string stop = eos(Component::kAct);
    Decoded d = decoder.generate_until({running, stop, options.limits.act, input.cursor});
    TokenSeq span{sos(Component::kAct)};
    span.append(d.tokens);
    auto parsed = parse_act(span, Strictness::kTolerant);
    note(rec, "act", parsed.diagnostics);
    rec.act = std::move(parsed.value);
  } else {
    rec.act = input.gold->act;
  }
  running.append(drop_first(encode_act(rec.act)));

  // Response.
  if (gen_r) {
    running.push_back(sos(Component::kResponse));
    const std::string stop = eos(Component::kResponse);
    Decoded d = decoder.generate_until({running, stop, options.limits.response, input.cursor});
    TokenSeq words;
    for (const auto& tok : content_of(d, stop)) {
      if (tokens::framing(tok)) {
        rec.diagnostics.push_back("response: dropped framing token " + tok);
        continue;
      }
      words.push_back(tok);
    }
    if (d.reason == StopReason::kLength) {
      rec.diagnostics.push_back("response: unterminated span closed at max_new");
    }
    rec.response = words.str();
  } else {
    rec.response = input.gold->response;
  }

  state.history.push_back({rec.user, rec.belief, rec.db, rec.act, rec.response, input.gold});
  return rec;
}

namespace {

// Appends records to `out` turn by turn so a failure keeps the finished turns.
void run_into(GeneratedSession& out, const DialogSession& session, const Decoder& decoder,
              const RunOptions& options, const EntityDb& db) {
  out.session_id = session.session_id;
  auto gold = gold_components(session, options.setting == Setting::kDst);
  SessionState state;
  for (std::size_t i = 0; i < session.turns.size(); ++i) {
    TurnInput input{session.turns[i].user, gold[i], {session.session_id, i}};
    out.turns.push_back(run_turn(state, input, decoder, options, db));
  }
}

}  // namespace

GeneratedSession run_session(const DialogSession& session, const Decoder& decoder,
                             const RunOptions& options, const EntityDb& db) {
  GeneratedSession out;
  run_into(out, session, decoder, options, db);
  return out;
}

std::vector<GeneratedSession> run_sessions(const std::vector<DialogSession>& sessions,
                                           const Decoder& decoder, const RunOptions& options,
                                           const EntityDb& db, std::size_t workers) {
  options.policy.check();
  return parallel_map(sessions.size(), workers, [&](std::size_t i) {
    GeneratedSession out;
    try {
      run_into(out, sessions[i], decoder, options, db);
    } catch (const DecoderError& e) {
      out.failed = true;
      out.error = e.what();
    }
    return out;
  });
}

std::optional<std::string> first_gold_mismatch(const GeneratedSession& gen, const DialogSession& gold,
                                               Setting setting) {
  if (gen.session_id != gold.session_id) return "session id " + gen.session_id + " != " + gold.session_id;
  if (gen.turns.size() != gold.turns.size()) {
    return "turn count " + std::to_string(gen.turns.size()) + " != " + std::to_string(gold.turns.size());
  }
  auto golds = gold_components(gold, setting == Setting::kDst);
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const TurnRecord& r = gen.turns[i];
    const GoldComponents& g = golds[i];
    std::string where = gold.session_id + " turn " + std::to_string(i) + ": ";
    if (r.user != gold.turns[i].user) return where + "user differs";
    if (encode_belief(r.belief) != encode_belief(g.belief)) {
      return where + "belief " + encode_belief(r.belief).str() + " != " + encode_belief(g.belief).str();
    }
    if (r.db != g.db) {
      return where + "db " + std::string(db_token_surface(r.db)) + " != " + std::string(db_token_surface(g.db));
    }
    if (encode_act(r.act) != encode_act(g.act)) {
      return where + "act " + encode_act(r.act).str() + " != " + encode_act(g.act).str();
    }
    if (TokenSeq::from_text(r.response) != TokenSeq::from_text(g.response)) {
      return where + "response '" + r.response + "' != '" + g.response + "'";
    }
  }
  return std::nullopt;
}

}  // namespace ubar

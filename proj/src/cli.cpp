#include "ubar/cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "ubar/corpus.hpp"
#include "ubar/delex.hpp"
#include "ubar/error.hpp"
#include "ubar/eval.hpp"
#include "ubar/hash.hpp"
#include "ubar/lm_client.hpp"
#include "ubar/parallel.hpp"
#include "ubar/serialize.hpp"
#include "ubar/spans.hpp"

namespace ubar::cli {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kToolVersion = "1.0.0";

struct RunConfig {
  std::string corpus;
  std::string db;
  std::string mode;
  std::string setting = "end_to_end";
  std::string policy = "window=all,belief=gen,actresp=gen,mask=full";
  std::string decoder = "oracle";
  std::uint64_t seed = 0;
  std::string output;
  std::size_t jobs = 0;  // 0: logical core count
  std::string split = "test";
  std::size_t max_len = 1024;
  double max_failure_rate = 0.0;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

// Manifest attached to every output. `config` holds the resolved settings.
Json manifest(std::string_view command, const Json& config, std::string_view corpus_version) {
  Json m;
  m["command"] = std::string(command);
  m["tool_version"] = std::string(kToolVersion);
  m["registry_version"] = std::string(kRegistryVersion);
  m["corpus_version"] = std::string(corpus_version);
  m["config"] = config;
  m["config_hash"] = hex64(fnv1a64(config.dump()));
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
  if (!f) throw DataError("write failed for " + path.string());
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read " + path.string());
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), e.what());
  }
}

Corpus load_any(const std::string& path, const std::string& version, const EntityDb* db) {
  if (!fs::exists(path)) throw DataError("no such corpus: " + path);
  CorpusFormat format = fs::is_directory(path) ? CorpusFormat::kMultiwozRaw : detect_format(path);
  return load_corpus(path, format, {version, db});
}

Corpus select_split(const Corpus& corpus, const std::string& split) {
  if (split == "all") return corpus;
  if (split != "train" && split != "dev" && split != "test") throw ConfigError("unknown split '" + split + "'");
  std::vector<DialogSession> picked;
  for (const auto& s : corpus.sessions) {
    if (s.split == split) picked.push_back(s);
  }
  return with_sessions(corpus, std::move(picked));
}

std::shared_ptr<const Decoder> make_decoder(const std::string& spec, const Corpus& corpus, bool lexicalized) {
  if (spec == "oracle") return corpus_oracle_decoder(corpus, lexicalized);
  if (spec == "lm" || spec.rfind("lm:", 0) == 0) {
    LmParams params;
    if (spec.size() > 3) params.endpoint = spec.substr(3);
    params.endpoint = resolve_endpoint(params.endpoint);
    return LmClient::connect(params);
  }
  throw ConfigError("unknown decoder '" + spec + "' (expected oracle or lm:<endpoint>)");
}

Json run_config_json(const RunConfig& c, const ContextPolicy& policy, SequenceMode mode, Setting setting) {
  Json j;
  j["corpus"] = c.corpus;
  j["db"] = c.db;
  j["mode"] = std::string(mode_name(mode));
  j["setting"] = std::string(setting_name(setting));
  j["policy"] = policy.str();
  j["decoder"] = c.decoder;
  j["seed"] = c.seed;
  j["split"] = c.split;
  j["max_len"] = c.max_len;
  j["max_failure_rate"] = c.max_failure_rate;
  return j;
}

struct Resolved {
  Setting setting;
  SequenceMode mode;
  ContextPolicy policy;
};

Resolved resolve(const RunConfig& c) {
  Resolved r{};
  auto setting = parse_setting(c.setting);
  if (!setting) throw ConfigError("unknown setting '" + c.setting + "'");
  r.setting = *setting;
  r.policy = ContextPolicy::parse(c.policy);
  if (c.mode.empty()) {
    r.mode = r.setting == Setting::kDst ? SequenceMode::kDstLex : SequenceMode::kUbarDelex;
  } else {
    auto mode = parse_mode(c.mode);
    if (!mode) throw ConfigError("unknown mode '" + c.mode + "'");
    r.mode = *mode;
  }
  if ((r.setting == Setting::kDst) != (r.mode == SequenceMode::kDstLex)) {
    throw ConfigError("mode dst_lex goes with setting dst and only with it");
  }
  if (r.mode == SequenceMode::kUrur && r.policy.content_mask != ContentMask::kUrOnly) {
    throw ConfigError("mode urur requires policy mask=ur_only");
  }
  if (c.max_len == 0) throw ConfigError("max-len must be positive");
  return r;
}

// ---- commands ---------------------------------------------------------------

struct PreprocessArgs {
  std::string input;
  std::string output;
  std::string version = "2.0";
  std::string db;
  std::string report;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<EntityDb> db;
  if (!a.db.empty()) db = load_db(a.db, a.version);
  Corpus corpus = load_any(a.input, a.version, db ? &*db : nullptr);
  ValidationReport report = validate(corpus);
  write_canonical(corpus, a.output);

  Json config;
  config["input"] = a.input;
  config["version"] = a.version;
  config["db"] = a.db;
  Json rep;
  rep["manifest"] = manifest("preprocess", config, corpus.version);
  rep["sessions"] = corpus.sessions.size();
  Json counts = Json::object();
  for (auto kind : {Violation::Kind::kDuplicateSessionId, Violation::Kind::kOutOfOntology,
                    Violation::Kind::kPlaceholderLeak, Violation::Kind::kMissingPlaceholder,
                    Violation::Kind::kInvalidPlaceholder, Violation::Kind::kInvalidRequestable}) {
    counts[std::string(violation_name(kind))] = report.count(kind);
  }
  rep["counts"] = counts;
  Json list = Json::array();
  for (const auto& v : report.violations) {
    Json e;
    e["kind"] = std::string(violation_name(v.kind));
    e["session_id"] = v.session_id;
    e["turn"] = v.turn ? Json(*v.turn) : Json(nullptr);
    e["detail"] = v.detail;
    list.push_back(std::move(e));
  }
  rep["violations"] = std::move(list);
  write_json(a.report.empty() ? a.output + ".report.json" : a.report, rep);

  for (const auto& v : report.violations) {
    err << "warning: " << violation_name(v.kind) << " in " << v.session_id;
    if (v.turn) err << " turn " << *v.turn;
    err << ": " << v.detail << "\n";
  }
  out << corpus.sessions.size() << " sessions, " << report.violations.size() << " violations\n";
  return kOk;
}

struct ExportArgs {
  std::string corpus;
  std::string output;
  std::string mode = "ubar_delex";
  std::string split = "train";
};

int cmd_export(const ExportArgs& a, std::ostream& out) {
  auto mode = parse_mode(a.mode);
  if (!mode) throw ConfigError("unknown mode '" + a.mode + "'");
  Corpus corpus = select_split(load_any(a.corpus, "2.0", nullptr), a.split);
  if (fs::path(a.output).has_parent_path()) fs::create_directories(fs::path(a.output).parent_path());
  std::size_t n = export_training_file(corpus, *mode, a.output);
  out << n << " sequences written to " << a.output << "\n";
  return kOk;
}

int cmd_run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Resolved r = resolve(c);
  EntityDb db = load_db(c.db);
  Corpus corpus = select_split(load_any(c.corpus, "2.0", nullptr), c.split);
  auto decoder = make_decoder(c.decoder, corpus, r.setting == Setting::kDst);

  RunOptions options;
  options.setting = r.setting;
  options.policy = r.policy;
  options.budget.max_len = c.max_len;
  const std::size_t jobs = c.jobs == 0 ? default_parallelism() : c.jobs;
  auto generated = run_sessions(corpus.sessions, *decoder, options, db, jobs);

  EvalOptions eval_options;
  eval_options.lexicalized_references = r.setting == Setting::kDst;
  eval_options.workers = jobs;
  MetricReport report = evaluate(generated, corpus, db, eval_options);

  Json m = manifest("run", run_config_json(c, r.policy, r.mode, r.setting), corpus.version);
  Json archive;
  archive["manifest"] = m;
  archive["sessions"] = Json::array();
  for (const auto& g : generated) archive["sessions"].push_back(session_to_json(g));
  Json metrics;
  metrics["manifest"] = m;
  metrics["metrics"] = report.to_json();

  if (!c.output.empty()) {
    fs::path dir(c.output);
    fs::create_directories(dir);
    write_json(dir / "transcripts.json", archive);
    write_json(dir / "metrics.json", metrics);
    write_text(dir / "metrics.txt", report.table());
  }
  out << report.table();

  std::size_t failed = 0;
  for (const auto& g : generated) {
    if (g.failed) {
      ++failed;
      err << "session " << g.session_id << " failed: " << g.error << "\n";
    }
  }
  const double rate = generated.empty() ? 0.0 : static_cast<double>(failed) / static_cast<double>(generated.size());
  if (rate > c.max_failure_rate) {
    err << "error: decoder failure rate " << rate << " exceeds " << c.max_failure_rate << "\n";
    return kDecoderError;
  }
  return kOk;
}

struct EvaluateArgs {
  std::string corpus;
  std::string db;
  std::string transcripts;
  std::string output;
  std::size_t jobs = 0;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  EntityDb db = load_db(a.db);
  Corpus corpus = load_any(a.corpus, "2.0", nullptr);
  Json archive = read_json(a.transcripts);
  if (!archive.contains("sessions") || !archive["sessions"].is_array()) {
    throw ParseError(a.transcripts, "transcript archive has no sessions array");
  }
  std::vector<GeneratedSession> generated;
  for (const auto& s : archive["sessions"]) generated.push_back(session_from_json(s));
  EvalOptions options;
  options.workers = a.jobs == 0 ? default_parallelism() : a.jobs;
  if (archive.contains("manifest")) {
    const Json& m = archive["manifest"];
    options.lexicalized_references = m.contains("config") && m["config"].value("setting", "") == "dst";
  }
  MetricReport report = evaluate(generated, corpus, db, options);
  if (!a.output.empty()) {
    Json config;
    config["corpus"] = a.corpus;
    config["db"] = a.db;
    config["transcripts"] = a.transcripts;
    Json metrics;
    metrics["manifest"] = manifest("evaluate", config, corpus.version);
    metrics["metrics"] = report.to_json();
    write_json(a.output, metrics);
  }
  out << report.table();
  return kOk;
}

struct SplitArgs {
  std::string corpus;
  std::string held_out;
  std::size_t fewshot = 0;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
  Corpus corpus = load_any(a.corpus, "2.0", nullptr);
  DomainTransferSplit s = split_leave_one_domain_out(corpus, a.held_out, a.fewshot, a.seed);
  fs::path dir(a.output);
  fs::create_directories(dir);
  const std::pair<const char*, const Corpus*> parts[] = {{"train_without.json", &s.train_without},
                                                         {"fewshot.json", &s.fewshot},
                                                         {"eval_in_domain.json", &s.eval_in_domain},
                                                         {"eval_held_out.json", &s.eval_held_out}};
  Json config;
  config["corpus"] = a.corpus;
  config["held_out"] = a.held_out;
  config["fewshot"] = a.fewshot;
  config["seed"] = a.seed;
  Json m = manifest("split", config, corpus.version);
  m["files"] = Json::object();
  for (const auto& [name, part] : parts) {
    write_canonical(*part, dir / name);
    m["files"][name] = part->sessions.size();
    out << name << ": " << part->sessions.size() << " sessions\n";
  }
  write_json(dir / "manifest.json", m);
  return kOk;
}

struct ChatArgs {
  std::string corpus;
  std::string db;
  std::string decoder = "oracle";
  std::string session = "chat";
  std::string policy = "window=all,belief=gen,actresp=gen,mask=full";
  std::uint64_t seed = 0;
  std::size_t max_len = 1024;
};

int cmd_chat(const ChatArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  EntityDb db = load_db(a.db);
  Corpus corpus;
  if (!a.corpus.empty()) corpus = load_any(a.corpus, "2.0", nullptr);
  auto decoder = make_decoder(a.decoder, corpus, false);
  RunOptions options;
  options.setting = Setting::kEndToEnd;
  options.policy = ContextPolicy::parse(a.policy);
  if (options.policy.belief_source == Source::kOracle || options.policy.act_resp_source == Source::kOracle) {
    throw ConfigError("chat has no ground truth; use belief=gen,actresp=gen");
  }
  options.budget.max_len = a.max_len;

  SessionState state;
  std::vector<std::pair<std::string, std::string>> transcript;
  std::map<std::string, Entity> offered;
  std::string line;
  while (true) {
    out << "user> " << std::flush;
    if (!std::getline(in, line)) break;
    std::string user = normalize_utterance(line);
    if (user.empty()) continue;
    if (user == "/quit") break;
    if (user == "/state") {
      BeliefState b = state.history.empty() ? BeliefState{} : state.history.back().belief;
      out << encode_belief(b).str() << "\n";
      continue;
    }
    const std::size_t turn = state.history.size();
    try {
      TurnRecord rec = run_turn(state, {user, std::nullopt, {a.session, turn}}, *decoder, options, db);
      std::optional<Entity> entity;
      if (rec.db_domain && schema::has_database(*rec.db_domain)) {
        // Stay with the entity already offered in this domain while it still matches.
        auto results = query(db, rec.belief, *rec.db_domain);
        auto held = offered.find(*rec.db_domain);
        if (held != offered.end() &&
            std::any_of(results.begin(), results.end(), [&](const Entity* e) { return *e == held->second; })) {
          entity = held->second;
        } else {
          entity = select_entity(results, SelectPolicy::kSeededRandom, fnv1a64(std::to_string(turn), a.seed));
          if (entity) offered[*rec.db_domain] = *entity;
        }
      }
      std::optional<std::string> ref = booking_reference(a.seed, a.session, turn);
      std::optional<std::string_view> domain;
      if (rec.db_domain) domain = *rec.db_domain;
      Lexicalized lex = lexicalize(rec.response, entity ? &*entity : nullptr, rec.belief, ref, domain);
      out << "system> " << lex.text << "\n";
      transcript.emplace_back(user, lex.text);
    } catch (const DecoderError& e) {
      err << "error: " << e.what() << "\n";
      out << "system> (no response: decoder error)\n";
    }
  }
  out << "\n--- transcript ---\n";
  for (const auto& [u, s] : transcript) out << "user: " << u << "\nsystem: " << s << "\n";
  return kOk;
}

int cmd_registry(const std::string& output, std::ostream& out) {
  std::ostringstream ss;
  tokens::write_registry(ss);
  if (output.empty()) {
    out << ss.str();
  } else {
    write_text(output, ss.str());
    out << tokens::registry().size() << " tokens written to " << output << "\n";
  }
  return kOk;
}

}  // namespace

Json session_to_json(const GeneratedSession& s) {
  Json j;
  j["session_id"] = s.session_id;
  j["failed"] = s.failed;
  j["error"] = s.error;
  j["turns"] = Json::array();
  for (const auto& t : s.turns) {
    Json e;
    e["turn"] = t.turn;
    e["user"] = t.user;
    e["belief"] = json::belief_to_json(t.belief);
    e["db"] = std::string(db_token_surface(t.db));
    e["db_domain"] = t.db_domain ? Json(*t.db_domain) : Json(nullptr);
    e["act"] = json::act_to_json(t.act);
    e["response"] = t.response;
    e["provenance"] = {{"belief", std::string(provenance_name(t.belief_source))},
                       {"act", std::string(provenance_name(t.act_source))},
                       {"response", std::string(provenance_name(t.response_source))}};
    e["diagnostics"] = t.diagnostics;
    e["context_blocks"] = t.context_blocks;
    e["dropped_blocks"] = t.dropped_blocks;
    j["turns"].push_back(std::move(e));
  }
  return j;
}

GeneratedSession session_from_json(const Json& j) {
  const std::string where = "transcript session";
  try {
    GeneratedSession s;
    s.session_id = j.at("session_id").get<std::string>();
    s.failed = j.value("failed", false);
    s.error = j.value("error", "");
    const std::string w = where + " " + s.session_id;
    auto provenance = [&](const Json& p) {
      const std::string v = p.get<std::string>();
      if (v == "oracle") return Provenance::kOracle;
      if (v == "generated") return Provenance::kGenerated;
      throw ParseError(w, "unknown provenance '" + v + "'");
    };
    for (const auto& e : j.at("turns")) {
      TurnRecord t;
      t.turn = e.at("turn").get<std::size_t>();
      t.user = e.at("user").get<std::string>();
      t.belief = json::belief_from_json(e.at("belief"), w);
      auto db = parse_db_token(e.at("db").get<std::string>());
      if (!db) throw ParseError(w, "unknown db token");
      t.db = *db;
      if (e.contains("db_domain") && !e["db_domain"].is_null()) t.db_domain = e["db_domain"].get<std::string>();
      t.act = json::act_from_json(e.at("act"), w);
      t.response = e.at("response").get<std::string>();
      if (e.contains("provenance")) {
        const Json& p = e["provenance"];
        t.belief_source = provenance(p.at("belief"));
        t.act_source = provenance(p.at("act"));
        t.response_source = provenance(p.at("response"));
      }
      t.diagnostics = e.value("diagnostics", std::vector<std::string>{});
      t.context_blocks = e.value("context_blocks", std::size_t{0});
      t.dropped_blocks = e.value("dropped_blocks", std::size_t{0});
      s.turns.push_back(std::move(t));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where, e.what());
  }
}

int main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Task-oriented dialog toolkit: preprocessing, sequence export, session runs and evaluation."};
  app.set_config("--config", "", "TOML file with per-command sections; flags override it");
  app.fallthrough();
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* preprocess = app.add_subcommand("preprocess", "Load a raw or canonical corpus, normalize, validate, write canonical");
  preprocess->add_option("--input", pre.input, "Raw MultiWOZ directory or corpus file")->required();
  preprocess->add_option("--output", pre.output, "Canonical corpus to write")->required();
  preprocess->add_option("--version", pre.version, "Synonym-table version")->check(CLI::IsMember({"2.0", "2.1"}));
  preprocess->add_option("--db", pre.db, "Entity database (raw input)");
  preprocess->add_option("--report", pre.report, "Validation report path (default: <output>.report.json)");

  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export", "Write training sequences, one per line");
  export_cmd->add_option("--corpus", exp.corpus)->required();
  export_cmd->add_option("--output", exp.output)->required();
  export_cmd->add_option("--mode", exp.mode)->check(CLI::IsMember({"ubar_delex", "urur", "dst_lex"}));
  export_cmd->add_option("--split", exp.split)->check(CLI::IsMember({"train", "dev", "test", "all"}));

  RunConfig run;
  auto* run_cmd = app.add_subcommand("run", "Run sessions through a decoder and score them");
  run_cmd->add_option("--corpus", run.corpus)->required();
  run_cmd->add_option("--db", run.db)->required();
  run_cmd->add_option("--mode", run.mode, "Sequence mode (default follows the setting)");
  run_cmd->add_option("--setting", run.setting);
  run_cmd->add_option("--policy", run.policy, "window=all|prev,belief=gen|oracle,actresp=gen|oracle,mask=full|ur_only|bda_only");
  run_cmd->add_option("--decoder", run.decoder, "oracle or lm:<endpoint>");
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_option("--output", run.output, "Directory for transcripts and metrics");
  run_cmd->add_option("--jobs", run.jobs, "Worker threads (default: logical cores)");
  run_cmd->add_option("--split", run.split)->check(CLI::IsMember({"train", "dev", "test", "all"}));
  run_cmd->add_option("--max-len", run.max_len, "Context budget");
  run_cmd->add_option("--max-failure-rate", run.max_failure_rate)->check(CLI::Range(0.0, 1.0));

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a transcript archive");
  evaluate_cmd->add_option("--corpus", ev.corpus)->required();
  evaluate_cmd->add_option("--db", ev.db)->required();
  evaluate_cmd->add_option("--transcripts", ev.transcripts)->required();
  evaluate_cmd->add_option("--output", ev.output, "Metric report JSON");
  evaluate_cmd->add_option("--jobs", ev.jobs);

  SplitArgs sp;
  auto* split_cmd = app.add_subcommand("split", "Leave-one-domain-out few-shot split");
  split_cmd->add_option("--corpus", sp.corpus)->required();
  split_cmd->add_option("--held-out", sp.held_out)->required();
  split_cmd->add_option("--fewshot", sp.fewshot);
  split_cmd->add_option("--seed", sp.seed);
  split_cmd->add_option("--output", sp.output)->required();

  ChatArgs ch;
  auto* chat_cmd = app.add_subcommand("chat", "Interactive session (/state, /quit)");
  chat_cmd->add_option("--corpus", ch.corpus, "Corpus for the oracle decoder");
  chat_cmd->add_option("--db", ch.db)->required();
  chat_cmd->add_option("--decoder", ch.decoder);
  chat_cmd->add_option("--session", ch.session, "Session id the oracle decoder replays");
  chat_cmd->add_option("--policy", ch.policy);
  chat_cmd->add_option("--seed", ch.seed);
  chat_cmd->add_option("--max-len", ch.max_len);

  std::string registry_out;
  auto* registry_cmd = app.add_subcommand("registry", "Print or write the special-token registry");
  registry_cmd->add_option("--output", registry_out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    for (const auto* sub : app.get_subcommands()) {
      err << sub->help();
      return kUsage;
    }
    err << app.help();
    return kUsage;
  }

  try {
    if (*preprocess) return cmd_preprocess(pre, out, err);
    if (*export_cmd) return cmd_export(exp, out);
    if (*run_cmd) return cmd_run(run, out, err);
    if (*evaluate_cmd) return cmd_evaluate(ev, out);
    if (*split_cmd) return cmd_split(sp, out);
    if (*chat_cmd) return cmd_chat(ch, in, out, err);
    if (*registry_cmd) return cmd_registry(registry_out, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DecoderError& e) {
    err << "error: " << e.what() << "\n";
    return kDecoderError;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace ubar::cli

#pragma once

// Corpus ingestion (canonical and raw MultiWOZ layouts), validation and splits.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ubar/dbquery.hpp"
#include "ubar/types.hpp"

namespace ubar {

enum class CorpusFormat { kCanonical, kMultiwozRaw };

struct LoadOptions {
  // Synonym-table version for raw input. Canonical files carry their own.
  std::string version = "2.0";
  // Raw input only: used for db_match counts, response delexicalization and
  // the ontology's searchable values.
  const EntityDb* db = nullptr;
};

// Canonical: one JSON document {version, ontology, sessions}.
// Raw: a MultiWOZ directory (data.json, dialogue_acts.json, valListFile,
// testListFile) or the path of data.json itself.
// Every value in the result has passed normalize_value.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const LoadOptions& options = {});

// Detects the format from content: canonical files have a top-level
// "sessions" array.
CorpusFormat detect_format(const std::filesystem::path& path);

// Applies normalize_value (for the corpus version) to every belief, goal and
// ontology value, dropping values that normalize to empty.
void normalize_corpus(Corpus& corpus);

std::string canonical_text(const Corpus& corpus);
void write_canonical(const Corpus& corpus, const std::filesystem::path& path);

// Lowercases and separates sentence punctuation from words.
std::string normalize_utterance(std::string_view raw);

struct Violation {
  enum class Kind {
    kDuplicateSessionId,
    kOutOfOntology,
    kPlaceholderLeak,     // placeholder inside response_lex
    kMissingPlaceholder,  // belief value left verbatim in response_delex
    kInvalidPlaceholder,  // bracketed token that is not [value_<known slot>]
    kInvalidRequestable,
  };
  Kind kind;
  std::string session_id;
  std::optional<std::size_t> turn;
  std::string detail;
};

std::string_view violation_name(Violation::Kind k);

struct ValidationReport {
  std::vector<Violation> violations;

  bool empty() const { return violations.empty(); }
  std::size_t count(Violation::Kind k) const;
};

ValidationReport validate(const Corpus& corpus);

struct StandardSplit {
  Corpus train, dev, test;
};

// Partition by each session's split tag.
StandardSplit split_standard(const Corpus& corpus);

struct DomainTransferSplit {
  Corpus train_without;   // train sessions that never mention the held-out domain
  Corpus fewshot;         // seeded sample of train sessions that do
  Corpus eval_in_domain;  // test sessions without the held-out domain
  Corpus eval_held_out;   // test sessions with it
};

// held_out must be one of the five evaluation domains. Throws DataError when
// fewshot_n exceeds the number of train sessions mentioning held_out.
DomainTransferSplit split_leave_one_domain_out(const Corpus& corpus, std::string_view held_out,
                                               std::size_t fewshot_n, std::uint64_t seed);

// Corpus sharing version and ontology with `base` but holding `sessions`.
Corpus with_sessions(const Corpus& base, std::vector<DialogSession> sessions);

}  // namespace ubar

#pragma once

// Slot value canonicalization backed by the versioned synonym tables in
// data/normalization/ (compiled into the library).

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ubar {

// Lowercase, trim, and collapse internal whitespace runs to one space.
std::string normalize_text(std::string_view raw);

class Normalizer {
 public:
  // Throws DataError for an unknown version tag. "2.0" and "2.1" ship.
  static const Normalizer& for_version(std::string_view version);
  static std::vector<std::string> versions();

  // Builds a normalizer from a synonym-table document. Rejects tables that
  // would make normalization non-idempotent.
  static Normalizer from_json(std::string_view json_text);

  std::string normalize(std::string_view domain, std::string_view slot,
                        std::string_view raw) const;

  // Raw surface forms (including `canonical` itself) that normalize to
  // `canonical` for this slot; longest first.
  std::vector<std::string> surfaces(std::string_view slot, std::string_view canonical) const;

  const std::string& version() const { return version_; }

 private:
  using Table = std::map<std::string, std::string, std::less<>>;

  std::string version_;
  Table global_;
  std::map<std::string, Table, std::less<>> slots_;
};

// normalize_value with the table for `version` (default "2.0"). Idempotent.
std::string normalize_value(std::string_view domain, std::string_view slot,
                            std::string_view raw, std::string_view version = "2.0");

}  // namespace ubar

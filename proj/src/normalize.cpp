#include "ubar/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <mutex>

#include "embedded_tables.hpp"
#include "json.hpp"
#include "ubar/error.hpp"

namespace ubar {

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

Normalizer Normalizer::from_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("synonym table", e.what());
  }
  Normalizer n;
  n.version_ = doc.value("version", std::string{});
  auto read_table = [](const nlohmann::json& obj) {
    Table t;
    for (const auto& [k, v] : obj.items()) {
      t.emplace(normalize_text(k), normalize_text(v.get<std::string>()));
    }
    return t;
  };
  if (doc.contains("global")) n.global_ = read_table(doc["global"]);
  if (doc.contains("slots")) {
    for (const auto& [slot, table] : doc["slots"].items()) {
      n.slots_.emplace(slot, read_table(table));
    }
  }

  // A target that is itself rewritten would break idempotence.
  auto check = [&](std::string_view slot, const Table& t) {
    for (const auto& [from, to] : t) {
      if (n.normalize("", slot, to) != to) {
        throw DataError("synonym table " + n.version_ + ": target '" + to + "' of '" + from +
                        "' is not canonical");
      }
    }
  };
  check("", n.global_);
  for (const auto& [slot, t] : n.slots_) check(slot, t);
  return n;
}

const Normalizer& Normalizer::for_version(std::string_view version) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<Normalizer>, std::less<>> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(version); it != cache.end()) return *it->second;
  std::string_view text = detail::embedded_synonym_table(version);
  if (text.empty()) throw DataError("no synonym table for version '" + std::string(version) + "'");
  auto n = std::make_unique<Normalizer>(from_json(text));
  auto [it, _] = cache.emplace(std::string(version), std::move(n));
  return *it->second;
}

std::vector<std::string> Normalizer::versions() { return {"2.0", "2.1"}; }

std::string Normalizer::normalize(std::string_view /*domain*/, std::string_view slot,
                                  std::string_view raw) const {
  std::string v = normalize_text(raw);
  if (auto s = slots_.find(slot); s != slots_.end()) {
    if (auto it = s->second.find(v); it != s->second.end()) return it->second;
  }
  if (auto it = global_.find(v); it != global_.end()) return it->second;
  return v;
}

std::vector<std::string> Normalizer::surfaces(std::string_view slot,
                                              std::string_view canonical) const {
  std::vector<std::string> out{std::string(canonical)};
  auto collect = [&](const Table& t) {
    for (const auto& [from, to] : t) {
      if (to == canonical && normalize("", slot, from) == canonical) out.push_back(from);
    }
  };
  if (auto s = slots_.find(slot); s != slots_.end()) collect(s->second);
  collect(global_);
  std::sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string normalize_value(std::string_view domain, std::string_view slot, std::string_view raw,
                            std::string_view version) {
  return Normalizer::for_version(version).normalize(domain, slot, raw);
}

}  // namespace ubar

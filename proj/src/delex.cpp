#include "ubar/delex.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "ubar/schema.hpp"
#include "ubar/tokens.hpp"

namespace ubar {
namespace {

// A whitespace word with surrounding punctuation trimmed off its core.
struct Word {
  std::size_t begin;  // core span
  std::size_t end;
  std::string core;   // lowercased
};

bool is_trim_lead(char c) { return c == '(' || c == '"' || c == '\''; }
bool is_trim_tail(char c) {
  return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':' || c == ')' ||
         c == '"' || c == '\'';
}

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t b = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t e = i;
    while (b < e && is_trim_lead(text[b])) ++b;
    while (e > b && is_trim_tail(text[e - 1])) --e;
    if (e > b) {
      std::string core(text.substr(b, e - b));
      for (char& c : core) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      words.push_back({b, e, std::move(core)});
    }
  }
  return words;
}

std::vector<std::string> split_pattern(std::string_view s) {
  std::vector<std::string> out;
  for (const Word& w : split_words(s)) out.push_back(w.core);
  return out;
}

struct Candidate {
  std::vector<std::string> pattern;
  std::size_t chars;
  std::string slot;
  std::string domain;
  std::size_t priority;
};

// Values that are also everyday words ("yes", "no") are never placeholders.
bool skip_value(std::string_view v) {
  return v.empty() || v == "dontcare" || v == "yes" || v == "no" || v == "none" || v == "?";
}

}  // namespace

Delexicalized delexicalize(std::string_view text, const BeliefState& belief, const ActFrame& act,
                           std::span<const DomainEntity> entities, const DelexOptions& options) {
  const Normalizer& norm = Normalizer::for_version(options.version);
  std::vector<Candidate> candidates;
  auto add = [&](const std::string& domain, const std::string& slot, const std::string& value,
                 std::size_t priority) {
    if (skip_value(value) || !schema::is_placeholder_slot(slot)) return;
    const auto canonical = split_pattern(value);
    for (const std::string& surface : norm.surfaces(slot, value)) {
      auto pattern = split_pattern(surface);
      if (pattern.empty()) continue;
      // unit words stay: "4 star" -> "[value_stars] star"
      if (pattern.size() > canonical.size() && std::equal(canonical.begin(), canonical.end(), pattern.begin())) {
        continue;
      }
      candidates.push_back({std::move(pattern), surface.size(), slot, domain, priority});
    }
  };

  std::size_t priority = 0;
  for (const auto& e : entities) {
    for (const auto& d : act.domains()) {
      if (d.name != e.domain) continue;
      for (const auto& a : d.acts) {
        for (const auto& slot : a.slots) {
          if (auto it = e.fields.find(slot); it != e.fields.end()) add(e.domain, slot, it->second, priority);
        }
      }
    }
  }
  ++priority;
  for (const auto& e : entities) {
    for (const auto& [slot, value] : e.fields) add(e.domain, slot, value, priority);
  }
  ++priority;
  for (const auto& d : belief.domains()) {
    for (const auto& [slot, value] : d.slots) add(d.name, slot, value, priority);
  }

  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.pattern.size() != b.pattern.size()) return a.pattern.size() > b.pattern.size();
    if (a.chars != b.chars) return a.chars > b.chars;
    return a.priority < b.priority;
  });

  const std::vector<Word> words = split_words(text);
  std::vector<bool> used(words.size(), false);
  PlaceholderMap map;
  for (const Candidate& c : candidates) {
    const std::size_t k = c.pattern.size();
    for (std::size_t i = 0; i + k <= words.size(); ++i) {
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) ok = !used[i + j] && words[i + j].core == c.pattern[j];
      if (!ok) continue;
      for (std::size_t j = 0; j < k; ++j) used[i + j] = true;
      std::size_t b = words[i].begin;
      std::size_t e = words[i + k - 1].end;
      map.push_back({b, e, c.slot, std::string(text.substr(b, e - b)), c.domain});
      i += k - 1;
    }
  }

  if (options.regex_fallback) {
    static const std::regex kPhone(R"((^|[^0-9])(0\d{4} ?\d{6})(?![0-9]))");
    static const std::regex kPostcode(R"((^|[^a-z0-9])(cb ?\d{1,2} ?\d[a-z]{2})(?![a-z0-9]))",
                                      std::regex::icase);
    auto overlaps = [&](std::size_t b, std::size_t e) {
      return std::any_of(map.begin(), map.end(),
                         [&](const Placeholder& p) { return b < p.end && p.begin < e; });
    };
    const std::string owned(text);
    for (const auto& [re, slot] : {std::pair{&kPhone, "phone"}, std::pair{&kPostcode, "postcode"}}) {
      for (auto it = std::sregex_iterator(owned.begin(), owned.end(), *re); it != std::sregex_iterator(); ++it) {
        const auto& m = (*it)[2];
        auto b = static_cast<std::size_t>(m.first - owned.begin());
        auto e = static_cast<std::size_t>(m.second - owned.begin());
        if (!overlaps(b, e)) map.push_back({b, e, slot, m.str(), ""});
      }
    }
  }

  std::sort(map.begin(), map.end(), [](const Placeholder& a, const Placeholder& b) { return a.begin < b.begin; });
  Delexicalized out;
  std::size_t pos = 0;
  for (const Placeholder& p : map) {
    out.text.append(text.substr(pos, p.begin - pos));
    out.text += tokens::placeholder(p.slot);
    pos = p.end;
  }
  out.text.append(text.substr(pos));
  out.map = std::move(map);
  return out;
}

std::vector<std::string> placeholders_in(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find("[value_", pos)) != std::string_view::npos) {
    std::size_t close = text.find(']', pos);
    if (close == std::string_view::npos) break;
    if (auto slot = tokens::placeholder_slot(text.substr(pos, close - pos + 1))) {
      out.emplace_back(*slot);
    }
    pos = close + 1;
  }
  return out;
}

Lexicalized lexicalize(std::string_view text, const Entity* entity, const BeliefState& belief,
                       const std::optional<std::string>& booking_ref,
                       std::optional<std::string_view> domain) {
  std::string active;
  if (domain) {
    active = std::string(*domain);
  } else if (!belief.empty()) {
    active = belief.domains().back().name;
  }

  Lexicalized out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t open = text.find("[value_", pos);
    std::size_t close = open == std::string_view::npos ? open : text.find(']', open);
    if (close == std::string_view::npos) {
      out.text.append(text.substr(pos));
      break;
    }
    out.text.append(text.substr(pos, open - pos));
    std::string_view token = text.substr(open, close - open + 1);
    pos = close + 1;
    auto slot = tokens::placeholder_slot(token);
    if (!slot) {
      out.text.append(token);
      continue;
    }
    const std::string* value = nullptr;
    if (entity) {
      if (auto it = entity->find(*slot); it != entity->end()) value = &it->second;
    }
    if (!value && !active.empty()) value = belief.get(active, *slot);
    if (!value && *slot == "reference" && booking_ref) value = &*booking_ref;
    if (value) {
      out.text += *value;
      ++out.filled;
    } else {
      out.text.append(token);
      ++out.unfilled;
      out.unfilled_slots.emplace_back(*slot);
    }
  }
  return out;
}

}  // namespace ubar

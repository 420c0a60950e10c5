#pragma once

// JSON mapping of the canonical data model. Writers emit keys in a fixed order
// so that files are byte-stable across runs.

#include "json.hpp"
#include "ubar/types.hpp"

namespace ubar::json {

using Json = nlohmann::ordered_json;

Json belief_to_json(const BeliefState& b);
Json act_to_json(const ActFrame& a);
Json goal_to_json(const Goal& g);
Json turn_to_json(const Turn& t, std::size_t index);
Json session_to_json(const DialogSession& s);
Json ontology_to_json(const Ontology& o);
Json corpus_to_json(const Corpus& c);

// Readers validate domains and act types; `where` prefixes error messages.
BeliefState belief_from_json(const Json& j, const std::string& where);
ActFrame act_from_json(const Json& j, const std::string& where);
Goal goal_from_json(const Json& j, const std::string& where);
Turn turn_from_json(const Json& j, const std::string& where);
DialogSession session_from_json(const Json& j, const std::string& where);
Ontology ontology_from_json(const Json& j, const std::string& where);
Corpus corpus_from_json(const Json& j, const std::string& where);

}  // namespace ubar::json

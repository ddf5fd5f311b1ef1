#pragma once

#include <string>

#include "fraisse/structure.hpp"

namespace fraisse {

/// JSON structure format:
/// {"vocabulary":[{"name","arity","mark"}...], "universe":[...],
///  "relations":{"name":[[tuple]...]}}
std::string encode_structure(const FinStructure& s);

/// Decode against a supplied vocabulary; symbol names must resolve in it.
FinStructure decode_structure(const std::string& json_text, VocabularyPtr vocab);

/// Decode standalone: an ad-hoc vocabulary is built from the listed symbols.
FinStructure decode_structure(const std::string& json_text);

/// DOT export: binary relations become labeled edges, unary relations
/// become node labels.
std::string to_dot(const FinStructure& s, const std::string& graph_name = "structure");

}  // namespace fraisse

#pragma once

#include <string_view>

#include "nonmono/builtin_kbs.hpp" // generated from data/*.kb at configure time
#include "nonmono/kb_parser.hpp"

namespace nonmono {

inline std::string_view builtin_source(std::string_view id) {
  if (id == "KB1") return builtin::kb1_source;
  if (id == "KB2") return builtin::kb2_source;
  throw Error("unknown builtin knowledge base '" + std::string(id) + "' (expected KB1 or KB2)");
}

/// The shipped knowledge bases, parsed once and shared.
inline const KnowledgeBase &load_builtin(std::string_view id) {
  static const KnowledgeBase kb1 = parse_kb_or_throw(builtin::kb1_source);
  static const KnowledgeBase kb2 = parse_kb_or_throw(builtin::kb2_source);
  if (id == "KB1") return kb1;
  if (id == "KB2") return kb2;
  builtin_source(id);
  throw Error("unreachable");
}

} // namespace nonmono

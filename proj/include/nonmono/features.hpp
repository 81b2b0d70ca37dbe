#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nonmono/error.hpp"
#include "nonmono/kb_model.hpp"

namespace nonmono {

/// Per-editor feature vector after transformation. Counts are stored as
/// doubles so every engine reads one numeric type.
struct EditorFeatures {
  std::string editor_id;
  double anonymous = 0.0;
  double pages = 0.0;
  double activity = 0.0;
  double not_minor = 0.0;
  double comments = 0.0;
  double presence = 0.0;
  double frequency = 0.0;
  double regularity = 0.0;
  double bytes = 0.0;

  bool operator==(const EditorFeatures &) const = default;
};

inline constexpr std::array<std::string_view, 9> feature_names{
    "anonymous", "pages", "activity", "not_minor", "comments", "presence", "frequency", "regularity", "bytes"};

inline std::optional<double> feature_value(const EditorFeatures &e, std::string_view name) {
  if (name == "anonymous") return e.anonymous;
  if (name == "pages") return e.pages;
  if (name == "activity") return e.activity;
  if (name == "not_minor") return e.not_minor;
  if (name == "comments") return e.comments;
  if (name == "presence") return e.presence;
  if (name == "frequency") return e.frequency;
  if (name == "regularity") return e.regularity;
  if (name == "bytes") return e.bytes;
  return std::nullopt;
}

inline double &feature_ref(EditorFeatures &e, std::string_view name) {
  if (name == "anonymous") return e.anonymous;
  if (name == "pages") return e.pages;
  if (name == "activity") return e.activity;
  if (name == "not_minor") return e.not_minor;
  if (name == "comments") return e.comments;
  if (name == "presence") return e.presence;
  if (name == "frequency") return e.frequency;
  if (name == "regularity") return e.regularity;
  if (name == "bytes") return e.bytes;
  throw Error("unknown feature '" + std::string(name) + "'");
}

/// Values ordered like kb.features. Throws naming the first feature the input lacks.
template <class Lookup> std::vector<double> bind_features_with(const KnowledgeBase &kb, Lookup &&lookup) {
  std::vector<double> x;
  x.reserve(kb.features.size());
  for (const auto &f : kb.features) {
    std::optional<double> v = lookup(std::string_view(f.name));
    if (!v) throw Error("missing feature '" + f.name + "'");
    x.push_back(*v);
  }
  return x;
}

inline std::vector<double> bind_features(const KnowledgeBase &kb, const EditorFeatures &e) {
  return bind_features_with(kb, [&](std::string_view n) { return feature_value(e, n); });
}

inline std::vector<double> bind_features(const KnowledgeBase &kb, const std::map<std::string, double> &m) {
  return bind_features_with(kb, [&](std::string_view n) -> std::optional<double> {
    auto it = m.find(std::string(n));
    if (it == m.end()) return std::nullopt;
    return it->second;
  });
}

} // namespace nonmono

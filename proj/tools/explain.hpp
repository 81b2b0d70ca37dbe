#pragma once

#include <cmath>

#include "json.hpp"

#include "nonmono/models.hpp"

namespace nonmono::cli {

using nlohmann::ordered_json;

inline ordered_json optional_number(const std::optional<double> &v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

inline ordered_json explain_expert(const ModelSpec &spec, const KnowledgeBase &kb, std::span<const double> x) {
  const ExpertEngine engine(kb);
  const auto out = engine.infer(x, spec.heuristic);
  ordered_json j;
  j["heuristic"] = heuristic_name(spec.heuristic);
  ordered_json activated = ordered_json::array();
  for (const auto &r : engine.activate(x))
    activated.push_back({{"rule", r.label},
                         {"v", r.activation.v},
                         {"r_min", r.activation.r_min},
                         {"r_max", r.activation.r_max},
                         {"value", r.value},
                         {"level", kb.trust_levels[r.level].label},
                         {"weight", r.weight}});
  j["activated"] = activated;
  ordered_json discarded = ordered_json::array();
  for (const auto &d : out.discarded) discarded.push_back({{"rule", d.rule_label}, {"by", d.by}});
  j["discarded"] = discarded;
  ordered_json surviving = ordered_json::array();
  for (const auto &r : out.surviving) surviving.push_back(r.label);
  j["surviving"] = surviving;
  j["trust"] = optional_number(out.trust);
  return j;
}

inline ordered_json explain_fuzzy(const ModelSpec &spec, const KnowledgeBase &kb, std::span<const double> x) {
  const FuzzyEngine engine(kb);
  const auto out = engine.infer(x, spec.fuzzy);
  ordered_json j;
  j["operators"] = std::string(spec.fuzzy.ops.name());
  j["defuzzifier"] = spec.fuzzy.method == Defuzzifier::centroid ? "centroid" : "mean_of_max";
  j["weights"] = spec.fuzzy.weights;
  ordered_json rules = ordered_json::array();
  for (std::size_t r = 0; r < kb.rules.size(); ++r) {
    if (out.initial[r] == 0 && out.resolved[r] == 0) continue;
    rules.push_back({{"rule", kb.rules[r].label},
                     {"necessity", out.initial[r]},
                     {"after_contradictions", out.resolved[r]},
                     {"aggregated", out.weighted[r]}});
  }
  j["rules"] = rules;
  ordered_json levels = ordered_json::object();
  for (std::size_t l = 0; l < kb.trust_levels.size(); ++l) levels[kb.trust_levels[l].label] = out.level_truth[l];
  j["level_truth"] = levels;
  j["trust"] = optional_number(out.trust);
  return j;
}

inline ordered_json explain_argumentation(const ModelSpec &spec, const KnowledgeBase &kb, std::span<const double> x) {
  const ArgumentationEngine engine(kb);
  const auto out = engine.infer(x, spec.argumentation);
  const auto &g = engine.graph();
  ordered_json j;
  j["semantics"] = semantics_name(spec.argumentation.semantics);
  j["use_strength"] = spec.argumentation.use_strength;
  ordered_json args = ordered_json::array();
  for (std::size_t p = 0; p < out.sub.arguments.size(); ++p) {
    const auto &a = g.arguments[out.sub.arguments[p]];
    ordered_json e{{"argument", a.label},
                   {"kind", a.kind == ArgumentKind::forecast ? "forecast" : "mitigating"},
                   {"strength", a.strength}};
    if (a.kind == ArgumentKind::forecast) e["value"] = out.forecast_value[out.sub.arguments[p]];
    if (!out.scores.empty()) e["categoriser"] = out.scores[p];
    args.push_back(e);
  }
  j["arguments"] = args;
  ordered_json attacks = ordered_json::array();
  for (std::size_t i : out.sub.attacks) {
    const auto &a = g.attacks[i];
    attacks.push_back({{"from", g.arguments[a.from].label},
                       {"to", g.arguments[a.to].label},
                       {"kind", attack_kind_name(a.kind)},
                       {"inherited", a.on_subargument}});
  }
  j["attacks"] = attacks;
  if (spec.argumentation.semantics != Semantics::categoriser) {
    ordered_json labs = ordered_json::array();
    for (std::size_t k = 0; k < out.labellings.size(); ++k) {
      ordered_json lab = ordered_json::object();
      for (std::size_t p = 0; p < out.labellings[k].size(); ++p)
        lab[g.arguments[out.sub.arguments[p]].label] = af::label_name(out.labellings[k][p]);
      labs.push_back({{"accrued", std::find(out.chosen.begin(), out.chosen.end(), k) != out.chosen.end()},
                      {"labels", lab}});
    }
    j["labellings"] = labs;
  } else {
    ordered_json top = ordered_json::array();
    for (std::size_t p : out.chosen) top.push_back(g.arguments[out.sub.arguments[p]].label);
    j["accrued"] = top;
  }
  j["trust"] = optional_number(out.trust);
  return j;
}

inline ordered_json explain(const ModelSpec &spec, const KnowledgeBase &kb, const EditorFeatures &e) {
  const auto x = bind_features(kb, e);
  ordered_json j;
  j["editor_id"] = e.editor_id;
  j["model"] = spec.describe();
  ordered_json features = ordered_json::object();
  for (std::size_t f = 0; f < kb.features.size(); ++f) features[kb.features[f].name] = x[f];
  j["features"] = features;
  switch (spec.engine) {
  case EngineKind::expert: j["trace"] = explain_expert(spec, kb, x); break;
  case EngineKind::fuzzy: j["trace"] = explain_fuzzy(spec, kb, x); break;
  default: j["trace"] = explain_argumentation(spec, kb, x); break;
  }
  return j;
}

} // namespace nonmono::cli

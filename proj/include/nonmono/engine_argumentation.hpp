#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nonmono/argumentation.hpp"
#include "nonmono/engine_expert.hpp"
#include "nonmono/error.hpp"
#include "nonmono/kb_model.hpp"

namespace nonmono {

enum class ArgumentKind { forecast, mitigating };

/// undermining: the attacker rests on another rule; undercutting: it rests on
/// its own premises; rebuttal: two rules with conflicting conclusions.
enum class AttackKind { undermining, undercutting, rebuttal };

inline const char *attack_kind_name(AttackKind k) {
  switch (k) {
  case AttackKind::undermining: return "undermining";
  case AttackKind::undercutting: return "undercutting";
  default: return "rebuttal";
  }
}

struct Argument {
  std::string label;
  ArgumentKind kind = ArgumentKind::forecast;
  std::size_t source = 0; // rule index for forecast, contradiction index for mitigating
  int strength = 0;
  std::optional<std::size_t> base_rule; // mitigating arguments built on a rule
};

struct Attack {
  std::size_t from = 0, to = 0;
  AttackKind kind = AttackKind::undermining;
  bool on_subargument = false; // inherited from an attack on the target's base rule
};

/// Arguments 0..R-1 are forecasts (one per rule); R..R+C-1 are mitigating
/// (one per contradiction).
struct ArgumentGraph {
  std::vector<Argument> arguments;
  std::vector<Attack> attacks;
  std::size_t forecast_count = 0;
};

/// A mitigating argument built on rule R contains R's argument, so attacks on R
/// also reach it.
inline ArgumentGraph build_af(const KnowledgeBase &kb) {
  ArgumentGraph g;
  const std::size_t R = kb.rules.size();
  g.forecast_count = R;
  for (std::size_t r = 0; r < R; ++r)
    g.arguments.push_back({kb.rules[r].label, ArgumentKind::forecast, r, rule_weight(kb, r), std::nullopt});
  std::vector<std::vector<std::size_t>> built_on(R);
  for (std::size_t c = 0; c < kb.contradictions.size(); ++c) {
    const auto &con = kb.contradictions[c];
    Argument a{con.label, ArgumentKind::mitigating, c, 0, std::nullopt};
    if (const auto *ref = con.rule_ref()) {
      a.strength = rule_weight(kb, ref->rule_index);
      a.base_rule = ref->rule_index;
      built_on[ref->rule_index].push_back(R + c);
    } else {
      a.strength = antecedent_weight(kb, *con.premises());
    }
    g.arguments.push_back(std::move(a));
  }
  for (std::size_t c = 0; c < kb.contradictions.size(); ++c) {
    const auto &con = kb.contradictions[c];
    const AttackKind kind = con.form == ContradictionForm::mutual_conflict ? AttackKind::rebuttal
                            : con.rule_ref()                              ? AttackKind::undermining
                                                                          : AttackKind::undercutting;
    for (const auto &t : con.targets) {
      if (t.kind == TargetKind::unresolved) {
        warn("argument " + con.label + " has unresolved target '" + t.label + "'; attack omitted");
        continue;
      }
      if (t.kind == TargetKind::contradiction) {
        g.attacks.push_back({R + c, R + t.index, kind, false});
        continue;
      }
      g.attacks.push_back({R + c, t.index, kind, false});
      for (std::size_t m : built_on[t.index])
        if (m != R + c) g.attacks.push_back({R + c, m, kind, true});
    }
  }
  return g;
}

/// Activated arguments of one editor and the attacks that survive elicitation.
struct SubFramework {
  std::vector<std::size_t> arguments; // indices into ArgumentGraph::arguments, ascending
  std::vector<std::size_t> attacks;   // indices into ArgumentGraph::attacks
  af::Framework framework;            // over positions in `arguments`
};

inline bool argument_active(const KnowledgeBase &kb, const ArgumentGraph &g, std::size_t a, std::span<const double> x) {
  const Argument &arg = g.arguments[a];
  if (arg.kind == ArgumentKind::forecast) return dnf_holds(kb, kb.rules[arg.source].antecedent, x);
  const auto &con = kb.contradictions[arg.source];
  if (const auto *ref = con.rule_ref()) return dnf_holds(kb, kb.rules[ref->rule_index].antecedent, x);
  return dnf_holds(kb, *con.premises(), x);
}

/// Keeps activated arguments and the attacks between them; with use_strength an
/// attack also needs strength(from) >= strength(to).
inline SubFramework elicit_subaf(const ArgumentGraph &g, const std::vector<bool> &active, bool use_strength) {
  SubFramework s;
  std::vector<std::size_t> pos(g.arguments.size(), static_cast<std::size_t>(-1));
  for (std::size_t a = 0; a < g.arguments.size(); ++a)
    if (active[a]) {
      pos[a] = s.arguments.size();
      s.arguments.push_back(a);
    }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < g.attacks.size(); ++i) {
    const Attack &at = g.attacks[i];
    if (!active[at.from] || !active[at.to]) continue;
    if (use_strength && g.arguments[at.from].strength < g.arguments[at.to].strength) continue;
    s.attacks.push_back(i);
    edges.emplace_back(pos[at.from], pos[at.to]);
  }
  s.framework = af::Framework(s.arguments.size(), std::move(edges));
  return s;
}

enum class Semantics { grounded, preferred, complete, stable, categoriser };

inline const char *semantics_name(Semantics s) {
  switch (s) {
  case Semantics::grounded: return "grounded";
  case Semantics::preferred: return "preferred";
  case Semantics::complete: return "complete";
  case Semantics::stable: return "stable";
  default: return "categoriser";
  }
}

struct ArgumentationConfig {
  Semantics semantics = Semantics::grounded;
  bool use_strength = false; // strength-filtered attacks and strength-weighted accrual
  std::size_t search_budget = af::default_search_budget;
  af::CategoriserOptions categoriser;
};

inline constexpr double categoriser_tie_tolerance = 1e-9;

struct ArgumentationOutcome {
  std::optional<double> trust;
  SubFramework sub;
  std::vector<af::Labelling> labellings; // extension-based semantics
  std::vector<double> scores;            // categoriser
  std::vector<std::size_t> chosen;       // labellings (or, for categoriser, sub positions) that were accrued
  std::vector<double> forecast_value;    // rule value per forecast argument (NaN if inactive)
};

class ArgumentationEngine {
public:
  explicit ArgumentationEngine(const KnowledgeBase &kb) : kb_(&kb), graph_(build_af(kb)) {}

  const KnowledgeBase &kb() const { return *kb_; }
  const ArgumentGraph &graph() const { return graph_; }

  ArgumentationOutcome infer(std::span<const double> x, const ArgumentationConfig &cfg) const {
    ArgumentationOutcome out;
    std::vector<bool> active(graph_.arguments.size());
    for (std::size_t a = 0; a < active.size(); ++a) active[a] = argument_active(*kb_, graph_, a, x);
    out.forecast_value.assign(graph_.forecast_count, std::nan(""));
    for (std::size_t r = 0; r < graph_.forecast_count; ++r) {
      if (!active[r]) continue;
      const Rule &rule = kb_->rules[r];
      out.forecast_value[r] = rule_value(evaluate_antecedent(*kb_, rule.antecedent, x), rule.consequent_lower,
                                         rule.consequent_upper);
    }
    out.sub = elicit_subaf(graph_, active, cfg.use_strength);
    const auto &f = out.sub.framework;

    auto accrue_set = [&](const std::vector<std::size_t> &positions) {
      std::vector<double> v, w;
      for (std::size_t p : positions) {
        const std::size_t a = out.sub.arguments[p];
        v.push_back(out.forecast_value[a]);
        w.push_back(graph_.arguments[a].strength);
      }
      return cfg.use_strength ? detail::weighted_mean(v, w) : detail::mean(v);
    };
    auto forecast_in = [&](const af::Labelling &lab) {
      std::vector<std::size_t> ps;
      for (std::size_t p = 0; p < lab.size(); ++p)
        if (lab[p] == af::Label::in && out.sub.arguments[p] < graph_.forecast_count) ps.push_back(p);
      return ps;
    };

    if (cfg.semantics == Semantics::categoriser) {
      out.scores = af::categoriser(f, cfg.categoriser);
      double best = -1;
      for (std::size_t p = 0; p < f.size(); ++p)
        if (out.sub.arguments[p] < graph_.forecast_count) best = std::max(best, out.scores[p]);
      for (std::size_t p = 0; p < f.size(); ++p)
        if (out.sub.arguments[p] < graph_.forecast_count && out.scores[p] >= best - categoriser_tie_tolerance)
          out.chosen.push_back(p);
      if (!out.chosen.empty()) out.trust = accrue_set(out.chosen);
      return out;
    }

    switch (cfg.semantics) {
    case Semantics::grounded: out.labellings = {af::grounded(f)}; break;
    case Semantics::preferred: out.labellings = af::preferred(f, cfg.search_budget); break;
    case Semantics::complete: out.labellings = af::complete(f, cfg.search_budget); break;
    default: out.labellings = af::stable(f, cfg.search_budget); break;
    }
    out.trust = accrue(out.labellings, forecast_in, accrue_set, out.chosen);
    return out;
  }

private:
  /// Largest extensions by number of accepted forecast arguments; ties average
  /// the per-extension trusts. No accepted forecast argument gives NA.
  template <class InFn, class AccrueFn>
  static std::optional<double> accrue(const std::vector<af::Labelling> &labs, InFn &&forecast_in, AccrueFn &&accrue_set,
                                      std::vector<std::size_t> &chosen) {
    std::size_t best = 0;
    std::vector<std::vector<std::size_t>> sets;
    for (const auto &l : labs) {
      sets.push_back(forecast_in(l));
      best = std::max(best, sets.back().size());
    }
    if (best == 0) return std::nullopt;
    std::vector<double> trusts;
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (sets[i].size() == best) {
        chosen.push_back(i);
        trusts.push_back(accrue_set(sets[i]));
      }
    return detail::mean(trusts);
  }

  const KnowledgeBase *kb_;
  ArgumentGraph graph_;
};

} // namespace nonmono

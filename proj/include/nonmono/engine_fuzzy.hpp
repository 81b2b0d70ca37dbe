#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nonmono/error.hpp"
#include "nonmono/fuzzy_ops.hpp"
#include "nonmono/kb_model.hpp"

namespace nonmono {

/// grades[feature][term]
using Grades = std::vector<std::vector<double>>;

inline Grades fuzzify(const KnowledgeBase &kb, std::span<const double> x, FmfFamily family = FmfFamily::linear) {
  Grades g(kb.features.size());
  for (std::size_t f = 0; f < kb.features.size(); ++f)
    for (const auto &t : kb.features[f].terms) g[f].push_back(t.membership(family)(x[f]));
  return g;
}

/// Truth of a DNF antecedent: t-norm inside conjunctions, t-conorm across them.
inline double rule_necessity(const Dnf &dnf, const Grades &g, const FuzzyOperatorSet &ops) {
  double out = 0.0;
  for (std::size_t i = 0; i < dnf.size(); ++i) {
    double c = 1.0;
    for (const auto &p : dnf[i]) c = ops.t_norm(c, g[p.feature_index][p.term_index]);
    out = i == 0 ? c : ops.t_conorm(out, c);
  }
  return out;
}

/// Necessity of a after its supports P_j and attackers Q_k:
/// min(max(Nec(a), Nec(P_j)...), min_k(1 - Nec(Q_k))).
inline double possibility_update(double nec, std::span<const double> supports, std::span<const double> attacks) {
  double up = nec;
  for (double p : supports) up = std::max(up, p);
  for (double q : attacks) up = std::min(up, 1.0 - q);
  return up;
}

struct PossibilityState {
  std::vector<double> rule;          // rule necessities
  std::vector<double> contradiction; // effective necessity of each contradiction
};

/// Applies every contradiction in precedence order. A contradiction's strength
/// is its antecedent necessity (a referenced rule's current necessity, or its
/// premises under `ops`) capped by its own attackers. Cyclic groups are
/// evaluated against the state before the group.
inline PossibilityState resolve_possibility(const KnowledgeBase &kb, const ContradictionGraph &g,
                                            std::vector<double> rule_nec, const Grades &grades,
                                            const FuzzyOperatorSet &ops) {
  PossibilityState st;
  st.rule = std::move(rule_nec);
  st.contradiction.assign(kb.contradictions.size(), 0.0);
  std::vector<double> cap(kb.contradictions.size(), 1.0);
  auto strength = [&](std::size_t c) {
    const auto &con = kb.contradictions[c];
    const double a = con.rule_ref() ? st.rule[con.rule_ref()->rule_index] : rule_necessity(*con.premises(), grades, ops);
    return std::min(a, cap[c]);
  };
  std::vector<std::pair<std::size_t, double>> pending;
  for (const auto &comp : g.order.components) {
    pending.clear();
    for (std::size_t c : comp.nodes) pending.emplace_back(c, strength(c));
    for (auto [c, s] : pending) {
      st.contradiction[c] = s;
      for (const auto &t : kb.contradictions[c].targets) {
        const double q[] = {s};
        if (t.kind == TargetKind::rule) st.rule[t.index] = possibility_update(st.rule[t.index], {}, q);
        else if (t.kind == TargetKind::contradiction) cap[t.index] = possibility_update(cap[t.index], {}, q);
      }
    }
  }
  return st;
}

/// (weight / 8) * necessity.
inline std::vector<double> apply_rule_weights(std::span<const double> nec, std::span<const int> weights) {
  std::vector<double> out(nec.size());
  for (std::size_t i = 0; i < nec.size(); ++i)
    out[i] = static_cast<double>(weights[i]) / max_feature_weight * nec[i];
  return out;
}

struct AggregatedFuzzySet {
  std::vector<double> level_truth;
  std::vector<double> curve; // samples of [0, 1]

  double x(std::size_t i) const {
    return curve.size() == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(curve.size() - 1);
  }
};

inline constexpr std::size_t default_resolution = 1001;

/// Per level, the max over rules concluding it; the curve is the pointwise
/// max of the level sets clipped at their truths.
inline AggregatedFuzzySet aggregate_levels(const KnowledgeBase &kb, std::span<const double> nec,
                                           FmfFamily family = FmfFamily::linear,
                                           std::size_t resolution = default_resolution) {
  if (resolution < 2) throw Error("resolution must be at least 2");
  AggregatedFuzzySet out;
  out.level_truth.assign(kb.trust_levels.size(), 0.0);
  for (std::size_t r = 0; r < kb.rules.size(); ++r)
    out.level_truth[kb.rules[r].level_index] = std::max(out.level_truth[kb.rules[r].level_index], nec[r]);
  out.curve.assign(resolution, 0.0);
  for (std::size_t l = 0; l < kb.trust_levels.size(); ++l) {
    const double truth = out.level_truth[l];
    if (truth <= 0.0) continue;
    const MembershipFn &fmf = kb.trust_levels[l].membership(family);
    for (std::size_t i = 0; i < resolution; ++i) out.curve[i] = std::max(out.curve[i], std::min(truth, fmf(out.x(i))));
  }
  return out;
}

enum class Defuzzifier { centroid, mean_of_max };

inline constexpr double mean_of_max_tolerance = 1e-9;

inline std::optional<double> defuzzify(const AggregatedFuzzySet &set, Defuzzifier method) {
  const auto &mu = set.curve;
  const double peak = mu.empty() ? 0.0 : *std::max_element(mu.begin(), mu.end());
  if (peak <= 0.0) return std::nullopt;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (method == Defuzzifier::centroid) {
      num += set.x(i) * mu[i];
      den += mu[i];
    } else if (mu[i] >= peak - mean_of_max_tolerance) {
      num += set.x(i);
      den += 1.0;
    }
  }
  return num / den;
}

struct FuzzyConfig {
  FuzzyOperatorSet ops = zadeh;
  FmfFamily family = FmfFamily::linear;
  Defuzzifier method = Defuzzifier::centroid;
  bool weights = false;
  std::size_t resolution = default_resolution;
};

struct FuzzyOutcome {
  std::optional<double> trust;
  std::vector<double> initial;  // rule necessities before contradictions
  std::vector<double> resolved; // after contradictions
  std::vector<double> weighted; // what was aggregated
  std::vector<double> level_truth;
};

class FuzzyEngine {
public:
  explicit FuzzyEngine(const KnowledgeBase &kb) : kb_(&kb), graph_(contradiction_graph(kb)) {
    for (std::size_t r = 0; r < kb.rules.size(); ++r) weights_.push_back(rule_weight(kb, r));
  }

  const KnowledgeBase &kb() const { return *kb_; }

  FuzzyOutcome infer(std::span<const double> x, const FuzzyConfig &cfg) const {
    FuzzyOutcome out;
    const Grades g = fuzzify(*kb_, x, cfg.family);
    for (const auto &r : kb_->rules) out.initial.push_back(rule_necessity(r.antecedent, g, cfg.ops));
    out.resolved = resolve_possibility(*kb_, graph_, out.initial, g, cfg.ops).rule;
    out.weighted = cfg.weights ? apply_rule_weights(out.resolved, weights_) : out.resolved;
    auto agg = aggregate_levels(*kb_, out.weighted, cfg.family, cfg.resolution);
    out.level_truth = agg.level_truth;
    out.trust = defuzzify(agg, cfg.method);
    return out;
  }

private:
  const KnowledgeBase *kb_;
  ContradictionGraph graph_;
  std::vector<int> weights_;
};

} // namespace nonmono

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nonmono/error.hpp"
#include "nonmono/kb_model.hpp"

namespace nonmono {

/// Crisp activation of an antecedent and the inputs of the rule value mapping.
struct Activation {
  bool active = false;
  double v = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
};

/// A premise holds when the input falls in the term's crisp range (ties at a
/// shared endpoint go to the lower term).
inline bool premise_holds(const KnowledgeBase &kb, const Premise &p, std::span<const double> x) {
  const auto t = kb.features[p.feature_index].crisp_term(x[p.feature_index]);
  return t && *t == p.term_index;
}

inline bool dnf_holds(const KnowledgeBase &kb, const Dnf &dnf, std::span<const double> x) {
  return std::any_of(dnf.begin(), dnf.end(), [&](const Conjunction &c) {
    return std::all_of(c.begin(), c.end(), [&](const Premise &p) { return premise_holds(kb, p, x); });
  });
}

/// AND -> min across conjuncts, OR -> max across the satisfied disjuncts.
inline Activation evaluate_antecedent(const KnowledgeBase &kb, const Dnf &dnf, std::span<const double> x) {
  Activation a;
  for (const auto &conj : dnf) {
    bool ok = !conj.empty();
    double v = 0, lo = 0, hi = 0;
    bool first = true;
    for (const auto &p : conj) {
      if (!premise_holds(kb, p, x)) {
        ok = false;
        break;
      }
      const auto &term = kb.features[p.feature_index].terms[p.term_index];
      const double xv = term.saturate(x[p.feature_index]);
      v = first ? xv : std::min(v, xv);
      lo = first ? term.lower : std::min(lo, term.lower);
      hi = first ? term.upper : std::min(hi, term.upper);
      first = false;
    }
    if (!ok) continue;
    if (!a.active) {
      a = {true, v, lo, hi};
    } else {
      a.v = std::max(a.v, v);
      a.r_min = std::max(a.r_min, lo);
      a.r_max = std::max(a.r_max, hi);
    }
  }
  return a;
}

/// Linear map of v from [r_min, r_max] onto the consequent range: v = r_min
/// gives l_c and v = r_max gives u_c, so l_c > u_c models a contrary relation.
/// A degenerate input range yields u_c.
inline double rule_value(double v, double r_min, double r_max, double l_c, double u_c) {
  if (r_max == r_min) return u_c;
  return (u_c - l_c) / (r_max - r_min) * (v - r_max) + u_c;
}

inline double rule_value(const Activation &a, double l_c, double u_c) {
  return rule_value(a.v, a.r_min, a.r_max, l_c, u_c);
}

namespace detail {

inline double mean(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double weighted_mean(std::span<const double> v, std::span<const double> w) {
  double s = 0, tw = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += v[i] * w[i];
    tw += w[i];
  }
  if (tw == 0.0) {
    warn("total weight is zero; using the unweighted mean");
    return mean(v);
  }
  return s / tw;
}

} // namespace detail

struct ActivatedRule {
  std::size_t rule = 0;
  std::string label;
  Activation activation;
  double value = 0.0;
  std::size_t level = 0;
  int weight = 0;
};

struct DiscardedRule {
  std::string rule_label;
  std::string by;
};

struct ExpertOutcome {
  std::optional<double> trust;
  std::vector<ActivatedRule> surviving;
  std::vector<DiscardedRule> discarded;
};

enum class Heuristic { h1, h2, h3, h4 };

inline const char *heuristic_name(Heuristic h) {
  switch (h) {
  case Heuristic::h1: return "h1";
  case Heuristic::h2: return "h2";
  case Heuristic::h3: return "h3";
  default: return "h4";
  }
}

/// Trust from surviving rules. h1/h2 use the largest same-level group (mean
/// of group means when several tie); h3/h4 use every survivor. h2/h4 weight
/// by rule weight.
inline std::optional<double> aggregate(std::span<const ActivatedRule> surviving, Heuristic h) {
  if (surviving.empty()) return std::nullopt;
  const bool weighted = h == Heuristic::h2 || h == Heuristic::h4;
  auto reduce = [&](const std::vector<const ActivatedRule *> &rs) {
    std::vector<double> v, w;
    for (auto *r : rs) {
      v.push_back(r->value);
      w.push_back(r->weight);
    }
    return weighted ? detail::weighted_mean(v, w) : detail::mean(v);
  };
  if (h == Heuristic::h3 || h == Heuristic::h4) {
    std::vector<const ActivatedRule *> all;
    for (const auto &r : surviving) all.push_back(&r);
    return reduce(all);
  }
  std::map<std::size_t, std::vector<const ActivatedRule *>> groups;
  for (const auto &r : surviving) groups[r.level].push_back(&r);
  std::size_t largest = 0;
  for (const auto &[_, g] : groups) largest = std::max(largest, g.size());
  std::vector<double> means;
  for (const auto &[_, g] : groups)
    if (g.size() == largest) means.push_back(reduce(g));
  return detail::mean(means);
}

/// Contradiction resolution state: which rules and contradictions are still standing.
struct Retraction {
  std::vector<bool> rule_alive;
  std::vector<bool> contradiction_alive;
  std::vector<bool> fired;
  std::vector<DiscardedRule> discarded;
};

/// Applies contradictions in precedence order. A contradiction fires when it
/// has not itself been retracted and its antecedent holds: a rule reference
/// holds while that rule is alive, premises hold on the crisp input. Members of
/// a cyclic group read the state as it was before the group.
inline Retraction resolve_contradictions(const KnowledgeBase &kb, const ContradictionGraph &g,
                                         std::vector<bool> rule_active, const std::vector<bool> &premises_hold) {
  Retraction st;
  st.rule_alive = std::move(rule_active);
  st.contradiction_alive.assign(kb.contradictions.size(), true);
  st.fired.assign(kb.contradictions.size(), false);
  auto holds = [&](std::size_t c) {
    if (!st.contradiction_alive[c]) return false;
    const auto &con = kb.contradictions[c];
    if (const auto *ref = con.rule_ref()) return static_cast<bool>(st.rule_alive[ref->rule_index]);
    return static_cast<bool>(premises_hold[c]);
  };
  auto apply = [&](std::size_t c) {
    st.fired[c] = true;
    for (const auto &t : kb.contradictions[c].targets) {
      if (t.kind == TargetKind::rule) {
        if (st.rule_alive[t.index]) st.discarded.push_back({t.label, kb.contradictions[c].label});
        st.rule_alive[t.index] = false;
      } else if (t.kind == TargetKind::contradiction) {
        st.contradiction_alive[t.index] = false;
      }
    }
  };
  std::vector<std::size_t> firing;
  for (const auto &comp : g.order.components) {
    firing.clear();
    for (std::size_t c : comp.nodes)
      if (holds(c)) firing.push_back(c);
    for (std::size_t c : firing) apply(c);
  }
  return st;
}

inline std::vector<bool> contradiction_premises(const KnowledgeBase &kb, std::span<const double> x) {
  std::vector<bool> out(kb.contradictions.size(), false);
  for (std::size_t c = 0; c < kb.contradictions.size(); ++c)
    if (const auto *dnf = kb.contradictions[c].premises()) out[c] = dnf_holds(kb, *dnf, x);
  return out;
}

/// Expert system over one knowledge base. Holds the precedence graph so
/// per-editor inference does no graph work.
class ExpertEngine {
public:
  explicit ExpertEngine(const KnowledgeBase &kb) : kb_(&kb), graph_(contradiction_graph(kb)) {}

  const KnowledgeBase &kb() const { return *kb_; }
  const ContradictionGraph &graph() const { return graph_; }

  std::vector<ActivatedRule> activate(std::span<const double> x) const {
    std::vector<ActivatedRule> out;
    for (std::size_t i = 0; i < kb_->rules.size(); ++i) {
      const Rule &r = kb_->rules[i];
      const Activation a = evaluate_antecedent(*kb_, r.antecedent, x);
      if (!a.active) continue;
      out.push_back({i, r.label, a, rule_value(a, r.consequent_lower, r.consequent_upper), r.level_index,
                     rule_weight(*kb_, i)});
    }
    return out;
  }

  ExpertOutcome infer(std::span<const double> x, Heuristic h) const {
    auto activated = activate(x);
    std::vector<bool> active(kb_->rules.size(), false);
    for (const auto &a : activated) active[a.rule] = true;
    auto st = resolve_contradictions(*kb_, graph_, std::move(active), contradiction_premises(*kb_, x));
    ExpertOutcome out;
    for (auto &a : activated)
      if (st.rule_alive[a.rule]) out.surviving.push_back(std::move(a));
    out.discarded = std::move(st.discarded);
    out.trust = aggregate(out.surviving, h);
    return out;
  }

private:
  const KnowledgeBase *kb_;
  ContradictionGraph graph_;
};

} // namespace nonmono

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "nonmono/error.hpp"
#include "nonmono/graph.hpp"
#include "nonmono/membership.hpp"

namespace nonmono {

inline constexpr int max_feature_weight = 8;

/// A natural-language level of a feature with its crisp range and fuzzy sets.
/// `unbounded` terms ("20+") keep `upper` at the feature's saturation bound.
struct LinguisticTerm {
  std::string label;
  double lower = 0.0;
  double upper = 0.0;
  bool unbounded = false;
  MembershipFn fmf;
  std::optional<MembershipFn> gaussian_fmf;

  bool contains(double x) const { return x >= lower && (unbounded || x <= upper); }
  double saturate(double x) const { return unbounded ? std::min(x, upper) : x; }

  const MembershipFn &membership(FmfFamily family) const {
    return family == FmfFamily::gaussian && gaussian_fmf ? *gaussian_fmf : fmf;
  }

  bool operator==(const LinguisticTerm &) const = default;
};

struct Feature {
  std::string name;
  int weight = 0;
  double domain_min = 0.0;
  double domain_max = 0.0;
  std::vector<LinguisticTerm> terms;

  std::optional<std::size_t> term_index(std::string_view label) const {
    for (std::size_t i = 0; i < terms.size(); ++i)
      if (terms[i].label == label) return i;
    return std::nullopt;
  }

  /// Crisp term containing x. Shared endpoints go to the term with the lower range.
  std::optional<std::size_t> crisp_term(double x) const {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (!terms[i].contains(x)) continue;
      if (!best || terms[i].lower < terms[*best].lower) best = i;
    }
    return best;
  }

  bool operator==(const Feature &) const = default;
};

/// "feature is term". Indices are resolved by the parser.
struct Premise {
  std::string feature;
  std::string term;
  std::size_t feature_index = 0;
  std::size_t term_index = 0;

  bool operator==(const Premise &) const = default;
};

using Conjunction = std::vector<Premise>;
/// Disjunction of conjunctions.
using Dnf = std::vector<Conjunction>;

struct TrustLevel {
  std::string label;
  double lower = 0.0;
  double upper = 0.0;
  MembershipFn fmf;
  std::optional<MembershipFn> gaussian_fmf;

  const MembershipFn &membership(FmfFamily family) const {
    return family == FmfFamily::gaussian && gaussian_fmf ? *gaussian_fmf : fmf;
  }
  bool operator==(const TrustLevel &) const = default;
};

struct Rule {
  std::string label;
  Dnf antecedent;
  std::string consequent_level;
  std::size_t level_index = 0;
  double consequent_lower = 0.0;
  double consequent_upper = 0.0;
  bool explicit_consequent_range = false;

  bool operator==(const Rule &) const = default;
};

struct RuleRef {
  std::string label;
  std::size_t rule_index = 0;
  bool operator==(const RuleRef &) const = default;
};

enum class TargetKind { rule, contradiction, unresolved };

struct ContradictionTarget {
  std::string label;
  TargetKind kind = TargetKind::rule;
  std::size_t index = 0; // into rules or contradictions, per kind
  bool operator==(const ContradictionTarget &) const = default;
};

/// How a contradiction was written, kept for serialization and for the
/// attack taxonomy of argument graphs.
enum class ContradictionForm { statement, directed_conflict, mutual_conflict };

struct Contradiction {
  std::string label;
  std::variant<RuleRef, Dnf> antecedent;
  std::vector<ContradictionTarget> targets;
  std::string via_group; // non-empty when targets came from a group
  ContradictionForm form = ContradictionForm::statement;

  const RuleRef *rule_ref() const { return std::get_if<RuleRef>(&antecedent); }
  const Dnf *premises() const { return std::get_if<Dnf>(&antecedent); }

  bool operator==(const Contradiction &) const = default;
};

/// A validated knowledge base. Built by the parser and never mutated afterwards.
struct KnowledgeBase {
  std::string id;
  std::vector<Feature> features;
  std::vector<TrustLevel> trust_levels;
  std::vector<Rule> rules;
  std::vector<Contradiction> contradictions;
  std::map<std::string, std::vector<std::string>> groups;

  std::optional<std::size_t> feature_index(std::string_view name) const {
    for (std::size_t i = 0; i < features.size(); ++i)
      if (features[i].name == name) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> rule_index(std::string_view label) const {
    for (std::size_t i = 0; i < rules.size(); ++i)
      if (rules[i].label == label) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> contradiction_index(std::string_view label) const {
    for (std::size_t i = 0; i < contradictions.size(); ++i)
      if (contradictions[i].label == label) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> level_index(std::string_view label) const {
    for (std::size_t i = 0; i < trust_levels.size(); ++i)
      if (trust_levels[i].label == label) return i;
    return std::nullopt;
  }

  bool operator==(const KnowledgeBase &) const = default;
};

inline std::pair<double, double> trust_level_range(const KnowledgeBase &kb, std::string_view level) {
  if (auto i = kb.level_index(level)) return {kb.trust_levels[*i].lower, kb.trust_levels[*i].upper};
  throw Error("unknown trust level '" + std::string(level) + "'");
}

/// Weight of an antecedent: the largest weight among its features.
inline int antecedent_weight(const KnowledgeBase &kb, const Dnf &dnf) {
  int w = 0;
  for (const auto &conj : dnf)
    for (const auto &p : conj) w = std::max(w, kb.features[p.feature_index].weight);
  return w;
}

inline int rule_weight(const KnowledgeBase &kb, std::size_t rule) {
  return antecedent_weight(kb, kb.rules[rule].antecedent);
}

// ---------------------------------------------------------------------------
// Contradiction precedence graph

enum class PrecedenceEdge {
  target,   // X's target is contradiction Y
  via_rule, // X's target is the rule Y reads as its antecedent
};

/// Directed graph over contradictions (indices into kb.contradictions).
///
/// Besides contradiction-on-contradiction edges, X -> Y is added when X
/// retracts the rule named by Y's RuleRef antecedent, since Y can only be
/// evaluated once that rule's status is final.
struct ContradictionGraph {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<PrecedenceEdge> edge_kinds;
  graph::Condensation order;

  /// Strongly connected groups with more than one member (or a self-loop).
  std::vector<std::vector<std::size_t>> cyclic_groups() const {
    std::vector<std::vector<std::size_t>> out;
    for (const auto &c : order.components)
      if (c.cyclic) out.push_back(c.nodes);
    return out;
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges_of_kind(PrecedenceEdge kind) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (edge_kinds[i] == kind) out.push_back(edges[i]);
    return out;
  }
};

inline ContradictionGraph contradiction_graph(const KnowledgeBase &kb) {
  const std::size_t n = kb.contradictions.size();
  std::vector<std::vector<std::size_t>> readers(kb.rules.size());
  for (std::size_t j = 0; j < n; ++j)
    if (const auto *ref = kb.contradictions[j].rule_ref()) readers[ref->rule_index].push_back(j);

  ContradictionGraph g;
  graph::Adjacency succ(n);
  std::set<std::tuple<std::size_t, std::size_t, PrecedenceEdge>> seen;
  auto add = [&](std::size_t from, std::size_t to, PrecedenceEdge kind) {
    if (!seen.emplace(from, to, kind).second) return;
    g.edges.emplace_back(from, to);
    g.edge_kinds.push_back(kind);
    succ[from].push_back(to);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto &t : kb.contradictions[i].targets) {
      if (t.kind == TargetKind::contradiction) add(i, t.index, PrecedenceEdge::target);
      else if (t.kind == TargetKind::rule)
        for (std::size_t j : readers[t.index]) add(i, j, PrecedenceEdge::via_rule);
    }
  }
  for (auto &s : succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  g.order = graph::condense(succ);
  return g;
}

} // namespace nonmono

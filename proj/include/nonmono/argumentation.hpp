#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nonmono/error.hpp"
#include "nonmono/graph.hpp"

namespace nonmono::af {

/// Abstract framework over arguments 0..n-1. Duplicate attacks are merged.
class Framework {
public:
  Framework() = default;
  Framework(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> attacks)
      : n_(n), attackers_(n), targets_(n) {
    std::sort(attacks.begin(), attacks.end());
    attacks.erase(std::unique(attacks.begin(), attacks.end()), attacks.end());
    for (auto [a, b] : attacks) {
      if (a >= n || b >= n) throw Error("attack endpoint out of range");
      attackers_[b].push_back(a);
      targets_[a].push_back(b);
    }
    attacks_ = std::move(attacks);
  }

  std::size_t size() const { return n_; }
  const std::vector<std::pair<std::size_t, std::size_t>> &attacks() const { return attacks_; }
  const std::vector<std::size_t> &attackers(std::size_t a) const { return attackers_[a]; }
  const std::vector<std::size_t> &targets(std::size_t a) const { return targets_[a]; }

private:
  std::size_t n_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> attacks_;
  std::vector<std::vector<std::size_t>> attackers_, targets_;
};

enum class Label : std::uint8_t { in, out, undec };
using Labelling = std::vector<Label>;

inline const char *label_name(Label l) {
  return l == Label::in ? "in" : l == Label::out ? "out" : "undec";
}

inline std::vector<std::size_t> in_set(const Labelling &lab) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < lab.size(); ++i)
    if (lab[i] == Label::in) out.push_back(i);
  return out;
}

/// Reinstatement labelling: out iff some attacker is in, in iff every attacker is out.
inline bool is_reinstatement(const Framework &f, const Labelling &lab) {
  if (lab.size() != f.size()) return false;
  for (std::size_t a = 0; a < f.size(); ++a) {
    bool any_in = false, all_out = true;
    for (std::size_t b : f.attackers(a)) {
      any_in = any_in || lab[b] == Label::in;
      all_out = all_out && lab[b] == Label::out;
    }
    if ((lab[a] == Label::out) != any_in) return false;
    if ((lab[a] == Label::in) != all_out) return false;
  }
  return true;
}

/// Least fixpoint: label in whatever has all attackers out, out whatever has an
/// in attacker, leave the rest undec.
inline Labelling grounded(const Framework &f) {
  const std::size_t n = f.size();
  Labelling lab(n, Label::undec);
  std::vector<std::size_t> out_attackers(n, 0), queue;
  std::vector<bool> decided(n, false);
  for (std::size_t a = 0; a < n; ++a)
    if (f.attackers(a).empty()) queue.push_back(a);
  while (!queue.empty()) {
    const std::size_t a = queue.back();
    queue.pop_back();
    if (decided[a]) continue;
    decided[a] = true;
    lab[a] = Label::in;
    for (std::size_t b : f.targets(a)) {
      if (decided[b]) continue;
      decided[b] = true;
      lab[b] = Label::out;
      for (std::size_t c : f.targets(b))
        if (!decided[c] && ++out_attackers[c] == f.attackers(c).size()) queue.push_back(c);
    }
  }
  return lab;
}

inline constexpr std::size_t default_search_budget = 2'000'000;

namespace detail {

// Backtracking over the arguments grounded leaves undec, with unit propagation
// of the reinstatement conditions. In a complete labelling an argument's label is
// a function of its attackers' labels, so arguments with identical attacker sets
// are assigned together.
class CompleteSearch {
public:
  CompleteSearch(const Framework &f, std::size_t budget) : f_(f), budget_(budget), class_of_(f.size()) {
    std::map<std::vector<std::size_t>, std::size_t> ids;
    for (std::size_t a = 0; a < f.size(); ++a) {
      auto [it, fresh] = ids.try_emplace(f.attackers(a), members_.size());
      if (fresh) members_.emplace_back();
      class_of_[a] = it->second;
      members_[it->second].push_back(a);
    }
  }

  std::vector<Labelling> run() {
    const Labelling g = grounded(f_);
    std::vector<State> st(f_.size());
    for (std::size_t a = 0; a < f_.size(); ++a) st[a] = g[a] == Label::undec ? unassigned : static_cast<State>(g[a]);
    search(std::move(st), {});
    return std::move(found_);
  }

private:
  enum State : std::uint8_t { in = 0, out = 1, undec = 2, unassigned = 3 };

  bool propagate(std::vector<State> &st, std::vector<std::size_t> queue) const {
    std::vector<bool> queued(f_.size(), false);
    for (std::size_t a : queue) queued[a] = true;
    auto set = [&](std::size_t x, State s) {
      for (std::size_t y : members_[class_of_[x]]) {
        st[y] = s;
        for (std::size_t z : f_.targets(y))
          if (!queued[z]) queued[z] = true, queue.push_back(z);
        if (!queued[y]) queued[y] = true, queue.push_back(y);
      }
    };
    while (!queue.empty()) {
      const std::size_t a = queue.back();
      queue.pop_back();
      queued[a] = false;
      std::size_t n_in = 0, n_undec = 0, n_free = 0, free_one = 0;
      for (std::size_t b : f_.attackers(a)) {
        switch (st[b]) {
        case in: ++n_in; break;
        case undec: ++n_undec; break;
        case unassigned: ++n_free; free_one = b; break;
        default: break;
        }
      }
      switch (st[a]) {
      case unassigned:
        if (n_in > 0) set(a, out);
        else if (n_free == 0) set(a, n_undec == 0 ? in : undec);
        break;
      case in:
        if (n_in > 0 || n_undec > 0) return false;
        for (std::size_t b : f_.attackers(a))
          if (st[b] == unassigned) set(b, out);
        break;
      case out:
        if (n_in == 0 && n_free == 0) return false;
        if (n_in == 0 && n_free == 1) set(free_one, in);
        break;
      case undec:
        if (n_in > 0) return false;
        if (n_free == 0 && n_undec == 0) return false;
        if (n_undec == 0 && n_free == 1) set(free_one, undec);
        break;
      }
    }
    return true;
  }

  void search(std::vector<State> st, std::vector<std::size_t> changed) {
    if (++nodes_ > budget_)
      throw Error("framework of " + std::to_string(f_.size()) + " arguments exceeds the search budget of " +
                  std::to_string(budget_) + " nodes; use grounded or categoriser semantics");
    if (changed.empty())
      for (std::size_t a = 0; a < f_.size(); ++a) changed.push_back(a);
    if (!propagate(st, std::move(changed))) return;
    const auto it = std::find(st.begin(), st.end(), unassigned);
    if (it == st.end()) {
      Labelling lab(st.size());
      for (std::size_t i = 0; i < st.size(); ++i) lab[i] = static_cast<Label>(st[i]);
      if (is_reinstatement(f_, lab)) found_.push_back(std::move(lab));
      return;
    }
    const std::size_t a = static_cast<std::size_t>(it - st.begin());
    for (State s : {in, out, undec}) {
      auto next = st;
      std::vector<std::size_t> touched;
      for (std::size_t y : members_[class_of_[a]]) {
        next[y] = s;
        touched.push_back(y);
        touched.insert(touched.end(), f_.targets(y).begin(), f_.targets(y).end());
      }
      search(std::move(next), std::move(touched));
    }
  }

  const Framework &f_;
  std::size_t budget_;
  std::vector<std::size_t> class_of_;
  std::vector<std::vector<std::size_t>> members_;
  std::size_t nodes_ = 0;
  std::vector<Labelling> found_;
};

inline bool subset(const std::vector<std::size_t> &a, const std::vector<std::size_t> &b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

} // namespace detail

/// Every complete labelling, in lexicographic order.
inline std::vector<Labelling> complete(const Framework &f, std::size_t budget = default_search_budget) {
  auto all = detail::CompleteSearch(f, budget).run();
  std::sort(all.begin(), all.end());
  return all;
}

/// Complete labellings whose in-set is maximal under inclusion.
inline std::vector<Labelling> preferred(const Framework &f, std::size_t budget = default_search_budget) {
  auto all = complete(f, budget);
  std::vector<std::vector<std::size_t>> ins;
  for (const auto &l : all) ins.push_back(in_set(l));
  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return ins[x].size() > ins[y].size(); });
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    bool dominated = false;
    for (std::size_t k : kept)
      if (ins[k].size() > ins[i].size() && detail::subset(ins[i], ins[k])) {
        dominated = true;
        break;
      }
    if (!dominated) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());
  std::vector<Labelling> out;
  for (std::size_t i : kept) out.push_back(all[i]);
  return out;
}

/// Complete labellings with nothing undec.
inline std::vector<Labelling> stable(const Framework &f, std::size_t budget = default_search_budget) {
  auto all = complete(f, budget);
  std::erase_if(all, [](const Labelling &l) { return std::find(l.begin(), l.end(), Label::undec) != l.end(); });
  return all;
}

struct CategoriserOptions {
  double tolerance = 1e-9;
  std::size_t max_iter = 100'000;
  double damping = 0.5;
};

/// Fixed point of Cat(a) = 1 / (1 + sum of Cat over attackers). Acyclic parts
/// are evaluated exactly in topological order; each cyclic component is solved
/// by damped iteration from all-ones.
inline std::vector<double> categoriser(const Framework &f, const CategoriserOptions &opt = {}) {
  const std::size_t n = f.size();
  graph::Adjacency succ(n);
  for (std::size_t a = 0; a < n; ++a) succ[a] = f.targets(a);
  const auto cond = graph::condense(succ);
  std::vector<double> cat(n, 1.0);
  auto value = [&](std::size_t a, const std::vector<double> &c) {
    double s = 0;
    for (std::size_t b : f.attackers(a)) s += c[b];
    return 1.0 / (1.0 + s);
  };
  for (const auto &comp : cond.components) {
    if (!comp.cyclic) {
      cat[comp.nodes[0]] = value(comp.nodes[0], cat);
      continue;
    }
    double residual = 0;
    std::vector<double> next(comp.nodes.size());
    for (std::size_t it = 0;; ++it) {
      residual = 0;
      for (std::size_t k = 0; k < comp.nodes.size(); ++k) {
        const std::size_t a = comp.nodes[k];
        const double fa = value(a, cat);
        residual = std::max(residual, std::abs(fa - cat[a]));
        next[k] = (1.0 - opt.damping) * cat[a] + opt.damping * fa;
      }
      if (residual < opt.tolerance) break;
      if (it >= opt.max_iter)
        throw Error("categoriser did not converge within " + std::to_string(opt.max_iter) +
                    " iterations (residual " + std::to_string(residual) + ")");
      for (std::size_t k = 0; k < comp.nodes.size(); ++k) cat[comp.nodes[k]] = next[k];
    }
  }
  return cat;
}

} // namespace nonmono::af

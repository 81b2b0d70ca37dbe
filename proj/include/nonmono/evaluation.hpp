#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nonmono/error.hpp"
#include "nonmono/features.hpp"

namespace nonmono {

using TrustVector = std::vector<std::optional<double>>;

/// Normalised sum of Barnstar ranks in the descending trust order: 0 when every
/// Barnstar outranks every other editor, 100 when every Barnstar is below them.
/// Non-Barnstars tied with a Barnstar are ranked above it. NA editors are dropped.
inline std::optional<double> rank_of_barnstars(std::span<const std::optional<double>> trust,
                                               const std::vector<bool> &is_barnstar) {
  struct Entry {
    double t;
    bool barnstar;
  };
  std::vector<Entry> ranked;
  for (std::size_t i = 0; i < trust.size(); ++i)
    if (trust[i]) ranked.push_back({*trust[i], is_barnstar[i]});
  std::stable_sort(ranked.begin(), ranked.end(), [](const Entry &a, const Entry &b) {
    if (a.t != b.t) return a.t > b.t;
    return !a.barnstar && b.barnstar;
  });
  const double N = static_cast<double>(ranked.size());
  double B = 0, S = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r)
    if (ranked[r].barnstar) {
      ++B;
      S += static_cast<double>(r + 1);
    }
  if (B == 0) {
    warn("no Barnstar has an assigned trust value; rank is NA");
    return std::nullopt;
  }
  const double s_min = B * (B + 1) / 2, s_max = B * N - B * (B - 1) / 2;
  if (s_max == s_min) return 0.0;
  return 100.0 * (S - s_min) / (s_max - s_min);
}

/// Population standard deviation of the assigned Barnstar trust values.
inline std::optional<double> spread(std::span<const std::optional<double>> trust,
                                    const std::vector<bool> &is_barnstar) {
  std::vector<double> v;
  for (std::size_t i = 0; i < trust.size(); ++i)
    if (trust[i] && is_barnstar[i]) v.push_back(*trust[i]);
  if (v.empty()) return std::nullopt;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

inline double na_percentage(std::span<const std::optional<double>> trust) {
  if (trust.empty()) throw Error("na_percentage needs at least one editor");
  const auto na = std::count_if(trust.begin(), trust.end(), [](const auto &t) { return !t.has_value(); });
  return 100.0 * static_cast<double>(na) / static_cast<double>(trust.size());
}

struct MetricTriple {
  std::optional<double> rank;
  std::optional<double> spread;
  double na_pct = 0;
};

inline MetricTriple evaluate_metrics(std::span<const std::optional<double>> trust,
                                     const std::vector<bool> &is_barnstar) {
  return {rank_of_barnstars(trust, is_barnstar), spread(trust, is_barnstar), na_percentage(trust)};
}

inline std::vector<bool> barnstar_mask(const std::vector<EditorFeatures> &editors,
                                       const std::set<std::string> &barnstars) {
  std::vector<bool> m(editors.size());
  for (std::size_t i = 0; i < editors.size(); ++i) m[i] = barnstars.count(editors[i].editor_id) > 0;
  return m;
}

/// Mean of the nine features after min-max scaling pages, activity and bytes
/// (bytes floored at 0 first) and inverting anonymity.
inline TrustVector baseline_feature_average(const std::vector<EditorFeatures> &editors) {
  if (editors.size() < 2) throw Error("the features' average baseline needs at least two editors");
  auto column = [&](auto get) {
    std::vector<double> c;
    for (const auto &e : editors) c.push_back(get(e));
    return c;
  };
  auto minmax = [](std::vector<double> c, const char *name) {
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    const double l = *lo, h = *hi;
    if (h == l) {
      warn(std::string("baseline column '") + name + "' is constant; normalised to 0");
      std::fill(c.begin(), c.end(), 0.0);
    } else {
      for (double &x : c) x = (x - l) / (h - l);
    }
    return c;
  };
  const auto pages = minmax(column([](const EditorFeatures &e) { return e.pages; }), "pages");
  const auto activity = minmax(column([](const EditorFeatures &e) { return e.activity; }), "activity");
  const auto bytes = minmax(column([](const EditorFeatures &e) { return std::max(0.0, e.bytes); }), "bytes");
  TrustVector out;
  for (std::size_t i = 0; i < editors.size(); ++i) {
    const auto &e = editors[i];
    const double sum = (1.0 - e.anonymous) + pages[i] + activity[i] + e.not_minor + e.comments + e.presence +
                       e.frequency + e.regularity + bytes[i];
    out.push_back(sum / 9.0);
  }
  return out;
}

} // namespace nonmono

#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "nonmono/builtin.hpp"
#include "nonmono/csv.hpp"
#include "nonmono/engine_argumentation.hpp"
#include "nonmono/engine_expert.hpp"
#include "nonmono/engine_fuzzy.hpp"
#include "nonmono/evaluation.hpp"
#include "nonmono/features.hpp"

namespace nonmono {

enum class EngineKind { expert, fuzzy, argumentation };

inline const char *engine_name(EngineKind e) {
  switch (e) {
  case EngineKind::expert: return "expert";
  case EngineKind::fuzzy: return "fuzzy";
  default: return "argumentation";
  }
}

struct ModelSpec {
  std::string id;
  EngineKind engine = EngineKind::expert;
  std::string kb;
  Heuristic heuristic = Heuristic::h1; // expert
  FuzzyConfig fuzzy;                   // fuzzy
  ArgumentationConfig argumentation;   // argumentation

  std::string describe() const {
    std::string s = id + ": " + engine_name(engine) + ", " + kb;
    switch (engine) {
    case EngineKind::expert: return s + ", " + heuristic_name(heuristic);
    case EngineKind::fuzzy:
      return s + ", " + std::string(fuzzy.ops.name()) + ", " +
             (fuzzy.method == Defuzzifier::centroid ? "centroid" : "mean of max") + ", weights " +
             (fuzzy.weights ? "yes" : "no") + ", " + (fuzzy.family == FmfFamily::linear ? "linear" : "gaussian");
    default:
      return s + ", " + (argumentation.use_strength ? "strength" : "binary") + ", " +
             semantics_name(argumentation.semantics);
    }
  }
};

/// E1..E8, FL1..FL24, FC1..FC24, A1..A12.
inline const std::vector<ModelSpec> &model_registry() {
  static const std::vector<ModelSpec> reg = [] {
    std::vector<ModelSpec> r;
    const char *kbs[] = {"KB1", "KB2"};
    for (int k = 0; k < 2; ++k)
      for (int h = 0; h < 4; ++h) {
        ModelSpec m;
        m.id = "E" + std::to_string(4 * k + h + 1);
        m.engine = EngineKind::expert;
        m.kb = kbs[k];
        m.heuristic = static_cast<Heuristic>(h);
        r.push_back(std::move(m));
      }
    const FuzzyOperatorSet ops[] = {zadeh, product, lukasiewicz};
    for (auto [prefix, family] : {std::pair{"FL", FmfFamily::linear}, std::pair{"FC", FmfFamily::gaussian}})
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 12; ++i) {
          ModelSpec m;
          m.id = prefix + std::to_string(12 * k + i + 1);
          m.engine = EngineKind::fuzzy;
          m.kb = kbs[k];
          m.fuzzy.ops = ops[(i % 6) / 2];
          m.fuzzy.method = i % 2 == 0 ? Defuzzifier::centroid : Defuzzifier::mean_of_max;
          m.fuzzy.weights = i >= 6;
          m.fuzzy.family = family;
          r.push_back(std::move(m));
        }
    const Semantics sem[] = {Semantics::preferred, Semantics::categoriser, Semantics::grounded};
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 6; ++i) {
        ModelSpec m;
        m.id = "A" + std::to_string(6 * k + i + 1);
        m.engine = EngineKind::argumentation;
        m.kb = kbs[k];
        m.argumentation.semantics = sem[i % 3];
        m.argumentation.use_strength = i >= 3;
        r.push_back(std::move(m));
      }
    return r;
  }();
  return reg;
}

/// Accepts ids case-insensitively and with zero padding ("a01" is A1).
inline std::optional<std::string> canonical_model_id(std::string_view s) {
  std::string prefix, digits;
  for (char c : s) {
    if (std::isalpha(static_cast<unsigned char>(c)) && digits.empty())
      prefix += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    else if (std::isdigit(static_cast<unsigned char>(c)))
      digits += c;
    else
      return std::nullopt;
  }
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
  if (prefix.empty() || digits.empty()) return std::nullopt;
  return prefix + digits;
}

inline const ModelSpec *find_model(std::string_view id) {
  const auto c = canonical_model_id(id);
  if (!c) return nullptr;
  for (const auto &m : model_registry())
    if (m.id == *c) return &m;
  return nullptr;
}

/// "all" selects every model; otherwise a comma-separated list of ids.
/// Duplicates are dropped and the result follows registry order.
inline std::vector<const ModelSpec *> select_models(std::string_view filter) {
  std::vector<const ModelSpec *> out;
  if (filter == "all") {
    for (const auto &m : model_registry()) out.push_back(&m);
    return out;
  }
  std::set<std::string> wanted;
  std::size_t pos = 0;
  while (pos <= filter.size()) {
    auto next = filter.find(',', pos);
    if (next == std::string_view::npos) next = filter.size();
    std::string_view tok = filter.substr(pos, next - pos);
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
    if (!tok.empty()) {
      const auto *m = find_model(tok);
      if (!m) throw Error("unknown model id '" + std::string(tok) + "'");
      wanted.insert(m->id);
    }
    pos = next + 1;
  }
  for (const auto &m : model_registry())
    if (wanted.count(m.id)) out.push_back(&m);
  return out;
}

/// One configured engine bound to its knowledge base.
class ModelRunner {
public:
  ModelRunner(const ModelSpec &spec, const KnowledgeBase &kb) : spec_(spec), kb_(&kb) {
    switch (spec.engine) {
    case EngineKind::expert: engine_ = std::make_shared<ExpertEngine>(kb); break;
    case EngineKind::fuzzy: engine_ = std::make_shared<FuzzyEngine>(kb); break;
    default: engine_ = std::make_shared<ArgumentationEngine>(kb); break;
    }
  }

  const ModelSpec &spec() const { return spec_; }

  std::optional<double> trust(const EditorFeatures &e) const {
    const auto x = bind_features(*kb_, e);
    return std::visit(
        [&](const auto &eng) -> std::optional<double> {
          using T = std::decay_t<decltype(*eng)>;
          if constexpr (std::is_same_v<T, ExpertEngine>) return eng->infer(x, spec_.heuristic).trust;
          else if constexpr (std::is_same_v<T, FuzzyEngine>) return eng->infer(x, spec_.fuzzy).trust;
          else return eng->infer(x, spec_.argumentation).trust;
        },
        engine_);
  }

private:
  ModelSpec spec_;
  const KnowledgeBase *kb_;
  std::variant<std::shared_ptr<ExpertEngine>, std::shared_ptr<FuzzyEngine>, std::shared_ptr<ArgumentationEngine>>
      engine_;
};

/// Knowledge bases by id; defaults to the built-in KB1 and KB2.
using KbLookup = std::function<const KnowledgeBase &(std::string_view)>;

inline const KnowledgeBase &builtin_lookup(std::string_view id) { return load_builtin(id); }

struct EditorFailure {
  std::string model_id, editor_id, message;
};

struct ModelResult {
  const ModelSpec *spec = nullptr;
  TrustVector trust;
  MetricTriple metrics;
  std::vector<EditorFailure> failures;
};

/// Trust for every editor; an engine error marks that editor NA and is recorded.
inline ModelResult run_model(const ModelSpec &spec, const KnowledgeBase &kb, const std::vector<EditorFeatures> &editors,
                             const std::vector<bool> &is_barnstar) {
  ModelResult r;
  r.spec = &spec;
  const ModelRunner runner(spec, kb);
  r.trust.reserve(editors.size());
  for (const auto &e : editors) {
    try {
      r.trust.push_back(runner.trust(e));
    } catch (const Error &err) {
      r.trust.push_back(std::nullopt);
      r.failures.push_back({spec.id, e.editor_id, err.what()});
    }
  }
  r.metrics = evaluate_metrics(r.trust, is_barnstar);
  return r;
}

struct MatrixOptions {
  unsigned jobs = 0; // 0 = available parallelism
  KbLookup kbs = builtin_lookup;
};

/// Rows follow the order of `models` whatever the number of jobs.
inline std::vector<ModelResult> run_matrix(const std::vector<const ModelSpec *> &models,
                                           const std::vector<EditorFeatures> &editors,
                                           const std::set<std::string> &barnstars, const MatrixOptions &opt = {}) {
  std::vector<ModelResult> out(models.size());
  if (models.empty()) return out;
  if (editors.empty()) throw Error("no editors to evaluate");
  const auto mask = barnstar_mask(editors, barnstars);
  std::vector<const KnowledgeBase *> kb(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) kb[i] = &opt.kbs(models[i]->kb);
  unsigned jobs = opt.jobs ? opt.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, models.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < models.size();)
        out[i] = run_model(*models[i], *kb[i], editors, mask);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto &t : pool) t.join();
  }
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline constexpr std::string_view results_header = "model_id,dataset,rank,spread,na_pct";

inline void write_results(std::ostream &out, const std::vector<ModelResult> &rows, std::string_view dataset) {
  out << results_header << '\n';
  auto opt = [](const std::optional<double> &v) { return v ? csv::fixed4(*v) : std::string(); };
  for (const auto &r : rows)
    out << r.spec->id << ',' << csv::quote(dataset) << ',' << opt(r.metrics.rank) << ',' << opt(r.metrics.spread)
        << ',' << csv::fixed4(r.metrics.na_pct) << '\n';
}

} // namespace nonmono

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "explain.hpp"
#include "nonmono/builtin.hpp"
#include "nonmono/csv.hpp"
#include "nonmono/evaluation.hpp"
#include "nonmono/kb_parser.hpp"
#include "nonmono/models.hpp"
#include "nonmono/svg_plot.hpp"
#include "nonmono/wiki_ingest.hpp"

namespace fs = std::filesystem;
using namespace nonmono;

namespace {

/// Input or usage problem; exit code 1.
struct UserError : Error {
  using Error::Error;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("nonmono");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char *env = std::getenv("NONMONO_LOG")) {
    const std::string v = env;
    static const std::map<std::string, spdlog::level::level_enum> levels{
        {"error", spdlog::level::err}, {"warn", spdlog::level::warn}, {"info", spdlog::level::info},
        {"debug", spdlog::level::debug}};
    if (auto it = levels.find(v); it != levels.end()) spdlog::set_level(it->second);
    else spdlog::warn("NONMONO_LOG='{}' is not one of error, warn, info, debug; using warn", v);
  }
  // The same knowledge-base warning fires once per engine; report it once.
  set_warning_handler([](std::string_view m) {
    static std::mutex mu;
    static std::set<std::string, std::less<>> seen;
    {
      std::lock_guard lock(mu);
      if (!seen.emplace(m).second) return;
    }
    spdlog::warn("{}", m);
  });
}

std::ifstream open_in(const std::string &path, const char *what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError(std::string("cannot open ") + what + " '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string &path) {
  if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UserError("cannot write '" + path + "'");
  return out;
}

std::string slurp(const std::string &path) {
  auto in = open_in(path, "knowledge base");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// "KB1"/"KB2" name a built-in knowledge base; anything else is a file path.
struct LoadedKb {
  std::string source, name;
};

LoadedKb kb_source(const std::string &arg) {
  if (arg == "KB1" || arg == "KB2") return {std::string(builtin_source(arg)), arg};
  return {slurp(arg), arg};
}

const KnowledgeBase &keep(KnowledgeBase kb) {
  static std::vector<std::unique_ptr<KnowledgeBase>> store;
  store.push_back(std::make_unique<KnowledgeBase>(std::move(kb)));
  return *store.back();
}

const KnowledgeBase &load_kb(const std::string &arg) {
  if (arg == "KB1" || arg == "KB2") return load_builtin(arg);
  auto result = parse_kb(slurp(arg));
  for (const auto &d : result.diagnostics)
    if (d.severity == Severity::warning) spdlog::warn("{}: {}", arg, d.str());
  if (!result.ok()) {
    for (const auto &d : result.diagnostics)
      if (d.severity == Severity::error) spdlog::error("{}: {}", arg, d.str());
    throw UserError("knowledge base '" + arg + "' has errors");
  }
  return keep(std::move(*result.kb));
}

std::vector<EditorFeatures> load_features(const std::string &path) {
  auto in = open_in(path, "features file");
  return csv::read_features(in);
}

std::set<std::string> load_barnstars(const std::string &path) {
  auto in = open_in(path, "barnstars file");
  return csv::read_barnstars(in);
}

// ---------------------------------------------------------------------------

struct ExtractArgs {
  std::string dump, out, dump_date, wiki_start = "2001-01-15T00:00:00Z";
  int window_days = 30;
};

int cmd_extract(const ExtractArgs &a) {
  ExtractOptions opt;
  const auto dump = parse_iso8601(a.dump_date);
  if (!dump) throw UserError("--dump-date '" + a.dump_date + "' is not an ISO-8601 instant");
  const auto start = parse_iso8601(a.wiki_start);
  if (!start) throw UserError("--wiki-start '" + a.wiki_start + "' is not an ISO-8601 instant");
  if (a.window_days <= 0) throw UserError("--window-days must be positive");
  opt.dump_instant = *dump;
  opt.wiki_start = *start;
  opt.window_days = a.window_days;
  open_in(a.dump, "dump");
  StreamStats stats;
  const auto features = extract_features(
      [&] {
        auto in = std::make_unique<std::ifstream>(a.dump, std::ios::binary);
        if (!*in) throw UserError("cannot open dump '" + a.dump + "'");
        return in;
      },
      opt, &stats);
  if (stats.skipped_no_timestamp) spdlog::warn("{} revisions without timestamp skipped", stats.skipped_no_timestamp);
  if (stats.skipped_no_contributor)
    spdlog::info("{} revisions without contributor skipped", stats.skipped_no_contributor);
  if (stats.missing_bytes) spdlog::info("{} revisions without a size counted as 0 bytes", stats.missing_bytes);
  auto out = open_out(a.out);
  csv::write_features(out, features);
  spdlog::info("{} revisions read", stats.records);
  std::cout << features.size() << " editors\n";
  return 0;
}

struct InferArgs {
  std::string model, kb, features, out, explain;
};

int cmd_infer(const InferArgs &a) {
  const ModelSpec *spec = find_model(a.model);
  if (!spec) throw UserError("unknown model id '" + a.model + "'");
  const std::string kb_arg = a.kb.empty() ? spec->kb : a.kb;
  const KnowledgeBase &kb = load_kb(kb_arg);
  const std::string kb_name = kb.id.empty() ? kb_arg : kb.id;
  if (kb_name != spec->kb)
    throw UserError("model " + spec->id + " is declared on " + spec->kb + " but knowledge base " + kb_name +
                    " was given");
  const auto editors = load_features(a.features);
  if (!a.explain.empty()) {
    auto it = std::find_if(editors.begin(), editors.end(), [&](const auto &e) { return e.editor_id == a.explain; });
    if (it == editors.end()) throw UserError("editor '" + a.explain + "' is not in the features file");
    std::cout << cli::explain(*spec, kb, *it).dump(2) << '\n';
  }
  const ModelRunner runner(*spec, kb);
  TrustVector trust;
  for (const auto &e : editors) {
    try {
      trust.push_back(runner.trust(e));
    } catch (const Error &err) {
      trust.push_back(std::nullopt);
      spdlog::error("{} on {}: {}", spec->id, e.editor_id, err.what());
    }
  }
  if (a.out.empty()) {
    if (a.explain.empty()) csv::write_trust(std::cout, editors, spec->id, trust);
  } else {
    auto out = open_out(a.out);
    csv::write_trust(out, editors, spec->id, trust);
  }
  if (!trust.empty()) spdlog::info("{}: {} editors, {:.2f}% NA", spec->id, editors.size(), na_percentage(trust));
  return 0;
}

struct EvaluateArgs {
  std::string trust, barnstars, out, dataset = "dataset";
};

int cmd_evaluate(const EvaluateArgs &a) {
  auto in = open_in(a.trust, "trust file");
  const auto rows = csv::read_trust(in);
  const auto stars = load_barnstars(a.barnstars);
  std::vector<std::string> order;
  std::map<std::string, std::pair<TrustVector, std::vector<bool>>> by_model;
  for (const auto &r : rows) {
    auto [it, fresh] = by_model.try_emplace(r.model_id);
    if (fresh) order.push_back(r.model_id);
    it->second.first.push_back(r.trust);
    it->second.second.push_back(stars.count(r.editor_id) > 0);
  }
  if (order.empty()) throw UserError("trust file has no rows");
  std::ostringstream s;
  s << results_header << '\n';
  for (const auto &m : order) {
    const auto &[t, mask] = by_model[m];
    const auto triple = evaluate_metrics(t, mask);
    auto opt = [](const std::optional<double> &v) { return v ? csv::fixed4(*v) : std::string(); };
    s << csv::quote(m) << ',' << csv::quote(a.dataset) << ',' << opt(triple.rank) << ',' << opt(triple.spread) << ','
      << csv::fixed4(triple.na_pct) << '\n';
  }
  if (a.out.empty()) {
    std::cout << s.str();
  } else {
    auto out = open_out(a.out);
    out << s.str();
  }
  return 0;
}

void write_plots(const std::string &dir, const std::vector<csv::ResultRow> &rows,
                 const std::optional<csv::ResultRow> &baseline) {
  fs::create_directories(dir);
  struct Metric {
    const char *file, *title, *axis;
    std::optional<double> csv::ResultRow::*opt;
    bool na;
  };
  const Metric metrics[] = {
      {"rank.svg", "Normalised sum of the rank of Barnstar users", "rank of Barnstars (0 = best)",
       &csv::ResultRow::rank, false},
      {"spread.svg", "Spread of trust assigned to Barnstar users", "standard deviation", &csv::ResultRow::spread,
       false},
      {"na_pct.svg", "Editors without an assigned trust value", "NA (%)", nullptr, true},
  };
  for (const auto &m : metrics) {
    std::vector<svg::Bar> bars;
    for (const auto &r : rows) bars.push_back({r.model_id, m.na ? std::optional<double>(r.na_pct) : r.*(m.opt)});
    std::optional<double> ref;
    if (baseline) ref = m.na ? std::optional<double>(baseline->na_pct) : (*baseline).*(m.opt);
    auto out = open_out((fs::path(dir) / m.file).string());
    out << svg::bar_chart(m.title, m.axis, bars, ref);
  }
}

struct MatrixArgs {
  std::string features, barnstars, out, models = "all", dataset, plots, kb1 = "KB1", kb2 = "KB2";
  unsigned jobs = 0;
};

int cmd_run_matrix(const MatrixArgs &a) {
  const auto editors = load_features(a.features);
  const auto stars = load_barnstars(a.barnstars);
  const auto models = select_models(a.models);
  const std::string dataset = a.dataset.empty() ? fs::path(a.features).stem().string() : a.dataset;
  const KnowledgeBase &kb1 = load_kb(a.kb1);
  const KnowledgeBase &kb2 = load_kb(a.kb2);
  MatrixOptions opt;
  opt.jobs = a.jobs;
  opt.kbs = [&](std::string_view id) -> const KnowledgeBase & { return id == "KB1" ? kb1 : kb2; };
  spdlog::info("running {} models over {} editors ({} Barnstars)", models.size(), editors.size(),
               std::count_if(editors.begin(), editors.end(), [&](const auto &e) { return stars.count(e.editor_id); }));
  const auto results = run_matrix(models, editors, stars, opt);
  std::size_t completed = 0;
  for (const auto &r : results) {
    for (const auto &f : r.failures) spdlog::error("{} on {}: {}", f.model_id, f.editor_id, f.message);
    if (r.failures.size() < editors.size()) ++completed;
    else spdlog::error("{} failed on every editor", r.spec->id);
  }
  {
    auto out = open_out(a.out);
    write_results(out, results, dataset);
  }
  if (!a.plots.empty()) {
    std::ostringstream s;
    write_results(s, results, dataset);
    std::istringstream back(s.str());
    const auto rows = csv::read_results(back);
    std::optional<csv::ResultRow> base;
    if (editors.size() >= 2) {
      const auto trust = baseline_feature_average(editors);
      const auto t = evaluate_metrics(trust, barnstar_mask(editors, stars));
      base = csv::ResultRow{"baseline", dataset, t.rank, t.spread, t.na_pct};
      auto bout = open_out((fs::path(a.plots) / "baseline.csv").string());
      bout << results_header << '\n'
           << "baseline," << csv::quote(dataset) << ',' << (t.rank ? csv::fixed4(*t.rank) : "") << ','
           << (t.spread ? csv::fixed4(*t.spread) : "") << ',' << csv::fixed4(t.na_pct) << '\n';
    }
    write_plots(a.plots, rows, base);
  }
  std::cout << results.size() << " models, " << completed << " completed\n";
  return completed > 0 || models.empty() ? 0 : 1;
}

struct ReportArgs {
  std::string results, baseline, out;
};

int cmd_report(const ReportArgs &a) {
  auto in = open_in(a.results, "results file");
  const auto rows = csv::read_results(in);
  std::optional<csv::ResultRow> base;
  if (!a.baseline.empty()) {
    auto b = open_in(a.baseline, "baseline file");
    const auto brows = csv::read_results(b);
    if (brows.empty()) throw UserError("baseline file has no rows");
    base = brows.front();
  }
  write_plots(a.out, rows, base);
  auto md = open_out((fs::path(a.out) / "summary.md").string());
  auto cell = [](const std::optional<double> &v) { return v ? csv::fixed4(*v) : std::string("NA"); };
  md << "| model | configuration | rank | spread | NA % |\n|---|---|---|---|---|\n";
  for (const auto &r : rows) {
    const auto *m = find_model(r.model_id);
    md << "| " << r.model_id << " | " << (m ? m->describe().substr(m->id.size() + 2) : "") << " | " << cell(r.rank)
       << " | " << cell(r.spread) << " | " << csv::fixed4(r.na_pct) << " |\n";
  }
  if (base)
    md << "| baseline | features' average | " << cell(base->rank) << " | " << cell(base->spread) << " | "
       << csv::fixed4(base->na_pct) << " |\n";
  std::cout << rows.size() << " rows reported\n";
  return 0;
}

int cmd_kb_validate(const std::string &arg) {
  const auto src = kb_source(arg);
  const auto result = parse_kb(src.source);
  for (const auto &d : result.diagnostics) std::cout << src.name << ":" << d.str() << '\n';
  if (result.ok()) {
    std::cout << src.name << ": " << result.kb->features.size() << " features, " << result.kb->rules.size()
              << " rules, " << result.kb->contradictions.size() << " contradictions\n";
    return 0;
  }
  return 1;
}

int cmd_kb_dump(const std::string &arg) {
  std::cout << serialize_kb(load_kb(arg));
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  setup_logging();
  CLI::App app{"Trust inference for wiki editors with non-monotonic reasoning models"};
  app.require_subcommand(1);
  int status = 0;

  ExtractArgs ea;
  auto *extract = app.add_subcommand("extract", "Extract editor features from a stub-meta-history XML dump");
  extract->add_option("--dump", ea.dump, "XML dump file")->required();
  extract->add_option("--out", ea.out, "Features CSV to write")->required();
  extract->add_option("--dump-date", ea.dump_date, "Instant the dump was taken (ISO-8601)")->required();
  extract->add_option("--window-days", ea.window_days, "Activity window length in days")->capture_default_str();
  extract->add_option("--wiki-start", ea.wiki_start, "Start of the wiki (ISO-8601)")->capture_default_str();
  extract->callback([&] { status = cmd_extract(ea); });

  InferArgs ia;
  auto *infer = app.add_subcommand("infer", "Compute trust for every editor with one model");
  infer->add_option("--model", ia.model, "Model id, e.g. E3 or A9")->required();
  infer->add_option("--kb", ia.kb, "KB1, KB2 or a .kb file (default: the model's own)");
  infer->add_option("--features", ia.features, "Features CSV")->required();
  infer->add_option("--out", ia.out, "Trust CSV to write (default: stdout)");
  infer->add_option("--explain", ia.explain, "Print the reasoning trace for one editor as JSON");
  infer->callback([&] { status = cmd_infer(ia); });

  EvaluateArgs va;
  auto *evaluate = app.add_subcommand("evaluate", "Compute rank, spread and NA% from a trust file");
  evaluate->add_option("--trust", va.trust, "Trust CSV")->required();
  evaluate->add_option("--barnstars", va.barnstars, "Barnstar list, one editor id per line")->required();
  evaluate->add_option("--dataset", va.dataset, "Dataset name for the results file")->capture_default_str();
  evaluate->add_option("--out", va.out, "Results CSV to write (default: stdout)");
  evaluate->callback([&] { status = cmd_evaluate(va); });

  MatrixArgs ma;
  auto *matrix = app.add_subcommand("run-matrix", "Run and evaluate every selected model");
  matrix->add_option("--features", ma.features, "Features CSV")->required();
  matrix->add_option("--barnstars", ma.barnstars, "Barnstar list, one editor id per line")->required();
  matrix->add_option("--out", ma.out, "Results CSV to write")->required();
  matrix->add_option("--models", ma.models, "'all' or comma-separated model ids")->capture_default_str();
  matrix->add_option("--dataset", ma.dataset, "Dataset name (default: features file stem)");
  matrix->add_option("--plots", ma.plots, "Directory for SVG bar charts");
  matrix->add_option("--jobs", ma.jobs, "Worker threads (default: available parallelism)");
  matrix->add_option("--kb1", ma.kb1, "Knowledge base used by KB1 models")->capture_default_str();
  matrix->add_option("--kb2", ma.kb2, "Knowledge base used by KB2 models")->capture_default_str();
  matrix->callback([&] { status = cmd_run_matrix(ma); });

  ReportArgs ra;
  auto *report = app.add_subcommand("report", "Render SVG charts and a summary table from a results file");
  report->add_option("--results", ra.results, "Results CSV")->required();
  report->add_option("--baseline", ra.baseline, "Results CSV whose first row is the baseline");
  report->add_option("--out", ra.out, "Output directory")->required();
  report->callback([&] { status = cmd_report(ra); });

  std::string kb_arg;
  auto *kb = app.add_subcommand("kb", "Knowledge base tools");
  kb->require_subcommand(1);
  auto *validate = kb->add_subcommand("validate", "Parse a knowledge base and print diagnostics");
  validate->add_option("source", kb_arg, "KB1, KB2 or a .kb file")->required();
  validate->callback([&] { status = cmd_kb_validate(kb_arg); });
  auto *dump = kb->add_subcommand("dump", "Print a knowledge base in canonical form");
  dump->add_option("source", kb_arg, "KB1, KB2 or a .kb file")->required();
  dump->callback([&] { status = cmd_kb_dump(kb_arg); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error &e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const fs::filesystem_error &e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception &e) {
    spdlog::critical("internal error: {}", e.what());
    return 2;
  }
  return status;
}

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "nonmono/builtin.hpp"
#include "nonmono/engine_expert.hpp"
#include "nonmono/features.hpp"

using namespace nonmono;

namespace {

const char *pair_kb = R"(
feature a weight 2 domain [0, 1] { term any = [0, 1] }
feature b weight 6 domain [0, 1] { term any = [0, 1] }
trustlevel low = [0, 0.5]
trustlevel high = [0.5, 1]
rule X: IF a is any AND b is any THEN trust is high
rule Y: IF a is any THEN trust is low
rule Z: IF b is any THEN trust is high
)";

EditorFeatures neutral() {
  EditorFeatures e;
  e.editor_id = "e";
  e.anonymous = 0;
  e.pages = 15;
  e.activity = 15;
  e.not_minor = 0.5;
  e.comments = 0.6;
  e.presence = 0.6;
  e.frequency = 0.6;
  e.regularity = 0.6;
  e.bytes = 1000;
  return e;
}

ActivatedRule survivor(double value, std::size_t level, int weight = 1) {
  ActivatedRule r;
  r.value = value;
  r.level = level;
  r.weight = weight;
  return r;
}

EditorFeatures random_editor(std::mt19937 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EditorFeatures e;
  e.editor_id = "r";
  e.anonymous = u(rng) < 0.5 ? 1 : 0;
  e.pages = std::floor(u(rng) * 45);
  e.activity = std::max(e.pages, std::floor(u(rng) * 60));
  e.not_minor = u(rng) < 0.3 ? u(rng) * 0.05 : u(rng);
  e.comments = u(rng) < 0.3 ? u(rng) * 0.25 : u(rng);
  e.presence = u(rng);
  e.frequency = u(rng);
  e.regularity = u(rng) < 0.3 ? u(rng) * 0.25 : u(rng);
  e.bytes = std::floor(u(rng) * 6000) - 500;
  return e;
}

} // namespace

TEST(ExpertAntecedent, C4Rewritten) {
  const auto &kb = load_builtin("KB1");
  auto e = neutral();
  e.comments = 0.8;
  const auto x = bind_features(kb, e);
  const auto &c4 = kb.rules[*kb.rule_index("C4")];
  const Activation a = evaluate_antecedent(kb, c4.antecedent, x);
  EXPECT_TRUE(a.active);
  EXPECT_DOUBLE_EQ(a.v, 0.8);
  EXPECT_DOUBLE_EQ(a.r_min, 0.75);
  EXPECT_DOUBLE_EQ(a.r_max, 1.0);

  e.comments = 0.5;
  EXPECT_FALSE(evaluate_antecedent(kb, c4.antecedent, bind_features(kb, e)).active);
}

TEST(ExpertAntecedent, ConjunctionTakesMin) {
  auto kb = parse_kb_or_throw(pair_kb);
  const std::vector<double> x{0.2, 0.9};
  const Activation a = evaluate_antecedent(kb, kb.rules[0].antecedent, x);
  EXPECT_TRUE(a.active);
  EXPECT_DOUBLE_EQ(a.v, 0.2);
  EXPECT_DOUBLE_EQ(a.r_min, 0.0);
  EXPECT_DOUBLE_EQ(a.r_max, 1.0);
}

TEST(ExpertAntecedent, DisjunctionTakesMaxOverSatisfied) {
  auto kb = parse_kb_or_throw(R"(
feature a weight 1 domain [0, 1] { term lo = [0, 0.5] term hi = [0.5, 1] }
feature b weight 1 domain [0, 1] { term lo = [0, 0.5] term hi = [0.5, 1] }
trustlevel all = [0, 1]
rule X: IF a is hi OR b is hi OR b is lo THEN trust is all
)");
  const std::vector<double> x{0.7, 0.3};
  const Activation a = evaluate_antecedent(kb, kb.rules[0].antecedent, x);
  EXPECT_TRUE(a.active);
  EXPECT_DOUBLE_EQ(a.v, 0.7);
  EXPECT_DOUBLE_EQ(a.r_min, 0.5);
  EXPECT_DOUBLE_EQ(a.r_max, 1.0);
  EXPECT_LE(a.r_min, a.v);
}

TEST(ExpertAntecedent, UnboundedTermSaturates) {
  const auto &kb = load_builtin("KB1");
  auto e = neutral();
  e.pages = 500;
  const Activation a = evaluate_antecedent(kb, kb.rules[*kb.rule_index("U3")].antecedent, bind_features(kb, e));
  EXPECT_TRUE(a.active);
  EXPECT_DOUBLE_EQ(a.v, 40.0);
  EXPECT_DOUBLE_EQ(rule_value(a, 0.5, 0.75), 0.75);
}

TEST(ExpertAntecedent, MissingFeatureIsNamed) {
  const auto &kb = load_builtin("KB1");
  std::map<std::string, double> m{{"pages", 1}, {"activity", 1}};
  try {
    bind_features(kb, m);
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("anonymous"), std::string::npos);
  }
}

TEST(ExpertRuleValue, WorkedExamples) {
  EXPECT_NEAR(rule_value(0.75, 0.75, 1.0, 0.75, 1.0), 0.75, 1e-12);
  EXPECT_NEAR(rule_value(1.0, 0.75, 1.0, 0.75, 1.0), 1.0, 1e-12);
  EXPECT_NEAR(rule_value(0.25, 0.0, 1.0, 1.0, 0.0), 0.75, 1e-12);
  EXPECT_DOUBLE_EQ(rule_value(0.3, 0.0, 1.0, 0.4, 0.4), 0.4);
  EXPECT_DOUBLE_EQ(rule_value(1.0, 1.0, 1.0, 0.0, 0.25), 0.25);
}

TEST(ExpertRuleValue, MonotoneInV) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double r_min = u(rng) * 10, r_max = r_min + 0.01 + u(rng) * 10;
    const double lc = u(rng), uc = u(rng);
    const double v1 = r_min + u(rng) * (r_max - r_min), v2 = r_min + u(rng) * (r_max - r_min);
    const double f1 = rule_value(v1, r_min, r_max, lc, uc), f2 = rule_value(v2, r_min, r_max, lc, uc);
    if (v1 <= v2) {
      if (lc < uc) {
        EXPECT_LE(f1, f2 + 1e-12);
      } else if (lc > uc) {
        EXPECT_GE(f1, f2 - 1e-12);
      }
    }
    EXPECT_GE(f1, std::min(lc, uc) - 1e-12);
    EXPECT_LE(f1, std::max(lc, uc) + 1e-12);
  }
}

TEST(ExpertResolve, Cc1DiscardsB1) {
  const auto &kb = load_builtin("KB1");
  ExpertEngine engine(kb);
  auto e = neutral();
  e.not_minor = 0.01;
  e.bytes = 1000;
  auto out = engine.infer(bind_features(kb, e), Heuristic::h3);
  auto it = std::find_if(out.discarded.begin(), out.discarded.end(), [](auto &d) { return d.rule_label == "B1"; });
  ASSERT_NE(it, out.discarded.end());
  EXPECT_EQ(it->by, "CC1");
  for (const auto &s : out.surviving) EXPECT_NE(s.label, "B1");
}

TEST(ExpertResolve, NoContradictionsKeepsAll) {
  auto kb = parse_kb_or_throw(pair_kb);
  ExpertEngine engine(kb);
  const std::vector<double> x{0.4, 0.6};
  auto out = engine.infer(x, Heuristic::h3);
  EXPECT_EQ(out.surviving.size(), 3u);
  EXPECT_TRUE(out.discarded.empty());
  EXPECT_NEAR(*out.trust, (rule_value(0.4, 0, 1, 0.5, 1) + rule_value(0.4, 0, 1, 0, 0.5) + rule_value(0.6, 0, 1, 0.5, 1)) / 3,
              1e-12);
}

TEST(ExpertResolve, MutualCycleDiscardsBoth) {
  auto kb = parse_kb_or_throw(std::string(pair_kb) + "conflict Y <-> Z\n");
  ExpertEngine engine(kb);
  ASSERT_EQ(engine.graph().cyclic_groups().size(), 1u);
  const std::vector<double> x{0.4, 0.6};
  auto out = engine.infer(x, Heuristic::h3);
  ASSERT_EQ(out.surviving.size(), 1u);
  EXPECT_EQ(out.surviving[0].label, "X");
  EXPECT_EQ(out.discarded.size(), 2u);
}

TEST(ExpertResolve, RetractedRuleCannotFireDownstream) {
  auto kb = parse_kb_or_throw(std::string(pair_kb) + R"(
contradiction Down: IF rule Y THEN NOT rule X
contradiction Up: IF b is any THEN NOT rule Y
)");
  ExpertEngine engine(kb);
  const std::vector<double> x{0.4, 0.6};
  auto out = engine.infer(x, Heuristic::h3);
  std::vector<std::string> alive;
  for (const auto &s : out.surviving) alive.push_back(s.label);
  EXPECT_EQ(alive, (std::vector<std::string>{"X", "Z"}));
}

TEST(ExpertResolve, RetractedContradictionHasNoEffect) {
  const auto &kb = load_builtin("KB1");
  ExpertEngine engine(kb);
  auto e = neutral();
  e.not_minor = 0.9; // NM2 fires CC3, which retracts OnlyAge.*
  e.frequency = 0.1;
  e.regularity = 0.1;
  e.activity = 2;
  e.pages = 2;
  e.presence = 0.6;
  auto out = engine.infer(bind_features(kb, e), Heuristic::h3);
  EXPECT_TRUE(std::any_of(out.surviving.begin(), out.surviving.end(), [](auto &s) { return s.label == "P3"; }));
  e.not_minor = 0.1; // neither NM rule: OnlyAge.b retracts P3
  out = engine.infer(bind_features(kb, e), Heuristic::h3);
  EXPECT_FALSE(std::any_of(out.surviving.begin(), out.surviving.end(), [](auto &s) { return s.label == "P3"; }));
}

TEST(ExpertResolve, OrderIndependence) {
  // Shuffling the declaration order of contradictions leaves the outcome unchanged.
  std::string src(builtin_source("KB1"));
  std::vector<std::string> head, contradictions, tail;
  std::istringstream in(src);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("contradiction ", 0) == 0) contradictions.push_back(line);
    else (contradictions.empty() ? head : tail).push_back(line);
  }
  const auto &kb = load_builtin("KB1");
  ExpertEngine base(kb);
  std::mt19937 rng(5);
  for (int perm = 0; perm < 10; ++perm) {
    std::shuffle(contradictions.begin(), contradictions.end(), rng);
    std::string text;
    for (auto *part : {&head, &contradictions, &tail})
      for (const auto &l : *part) text += l + "\n";
    auto shuffled = parse_kb_or_throw(text);
    ExpertEngine other(shuffled);
    for (int i = 0; i < 100; ++i) {
      auto e = random_editor(rng);
      auto a = base.infer(bind_features(kb, e), Heuristic::h3);
      auto b = other.infer(bind_features(shuffled, e), Heuristic::h3);
      std::vector<std::string> sa, sb;
      for (auto &s : a.surviving) sa.push_back(s.label);
      for (auto &s : b.surviving) sb.push_back(s.label);
      EXPECT_EQ(sa, sb);
      ASSERT_EQ(a.trust.has_value(), b.trust.has_value());
      if (a.trust) {
        EXPECT_DOUBLE_EQ(*a.trust, *b.trust);
      }
    }
  }
}

TEST(ExpertAggregate, Examples) {
  std::vector<ActivatedRule> s{survivor(0.2, 0), survivor(0.4, 1), survivor(0.9, 2)};
  EXPECT_NEAR(*aggregate(s, Heuristic::h3), 0.5, 1e-12);
  std::vector<ActivatedRule> g{survivor(0.8, 3), survivor(0.9, 3), survivor(0.1, 0)};
  EXPECT_NEAR(*aggregate(g, Heuristic::h1), 0.85, 1e-12);
  std::vector<ActivatedRule> t{survivor(0.2, 0), survivor(0.8, 3)};
  EXPECT_NEAR(*aggregate(t, Heuristic::h1), 0.5, 1e-12);
  EXPECT_FALSE(aggregate({}, Heuristic::h1).has_value());
  EXPECT_FALSE(aggregate({}, Heuristic::h4).has_value());
}

TEST(ExpertAggregate, Weighted) {
  std::vector<ActivatedRule> s{survivor(0.2, 0, 1), survivor(0.8, 0, 3), survivor(0.5, 1, 8)};
  EXPECT_NEAR(*aggregate(s, Heuristic::h4), (0.2 + 2.4 + 4.0) / 12, 1e-12);
  EXPECT_NEAR(*aggregate(s, Heuristic::h2), (0.2 + 2.4) / 4, 1e-12);
  std::vector<ActivatedRule> zero{survivor(0.2, 0, 0), survivor(0.6, 0, 0)};
  int warnings = 0;
  set_warning_handler([&](std::string_view) { ++warnings; });
  EXPECT_NEAR(*aggregate(zero, Heuristic::h4), 0.4, 1e-12);
  set_warning_handler({});
  EXPECT_EQ(warnings, 1);
}

TEST(ExpertProperties, TrustInUnitIntervalAndKb1NeverNa) {
  const auto &kb = load_builtin("KB1");
  ExpertEngine engine(kb);
  std::mt19937 rng(9);
  for (int i = 0; i < 500; ++i) {
    const auto x = bind_features(kb, random_editor(rng));
    for (auto h : {Heuristic::h1, Heuristic::h2, Heuristic::h3, Heuristic::h4}) {
      auto out = engine.infer(x, h);
      ASSERT_TRUE(out.trust.has_value());
      EXPECT_GE(*out.trust, 0.0);
      EXPECT_LE(*out.trust, 1.0);
      for (const auto &s : out.surviving) {
        EXPECT_LE(s.activation.r_min, s.activation.v);
        EXPECT_LE(s.activation.v, s.activation.r_max);
      }
    }
  }
}

TEST(ExpertProperties, WithoutContradictionsH3IsMeanOfActivated) {
  auto src = std::string(builtin_source("KB1"));
  std::string stripped;
  std::istringstream in(src);
  for (std::string line; std::getline(in, line);)
    if (line.rfind("contradiction ", 0) != 0 && line.rfind("group ", 0) != 0) stripped += line + "\n";
  auto kb = parse_kb_or_throw(stripped);
  ASSERT_TRUE(kb.contradictions.empty());
  ExpertEngine engine(kb);
  std::mt19937 rng(13);
  for (int i = 0; i < 300; ++i) {
    const auto x = bind_features(kb, random_editor(rng));
    double sum = 0;
    int n = 0;
    for (const auto &r : kb.rules) {
      auto a = evaluate_antecedent(kb, r.antecedent, x);
      if (!a.active) continue;
      sum += rule_value(a, r.consequent_lower, r.consequent_upper);
      ++n;
    }
    auto out = engine.infer(x, Heuristic::h3);
    ASSERT_GT(n, 0);
    EXPECT_NEAR(*out.trust, sum / n, 1e-12);
  }
}

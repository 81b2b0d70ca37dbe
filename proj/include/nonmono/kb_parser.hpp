#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <vector>

#include "nonmono/error.hpp"
#include "nonmono/kb_model.hpp"

namespace nonmono {

enum class Severity { error, warning };

struct ParseDiagnostic {
  Severity severity = Severity::error;
  int line = 0;
  std::string label; // statement label when known
  std::string message;

  std::string str() const {
    std::string s = "line " + std::to_string(line) + ": " + (severity == Severity::error ? "error" : "warning");
    if (!label.empty()) s += " [" + label + "]";
    return s + ": " + message;
  }
};

struct ParseResult {
  std::optional<KnowledgeBase> kb;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return kb.has_value(); }
  std::size_t count(Severity s) const {
    return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                  [s](const auto &d) { return d.severity == s; }));
  }
};

namespace detail {

struct Token {
  enum Kind { ident, number, punct, end } kind = end;
  std::string text;
  double value = 0.0;
  int line = 0;
};

struct SyntaxError {
  int line;
  std::string message;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  auto ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') { ++line; ++i; continue; }
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (src.substr(i, 3) == "<->") { out.push_back({Token::punct, "<->", 0, line}); i += 3; continue; }
    if (src.substr(i, 2) == "->") { out.push_back({Token::punct, "->", 0, line}); i += 2; continue; }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Token::ident, std::string(src.substr(i, j - i)), 0, line});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      double v = 0.0;
      const char *first = src.data() + i + (c == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(first, src.data() + src.size(), v);
      if (ec != std::errc() || ptr == first) throw SyntaxError{line, "unexpected character '" + std::string(1, c) + "'"};
      const std::size_t j = static_cast<std::size_t>(ptr - src.data());
      out.push_back({Token::number, std::string(src.substr(i, j - i)), v, line});
      i = j;
      continue;
    }
    if (std::string_view("[](){},=:|").find(c) != std::string_view::npos) {
      out.push_back({Token::punct, std::string(1, c), 0, line});
      ++i;
      continue;
    }
    throw SyntaxError{line, "unexpected character '" + std::string(1, c) + "'"};
  }
  out.push_back({Token::end, "", 0, line});
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

// Unresolved parse products; names are resolved once the whole file is read
// so statements may refer forward.
struct RawPremise {
  std::string feature, term;
  int line;
};
using RawDnf = std::vector<std::vector<RawPremise>>;

struct RawFeature {
  Feature feature;
  std::vector<int> term_lines;
  int line;
};
struct RawLevel {
  TrustLevel level;
  int line;
};
struct RawRule {
  std::string label;
  RawDnf antecedent;
  std::string level;
  std::optional<std::pair<double, double>> range;
  int line;
};
struct RawContradiction {
  std::string label;
  std::optional<std::string> rule_ref;
  RawDnf premises;
  std::string target_kind; // rule | contradiction | group | unresolved
  std::string target;
  ContradictionForm form = ContradictionForm::statement;
  int line;
};
struct RawGroup {
  std::string name;
  std::vector<std::string> members;
  int line;
};

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::string id;
  std::vector<RawFeature> features;
  std::vector<RawLevel> levels;
  std::vector<RawRule> rules;
  std::vector<RawContradiction> contradictions;
  std::vector<RawGroup> groups;
  std::vector<ParseDiagnostic> diags;

  void run() {
    while (peek().kind != Token::end) {
      const std::size_t start = pos_;
      try {
        statement();
      } catch (const SyntaxError &e) {
        diags.push_back({Severity::error, e.line, "", e.message});
        recover(start);
      }
    }
  }

private:
  const Token &peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token &next() {
    const Token &t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_keyword(std::string_view kw) const { return peek().kind == Token::ident && iequals(peek().text, kw); }
  bool at_punct(std::string_view p) const { return peek().kind == Token::punct && peek().text == p; }

  [[noreturn]] void fail(const std::string &what) const {
    const Token &t = peek();
    const std::string got = t.kind == Token::end ? "end of input" : "'" + t.text + "'";
    throw SyntaxError{t.line, "expected " + what + ", got " + got};
  }
  void keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail("'" + std::string(kw) + "'");
    next();
  }
  void punct(std::string_view p) {
    if (!at_punct(p)) fail("'" + std::string(p) + "'");
    next();
  }
  std::string identifier(const char *what) {
    if (peek().kind != Token::ident) fail(what);
    return next().text;
  }
  double number() {
    if (peek().kind != Token::number) fail("number");
    return next().value;
  }

  static bool is_statement_keyword(const Token &t) {
    if (t.kind != Token::ident) return false;
    for (const char *kw : {"knowledgebase", "feature", "trustlevel", "rule", "contradiction", "conflict", "group"})
      if (iequals(t.text, kw)) return true;
    return false;
  }

  // Skip to the first statement keyword that begins a later line.
  void recover(std::size_t start) {
    const int bad_line = toks_[start].line;
    if (pos_ == start) next();
    int depth = 0;
    while (peek().kind != Token::end) {
      if (at_punct("{")) ++depth;
      if (at_punct("}")) {
        if (depth == 0 && peek().line > bad_line) { next(); return; }
        --depth;
      }
      if (depth <= 0 && peek().line > bad_line && is_statement_keyword(peek()) &&
          (pos_ == 0 || toks_[pos_ - 1].line < peek().line))
        return;
      next();
    }
  }

  void statement() {
    if (at_keyword("knowledgebase")) {
      next();
      id = identifier("knowledge base id");
    } else if (at_keyword("feature")) {
      feature();
    } else if (at_keyword("trustlevel")) {
      trustlevel();
    } else if (at_keyword("rule")) {
      rule();
    } else if (at_keyword("contradiction")) {
      contradiction();
    } else if (at_keyword("conflict")) {
      conflict();
    } else if (at_keyword("group")) {
      group();
    } else {
      fail("statement keyword");
    }
  }

  std::pair<double, std::optional<double>> range(bool allow_inf) {
    punct("[");
    const double lo = number();
    punct(",");
    std::optional<double> hi;
    if (allow_inf && at_keyword("inf")) next();
    else hi = number();
    punct("]");
    return {lo, hi};
  }

  MembershipFn shape() {
    const int line = peek().line;
    const std::string name = identifier("membership shape");
    punct("(");
    std::vector<double> p;
    if (!at_punct(")")) {
      p.push_back(number());
      while (at_punct(",")) {
        next();
        p.push_back(number());
      }
    }
    punct(")");
    auto need = [&](std::size_t n) {
      if (p.size() != n)
        throw SyntaxError{line, name + " takes " + std::to_string(n) + " parameters, got " + std::to_string(p.size())};
    };
    try {
      if (iequals(name, "triangular")) {
        need(3);
        return MembershipFn(Triangular{p[0], p[1], p[2]});
      }
      if (iequals(name, "trapezoidal")) {
        need(4);
        return MembershipFn(Trapezoidal{p[0], p[1], p[2], p[3]});
      }
      if (iequals(name, "gaussian")) {
        need(2);
        return MembershipFn(Gaussian{p[0], p[1]});
      }
      if (iequals(name, "crisp")) {
        need(2);
        return MembershipFn(Crisp{p[0], p[1]});
      }
    } catch (const Error &e) {
      throw SyntaxError{line, e.what()};
    }
    throw SyntaxError{line, "unknown membership shape '" + name + "'"};
  }

  // fmf <shape> [| gaussian(...)]
  void fmfs(MembershipFn &fmf, std::optional<MembershipFn> &gaussian, double lo, double hi) {
    if (!at_keyword("fmf")) {
      fmf = MembershipFn(Crisp{std::min(lo, hi), std::max(lo, hi)});
      return;
    }
    next();
    fmf = shape();
    if (at_punct("|")) {
      next();
      const int line = peek().line;
      MembershipFn g = shape();
      if (!std::holds_alternative<Gaussian>(g.shape())) throw SyntaxError{line, "alternative fmf must be gaussian"};
      gaussian = g;
    }
  }

  void feature() {
    const int line = next().line;
    RawFeature f{{}, {}, line};
    f.feature.name = identifier("feature name");
    keyword("weight");
    const double w = number();
    if (w != std::floor(w)) throw SyntaxError{line, "weight must be an integer"};
    f.feature.weight = static_cast<int>(w);
    keyword("domain");
    auto [dlo, dhi] = range(false);
    f.feature.domain_min = dlo;
    f.feature.domain_max = *dhi;
    punct("{");
    while (!at_punct("}")) {
      const int tline = peek().line;
      keyword("term");
      LinguisticTerm t;
      t.label = identifier("term label");
      punct("=");
      auto [lo, hi] = range(true);
      t.lower = lo;
      t.unbounded = !hi;
      t.upper = hi ? *hi : f.feature.domain_max;
      fmfs(t.fmf, t.gaussian_fmf, t.lower, t.upper);
      f.feature.terms.push_back(std::move(t));
      f.term_lines.push_back(tline);
    }
    punct("}");
    features.push_back(std::move(f));
  }

  void trustlevel() {
    const int line = next().line;
    RawLevel l{{}, line};
    l.level.label = identifier("trust level label");
    punct("=");
    auto [lo, hi] = range(false);
    l.level.lower = lo;
    l.level.upper = *hi;
    fmfs(l.level.fmf, l.level.gaussian_fmf, lo, *hi);
    levels.push_back(std::move(l));
  }

  // expr := conj (OR conj)* ; conj := atom (AND atom)* ; atom := '(' expr ')' | feature is term
  RawDnf expr() {
    RawDnf out = conj();
    while (at_keyword("or")) {
      next();
      RawDnf rhs = conj();
      out.insert(out.end(), rhs.begin(), rhs.end());
    }
    return out;
  }
  RawDnf conj() {
    RawDnf out = atom();
    while (at_keyword("and")) {
      next();
      RawDnf rhs = atom();
      RawDnf prod;
      for (const auto &a : out)
        for (const auto &b : rhs) {
          auto c = a;
          c.insert(c.end(), b.begin(), b.end());
          prod.push_back(std::move(c));
        }
      out = std::move(prod);
    }
    return out;
  }
  RawDnf atom() {
    if (at_punct("(")) {
      next();
      RawDnf e = expr();
      punct(")");
      return e;
    }
    const int line = peek().line;
    std::string f = identifier("feature name");
    keyword("is");
    std::string t = identifier("term label");
    return {{RawPremise{std::move(f), std::move(t), line}}};
  }

  std::string label_colon(const char *what) {
    std::string l = identifier(what);
    punct(":");
    return l;
  }

  void rule() {
    const int line = next().line;
    RawRule r{label_colon("rule label"), {}, {}, std::nullopt, line};
    keyword("if");
    r.antecedent = expr();
    keyword("then");
    keyword("trust");
    keyword("is");
    r.level = identifier("trust level");
    if (at_punct("[")) {
      auto [lo, hi] = range(false);
      r.range = std::pair{lo, *hi};
    }
    rules.push_back(std::move(r));
  }

  void contradiction() {
    const int line = next().line;
    RawContradiction c;
    c.line = line;
    c.label = label_colon("contradiction label");
    keyword("if");
    if (at_keyword("rule") && peek(1).kind == Token::ident && !iequals(peek(1).text, "is")) {
      next();
      c.rule_ref = identifier("rule label");
    } else {
      c.premises = expr();
    }
    keyword("then");
    keyword("not");
    for (const char *kind : {"rule", "contradiction", "group", "unresolved"})
      if (at_keyword(kind)) {
        next();
        c.target_kind = kind;
        break;
      }
    if (c.target_kind.empty()) fail("'rule', 'contradiction', 'group' or 'unresolved'");
    c.target = identifier("target label");
    contradictions.push_back(std::move(c));
  }

  void conflict() {
    const int line = next().line;
    const std::string a = identifier("rule label");
    bool mutual = false;
    if (at_punct("<->")) mutual = true;
    else if (!at_punct("->")) fail("'->' or '<->'");
    next();
    const std::string b = identifier("rule label");
    const auto form = mutual ? ContradictionForm::mutual_conflict : ContradictionForm::directed_conflict;
    contradictions.push_back({a + "_vs_" + b, a, {}, "rule", b, form, line});
    if (mutual) contradictions.push_back({b + "_vs_" + a, b, {}, "rule", a, form, line});
  }

  void group() {
    const int line = next().line;
    RawGroup g{identifier("group name"), {}, line};
    punct("=");
    punct("{");
    if (!at_punct("}")) {
      g.members.push_back(identifier("contradiction label"));
      while (at_punct(",")) {
        next();
        g.members.push_back(identifier("contradiction label"));
      }
    }
    punct("}");
    groups.push_back(std::move(g));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline bool interiors_overlap(const LinguisticTerm &a, const LinguisticTerm &b) {
  return a.lower < b.upper && b.lower < a.upper;
}

} // namespace detail

/// Parse and validate a knowledge base. Errors prevent construction; warnings do not.
inline ParseResult parse_kb(std::string_view source) {
  using namespace detail;
  ParseResult result;
  auto &diags = result.diagnostics;
  auto error = [&](int line, const std::string &label, std::string msg) {
    diags.push_back({Severity::error, line, label, std::move(msg)});
  };
  auto finish = [&]() {
    std::stable_sort(diags.begin(), diags.end(), [](const auto &x, const auto &y) {
      return std::tie(x.line, x.label) < std::tie(y.line, y.label);
    });
  };

  std::vector<Token> toks;
  try {
    toks = tokenize(source);
  } catch (const SyntaxError &e) {
    error(e.line, "", e.message);
    finish();
    return result;
  }
  Parser p(std::move(toks));
  p.run();
  diags = std::move(p.diags);

  KnowledgeBase kb;
  kb.id = p.id;

  if (p.features.empty()) error(1, "", "no features declared");

  for (auto &rf : p.features) {
    Feature &f = rf.feature;
    if (kb.feature_index(f.name)) {
      error(rf.line, f.name, "duplicate feature '" + f.name + "'");
      continue;
    }
    if (f.weight < 0 || f.weight > max_feature_weight)
      error(rf.line, f.name, "weight " + std::to_string(f.weight) + " outside [0, 8]");
    if (f.domain_min > f.domain_max) error(rf.line, f.name, "domain lower bound exceeds upper bound");
    if (f.terms.empty()) error(rf.line, f.name, "feature declares no terms");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
      const auto &t = f.terms[i];
      const int line = rf.term_lines[i];
      const std::string where = f.name + "." + t.label;
      if (!seen.insert(t.label).second) error(line, where, "duplicate term '" + t.label + "'");
      if (t.lower > t.upper) error(line, where, "range lower bound exceeds upper bound");
      if (t.lower < f.domain_min || (!t.unbounded && t.upper > f.domain_max))
        error(line, where, "range lies outside the feature domain");
      for (std::size_t j = 0; j < i; ++j)
        if (interiors_overlap(t, f.terms[j]))
          error(line, where, "range overlaps term '" + f.terms[j].label + "'");
    }
    kb.features.push_back(std::move(f));
  }

  for (auto &rl : p.levels) {
    const auto &l = rl.level;
    if (kb.level_index(l.label)) {
      error(rl.line, l.label, "duplicate trust level '" + l.label + "'");
      continue;
    }
    if (l.lower > l.upper) error(rl.line, l.label, "range lower bound exceeds upper bound");
    if (l.lower < 0.0 || l.upper > 1.0) error(rl.line, l.label, "trust level range outside [0, 1]");
    kb.trust_levels.push_back(l);
  }
  if (!kb.trust_levels.empty()) {
    std::vector<const TrustLevel *> sorted;
    for (const auto &l : kb.trust_levels) sorted.push_back(&l);
    std::sort(sorted.begin(), sorted.end(), [](auto *a, auto *b) { return a->lower < b->lower; });
    bool tiles = sorted.front()->lower == 0.0 && sorted.back()->upper == 1.0;
    for (std::size_t i = 1; i < sorted.size(); ++i) tiles = tiles && sorted[i - 1]->upper == sorted[i]->lower;
    if (!tiles) error(p.levels.front().line, "", "trust levels do not tile [0, 1]");
  } else if (!p.features.empty()) {
    error(1, "", "no trust levels declared");
  }

  auto resolve_dnf = [&](const RawDnf &raw, const std::string &label, Dnf &out) {
    bool good = true;
    for (const auto &rc : raw) {
      Conjunction conj;
      for (const auto &rp : rc) {
        auto fi = kb.feature_index(rp.feature);
        if (!fi) {
          error(rp.line, label, "unknown feature '" + rp.feature + "'");
          good = false;
          continue;
        }
        auto ti = kb.features[*fi].term_index(rp.term);
        if (!ti) {
          error(rp.line, label, "feature '" + rp.feature + "' has no term '" + rp.term + "'");
          good = false;
          continue;
        }
        conj.push_back({rp.feature, rp.term, *fi, *ti});
      }
      out.push_back(std::move(conj));
    }
    return good;
  };

  std::set<std::string> labels;
  for (auto &rr : p.rules) {
    if (!labels.insert(rr.label).second) {
      error(rr.line, rr.label, "duplicate label '" + rr.label + "'");
      continue;
    }
    Rule r;
    r.label = rr.label;
    resolve_dnf(rr.antecedent, rr.label, r.antecedent);
    r.consequent_level = rr.level;
    if (auto li = kb.level_index(rr.level)) {
      r.level_index = *li;
      r.consequent_lower = kb.trust_levels[*li].lower;
      r.consequent_upper = kb.trust_levels[*li].upper;
    } else {
      error(rr.line, rr.label, "unknown trust level '" + rr.level + "'");
    }
    if (rr.range) {
      r.explicit_consequent_range = true;
      r.consequent_lower = rr.range->first;
      r.consequent_upper = rr.range->second;
      auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
      if (!in01(r.consequent_lower) || !in01(r.consequent_upper))
        error(rr.line, rr.label, "consequent range outside [0, 1]");
    }
    kb.rules.push_back(std::move(r));
  }

  for (const auto &rc : p.contradictions) {
    if (!labels.insert(rc.label).second) {
      error(rc.line, rc.label, "duplicate label '" + rc.label + "'");
      continue;
    }
    Contradiction c;
    c.label = rc.label;
    c.form = rc.form;
    kb.contradictions.push_back(std::move(c));
  }
  {
    std::set<std::string> seen_groups;
    for (const auto &g : p.groups)
      if (!seen_groups.insert(g.name).second) error(g.line, g.name, "duplicate group '" + g.name + "'");
      else kb.groups[g.name] = g.members;
  }
  for (const auto &g : p.groups)
    for (const auto &m : g.members)
      if (!kb.contradiction_index(m)) error(g.line, g.name, "group member '" + m + "' is not a contradiction");

  std::size_t ci = 0;
  std::set<std::string> dup_guard;
  for (const auto &rc : p.contradictions) {
    if (!dup_guard.insert(rc.label).second || kb.rule_index(rc.label)) continue;
    Contradiction &c = kb.contradictions[ci++];
    if (rc.rule_ref) {
      if (auto ri = kb.rule_index(*rc.rule_ref)) c.antecedent = RuleRef{*rc.rule_ref, *ri};
      else error(rc.line, rc.label, "unknown rule '" + *rc.rule_ref + "'");
    } else {
      Dnf dnf;
      resolve_dnf(rc.premises, rc.label, dnf);
      c.antecedent = std::move(dnf);
    }
    if (rc.target_kind == "rule") {
      if (auto ri = kb.rule_index(rc.target)) c.targets.push_back({rc.target, TargetKind::rule, *ri});
      else error(rc.line, rc.label, "unknown rule '" + rc.target + "'");
    } else if (rc.target_kind == "contradiction") {
      if (auto xi = kb.contradiction_index(rc.target))
        c.targets.push_back({rc.target, TargetKind::contradiction, *xi});
      else error(rc.line, rc.label, "unknown contradiction '" + rc.target + "'");
    } else if (rc.target_kind == "group") {
      auto it = kb.groups.find(rc.target);
      if (it == kb.groups.end()) {
        error(rc.line, rc.label, "unknown group '" + rc.target + "'");
      } else {
        c.via_group = rc.target;
        for (const auto &m : it->second)
          if (auto xi = kb.contradiction_index(m)) c.targets.push_back({m, TargetKind::contradiction, *xi});
      }
    } else {
      c.targets.push_back({rc.target, TargetKind::unresolved, 0});
      diags.push_back({Severity::warning, rc.line, rc.label,
                       "target '" + rc.target + "' is unresolved; the contradiction has no effect"});
    }
  }

  finish();
  if (result.count(Severity::error) == 0) result.kb = std::move(kb);
  return result;
}

/// Parse or throw Error carrying the first error diagnostic.
inline KnowledgeBase parse_kb_or_throw(std::string_view source) {
  auto r = parse_kb(source);
  if (!r.ok()) {
    for (const auto &d : r.diagnostics)
      if (d.severity == Severity::error) throw Error(d.str());
  }
  return std::move(*r.kb);
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline std::string num(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

inline std::string shape_text(const MembershipFn &f) {
  return std::visit(
      [](const auto &s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Triangular>)
          return "triangular(" + num(s.a) + ", " + num(s.b) + ", " + num(s.c) + ")";
        else if constexpr (std::is_same_v<T, Trapezoidal>)
          return "trapezoidal(" + num(s.a) + ", " + num(s.b) + ", " + num(s.c) + ", " + num(s.d) + ")";
        else if constexpr (std::is_same_v<T, Gaussian>)
          return "gaussian(" + num(s.mu) + ", " + num(s.sigma) + ")";
        else
          return "crisp(" + num(s.lower) + ", " + num(s.upper) + ")";
      },
      f.shape());
}

inline std::string fmf_text(const MembershipFn &f, const std::optional<MembershipFn> &g) {
  std::string s = " fmf " + shape_text(f);
  if (g) s += " | " + shape_text(*g);
  return s;
}

inline std::string dnf_text(const Dnf &dnf) {
  std::string s;
  for (std::size_t i = 0; i < dnf.size(); ++i) {
    if (i) s += " OR ";
    for (std::size_t j = 0; j < dnf[i].size(); ++j) {
      if (j) s += " AND ";
      s += dnf[i][j].feature + " is " + dnf[i][j].term;
    }
  }
  return s;
}

} // namespace detail

/// Text form accepted by parse_kb; parse_kb(serialize_kb(kb)) reproduces kb.
inline std::string serialize_kb(const KnowledgeBase &kb) {
  using detail::num;
  std::string out;
  if (!kb.id.empty()) out += "knowledgebase " + kb.id + "\n\n";
  for (const auto &f : kb.features) {
    out += "feature " + f.name + " weight " + std::to_string(f.weight) + " domain [" + num(f.domain_min) + ", " +
           num(f.domain_max) + "] {\n";
    for (const auto &t : f.terms)
      out += "  term " + t.label + " = [" + num(t.lower) + ", " + (t.unbounded ? "inf" : num(t.upper)) + "]" +
             detail::fmf_text(t.fmf, t.gaussian_fmf) + "\n";
    out += "}\n";
  }
  for (const auto &l : kb.trust_levels)
    out += "trustlevel " + l.label + " = [" + num(l.lower) + ", " + num(l.upper) + "]" +
           detail::fmf_text(l.fmf, l.gaussian_fmf) + "\n";
  for (const auto &r : kb.rules) {
    out += "rule " + r.label + ": IF " + detail::dnf_text(r.antecedent) + " THEN trust is " + r.consequent_level;
    if (r.explicit_consequent_range) out += " [" + num(r.consequent_lower) + ", " + num(r.consequent_upper) + "]";
    out += "\n";
  }
  std::vector<bool> done(kb.contradictions.size(), false);
  for (std::size_t i = 0; i < kb.contradictions.size(); ++i) {
    if (done[i]) continue;
    const auto &c = kb.contradictions[i];
    if (c.form != ContradictionForm::statement && c.rule_ref() && c.targets.size() == 1 &&
        c.label == c.rule_ref()->label + "_vs_" + c.targets[0].label) {
      const std::string &a = c.rule_ref()->label, &b = c.targets[0].label;
      if (c.form == ContradictionForm::mutual_conflict) {
        out += "conflict " + a + " <-> " + b + "\n";
        if (i + 1 < kb.contradictions.size() && kb.contradictions[i + 1].label == b + "_vs_" + a) done[i + 1] = true;
      } else {
        out += "conflict " + a + " -> " + b + "\n";
      }
      continue;
    }
    out += "contradiction " + c.label + ": IF ";
    out += c.rule_ref() ? "rule " + c.rule_ref()->label : detail::dnf_text(*c.premises());
    out += " THEN NOT ";
    if (!c.via_group.empty()) {
      out += "group " + c.via_group;
    } else if (!c.targets.empty()) {
      const auto &t = c.targets[0];
      out += t.kind == TargetKind::rule ? "rule " : t.kind == TargetKind::contradiction ? "contradiction " : "unresolved ";
      out += t.label;
    }
    out += "\n";
  }
  for (const auto &[name, members] : kb.groups) {
    out += "group " + name + " = {";
    for (std::size_t i = 0; i < members.size(); ++i) out += (i ? ", " : "") + members[i];
    out += "}\n";
  }
  return out;
}

} // namespace nonmono

#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nonmono/error.hpp"
#include "nonmono/features.hpp"

namespace nonmono::csv {

/// Shortest round-trip decimal form.
inline std::string number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

inline std::string fixed4(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 4);
  return std::string(buf, ptr);
}

inline std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Reads one record, honouring quoted fields that span lines. Returns false at
/// end of input. `line` is advanced past every physical line consumed.
inline bool read_record(std::istream &in, std::vector<std::string> &fields, std::size_t &line) {
  fields.clear();
  std::string row;
  if (!std::getline(in, row)) return false;
  ++line;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0;; ++i) {
    if (i == row.size()) {
      if (!quoted) break;
      std::string more;
      if (!std::getline(in, more)) throw Error("line " + std::to_string(line) + ": unterminated quoted field");
      ++line;
      field += '\n';
      row = std::move(more);
      i = static_cast<std::size_t>(-1);
      continue;
    }
    const char c = row[i];
    if (quoted) {
      if (c == '"' && i + 1 < row.size() && row[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r' || i + 1 != row.size()) {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return true;
}

inline constexpr std::string_view features_header =
    "editor_id,anonymous,pages,activity,not_minor,comments,presence,frequency,regularity,bytes";

inline void write_features(std::ostream &out, const std::vector<EditorFeatures> &rows) {
  out << features_header << '\n';
  for (const auto &e : rows) {
    out << quote(e.editor_id);
    for (auto name : feature_names) out << ',' << number(*feature_value(e, name));
    out << '\n';
  }
}

namespace detail {

inline double parse_number(const std::string &s, std::size_t line, std::string_view column) {
  double v = 0;
  const char *b = s.data(), *e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e || b == e)
    throw Error("line " + std::to_string(line) + ": column '" + std::string(column) + "' is not a number: '" + s + "'");
  return v;
}

} // namespace detail

inline std::vector<EditorFeatures> read_features(std::istream &in) {
  std::vector<std::string> f;
  std::size_t line = 0;
  if (!read_record(in, f, line)) throw Error("features file is empty");
  std::string header;
  for (std::size_t i = 0; i < f.size(); ++i) header += (i ? "," : "") + f[i];
  if (!header.empty() && header.front() == '\xEF') header.erase(0, 3); // UTF-8 BOM
  if (header != features_header) throw Error("features file header must be '" + std::string(features_header) + "'");
  std::vector<EditorFeatures> rows;
  std::set<std::string> seen;
  while (read_record(in, f, line)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 10)
      throw Error("line " + std::to_string(line) + ": expected 10 fields, found " + std::to_string(f.size()));
    EditorFeatures e;
    e.editor_id = f[0];
    if (e.editor_id.empty()) throw Error("line " + std::to_string(line) + ": empty editor_id");
    if (!seen.insert(e.editor_id).second)
      throw Error("line " + std::to_string(line) + ": duplicate editor_id '" + e.editor_id + "'");
    for (std::size_t k = 0; k < feature_names.size(); ++k)
      feature_ref(e, feature_names[k]) = detail::parse_number(f[k + 1], line, feature_names[k]);
    if (e.anonymous != 0.0 && e.anonymous != 1.0)
      throw Error("line " + std::to_string(line) + ": anonymous must be 0 or 1");
    for (auto name : {"not_minor", "comments", "presence", "frequency", "regularity"}) {
      const double v = *feature_value(e, name);
      if (!(v >= 0.0 && v <= 1.0))
        throw Error("line " + std::to_string(line) + ": " + name + " must lie in [0, 1]");
    }
    rows.push_back(std::move(e));
  }
  return rows;
}

/// One editor id per line; blank lines and surrounding whitespace ignored.
inline std::set<std::string> read_barnstars(std::istream &in) {
  std::set<std::string> out;
  for (std::string line; std::getline(in, line);) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.insert(line.substr(b, e - b + 1));
  }
  return out;
}

/// `editor_id,model_id,trust`; NA is an empty trust field.
inline void write_trust(std::ostream &out, const std::vector<EditorFeatures> &editors, std::string_view model,
                        const std::vector<std::optional<double>> &trust) {
  out << "editor_id,model_id,trust\n";
  for (std::size_t i = 0; i < editors.size(); ++i) {
    out << quote(editors[i].editor_id) << ',' << model << ',';
    if (trust[i]) out << number(*trust[i]);
    out << '\n';
  }
}

struct TrustRow {
  std::string editor_id, model_id;
  std::optional<double> trust;
};

inline std::vector<TrustRow> read_trust(std::istream &in) {
  std::vector<std::string> f;
  std::size_t line = 0;
  if (!read_record(in, f, line) || f != std::vector<std::string>{"editor_id", "model_id", "trust"})
    throw Error("trust file header must be 'editor_id,model_id,trust'");
  std::vector<TrustRow> rows;
  while (read_record(in, f, line)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 3) throw Error("line " + std::to_string(line) + ": expected 3 fields");
    TrustRow r{f[0], f[1], std::nullopt};
    if (!f[2].empty()) r.trust = detail::parse_number(f[2], line, "trust");
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Rows of a results file; empty metric fields are NA.
struct ResultRow {
  std::string model_id, dataset;
  std::optional<double> rank, spread;
  double na_pct = 0;
};

inline std::vector<ResultRow> read_results(std::istream &in) {
  std::vector<std::string> f;
  std::size_t line = 0;
  if (!read_record(in, f, line) || f != std::vector<std::string>{"model_id", "dataset", "rank", "spread", "na_pct"})
    throw Error("results file header must be 'model_id,dataset,rank,spread,na_pct'");
  std::vector<ResultRow> rows;
  auto opt = [&](const std::string &s, const char *col) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return detail::parse_number(s, line, col);
  };
  while (read_record(in, f, line)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 5) throw Error("line " + std::to_string(line) + ": expected 5 fields");
    rows.push_back({f[0], f[1], opt(f[2], "rank"), opt(f[3], "spread"), detail::parse_number(f[4], line, "na_pct")});
  }
  return rows;
}

} // namespace nonmono::csv

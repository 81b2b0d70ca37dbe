#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <expat.h>

#include "nonmono/error.hpp"
#include "nonmono/features.hpp"

namespace nonmono {

/// Seconds since the Unix epoch, UTC.
using Instant = std::int64_t;

inline constexpr Instant seconds_per_day = 86'400;

namespace detail {

inline bool digits(std::string_view s, std::size_t pos, std::size_t n, int &out) {
  if (pos + n > s.size()) return false;
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + n, out);
  return ec == std::errc{} && p == s.data() + pos + n;
}

} // namespace detail

/// Parses `YYYY-MM-DD`, `YYYY-MM-DDThh:mm:ss[.fff](Z|±hh:mm)`. A date alone
/// means midnight UTC; a missing zone means UTC.
inline std::optional<Instant> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!detail::digits(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || !detail::digits(s, 5, 2, mo) || s[7] != '-' ||
      !detail::digits(s, 8, 2, d))
    return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  std::size_t pos = 10;
  Instant offset = 0;
  if (pos < s.size()) {
    if ((s[pos] != 'T' && s[pos] != ' ') || !detail::digits(s, pos + 1, 2, h) || s.size() < pos + 9 ||
        s[pos + 3] != ':' || !detail::digits(s, pos + 4, 2, mi) || s[pos + 6] != ':' ||
        !detail::digits(s, pos + 7, 2, sec))
      return std::nullopt;
    if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
    pos += 9;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      const std::size_t start = pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
      if (pos == start) return std::nullopt;
    }
    if (pos < s.size()) {
      if (s[pos] == 'Z' && pos + 1 == s.size()) {
        ++pos;
      } else if ((s[pos] == '+' || s[pos] == '-') && pos + 6 == s.size() && s[pos + 3] == ':') {
        int oh = 0, om = 0;
        if (!detail::digits(s, pos + 1, 2, oh) || !detail::digits(s, pos + 4, 2, om)) return std::nullopt;
        offset = (s[pos] == '+' ? 1 : -1) * (oh * 3600 + om * 60);
        pos = s.size();
      } else {
        return std::nullopt;
      }
    }
  }
  const Instant days = sys_days{ymd}.time_since_epoch().count();
  return days * seconds_per_day + h * 3600 + mi * 60 + sec - offset;
}

inline Instant parse_iso8601_or_throw(std::string_view s) {
  if (auto t = parse_iso8601(s)) return *t;
  throw Error("invalid ISO-8601 instant '" + std::string(s) + "'");
}

/// Wiki start instant used for presence unless overridden.
inline const Instant default_wiki_start = *parse_iso8601("2001-01-15T00:00:00Z");

struct RevisionRecord {
  std::string page_id;
  std::string revision_id;
  Instant timestamp = 0;
  std::string contributor; // username, or IP address when anonymous
  bool anonymous = false;
  bool comment_present = false;
  bool minor_flag = false;
  std::int64_t page_bytes = 0;
};

struct StreamStats {
  std::size_t records = 0;
  std::size_t skipped_no_timestamp = 0;
  std::size_t skipped_no_contributor = 0;
  std::size_t missing_bytes = 0;
};

namespace detail {

class DumpReader {
public:
  explicit DumpReader(std::function<void(const RevisionRecord &)> sink) : sink_(std::move(sink)) {
    parser_ = XML_ParserCreate("UTF-8");
    if (!parser_) throw Error("cannot create XML parser");
    XML_SetUserData(parser_, this);
    XML_SetElementHandler(parser_, &DumpReader::on_start, &DumpReader::on_end);
    XML_SetCharacterDataHandler(parser_, &DumpReader::on_text);
  }
  DumpReader(const DumpReader &) = delete;
  DumpReader &operator=(const DumpReader &) = delete;
  ~DumpReader() { XML_ParserFree(parser_); }

  StreamStats run(std::istream &in) {
    std::vector<char> buf(1 << 16);
    for (;;) {
      in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      const auto n = static_cast<int>(in.gcount());
      const bool last = n == 0 || !in;
      const auto status = XML_Parse(parser_, buf.data(), n, last);
      if (pending_) std::rethrow_exception(pending_);
      if (status == XML_STATUS_ERROR) fail();
      if (last) break;
    }
    return stats_;
  }

private:
  [[noreturn]] void fail() {
    throw Error(std::string("malformed XML at byte offset ") + std::to_string(XML_GetCurrentByteIndex(parser_)) +
                " (line " + std::to_string(XML_GetCurrentLineNumber(parser_)) +
                "): " + XML_ErrorString(XML_GetErrorCode(parser_)));
  }

  static std::string_view local_name(const XML_Char *name) {
    std::string_view n(name);
    const auto colon = n.rfind(':');
    return colon == std::string_view::npos ? n : n.substr(colon + 1);
  }

  // Exceptions must not unwind through expat; park them and stop the parser.
  template <class F> void guarded(F &&f) {
    if (pending_) return;
    try {
      f();
    } catch (...) {
      pending_ = std::current_exception();
      XML_StopParser(parser_, XML_FALSE);
    }
  }

  static void on_start(void *self, const XML_Char *name, const XML_Char **attrs) {
    auto *r = static_cast<DumpReader *>(self);
    r->guarded([&] { r->start(local_name(name), attrs); });
  }
  static void on_end(void *self, const XML_Char *name) {
    auto *r = static_cast<DumpReader *>(self);
    r->guarded([&] { r->end(local_name(name)); });
  }
  static void on_text(void *self, const XML_Char *s, int len) {
    static_cast<DumpReader *>(self)->text_.append(s, static_cast<std::size_t>(len));
  }

  void start(std::string_view name, const XML_Char **attrs) {
    path_.emplace_back(name);
    text_.clear();
    if (name == "revision" && parent_is("page")) {
      in_revision_ = true;
      rev_ = {};
      rev_.page_id = page_id_;
      have_timestamp_ = have_contributor_ = have_bytes_ = false;
    } else if (in_revision_ && name == "minor") {
      rev_.minor_flag = true;
    } else if (in_revision_ && name == "text") {
      for (const XML_Char **a = attrs; *a; a += 2)
        if (std::string_view(a[0]) == "bytes") {
          std::string_view v(a[1]);
          std::int64_t b = 0;
          auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), b);
          if (ec == std::errc{} && p == v.data() + v.size() && b >= 0) {
            rev_.page_bytes = b;
            have_bytes_ = true;
          }
        }
    }
  }

  void end(std::string_view name) {
    const std::string value = std::move(text_);
    text_.clear();
    if (name == "id" && parent_is("page")) {
      page_id_ = trim(value);
    } else if (name == "page") {
      page_id_.clear();
    } else if (in_revision_) {
      if (name == "revision") {
        in_revision_ = false;
        finish_revision();
      } else if (name == "id" && parent_is("revision")) {
        rev_.revision_id = trim(value);
      } else if (name == "timestamp" && parent_is("revision")) {
        if (auto t = parse_iso8601(trim(value))) {
          rev_.timestamp = *t;
          have_timestamp_ = true;
        }
      } else if (name == "comment" && parent_is("revision")) {
        rev_.comment_present = !trim(value).empty();
      } else if (name == "username" && parent_is("contributor")) {
        rev_.contributor = trim(value);
        rev_.anonymous = false;
        have_contributor_ = !rev_.contributor.empty();
      } else if (name == "ip" && parent_is("contributor")) {
        rev_.contributor = trim(value);
        rev_.anonymous = true;
        have_contributor_ = !rev_.contributor.empty();
      }
    }
    path_.pop_back();
  }

  void finish_revision() {
    if (!have_timestamp_) {
      ++stats_.skipped_no_timestamp;
      warn("revision " + rev_.revision_id + " on page " + rev_.page_id + " has no timestamp; skipped");
      return;
    }
    if (!have_contributor_) {
      ++stats_.skipped_no_contributor;
      return;
    }
    if (!have_bytes_) ++stats_.missing_bytes;
    ++stats_.records;
    sink_(rev_);
  }

  bool parent_is(std::string_view name) const { return path_.size() >= 2 && path_[path_.size() - 2] == name; }

  static std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
  }

  XML_Parser parser_ = nullptr;
  std::function<void(const RevisionRecord &)> sink_;
  std::vector<std::string> path_;
  std::string text_, page_id_;
  bool in_revision_ = false;
  bool have_timestamp_ = false, have_contributor_ = false, have_bytes_ = false;
  RevisionRecord rev_;
  StreamStats stats_;
  std::exception_ptr pending_;
};

} // namespace detail

/// Streams every `<revision>` of a stub-meta-history dump to `sink`, in
/// document order. Memory use does not grow with the dump.
inline StreamStats stream_revisions(std::istream &dump, const std::function<void(const RevisionRecord &)> &sink) {
  return detail::DumpReader(sink).run(dump);
}

inline std::vector<RevisionRecord> read_revisions(std::istream &dump) {
  std::vector<RevisionRecord> out;
  stream_revisions(dump, [&](const RevisionRecord &r) { out.push_back(r); });
  return out;
}

struct EditorAccumulator {
  std::string editor_id;
  bool anonymous = false;
  std::int64_t pages_touched = 0; // distinct pages; a page's revisions are contiguous
  std::string last_page;
  std::int64_t edit_count = 0;
  std::int64_t not_minor_count = 0;
  std::int64_t comment_count = 0;
  Instant first_edit = 0, last_edit = 0;
  std::set<std::int64_t> active_windows;
  std::int64_t net_bytes = 0;
};

using AccumulatorMap = std::map<std::string, EditorAccumulator>;

/// Window indices are relative to each editor's first edit, which is only known
/// once every record has been seen, so the records are replayed twice.
/// `replay(cb)` must deliver the same records in the same order on each call.
template <class Replay>
AccumulatorMap accumulate_replay(Replay &&replay, Instant dump_instant, int window_days = 30) {
  if (window_days <= 0) throw Error("window length must be positive");
  const Instant window = static_cast<Instant>(window_days) * seconds_per_day;
  AccumulatorMap acc;
  replay([&](const RevisionRecord &r) {
    if (r.timestamp > dump_instant)
      throw Error("revision " + r.revision_id + " is later than the dump date");
    auto [it, fresh] = acc.try_emplace(r.contributor);
    auto &a = it->second;
    if (fresh) {
      a.editor_id = r.contributor;
      a.anonymous = r.anonymous;
      a.first_edit = a.last_edit = r.timestamp;
    }
    a.first_edit = std::min(a.first_edit, r.timestamp);
    a.last_edit = std::max(a.last_edit, r.timestamp);
  });
  // Revisions of one page are contiguous (nested in its <page> element).
  std::string page;
  std::int64_t previous_bytes = 0;
  bool page_seen = false;
  replay([&](const RevisionRecord &r) {
    auto &a = acc.at(r.contributor);
    if (!page_seen || r.page_id != page) {
      page = r.page_id;
      previous_bytes = 0;
      page_seen = true;
    }
    a.net_bytes += r.page_bytes - previous_bytes;
    previous_bytes = r.page_bytes;
    if (a.edit_count == 0 || a.last_page != r.page_id) {
      ++a.pages_touched;
      a.last_page = r.page_id;
    }
    ++a.edit_count;
    a.not_minor_count += !r.minor_flag;
    a.comment_count += r.comment_present;
    a.active_windows.insert((r.timestamp - a.first_edit) / window);
  });
  return acc;
}

inline AccumulatorMap accumulate(const std::vector<RevisionRecord> &records, Instant dump_instant,
                                 int window_days = 30) {
  return accumulate_replay(
      [&](auto &&cb) {
        for (const auto &r : records) cb(r);
      },
      dump_instant, window_days);
}

inline EditorFeatures finalize(const EditorAccumulator &acc, Instant dump_instant,
                               Instant wiki_start_instant = default_wiki_start, int window_days = 30) {
  if (dump_instant <= wiki_start_instant) throw Error("dump date must be after the wiki start date");
  if (acc.edit_count < 1) throw Error("editor " + acc.editor_id + " has no revisions");
  const Instant window = static_cast<Instant>(window_days) * seconds_per_day;
  EditorFeatures f;
  f.editor_id = acc.editor_id;
  f.anonymous = acc.anonymous ? 1.0 : 0.0;
  f.pages = static_cast<double>(acc.pages_touched);
  f.activity = static_cast<double>(acc.edit_count);
  f.not_minor = static_cast<double>(acc.not_minor_count) / f.activity;
  f.comments = static_cast<double>(acc.comment_count) / f.activity;
  f.presence = std::clamp(static_cast<double>(dump_instant - acc.first_edit) /
                              static_cast<double>(dump_instant - wiki_start_instant),
                          0.0, 1.0);
  const double lifecycle = static_cast<double>((acc.last_edit - acc.first_edit) / window + 1);
  f.frequency = std::min(1.0, f.activity / lifecycle);
  f.regularity = std::min(1.0, static_cast<double>(acc.active_windows.size()) / lifecycle);
  f.bytes = static_cast<double>(acc.net_bytes);
  return f;
}

struct ExtractOptions {
  Instant dump_instant = 0;
  Instant wiki_start = default_wiki_start;
  int window_days = 30;
};

/// Features for every editor of a dump, ordered by editor id. `open()` must
/// return a fresh stream positioned at the start of the dump on each call.
template <class Open>
std::vector<EditorFeatures> extract_features(Open &&open, const ExtractOptions &opt, StreamStats *stats = nullptr) {
  bool first_pass = true;
  auto acc = accumulate_replay(
      [&](auto &&cb) {
        auto in = open();
        auto s = stream_revisions(*in, cb);
        if (first_pass && stats) *stats = s;
        first_pass = false;
      },
      opt.dump_instant, opt.window_days);
  std::vector<EditorFeatures> out;
  out.reserve(acc.size());
  for (const auto &[id, a] : acc) out.push_back(finalize(a, opt.dump_instant, opt.wiki_start, opt.window_days));
  return out;
}

} // namespace nonmono

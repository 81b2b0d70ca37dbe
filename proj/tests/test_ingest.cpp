#include <gtest/gtest.h>

#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "nonmono/csv.hpp"
#include "nonmono/wiki_ingest.hpp"

using namespace nonmono;

namespace {

const std::string fixture = std::string(NONMONO_FIXTURES) + "/three_pages.xml";

Instant at(const char *s) { return parse_iso8601_or_throw(s); }

std::vector<RevisionRecord> fixture_records() {
  std::ifstream in(fixture);
  return read_revisions(in);
}

RevisionRecord rec(std::string page, std::string editor, const char *when, std::int64_t bytes, bool minor = false,
                   bool comment = false) {
  RevisionRecord r;
  r.page_id = std::move(page);
  r.contributor = std::move(editor);
  r.timestamp = at(when);
  r.page_bytes = bytes;
  r.minor_flag = minor;
  r.comment_present = comment;
  return r;
}

} // namespace

TEST(Iso8601, Forms) {
  EXPECT_EQ(at("1970-01-01T00:00:00Z"), 0);
  EXPECT_EQ(at("1970-01-02"), 86400);
  EXPECT_EQ(at("2001-01-15T00:00:00Z"), 979516800);
  EXPECT_EQ(at("2010-03-01T12:00:00+02:00"), at("2010-03-01T10:00:00Z"));
  EXPECT_EQ(at("2010-03-01T12:00:00.250Z"), at("2010-03-01T12:00:00Z"));
  EXPECT_EQ(at("2012-02-29T00:00:00Z") + 86400, at("2012-03-01T00:00:00Z"));
  for (const char *bad : {"", "2010-13-01", "2010-02-30", "2010-01-01T25:00:00Z", "20100101", "2010-01-01T00:00Z",
                          "2010-01-01T00:00:00X"})
    EXPECT_FALSE(parse_iso8601(bad).has_value()) << bad;
  EXPECT_THROW(parse_iso8601_or_throw("soon"), Error);
}

TEST(StreamRevisions, FixtureRecordsInDocumentOrder) {
  const auto r = fixture_records();
  ASSERT_EQ(r.size(), 7u);
  std::vector<std::string> ids;
  for (const auto &x : r) ids.push_back(x.revision_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"101", "102", "103", "201", "202", "301", "302"}));
  EXPECT_EQ(r[0].page_id, "10");
  EXPECT_EQ(r[3].page_id, "20");
  EXPECT_EQ(r[6].page_id, "30");
  EXPECT_EQ(r[1].contributor, "192.0.2.7");
  EXPECT_TRUE(r[1].anonymous);
  EXPECT_FALSE(r[0].anonymous);
  EXPECT_TRUE(r[1].minor_flag);
  EXPECT_FALSE(r[0].minor_flag);
  EXPECT_TRUE(r[0].comment_present);
  EXPECT_FALSE(r[1].comment_present);
  EXPECT_FALSE(r[4].comment_present); // deleted comment
  EXPECT_EQ(r[2].page_bytes, 400);
  EXPECT_EQ(r[3].timestamp, at("2010-03-01T12:00:00Z"));
}

TEST(StreamRevisions, MalformedXmlReportsByteOffset) {
  std::istringstream in("<mediawiki><page><id>1</id></pag></mediawiki>");
  try {
    read_revisions(in);
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("byte offset 29"), std::string::npos) << e.what();
  }
}

TEST(StreamRevisions, MissingTimestampIsSkippedAndCounted) {
  std::istringstream in(R"(<mediawiki><page><id>1</id>
    <revision><id>5</id><contributor><username>A</username></contributor><text bytes="3"/></revision>
    <revision><id>6</id><timestamp>2010-01-01T00:00:00Z</timestamp><contributor><username>A</username></contributor><text bytes="4"/></revision>
    </page></mediawiki>)");
  int warnings = 0;
  set_warning_handler([&](std::string_view) { ++warnings; });
  std::vector<RevisionRecord> got;
  const auto stats = stream_revisions(in, [&](const RevisionRecord &r) { got.push_back(r); });
  set_warning_handler({});
  EXPECT_EQ(warnings, 1);
  EXPECT_EQ(stats.skipped_no_timestamp, 1u);
  EXPECT_EQ(stats.records, 1u);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].revision_id, "6");
}

TEST(StreamRevisions, SinkExceptionPropagates) {
  std::ifstream in(fixture);
  EXPECT_THROW(stream_revisions(in, [](const RevisionRecord &) { throw Error("stop"); }), Error);
}

TEST(Accumulate, FixtureEditors) {
  const auto acc = accumulate(fixture_records(), at("2011-01-01T00:00:00Z"));
  ASSERT_EQ(acc.size(), 3u);
  const auto &alice = acc.at("Alice");
  EXPECT_EQ(alice.pages_touched, 3);
  EXPECT_EQ(alice.edit_count, 4);
  EXPECT_EQ(alice.not_minor_count, 3);
  EXPECT_EQ(alice.comment_count, 3);
  EXPECT_EQ(alice.net_bytes, 100 + 250 - 20 + 200);
  EXPECT_EQ(alice.active_windows, (std::set<std::int64_t>{0, 1, 2, 5}));
  const auto &bob = acc.at("Bob");
  EXPECT_EQ(bob.net_bytes, 1050);
  EXPECT_EQ(bob.active_windows, (std::set<std::int64_t>{0, 1}));
  const auto &ip = acc.at("192.0.2.7");
  EXPECT_TRUE(ip.anonymous);
  EXPECT_EQ(ip.net_bytes, 50);
}

TEST(Accumulate, NetBytesConserveFinalPageSizes) {
  std::int64_t total = 0;
  for (const auto &[id, a] : accumulate(fixture_records(), at("2011-01-01"))) total += a.net_bytes;
  EXPECT_EQ(total, 400 + 30 + 1200);
}

TEST(Accumulate, Examples) {
  const Instant dump = at("2012-01-01");
  auto one = accumulate({rec("p", "e", "2011-01-01", 100)}, dump);
  EXPECT_EQ(one.at("e").net_bytes, 100);
  auto two = accumulate({rec("p", "e", "2011-01-01", 10), rec("q", "e", "2011-02-10", 10)}, dump);
  EXPECT_EQ(two.at("e").active_windows, (std::set<std::int64_t>{0, 1}));
  EXPECT_TRUE(accumulate({}, dump).empty());
  EXPECT_THROW(accumulate({rec("p", "e", "2013-01-01", 1)}, dump), Error);
}

TEST(Accumulate, WindowIndicesUseTheEarliestEditWhateverTheOrder) {
  // The later page is listed first; windows are still relative to the first edit.
  auto acc = accumulate({rec("q", "e", "2011-03-15", 5), rec("p", "e", "2011-01-01", 5)}, at("2012-01-01"));
  EXPECT_EQ(acc.at("e").active_windows, (std::set<std::int64_t>{0, 2}));
}

TEST(Finalize, FixtureFeatures) {
  const Instant dump = at("2011-01-01T00:00:00Z");
  const auto acc = accumulate(fixture_records(), dump);
  const double span = 3638.0 * 86400;
  const auto alice = finalize(acc.at("Alice"), dump);
  EXPECT_EQ(alice.anonymous, 0.0);
  EXPECT_EQ(alice.pages, 3.0);
  EXPECT_EQ(alice.activity, 4.0);
  EXPECT_EQ(alice.not_minor, 0.75);
  EXPECT_EQ(alice.comments, 0.75);
  EXPECT_DOUBLE_EQ(alice.presence, 365.0 * 86400 / span);
  EXPECT_DOUBLE_EQ(alice.frequency, 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(alice.regularity, 4.0 / 6.0);
  EXPECT_EQ(alice.bytes, 530.0);

  const auto bob = finalize(acc.at("Bob"), dump);
  EXPECT_EQ(bob.not_minor, 0.5);
  EXPECT_EQ(bob.comments, 1.0);
  EXPECT_EQ(bob.frequency, 1.0);
  EXPECT_EQ(bob.regularity, 1.0);
  EXPECT_DOUBLE_EQ(bob.presence, 305.5 * 86400 / span);

  const auto ip = finalize(acc.at("192.0.2.7"), dump);
  EXPECT_EQ(ip.anonymous, 1.0);
  EXPECT_EQ(ip.not_minor, 0.0);
  EXPECT_EQ(ip.frequency, 1.0);
  EXPECT_EQ(ip.regularity, 1.0);
}

TEST(Finalize, Examples) {
  const Instant start = at("2001-01-15");
  const Instant dump = at("2012-01-01");
  auto acc = accumulate({rec("p", "e", "2001-01-15", 10), rec("q", "e", "2005-01-01", 10)}, dump).at("e");
  const auto f = finalize(acc, dump, start);
  EXPECT_EQ(f.not_minor, 1.0);
  EXPECT_EQ(f.presence, 1.0);
  const auto single = finalize(accumulate({rec("p", "s", "2011-06-01", 1, true)}, dump).at("s"), dump, start);
  EXPECT_EQ(single.frequency, 1.0);
  EXPECT_EQ(single.regularity, 1.0);
  EXPECT_EQ(single.not_minor, 0.0);
  EXPECT_THROW(finalize(acc, start, start), Error);
  EXPECT_THROW(finalize(EditorAccumulator{}, dump, start), Error);
}

TEST(Finalize, FeatureInvariantsOnRandomRecords) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> day(0, 3000), editor(0, 20), page(0, 30), bytes(0, 5000), coin(0, 1);
  const Instant base = at("2003-01-01"), dump = at("2012-01-01");
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RevisionRecord> recs;
    std::map<int, std::vector<RevisionRecord>> by_page;
    for (int i = 0; i < 200; ++i) {
      RevisionRecord r;
      const int p = page(rng);
      r.page_id = "p" + std::to_string(p);
      r.contributor = "e" + std::to_string(editor(rng));
      r.timestamp = base + static_cast<Instant>(day(rng)) * seconds_per_day;
      r.page_bytes = bytes(rng);
      r.minor_flag = coin(rng);
      r.comment_present = coin(rng);
      by_page[p].push_back(r);
    }
    std::int64_t final_total = 0;
    for (auto &[p, v] : by_page) {
      recs.insert(recs.end(), v.begin(), v.end());
      final_total += v.back().page_bytes;
    }
    std::int64_t net = 0;
    for (const auto &[id, a] : accumulate(recs, dump)) {
      EXPECT_GE(a.edit_count, a.pages_touched);
      EXPECT_GE(a.pages_touched, 1);
      net += a.net_bytes;
      const auto f = finalize(a, dump);
      for (double v : {f.not_minor, f.comments, f.presence, f.frequency, f.regularity}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
    EXPECT_EQ(net, final_total);
  }
}

TEST(ExtractFeatures, RerunIsByteIdentical) {
  ExtractOptions opt;
  opt.dump_instant = at("2011-01-01");
  auto open = [] { return std::make_unique<std::ifstream>(fixture); };
  std::ostringstream a, b;
  csv::write_features(a, extract_features(open, opt));
  csv::write_features(b, extract_features(open, opt));
  EXPECT_EQ(a.str(), b.str());
  const std::string text = a.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), csv::features_header);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(ExtractFeatures, MemoryDoesNotGrowWithDumpSize) {
  // A generated dump streamed from memory in chunks; only per-editor state is kept.
  struct Generator : std::streambuf {
    explicit Generator(int pages) : pages_(pages) { refill(); }
    int underflow() override {
      if (gptr() == egptr() && !refill()) return traits_type::eof();
      return traits_type::to_int_type(*gptr());
    }
    bool refill() {
      if (page_ > pages_) return false;
      buf_.clear();
      if (page_ == 0) buf_ = "<mediawiki>";
      if (page_ < pages_) {
        buf_ += "<page><id>" + std::to_string(page_) + "</id>";
        for (int r = 0; r < 5; ++r)
          buf_ += "<revision><id>" + std::to_string(page_ * 5 + r) + "</id><timestamp>2010-0" +
                  std::to_string(1 + r) + "-01T00:00:00Z</timestamp><contributor><username>u" +
                  std::to_string((page_ + r) % 7) + "</username></contributor><text bytes=\"" +
                  std::to_string(100 * r) + "\"/></revision>";
        buf_ += "</page>";
      } else {
        buf_ += "</mediawiki>";
      }
      ++page_;
      setg(buf_.data(), buf_.data(), buf_.data() + buf_.size());
      return true;
    }
    int pages_, page_ = 0;
    std::string buf_;
  };
  // Per-editor state is the same size for a small and a 200x larger dump.
  std::vector<std::size_t> footprint;
  for (int pages : {100, 20000}) {
    Generator first(pages), second(pages);
    int call = 0;
    auto acc = accumulate_replay(
        [&](auto &&cb) {
          std::istream s(call++ == 0 ? &first : &second);
          stream_revisions(s, cb);
        },
        at("2011-01-01"));
    ASSERT_EQ(acc.size(), 7u);
    std::size_t state = 0;
    for (const auto &[id, a] : acc) state += a.active_windows.size() + a.last_page.size() / 8;
    footprint.push_back(state);
    std::int64_t u0 = 0;
    for (int p = 0; p < pages; ++p)
      for (int r = 0; r < 5; ++r) u0 += (p + r) % 7 == 0;
    EXPECT_EQ(acc.at("u0").edit_count, u0);
  }
  EXPECT_LE(footprint[1], footprint[0] + 7);
}

TEST(FeaturesCsv, RoundTripAndQuoting) {
  std::vector<EditorFeatures> rows(2);
  rows[0].editor_id = "Smith, J. \"JS\"";
  rows[0].pages = 3;
  rows[0].not_minor = 0.1;
  rows[0].bytes = -20;
  rows[1].editor_id = "10.0.0.1";
  rows[1].anonymous = 1;
  rows[1].presence = 1.0 / 3.0;
  std::stringstream s;
  csv::write_features(s, rows);
  EXPECT_NE(s.str().find("\"Smith, J. \"\"JS\"\"\",0,3,0,0.1,"), std::string::npos);
  EXPECT_EQ(csv::read_features(s), rows);
}

TEST(FeaturesCsv, Validation) {
  auto read = [](const std::string &text) {
    std::istringstream in(text);
    return csv::read_features(in);
  };
  const std::string h = std::string(csv::features_header) + "\n";
  EXPECT_THROW(read(""), Error);
  EXPECT_THROW(read("editor,anonymous\n"), Error);
  EXPECT_THROW(read(h + "a,0,1,1,0.5,0.5,0.5,0.5,0.5\n"), Error);
  EXPECT_THROW(read(h + "a,2,1,1,0.5,0.5,0.5,0.5,0.5,7\n"), Error);
  EXPECT_THROW(read(h + "a,0,1,1,1.5,0.5,0.5,0.5,0.5,7\n"), Error);
  EXPECT_THROW(read(h + "a,0,x,1,0.5,0.5,0.5,0.5,0.5,7\n"), Error);
  EXPECT_THROW(read(h + "a,0,1,1,0.5,0.5,0.5,0.5,0.5,7\na,0,1,1,0.5,0.5,0.5,0.5,0.5,7\n"), Error);
  EXPECT_EQ(read(h + "a,0,1,1,0.5,0.5,0.5,0.5,0.5,7\r\n\n").size(), 1u);
  try {
    read(h + "a,0,1,1,0.5,0.5,0.5,0.5,0.5,7\nb,0,1,1,0.5,0.5,0.5,0.5,0.5,seven\n");
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Barnstars, OnePerLine) {
  std::istringstream in("Alice\n\n  Bob \r\nAlice\n");
  EXPECT_EQ(csv::read_barnstars(in), (std::set<std::string>{"Alice", "Bob"}));
}

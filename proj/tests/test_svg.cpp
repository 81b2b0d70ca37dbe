#include <gtest/gtest.h>

#include "nonmono/svg_plot.hpp"

using namespace nonmono::svg;

namespace {

std::size_t at(const std::string &s, const std::string &needle) {
  const auto p = s.find(needle);
  EXPECT_NE(p, std::string::npos) << needle;
  return p;
}

} // namespace

TEST(Svg, BarsAscendingWithNaLast) {
  const auto s = bar_chart("t", "y", {{"B", 0.7}, {"N", std::nullopt}, {"A", 0.2}, {"C", 0.9}});
  EXPECT_LT(at(s, ">A<"), at(s, ">B<"));
  EXPECT_LT(at(s, ">B<"), at(s, ">C<"));
  EXPECT_LT(at(s, ">C<"), at(s, ">N (NA)<"));
  // NA bars get a label only
  EXPECT_EQ(s.find("<title>N:"), std::string::npos);
}

TEST(Svg, TiesKeepInputOrder) {
  const auto s = bar_chart("t", "y", {{"second", 0.5}, {"first", 0.5}});
  EXPECT_LT(at(s, ">second<"), at(s, ">first<"));
}

TEST(Svg, ReferenceLineIsDotted) {
  EXPECT_EQ(bar_chart("t", "y", {{"A", 1.0}}).find("stroke-dasharray"), std::string::npos);
  const auto s = bar_chart("t", "y", {{"A", 1.0}}, 0.5);
  at(s, "stroke-dasharray");
  at(s, "Features' average (0.50)");
}

TEST(Svg, EscapesMarkup) {
  EXPECT_EQ(escape("a<b & \"c\">"), "a&lt;b &amp; &quot;c&quot;&gt;");
  const auto s = bar_chart("x < y & z", "y", {{"<m>", 1.0}});
  EXPECT_EQ(s.find("<m>"), std::string::npos);
  at(s, "x &lt; y &amp; z");
}

TEST(Svg, SelfContained) {
  const auto s = bar_chart("t", "y", {{"A", 1.0}, {"B", -0.5}, {"C", std::nullopt}}, 2.0);
  EXPECT_EQ(s.rfind("<?xml", 0), 0u);
  EXPECT_EQ(s.find("href"), std::string::npos);
  EXPECT_EQ(s.find("url("), std::string::npos);
  EXPECT_EQ(s.find("nan"), std::string::npos);
  EXPECT_EQ(s.substr(s.size() - 7), "</svg>\n");
}

TEST(Svg, AllNaStillRenders) {
  const auto s = bar_chart("t", "y", {{"A", std::nullopt}});
  at(s, "A (NA)");
  EXPECT_EQ(s.find("inf"), std::string::npos);
}

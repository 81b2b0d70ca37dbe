#pragma once

#include <algorithm>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nonmono::svg {

struct Bar {
  std::string label;
  std::optional<double> value; // NA bars are listed but not drawn
};

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

namespace detail {
inline std::string fmt(double x, int decimals = 2) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, decimals);
  return std::string(buf, p);
}
} // namespace detail

/// Vertical bar chart, bars sorted ascending by value (NA last), with an
/// optional dotted reference line. Self-contained SVG 1.1.
inline std::string bar_chart(std::string_view title, std::string_view y_label, std::vector<Bar> bars,
                             std::optional<double> reference = std::nullopt,
                             std::string_view reference_label = "Features' average") {
  std::stable_sort(bars.begin(), bars.end(), [](const Bar &a, const Bar &b) {
    if (a.value.has_value() != b.value.has_value()) return a.value.has_value();
    return a.value && *a.value < *b.value;
  });
  double top = reference.value_or(0.0);
  for (const auto &b : bars)
    if (b.value) top = std::max(top, *b.value);
  if (top <= 0) top = 1;
  top *= 1.05;

  const double left = 60, right = 20, plot_top = 40, plot_h = 300, label_h = 60, bar_w = 14, gap = 4;
  const double plot_w = std::max(200.0, static_cast<double>(bars.size()) * (bar_w + gap) + gap);
  const double width = left + plot_w + right, height = plot_top + plot_h + label_h;
  const double base = plot_top + plot_h;
  auto y_of = [&](double v) { return base - v / top * plot_h; };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + detail::fmt(width, 0) + "\" height=\"" +
       detail::fmt(height, 0) + "\" viewBox=\"0 0 " + detail::fmt(width, 0) + " " + detail::fmt(height, 0) +
       "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  s += "<title>" + escape(title) + "</title>\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + detail::fmt(width, 0) + "\" height=\"" + detail::fmt(height, 0) +
       "\" fill=\"white\"/>\n";
  s += "<text x=\"" + detail::fmt(width / 2, 1) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" +
       escape(title) + "</text>\n";
  s += "<text x=\"14\" y=\"" + detail::fmt(plot_top + plot_h / 2, 1) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
       detail::fmt(plot_top + plot_h / 2, 1) + ")\">" + escape(y_label) + "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = top * t / 4, y = y_of(v);
    s += "<line x1=\"" + detail::fmt(left, 1) + "\" y1=\"" + detail::fmt(y, 1) + "\" x2=\"" +
         detail::fmt(left + plot_w, 1) + "\" y2=\"" + detail::fmt(y, 1) + "\" stroke=\"#dddddd\"/>\n";
    s += "<text x=\"" + detail::fmt(left - 4, 1) + "\" y=\"" + detail::fmt(y + 3, 1) + "\" text-anchor=\"end\">" +
         detail::fmt(v) + "</text>\n";
  }
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double x = left + gap + static_cast<double>(i) * (bar_w + gap);
    const auto &b = bars[i];
    if (b.value) {
      const double y = y_of(std::max(0.0, *b.value));
      s += "<rect x=\"" + detail::fmt(x, 1) + "\" y=\"" + detail::fmt(y, 1) + "\" width=\"" + detail::fmt(bar_w, 1) +
           "\" height=\"" + detail::fmt(base - y, 1) + "\" fill=\"#4e79a7\"><title>" + escape(b.label) + ": " +
           detail::fmt(*b.value, 4) + "</title></rect>\n";
    }
    const double lx = x + bar_w / 2, ly = base + 6;
    s += "<text x=\"" + detail::fmt(lx, 1) + "\" y=\"" + detail::fmt(ly, 1) + "\" text-anchor=\"end\" transform=\"rotate(-90 " +
         detail::fmt(lx, 1) + " " + detail::fmt(ly, 1) + ")\">" + escape(b.value ? b.label : b.label + " (NA)") +
         "</text>\n";
  }
  s += "<line x1=\"" + detail::fmt(left, 1) + "\" y1=\"" + detail::fmt(base, 1) + "\" x2=\"" +
       detail::fmt(left + plot_w, 1) + "\" y2=\"" + detail::fmt(base, 1) + "\" stroke=\"black\"/>\n";
  if (reference) {
    const double y = y_of(*reference);
    s += "<line x1=\"" + detail::fmt(left, 1) + "\" y1=\"" + detail::fmt(y, 1) + "\" x2=\"" +
         detail::fmt(left + plot_w, 1) + "\" y2=\"" + detail::fmt(y, 1) +
         "\" stroke=\"#e15759\" stroke-width=\"1.5\" stroke-dasharray=\"2,3\"/>\n";
    s += "<text x=\"" + detail::fmt(left + plot_w - 2, 1) + "\" y=\"" + detail::fmt(y - 4, 1) +
         "\" text-anchor=\"end\" fill=\"#e15759\">" + escape(reference_label) + " (" + detail::fmt(*reference) +
         ")</text>\n";
  }
  s += "</svg>\n";
  return s;
}

} // namespace nonmono::svg

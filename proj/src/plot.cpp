#include "ternkey/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ternkey/errors.hpp"

namespace ternkey {

namespace {

constexpr double kWidth = 720, kHeight = 450;
constexpr double kLeft = 80, kRight = 190, kTop = 44, kBottom = 64;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

// Groups rows by decoder, keeping first-appearance order.
std::vector<Series> by_decoder(const CsvTable& t, const std::string& ycol, const std::string& suffix, bool dashed) {
  const auto dec = t.text("decoder");
  const auto x = t.numeric("p");
  const auto y = t.numeric(ycol);
  std::vector<Series> out;
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < dec.size(); ++i) {
    auto [it, fresh] = slot.emplace(dec[i], out.size());
    if (fresh) out.push_back({dec[i] + suffix, {}, {}, dashed});
    out[it->second].x.push_back(x[i]);
    out[it->second].y.push_back(y[i]);
  }
  return out;
}

}  // namespace

std::string render_svg(const CsvTable& table) {
  std::vector<Series> series;
  std::vector<std::string> categories;
  std::string title, xlabel = "flip probability p", ylabel;
  switch (table.kind) {
    case CsvKind::Failure: {
      title = "Regeneration failure rate";
      ylabel = "failure rate";
      series = by_decoder(table, "failure_rate", "", false);
      auto upper = by_decoder(table, "wilson95_upper", " (95% upper)", true);
      series.insert(series.end(), upper.begin(), upper.end());
      break;
    }
    case CsvKind::Ber: {
      title = "Key bit error before hashing";
      ylabel = "key bit error (%)";
      const auto x = table.numeric("p");
      series.push_back({"legitimate", x, table.numeric("percent_key_error_legit"), false});
      series.push_back({"attacker", x, table.numeric("percent_key_error_attacker"), false});
      break;
    }
    case CsvKind::DecoderCompare:
      title = "Block error rate by decoder";
      ylabel = "block error rate";
      series = by_decoder(table, "block_error_rate", "", false);
      break;
    case CsvKind::Timing: {
      title = "Regeneration time by decoder";
      ylabel = "median of means (us)";
      xlabel = "decoder";
      categories = table.text("decoder");
      Series s{"regeneration", {}, table.numeric("median_of_means_us"), false};
      for (std::size_t i = 0; i < categories.size(); ++i) s.x.push_back(static_cast<double>(i));
      series.push_back(std::move(s));
      break;
    }
  }

  double xmin = 1e300, xmax = -1e300, ypos_min = 1e300, ymax = 0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || s.y[i] < 0)
        throw DataError("plot: values must be finite and non-negative");
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      if (s.y[i] > 0) ypos_min = std::min(ypos_min, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!categories.empty()) {
    xmin = -0.5;
    xmax = static_cast<double>(categories.size()) - 0.5;
  }
  if (xmax <= xmin) {
    xmin -= 0.05;
    xmax += 0.05;
  }
  int dec_lo, dec_hi;
  if (ymax <= 0) {
    dec_lo = -6;
    dec_hi = 0;
  } else {
    dec_hi = static_cast<int>(std::ceil(std::log10(ymax)));
    dec_lo = std::min(static_cast<int>(std::floor(std::log10(ypos_min))) - 1, dec_hi - 1);
  }

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) {
    const double ly = y > 0 ? std::max(std::log10(y), static_cast<double>(dec_lo)) : dec_lo;
    return kTop + (dec_hi - ly) / (dec_hi - dec_lo) * ph;
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
    << "</text>\n";
  o << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int d = dec_lo; d <= dec_hi; ++d) {
    const double y = kTop + static_cast<double>(dec_hi - d) / (dec_hi - dec_lo) * ph;
    o << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft + pw) << "\" y2=\"" << fmt(y)
      << "\" stroke=\"#dddddd\"/>\n";
    o << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  if (categories.empty()) {
    for (int i = 0; i <= 5; ++i) {
      const double xv = xmin + (xmax - xmin) * i / 5.0;
      o << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">"
        << fmt(xv) << "</text>\n";
    }
  } else {
    for (std::size_t i = 0; i < categories.size(); ++i)
      o << "<text x=\"" << fmt(px(static_cast<double>(i))) << "\" y=\"" << fmt(kTop + ph + 18)
        << "\" text-anchor=\"middle\">" << escape(categories[i]) << "</text>\n";
  }
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 16) << "\" text-anchor=\"middle\">"
    << escape(xlabel) << "</text>\n";
  o << "<text transform=\"translate(18," << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(ylabel) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = kColors[si % std::size(kColors)];
    o << "<g class=\"series\" data-label=\"" << escape(s.label) << "\">\n";
    if (s.x.size() > 1 && categories.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) o << (i ? " " : "") << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
      o << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i)
      o << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i])) << "\" r=\"3\" fill=\"" << color
        << "\"/>\n";
    const double ly = kTop + 12 + 18 * static_cast<double>(si);
    o << "<line x1=\"" << fmt(kLeft + pw + 14) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(kLeft + pw + 38)
      << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
      << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    o << "<text x=\"" << fmt(kLeft + pw + 44) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(s.label) << "</text>\n";
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void emit_plot(const std::string& csv_path, const std::string& svg_path) {
  std::ifstream in(csv_path);
  if (!in) throw DataError("plot: cannot open " + csv_path);
  const std::string svg = render_svg(read_csv_table(in));
  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw DataError("plot: cannot write " + svg_path);
  out << svg;
  if (!out) throw DataError("plot: write failed for " + svg_path);
}

}  // namespace ternkey

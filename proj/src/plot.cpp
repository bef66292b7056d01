#include "v2x/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace v2x {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::string render_svg(const ChartSpec& spec, const std::vector<Series>& series) {
  double x_max = 0.0;
  for (const auto& s : series) {
    for (double x : s.x) x_max = std::max(x_max, x);
  }
  if (x_max <= 0.0) x_max = 1.0;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto ty = [&](double y) {
    return spec.log_y ? std::log10(y) : y;
  };
  const double y0 = ty(spec.y_min);
  const double y1 = ty(spec.y_max);
  auto px = [&](double x) { return kLeft + pw * x / x_max; };
  auto py = [&](double y) { return kTop + ph * (1.0 - (ty(y) - y0) / (y1 - y0)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(spec.title)
     << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  // y ticks: decades on a log axis, fifths otherwise
  std::vector<double> yticks;
  if (spec.log_y) {
    for (double e = std::ceil(y0); e <= y1 + 1e-9; e += 1.0) yticks.push_back(std::pow(10.0, e));
  } else {
    for (int i = 0; i <= 5; ++i) yticks.push_back(spec.y_min + (spec.y_max - spec.y_min) * i / 5.0);
  }
  for (double y : yticks) {
    char label[32];
    if (spec.log_y) std::snprintf(label, sizeof label, "1e%d", static_cast<int>(std::lround(std::log10(y))));
    else std::snprintf(label, sizeof label, "%g", y);
    os << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << num(py(y)) << "\" y2=\"" << num(py(y))
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << label
       << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double x = x_max * i / 5.0;
    char label[32];
    std::snprintf(label, sizeof label, "%g", x);
    os << "<text x=\"" << num(px(x)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << label
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
     << escape(spec.x_label) << "</text>\n";
  os << "<text transform=\"translate(16," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (spec.log_y && s.y[i] <= 0.0) continue;
      const double y = std::clamp(s.y[i], spec.y_min, spec.y_max);
      os << num(px(s.x[i])) << ',' << num(py(y)) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << kLeft + pw - 8 << "\" y=\"" << kTop + 16 + 16 * k << "\" text-anchor=\"end\" fill=\""
       << colour << "\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void plot_run(const std::filesystem::path& in_dir, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  Series prr{"PRR", {}, {}};
  for (const auto& row : read_csv(in_dir / "prr.csv")) {
    if (row.size() < 5 || row[4].empty()) continue;
    prr.x.push_back((std::stod(row[0]) + std::stod(row[1])) / 2.0);
    prr.y.push_back(std::stod(row[4]));
  }
  write_file(out_dir / "prr.svg",
             render_svg({"Packet reception ratio", "distance (m)", "PRR", false, 0.0, 1.0}, {prr}));

  std::vector<Series> ia;
  double floor = 1.0;
  for (const auto& row : read_csv(in_dir / "ia_ccdf.csv")) {
    if (row.size() < 3) continue;
    if (ia.empty() || ia.back().label != row[0]) ia.push_back({row[0] + " m", {}, {}});
    const double c = std::stod(row[2]);
    ia.back().x.push_back(std::stod(row[1]));
    ia.back().y.push_back(c);
    if (c > 0.0) floor = std::min(floor, c);
  }
  const double y_min = std::pow(10.0, std::floor(std::log10(floor)));
  write_file(out_dir / "ia_ccdf.svg",
             render_svg({"Information age CCDF", "IA (ms)", "P[IA > x]", true, std::min(y_min, 0.1), 1.0}, ia));
}

}  // namespace v2x

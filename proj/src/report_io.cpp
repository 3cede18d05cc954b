#include "scalemix/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "scalemix/error.hpp"

namespace scalemix {

namespace {

void require_rows(const ExperimentReport& report) {
  if (report.rows.empty()) throw Error("nothing to report");
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << contents;
    out.flush();
    if (!out) throw Error("cannot write " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot write " + path.string());
  }
}

std::string report_csv(const ExperimentReport& report) {
  require_rows(report);
  std::string out = "estimator,n,replications,mean_abs_error,std_abs_error,failures\n";
  for (const auto& row : report.rows) {
    out += estimator_name(row.estimator);
    out += ',' + std::to_string(row.n) + ',' + std::to_string(row.replications) + ',';
    out += format_double(row.mean_abs_error) + ',' + format_double(row.std_abs_error) + ',';
    out += std::to_string(row.failures) + '\n';
  }
  return out;
}

void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, report_csv(report));
}

std::string error_plot_svg(const ExperimentReport& report) {
  require_rows(report);
  const double width = 640, height = 440, left = 70, right = 150, top = 30, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;

  double nmin = INFINITY, nmax = -INFINITY, emin = INFINITY, emax = -INFINITY;
  for (const auto& r : report.rows) {
    if (!(r.mean_abs_error > 0.0)) continue;
    nmin = std::min(nmin, static_cast<double>(r.n));
    nmax = std::max(nmax, static_cast<double>(r.n));
    const double lo = r.mean_abs_error - r.std_abs_error;
    emin = std::min(emin, lo > 0.0 ? lo : r.mean_abs_error);
    emax = std::max(emax, r.mean_abs_error + r.std_abs_error);
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!std::isfinite(nmin)) {
    svg << "<text x=\"" << left + 10 << "\" y=\"" << top + 20 << "\">no positive errors to plot</text>\n</svg>\n";
    return svg.str();
  }
  double lx0 = std::log10(nmin), lx1 = std::log10(nmax);
  double ly0 = std::log10(emin), ly1 = std::log10(emax);
  if (lx1 - lx0 < 1e-9) lx0 -= 0.5, lx1 += 0.5;
  if (ly1 - ly0 < 1e-9) ly0 -= 0.5, ly1 += 0.5;
  const double padx = 0.05 * (lx1 - lx0), pady = 0.05 * (ly1 - ly0);
  lx0 -= padx, lx1 += padx, ly0 -= pady, ly1 += pady;
  auto px = [&](double n) { return left + (std::log10(n) - lx0) / (lx1 - lx0) * pw; };
  auto py = [&](double e) { return top + (ly1 - std::log10(e)) / (ly1 - ly0) * ph; };

  for (int d = static_cast<int>(std::ceil(lx0)); d <= static_cast<int>(std::floor(lx1)); ++d) {
    const double x = px(std::pow(10.0, d));
    svg << "<line x1=\"" << x << "\" y1=\"" << top + ph << "\" x2=\"" << x << "\" y2=\"" << top + ph + 5
        << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << top + ph + 18
        << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ly0)); d <= static_cast<int>(std::floor(ly1)); ++d) {
    const double y = py(std::pow(10.0, d));
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\"" << y
        << "\" stroke=\"black\"/><text x=\"" << left - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">n</text>\n";
  svg << "<text x=\"15\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 15 " << top + ph / 2
      << ")\" text-anchor=\"middle\">mean absolute error</text>\n";

  std::vector<Estimator> order;
  for (const auto& r : report.rows)
    if (std::find(order.begin(), order.end(), r.estimator) == order.end()) order.push_back(r.estimator);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    std::string points;
    for (const auto& r : report.rows) {
      if (r.estimator != order[k] || !(r.mean_abs_error > 0.0)) continue;
      const double x = px(static_cast<double>(r.n));
      const double lo = r.mean_abs_error - r.std_abs_error;
      const double y_lo = py(lo > 0.0 ? lo : std::pow(10.0, ly0));
      const double y_hi = py(r.mean_abs_error + r.std_abs_error);
      svg << "<line x1=\"" << x << "\" y1=\"" << y_lo << "\" x2=\"" << x << "\" y2=\"" << y_hi << "\" stroke=\""
          << color << "\"/>\n";
      svg << "<circle cx=\"" << x << "\" cy=\"" << py(r.mean_abs_error) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
      points += format_double(x) + "," + format_double(py(r.mean_abs_error)) + " ";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points
        << "\"/>\n";
    const double ly = top + 15 + 18.0 * static_cast<double>(k);
    svg << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4
        << "\">" << estimator_name(order[k]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void render_error_plot_svg(const ExperimentReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, error_plot_svg(report));
}

}  // namespace scalemix

#include "scalemix/quadrature.hpp"

#include <cmath>

#include "scalemix/error.hpp"

namespace scalemix {

namespace {

struct Panel {
  double a, b, fa, fm, fb, whole;
};

void refine(const std::function<double(double)>& f, const Panel& p, double tol, int depth, QuadratureResult& out) {
  const double m = 0.5 * (p.a + p.b);
  const double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
  const double flm = f(lm), frm = f(rm);
  const double h = p.b - p.a;
  const double left = h / 12.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = h / 12.0 * (p.fm + 4.0 * frm + p.fb);
  const double diff = left + right - p.whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol || m <= p.a || m >= p.b) {
    out.value += left + right + diff / 15.0;
    out.abs_error_estimate += std::abs(diff) / 15.0;
    out.panels += 1;
    return;
  }
  refine(f, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1, out);
  refine(f, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1, out);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                                  int max_depth) {
  if (!(tol > 0.0)) throw Error("adaptive_simpson: tolerance must be positive");
  QuadratureResult out;
  if (a == b) return out;
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw Error("adaptive_simpson: need finite a < b");
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  refine(f, {a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb)}, tol, max_depth, out);
  return out;
}

QuadratureResult adaptive_simpson_piecewise(const std::function<double(double)>& f, std::span<const double> breaks,
                                            double tol, int max_depth) {
  QuadratureResult out;
  if (breaks.size() < 2) return out;
  const double span = breaks.back() - breaks.front();
  const double pieces = static_cast<double>(breaks.size() - 1);
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double len = breaks[k + 1] - breaks[k];
    if (len <= 0.0) continue;
    const QuadratureResult piece = adaptive_simpson(f, breaks[k], breaks[k + 1], tol * (0.5 / pieces + 0.5 * len / span), max_depth);
    out.value += piece.value;
    out.abs_error_estimate += piece.abs_error_estimate;
    out.panels += piece.panels;
  }
  return out;
}

}  // namespace scalemix

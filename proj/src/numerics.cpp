#include "spherelab/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spherelab::num {

namespace {

struct SimpsonWorker {
  const std::function<double(double)>& f;
  long evals = 0;

  double eval(double t) {
    ++evals;
    return f(t);
  }

  // Recursive bisection; fa/fm/fb are already-computed endpoint and midpoint
  // values, whole the Simpson estimate of the panel.
  QuadResult refine(double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
      QuadResult r;
      r.value = left + right + delta / 15.0;
      // Conservative estimate: the unextrapolated Richardson difference.
      r.error = std::abs(delta) + std::numeric_limits<double>::epsilon() *
                                      std::abs(left + right);
      return r;
    }
    QuadResult rl = refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    QuadResult rr = refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    return QuadResult{rl.value + rr.value, rl.error + rr.error, 0};
  }
};

}  // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a,
                            double b, double abs_tol, int max_depth) {
  SimpsonWorker worker{f};
  const double fa = worker.eval(a);
  const double m = 0.5 * (a + b);
  const double fm = worker.eval(m);
  const double fb = worker.eval(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  QuadResult r = worker.refine(a, b, fa, fm, fb, whole, abs_tol, max_depth);
  r.evals = worker.evals;
  return r;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double x_tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect: no sign change in bracket");
  for (int i = 0; i < max_iter && (hi - lo) > x_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
  }
  return fit;
}

}  // namespace spherelab::num

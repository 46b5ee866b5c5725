#include "qheng/quadrature.hpp"

#include <cmath>
#include <vector>

namespace qheng {
namespace {

struct Panel {
  double a, b;
  double fa, fm, fb;
  double whole;
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                  std::size_t max_intervals) {
  QuadratureResult out;
  if (a == b) return out;

  const double width = b - a;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  out.evaluations = 3;

  std::vector<Panel> stack;
  stack.push_back({a, b, fa, fm, fb, width / 6.0 * (fa + 4.0 * fm + fb)});
  std::size_t live = 1;

  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();

    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
    const double flm = f(lm), frm = f(rm);
    out.evaluations += 2;

    const double h = p.b - p.a;
    const double left = h / 12.0 * (p.fa + 4.0 * flm + p.fm);
    const double right = h / 12.0 * (p.fm + 4.0 * frm + p.fb);
    const double diff = left + right - p.whole;
    const double local_tol = abs_tol * (h / width);

    const bool can_split = live < max_intervals && m > p.a && m < p.b;
    if (std::abs(diff) <= 15.0 * local_tol || !can_split) {
      if (std::abs(diff) > 15.0 * local_tol) out.converged = false;
      out.value += left + right + diff / 15.0;
      out.error_estimate += std::abs(diff) / 15.0;
      ++out.intervals;
      continue;
    }
    ++live;
    stack.push_back({m, p.b, p.fm, frm, p.fb, right});
    stack.push_back({p.a, m, p.fa, flm, p.fm, left});
  }
  return out;
}

}  // namespace qheng

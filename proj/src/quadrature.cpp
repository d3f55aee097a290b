#include "hke/quadrature.h"

#include <array>
#include <cmath>

namespace hke {

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth,
                   int force_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || (force_depth <= 0 && std::abs(delta) <= 15.0 * tol))
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, force_depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, force_depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // a few forced splits keep localized bumps from fooling the error estimate
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth, 4);
}

double adaptive_cube(const std::function<double(const double*)>& f, int dim, double half,
                     double tol) {
  std::array<double, 8> point{};
  std::function<double(int, double)> level = [&](int d, double level_tol) -> double {
    if (d == dim)
      return f(point.data());
    return adaptive_simpson(
        [&](double x) {
          point[d] = x;
          // inner integrals must be tighter than the accuracy they feed
          return level(d + 1, level_tol / (4.0 * half));
        },
        -half, half, level_tol);
  };
  return level(0, tol);
}

} // namespace hke

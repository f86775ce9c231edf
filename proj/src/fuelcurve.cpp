#include "shipopt/fuelcurve.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "shipopt/errors.hpp"

namespace shipopt {

namespace {

/// Fuel mass flow in kg/h at dispatch p_mw, from the fitted specific
/// consumption (g/kWh * MW = kg/h).
double fuel_rate(const QuadraticSfoc& quad, double rated, double p_mw) {
  return quad(p_mw / rated) * p_mw;
}

/// 3x3 Gaussian elimination with partial pivoting; returns false when the
/// system is numerically singular.
bool solve3(double a[3][3], double b[3], double x[3]) {
  int perm[3] = {0, 1, 2};
  for (int k = 0; k < 3; ++k) {
    int piv = k;
    for (int r = k + 1; r < 3; ++r) {
      if (std::abs(a[perm[r]][k]) > std::abs(a[perm[piv]][k])) piv = r;
    }
    std::swap(perm[k], perm[piv]);
    double akk = a[perm[k]][k];
    if (std::abs(akk) < 1e-12) return false;
    for (int r = k + 1; r < 3; ++r) {
      double f = a[perm[r]][k] / akk;
      for (int c = k; c < 3; ++c) a[perm[r]][c] -= f * a[perm[k]][c];
      b[perm[r]] -= f * b[perm[k]];
    }
  }
  for (int k = 2; k >= 0; --k) {
    double s = b[perm[k]];
    for (int c = k + 1; c < 3; ++c) s -= a[perm[k]][c] * x[c];
    x[k] = s / a[perm[k]][k];
  }
  return true;
}

}  // namespace

double PiecewiseFuelCurve::eval(double p_mw) const {
  double fuel = intercept;
  double remaining = p_mw;
  for (size_t m = 0; m < segment_slopes.size(); ++m) {
    // The last segment extends past rated power so emergency overload
    // dispatch still evaluates.
    double fill = (m + 1 == segment_slopes.size())
                      ? remaining
                      : std::min(remaining, segment_width);
    if (fill <= 0.0) break;
    fuel += segment_slopes[m] * fill;
    remaining -= fill;
  }
  return fuel;
}

QuadraticSfoc fit_sfoc(const std::vector<std::pair<double, double>>& points) {
  std::set<double> distinct;
  for (const auto& [p, _] : points) distinct.insert(p);
  if (points.size() < 3 || distinct.size() < 3) {
    throw ModelError("sfoc fit: need at least 3 samples with distinct power fractions");
  }

  // Normal equations for y = q2 p^2 + q1 p + q0.
  double a[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double b[3] = {0, 0, 0};
  for (const auto& [p, y] : points) {
    double basis[3] = {p * p, p, 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += basis[r] * basis[c];
      b[r] += basis[r] * y;
    }
  }
  double x[3];
  if (!solve3(a, b, x)) {
    throw ModelError("sfoc fit: degenerate least-squares system");
  }
  return QuadraticSfoc{x[0], x[1], x[2]};
}

PiecewiseFuelCurve linearize(const QuadraticSfoc& quad, const DieselGenSpec& dg,
                             int n_segments) {
  if (n_segments < 1) throw ModelError("linearize: n_segments must be >= 1");

  // The specific consumption must stay positive over the whole operating
  // range; a parabola attains its extremum at the vertex or an endpoint.
  double lo = std::min(quad(0.0), quad(1.0));
  if (quad.q2 != 0.0) {
    double vertex = -quad.q1 / (2.0 * quad.q2);
    if (vertex > 0.0 && vertex < 1.0) lo = std::min(lo, quad(vertex));
  }
  if (lo <= 0.0) {
    throw ModelError("linearize: fitted SFOC is not positive over [0, rated]");
  }

  const int n = n_segments;
  const double width = dg.rated_power / n;
  std::vector<double> value(n + 1);
  for (int k = 0; k <= n; ++k) {
    value[k] = fuel_rate(quad, dg.rated_power, k * width);
  }

  std::vector<double> raw(n);
  for (int m = 0; m < n; ++m) raw[m] = (value[m + 1] - value[m]) / width;

  PiecewiseFuelCurve curve;
  curve.segment_width = width;
  curve.rated_power = dg.rated_power;
  curve.intercept = value[0];  // first-chord extrapolation at zero dispatch

  bool monotone = true;
  for (int m = 1; m < n; ++m) {
    if (raw[m] < raw[m - 1]) {
      monotone = false;
      break;
    }
  }

  if (monotone) {
    curve.segment_slopes = raw;
    return curve;
  }

  // Lower convex hull over the breakpoints (monotone chain; collinear
  // points are kept so untouched regions keep their exact chords).
  std::vector<int> hull;
  for (int k = 0; k <= n; ++k) {
    while (hull.size() >= 2) {
      int a1 = hull[hull.size() - 2];
      int a2 = hull[hull.size() - 1];
      double cross = (a2 - a1) * (value[k] - value[a1]) -
                     (value[a2] - value[a1]) * (k - a1);
      if (cross < 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(k);
  }

  curve.convexified = true;
  curve.segment_slopes.resize(n);
  for (size_t f = 0; f + 1 < hull.size(); ++f) {
    int ka = hull[f];
    int kb = hull[f + 1];
    double slope = (value[kb] - value[ka]) / ((kb - ka) * width);
    for (int m = ka; m < kb; ++m) curve.segment_slopes[m] = slope;
  }
  // Guard against last-ulp wobble across hull facets.
  for (int m = 1; m < n; ++m) {
    curve.segment_slopes[m] =
        std::max(curve.segment_slopes[m], curve.segment_slopes[m - 1]);
  }
  return curve;
}

std::vector<PiecewiseFuelCurve> build_fuel_curves(const ScenarioConfig& config) {
  std::vector<PiecewiseFuelCurve> curves;
  curves.reserve(config.dgs.size());
  for (const auto& dg : config.dgs) {
    curves.push_back(linearize(fit_sfoc(dg.sfoc_points), dg, config.n_segments));
  }
  return curves;
}

}  // namespace shipopt

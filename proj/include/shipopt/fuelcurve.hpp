#pragma once

#include <utility>
#include <vector>

#include "shipopt/scenario.hpp"

namespace shipopt {

/// SFOC(p) = q2*p^2 + q1*p + q0 with p the power fraction of rated and
/// SFOC in g/kWh.
struct QuadraticSfoc {
  double q2 = 0.0;
  double q1 = 0.0;
  double q0 = 0.0;

  double operator()(double p) const { return (q2 * p + q1) * p + q0; }
};

/// Convex piecewise-linear fuel mass-flow curve. Segment m covers
/// [(m-1)*segment_width, m*segment_width] and adds slope[m-1] kg/h per MW;
/// intercept is the fuel rate charged to a running unit at zero dispatch.
struct PiecewiseFuelCurve {
  std::vector<double> segment_slopes;  // kg/h per MW, non-decreasing
  double intercept = 0.0;              // kg/h
  double segment_width = 0.0;          // MW
  double rated_power = 0.0;            // MW
  /// Set when the raw chord slopes were not monotone and the curve was
  /// replaced by its lower convex hull over the same breakpoints.
  bool convexified = false;

  int num_segments() const { return static_cast<int>(segment_slopes.size()); }

  /// Fuel rate at power p by greedy fill: segment 1 first, then 2, ...
  double eval(double p_mw) const;
};

/// Least-squares parabola through (power fraction, g/kWh) samples.
/// Requires >= 3 distinct abscissae; throws ModelError otherwise.
QuadraticSfoc fit_sfoc(const std::vector<std::pair<double, double>>& points);

/// Chords the fuel-rate function FR(P) = SFOC(P/Pn)*P over n equal
/// intervals of [0, Pn]. Non-monotone chord slopes are replaced by the
/// lower convex hull over the same breakpoints. Throws ModelError if the
/// fitted SFOC is not strictly positive on [0, 1].
PiecewiseFuelCurve linearize(const QuadraticSfoc& quad, const DieselGenSpec& dg,
                             int n_segments);

/// fit_sfoc + linearize for every DG of the scenario, in order.
std::vector<PiecewiseFuelCurve> build_fuel_curves(const ScenarioConfig& config);

}  // namespace shipopt

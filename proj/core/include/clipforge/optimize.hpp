#ifndef CLIPFORGE_OPTIMIZE_HPP
#define CLIPFORGE_OPTIMIZE_HPP

#include <functional>
#include <limits>
#include <vector>

namespace clipforge {

using Objective1D = std::function<double(double)>;
using ObjectiveND = std::function<double(const std::vector<double>&)>;

// a < b < c with f(b) <= f(a) and f(b) <= f(c).
struct Bracket {
  double a = 0, b = 0, c = 0;
  double fa = 0, fb = 0, fc = 0;
};

struct BracketOutcome {
  bool bracketed = false;
  Bracket bracket;
  // Filled when the function is monotone over the probed range: the best
  // boundary point stands in for an interior minimum.
  double boundary_x = 0;
  double boundary_f = 0;
  int evaluations = 0;
};

// Downhill expansion from x0 with the given initial step, clamped to
// [lo, hi]. Infinite objective values are treated as uphill.
BracketOutcome bracket_minimum(const Objective1D& f, double x0, double step,
                               double lo = -std::numeric_limits<double>::infinity(),
                               double hi = std::numeric_limits<double>::infinity());

struct SearchReport {
  std::vector<double> argmin;
  double min_value = 0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
  bool halted = false;  // stopped by the should_stop hook
};

struct MinimizeOptions {
  double x_tol = 1e-2;
  int max_iter = 50;
  double line_step = 1.0;                  // initial step of Powell line searches
  std::function<bool()> should_stop;       // polled after every evaluation
  std::vector<double> lower, upper;        // optional box for powell_min
};

// Brent's parabolic-interpolation/golden-section scalar minimizer. Never
// evaluates outside [bracket.a, bracket.c]; converged means the final
// interval width dropped below x_tol.
SearchReport brent_min(const Objective1D& f, const Bracket& bracket,
                       const MinimizeOptions& opt = {});

// Powell's direction-set method; one brent_min line search per direction,
// direction set reset to coordinate axes every n+1 iterations.
SearchReport powell_min(const ObjectiveND& f, std::vector<double> x0,
                        const MinimizeOptions& opt = {});

}  // namespace clipforge

#endif  // CLIPFORGE_OPTIMIZE_HPP

#include "jafit/root.hpp"

#include <algorithm>
#include <cmath>

namespace jafit {

void RootConfig::validate() const {
  if (!(abs_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "abs_tol must be positive");
  if (!(rel_tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "rel_tol must be non-negative");
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be at least 1");
  if (bracket && !(bracket->lo < bracket->hi))
    throw Error(ErrorCode::InvalidArgument, "bracket requires lo < hi");
}

Bracket expand_bracket(const std::function<double(double)>& f, double x0, double grow,
                       int max_expansions) {
  if (!(grow > 1.0)) throw Error(ErrorCode::InvalidArgument, "grow factor must exceed 1");
  if (!std::isfinite(x0)) throw Error(ErrorCode::InvalidArgument, "start point is not finite");

  const double f0 = f(x0);
  if (f0 == 0.0) return {x0, x0};

  // Outward probe sequences on either side of x0.
  double up = x0;  // last finite probes
  double down = x0;
  double probe_up = x0;
  double probe_down = x0;
  double f_up = f0;
  double f_down = f0;
  double step = 1.0;
  for (int i = 0; i < max_expansions; ++i) {
    double next_up;
    double next_down;
    if (x0 > 0.0) {
      next_up = probe_up * grow;
      next_down = probe_down / grow;
    } else if (x0 < 0.0) {
      next_up = probe_up / grow;
      next_down = probe_down * grow;
    } else {
      next_up = step;
      next_down = -step;
      step *= grow;
    }
    // Non-finite probes are stepped over; sign changes are tested against the
    // last finite probe on each side.
    const double fu = f(next_up);
    if (std::isfinite(fu)) {
      if (fu == 0.0 || !detail::same_sign(fu, f_up)) return {std::min(up, next_up), std::max(up, next_up)};
      up = next_up;
      f_up = fu;
    }
    const double fd = f(next_down);
    if (std::isfinite(fd)) {
      if (fd == 0.0 || !detail::same_sign(fd, f_down))
        return {std::min(down, next_down), std::max(down, next_down)};
      down = next_down;
      f_down = fd;
    }
    probe_up = next_up;
    probe_down = next_down;
  }
  throw Error(ErrorCode::NoSignChange, "no sign change found after " +
                                           std::to_string(max_expansions) + " expansions from " +
                                           std::to_string(x0));
}

}  // namespace jafit

#include "jafit/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jafit/errors.hpp"

namespace jafit {

void LoopFeatures::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive");
  };
  positive(chi_in, "chi_in");
  positive(chi_an, "chi_an");
  positive(chi_max, "chi_max");
  positive(chi_r, "chi_r");
  positive(chi_m, "chi_m");
  positive(Hc, "Hc");
  if (std::abs(Mr) > std::abs(Mm))
    throw Error(ErrorCode::InvalidArgument, "|Mr| exceeds |Mm|");
  if (!(Hm > Hc)) throw Error(ErrorCode::InvalidArgument, "Hm must exceed Hc");
}

double Branch::interpolate(double H) const {
  const auto& s = samples;
  auto it = std::lower_bound(s.begin(), s.end(), H,
                             [](const Sample& a, double h) { return a.H < h; });
  std::size_t i = static_cast<std::size_t>(it - s.begin());
  i = std::clamp<std::size_t>(i, 1, s.size() - 1);
  const Sample& a = s[i - 1];
  const Sample& b = s[i];
  return a.M + (b.M - a.M) * (H - a.H) / (b.H - a.H);
}

double Branch::slope(double H) const {
  const auto& s = samples;
  auto it = std::lower_bound(s.begin(), s.end(), H,
                             [](const Sample& a, double h) { return a.H < h; });
  std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - s.begin()), 1, s.size() - 1);
  const double h = s[i].H - s[i - 1].H;
  const double lo = h_min();
  const double hi = h_max();
  if (H - h >= lo && H + h <= hi) return (interpolate(H + h) - interpolate(H - h)) / (2.0 * h);
  if (H + 2.0 * h <= hi)
    return (-3.0 * interpolate(H) + 4.0 * interpolate(H + h) - interpolate(H + 2.0 * h)) / (2.0 * h);
  if (H - 2.0 * h >= lo)
    return (3.0 * interpolate(H) - 4.0 * interpolate(H - h) + interpolate(H - 2.0 * h)) / (2.0 * h);
  return (s[i].M - s[i - 1].M) / h;
}

double Branch::zero_crossing() const {
  const std::size_t n = samples.size();
  for (std::size_t step = 0; step + 1 < n; ++step) {
    const std::size_t ia = descending ? n - 1 - step : step;
    const std::size_t ib = descending ? ia - 1 : ia + 1;
    const Sample& a = samples[ia];
    const Sample& b = samples[ib];
    if (a.M == 0.0) return a.H;
    if ((a.M > 0.0) != (b.M > 0.0) || b.M == 0.0)
      return a.H + (b.H - a.H) * (0.0 - a.M) / (b.M - a.M);
  }
  throw Error(ErrorCode::MissingBranch, "branch magnetization never changes sign");
}

LoopBranches split_branches(const MagnetizationCurve& loop, const FeatureOptions& opts) {
  std::vector<Sample> best_desc;
  std::vector<Sample> best_asc;
  std::vector<Sample> run;
  int dir = 0;
  auto close_run = [&] {
    if (dir < 0 && run.size() > best_desc.size()) best_desc = run;
    if (dir > 0 && run.size() > best_asc.size()) best_asc = run;
  };
  for (const Sample& s : loop.samples) {
    if (run.empty()) {
      run.push_back(s);
      continue;
    }
    const double dH = s.H - run.back().H;
    if (dH == 0.0) continue;
    const int d = dH > 0.0 ? 1 : -1;
    if (dir != 0 && d != dir) {
      close_run();
      const Sample last = run.back();
      run.assign(1, last);
    }
    dir = d;
    run.push_back(s);
  }
  close_run();

  if (best_desc.empty()) throw Error(ErrorCode::MissingBranch, "loop has no descending branch");
  if (best_asc.empty()) throw Error(ErrorCode::MissingBranch, "loop has no ascending branch");
  if (best_desc.size() < opts.min_branch_samples || best_asc.size() < opts.min_branch_samples)
    throw Error(ErrorCode::InsufficientSamples,
                "each loop branch needs at least " + std::to_string(opts.min_branch_samples) +
                    " samples (descending " + std::to_string(best_desc.size()) + ", ascending " +
                    std::to_string(best_asc.size()) + ")");

  LoopBranches out;
  std::reverse(best_desc.begin(), best_desc.end());
  out.descending = {std::move(best_desc), true};
  out.ascending = {std::move(best_asc), false};
  return out;
}

double slope_at_origin(const MagnetizationCurve& curve, std::size_t window) {
  double shh = 0.0;
  double shm = 0.0;
  std::size_t used = 0;
  for (const Sample& s : curve.samples) {
    if (!(s.H > 0.0)) continue;
    shh += s.H * s.H;
    shm += s.H * s.M;
    if (++used == window) break;
  }
  if (used < window)
    throw Error(ErrorCode::InsufficientSamples,
                "slope at origin needs " + std::to_string(window) + " samples with H > 0, found " +
                    std::to_string(used));
  return shm / shh;
}

LoopFeatures extract_features(const MagnetizationCurve& first_mag, const MagnetizationCurve& loop,
                              const MagnetizationCurve& anhysteretic,
                              const FeatureOptions& opts) {
  const LoopBranches branches = split_branches(loop, opts);
  const Branch& desc = branches.descending;
  const Branch& asc = branches.ascending;

  LoopFeatures f;
  const auto tip = std::max_element(loop.samples.begin(), loop.samples.end(),
                                    [](const Sample& a, const Sample& b) {
                                      return a.H < b.H || (a.H == b.H && a.M < b.M);
                                    });
  f.Hm = tip->H;
  f.Mm = tip->M;

  if (!(desc.h_min() <= 0.0 && desc.h_max() >= 0.0))
    throw Error(ErrorCode::MissingBranch, "descending branch does not cross H = 0");
  const double crossing = desc.zero_crossing();
  f.Hc = std::abs(crossing);
  f.Mr = desc.interpolate(0.0);
  f.chi_max = desc.slope(crossing);
  f.chi_r = desc.slope(0.0);
  f.chi_m = asc.slope(std::min(f.Hm, asc.h_max()));

  f.chi_in = slope_at_origin(first_mag, opts.origin_window);
  f.chi_an = slope_at_origin(anhysteretic, opts.origin_window);
  return f;
}

}  // namespace jafit

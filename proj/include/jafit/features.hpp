#pragma once

// Measurable loop quantities and their extraction from sampled curves.

#include <cstddef>
#include <vector>

#include "jafit/curve.hpp"

namespace jafit {

struct LoopFeatures {
  double chi_in = 0.0;   // initial slope of the first magnetization curve
  double chi_an = 0.0;   // initial slope of the anhysteretic curve
  double chi_max = 0.0;  // slope at the coercive point
  double chi_r = 0.0;    // slope at remanence
  double chi_m = 0.0;    // slope at the loop tip
  double Hc = 0.0;       // coercive field, A/m (magnitude)
  double Mr = 0.0;       // remanent magnetization, A/m
  double Mm = 0.0;       // tip magnetization, A/m
  double Hm = 0.0;       // tip field, A/m

  /// Throws InvalidArgument when the physical invariants do not hold.
  void validate() const;
};

struct FeatureOptions {
  std::size_t origin_window = 5;       // points in the slope-at-origin fit
  std::size_t min_branch_samples = 10;
};

/// A monotone piece of a loop, stored with H increasing.
struct Branch {
  std::vector<Sample> samples;
  bool descending = false;  // traversal direction in the source data

  double interpolate(double H) const;
  /// Central difference over the local grid spacing, one-sided at the ends.
  double slope(double H) const;
  /// Field of the first sign change of M along the traversal direction.
  double zero_crossing() const;
  double h_min() const { return samples.front().H; }
  double h_max() const { return samples.back().H; }
};

/// Longest descending and ascending runs of a loop.
struct LoopBranches {
  Branch descending;
  Branch ascending;
};

LoopBranches split_branches(const MagnetizationCurve& loop, const FeatureOptions& opts = {});

/// Least-squares slope through the origin over the first `window` samples with
/// H > 0.
double slope_at_origin(const MagnetizationCurve& curve, std::size_t window);

LoopFeatures extract_features(const MagnetizationCurve& first_mag, const MagnetizationCurve& loop,
                              const MagnetizationCurve& anhysteretic,
                              const FeatureOptions& opts = {});

}  // namespace jafit

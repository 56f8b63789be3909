#pragma once

// JA_par: anhysteretic parameter estimation through an equivalent linearized
// paramagnet. From the initial anhysteretic susceptibility the estimator
// derives the paramagnet moment m1, evaluates that paramagnet at a high
// reference field, and for each scaling factor eta solves
//
//   eta * chi_an1 - (Ms/Ha1) L(3 chi_param Ha1 / Ms) = 0
//
// for chi_param. chi_param fixes the ferromagnetic moment m, hence aJ, and
// alpha = 1/chi_param - 1/chi_an. The eta minimizing the mu0-scaled residual
// between the reconstructed implicit curve and the data is reported.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "jafit/curve.hpp"
#include "jafit/errors.hpp"
#include "jafit/magnetics.hpp"

namespace jafit {

enum class SweepMode {
  FullArgmin,     // scan every eta in [eta0, eta_max) and take the argmin
  FirstLocalMin,  // stop at the first increase of the residual norm
};

std::string_view to_string(SweepMode mode);
SweepMode parse_sweep_mode(std::string_view text);

struct JaParConfig {
  double ha1 = 1e6;  // reference field for the paramagnet, A/m
  double eta0 = 0.9;
  double eps = 1e-5;
  double eta_max = 1.0;  // exclusive
  SweepMode mode = SweepMode::FullArgmin;

  /// Least-squares slope over this many low-field points for the initial
  /// susceptibility. 0 selects the single first-positive-sample ratio.
  std::size_t slope_points = 0;

  /// Full-argmin only: evaluate every `coarse_stride`-th eta first, then every
  /// eta within one stride of the coarse minimum.
  bool coarse_to_fine = false;
  std::size_t coarse_stride = 100;

  /// Full-argmin only: worker threads for the eta scan.
  unsigned threads = 1;

  void validate() const;
  /// Number of grid points eta0 + k*eps strictly below eta_max.
  std::size_t sweep_size() const;
  double eta_at(std::size_t k) const { return eta0 + static_cast<double>(k) * eps; }
};

struct ProfilePoint {
  double eta;
  double chi_param;
  double residual_norm;  // NaN when this eta could not be evaluated
};

struct FitReport {
  double eta_star = 0.0;
  double chi_param = 0.0;
  double m = 0.0;      // A m^2
  double aJ = 0.0;     // A/m
  double alpha = 0.0;
  std::vector<double> residual;  // mu0*(M_fit - M_data), T
  double residual_norm = 0.0;    // T
  double residual_rms = 0.0;     // T
  std::vector<double> fitted;    // reconstructed M, A/m

  double chi_an_a = 0.0;  // initial anhysteretic susceptibility
  double m1 = 0.0;        // equivalent paramagnet moment
  double a1 = 0.0;        // equivalent paramagnet shape parameter
  double M_an1 = 0.0;     // paramagnet magnetization at ha1
  double chi_an1 = 0.0;

  std::size_t iterations = 0;  // eta values evaluated
  std::vector<ProfilePoint> profile;  // sorted by eta
  bool profile_unimodal = true;
  std::vector<Warning> warnings;

  AnhystereticParams params() const { return {aJ, alpha}; }
};

/// chi = M/H at the first sample with H > 0 and M > 0, or the least-squares
/// slope through the origin over the first `slope_points` such samples.
double initial_susceptibility(const MagnetizationCurve& data, std::size_t slope_points = 0);

struct ParamagnetReference {
  double M_an1;
  double chi_an1;
};

ParamagnetReference paramagnet_reference(double m1, double Ms, double T, double ha1);

/// Root chi_param > 0 of eta*chi_an1 = (Ms/ha1) L(3 chi_param ha1 / Ms).
/// Throws NoSolution when eta*chi_an1*ha1 >= Ms or eta*chi_an1 <= 0.
double solve_chi_param(double eta, double chi_an1, double ha1, double Ms);

std::vector<double> reconstruct_curve(const AnhystereticParams& params, double Ms,
                                      std::span<const double> fields);

struct Residual {
  std::vector<double> r;  // T
  double norm = 0.0;      // T
};

/// mu0*(reconstruction - data), componentwise, and its Euclidean norm.
Residual residual(std::span<const double> data, std::span<const double> reconstruction);

FitReport fit(const MagnetizationCurve& data, const MaterialSpec& material,
              const JaParConfig& cfg = {});

/// True when the finite part of the profile decreases to its minimum and
/// increases afterwards, allowing rounding-level wiggles.
bool is_unimodal(std::span<const ProfilePoint> profile);

}  // namespace jafit

#pragma once

// Baseline JA parameter estimation from loop features (Jiles, 1992): c from the
// susceptibility ratio, then for each alpha seed alternate k (coercive point),
// alpha (remanence) and aJ (loop tip), re-simulating the loop until the mean
// square error against the measured loop meets the fit condition.
//
// Effective-field convention for the anhysteretic value at the loop points:
// coercive point Hc/aJ (M = 0), remanence alpha*Mr/aJ (H = 0), tip
// (Hm + alpha*Mm)/aJ.

#include <string>
#include <vector>

#include "jafit/curve.hpp"
#include "jafit/errors.hpp"
#include "jafit/features.hpp"
#include "jafit/hysteresis.hpp"
#include "jafit/magnetics.hpp"

namespace jafit {

struct Jiles92Config {
  double alpha_seed = 1e-3;
  int max_outer_iter = 20;
  double fit_tol = 1e-3;  // MSE threshold on mu0-scaled magnetization, T^2
  std::vector<double> restart_seeds{1e-4, 1e-3, 1e-2, 1e-1};

  int conditioning_cycles = 3;
  double max_field_step = 0.0;  // 0: Hm/500
  bool clamp = false;

  void validate() const;
  /// alpha_seed followed by restart_seeds, duplicates removed.
  std::vector<double> seeds() const;
};

double c_from_susceptibilities(double chi_in, double chi_an);

double aJ_initial(double Ms, double chi_an, double alpha);

/// k from the coercive-point balance.
double k_from_coercive(const LoopFeatures& f, double c, const AnhystereticParams& params, double Ms);

/// Residual of the remanence equation in alpha (zero at the update).
double remanence_residual(const LoopFeatures& f, double c, double k, double aJ, double alpha,
                          double Ms);
double alpha_update(const LoopFeatures& f, double c, double k, const AnhystereticParams& params,
                    double Ms, double alpha_guess);

/// Residual of the loop-tip equation in aJ (zero at the update).
double tip_residual(const LoopFeatures& f, double c, double k, double alpha, double aJ, double Ms);
double aJ_update(const LoopFeatures& f, double c, double k, const AnhystereticParams& params,
                 double Ms, double aJ_guess);

struct SeedOutcome {
  double seed;
  int iterations = 0;
  double mse;  // NaN when the seed aborted before a simulation
  std::string failure;  // empty on success
};

struct Jiles92Result {
  HysteresisParams params;
  double mse = 0.0;
  bool fit_condition_met = false;
  int iterations = 0;  // outer iterations over all seeds
  std::vector<SeedOutcome> seeds;
  std::vector<Warning> warnings;
  std::vector<std::string> assumptions;
};

/// Mean square error of mu0*(M_sim - M_meas) over the measured loop samples.
double loop_mse(const HysteresisParams& p, const MagnetizationCurve& loop, double hmax,
                const Jiles92Config& cfg);

/// Runs the estimator. Throws DegenerateC when c == 1 and NoSolution when no
/// seed produces any admissible parameter set; otherwise returns the best
/// parameters seen with fit_condition_met telling whether the MSE threshold
/// was reached.
Jiles92Result estimate(const LoopFeatures& features, const MaterialSpec& material,
                       const MagnetizationCurve& loop, const Jiles92Config& cfg = {});

}  // namespace jafit

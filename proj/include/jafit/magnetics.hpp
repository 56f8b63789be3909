#pragma once

// Langevin-family functions and the anhysteretic magnetization algebra of the
// Jiles-Atherton model. Everything here is a pure function.

#include <numbers>
#include <optional>

namespace jafit {

/// SI constants. mu0 uses the exact pre-2019 definition 4*pi*1e-7 H/m.
struct PhysicalConstants {
  static constexpr double kB = 1.380649e-23;  // J/K
  static constexpr double mu0 = 4.0e-7 * std::numbers::pi;  // H/m
};

inline constexpr double kBoltzmann = PhysicalConstants::kB;
inline constexpr double kMu0 = PhysicalConstants::mu0;

/// Intrinsic material data. The Curie temperature is carried as metadata only.
struct MaterialSpec {
  double Ms = 0.0;  // saturation magnetization, A/m
  double T = 0.0;   // absolute temperature, K
  std::optional<double> Tc;

  void validate() const;
};

/// Anhysteretic JA parameters. The pseudo-domain moment is derived from aJ and
/// the temperature, so aJ * moment(T) == kB*T/mu0 by construction.
struct AnhystereticParams {
  double aJ = 0.0;     // shape parameter, A/m
  double alpha = 0.0;  // interdomain coupling

  double moment(double T) const;
  static AnhystereticParams from_moment(double m, double alpha, double T);
};

/// L(x) = coth(x) - 1/x, with a series branch below |x| = 1e-3.
double langevin(double x);

/// L'(x) = 1/x^2 - 1/sinh^2(x), with a series branch below |x| = 1e-3.
double langevin_prime(double x);

/// Paramagnetic (alpha = 0) curve Ms * L(Ha/a).
double anhysteretic_explicit(double Ha, double Ms, double a);

/// alpha*Ms/(3*aJ): the implicit curve is single-valued iff this is below 1.
double coupling_ratio(const AnhystereticParams& p, double Ms);

/// Solves M = Ms * L((Ha + alpha*M)/aJ) for the branch through M(0) = 0.
/// Throws UnstableParams in the multivalued regime and NoConvergence if the
/// bracketed solve fails.
double anhysteretic_implicit(double Ha, const AnhystereticParams& p, double Ms);

/// dM/dH of the implicit curve at (Ha, M):
/// (Ms/aJ) L'(x) / (1 - alpha (Ms/aJ) L'(x)), x = (Ha + alpha*M)/aJ.
double anhysteretic_slope(double Ha, double M, const AnhystereticParams& p, double Ms);

/// Linearized paramagnet (Ms/3) (mu0 m1 / kB T) Ha.
double linearized_anhysteretic(double Ha, double m1, double Ms, double T);

/// m = 3 kB T chi / (mu0 Ms).
double moment_from_susceptibility(double chi, double Ms, double T);

/// aJ = kB T / (mu0 m).
double shape_param_from_moment(double m, double T);

/// alpha = 1/chi_param - 1/chi_an. May be negative for inconsistent inputs.
double alpha_from_susceptibilities(double chi_param, double chi_an);

}  // namespace jafit

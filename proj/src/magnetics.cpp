#include "jafit/magnetics.hpp"

#include <cmath>
#include <string>

#include "jafit/errors.hpp"
#include "jafit/root.hpp"

namespace jafit {

namespace {

constexpr double kSeriesSwitch = 1e-3;

// Implicit-curve solve settings, relative to Ms.
constexpr double kImplicitAbsTol = 1e-9;
constexpr int kImplicitMaxIter = 200;
constexpr int kNewtonPolishSteps = 2;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive and finite");
}

}  // namespace

void MaterialSpec::validate() const {
  require_positive(Ms, "Ms");
  require_positive(T, "T");
}

double AnhystereticParams::moment(double T) const { return kBoltzmann * T / (kMu0 * aJ); }

AnhystereticParams AnhystereticParams::from_moment(double m, double alpha, double T) {
  return {shape_param_from_moment(m, T), alpha};
}

double langevin(double x) {
  if (std::abs(x) < kSeriesSwitch) {
    const double x2 = x * x;
    return x * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0)));
  }
  return 1.0 / std::tanh(x) - 1.0 / x;
}

double langevin_prime(double x) {
  if (std::abs(x) < kSeriesSwitch) {
    const double x2 = x * x;
    return 1.0 / 3.0 + x2 * (-1.0 / 15.0 + x2 * (2.0 / 189.0));
  }
  const double s = std::sinh(x);
  return 1.0 / (x * x) - 1.0 / (s * s);
}

double anhysteretic_explicit(double Ha, double Ms, double a) {
  require_positive(Ms, "Ms");
  require_positive(a, "shape parameter a");
  return Ms * langevin(Ha / a);
}

double coupling_ratio(const AnhystereticParams& p, double Ms) {
  return p.alpha * Ms / (3.0 * p.aJ);
}

double anhysteretic_implicit(double Ha, const AnhystereticParams& p, double Ms) {
  require_positive(p.aJ, "aJ");
  require_positive(Ms, "Ms");
  if (!std::isfinite(Ha)) throw Error(ErrorCode::InvalidArgument, "field is not finite");
  if (coupling_ratio(p, Ms) >= 1.0)
    throw Error(ErrorCode::UnstableParams,
                "alpha*Ms/(3*aJ) = " + std::to_string(coupling_ratio(p, Ms)) +
                    " >= 1: anhysteretic curve is multivalued");
  if (Ha == 0.0) return 0.0;
  if (Ha < 0.0) return -anhysteretic_implicit(-Ha, p, Ms);

  const double inv_aJ = 1.0 / p.aJ;
  auto g = [&](double M) { return M - Ms * langevin((Ha + p.alpha * M) * inv_aJ); };

  RootConfig cfg;
  cfg.abs_tol = kImplicitAbsTol * Ms;
  cfg.rel_tol = 0.0;
  cfg.max_iter = kImplicitMaxIter;
  cfg.bracket = Bracket{0.0, Ms};
  RootResult root = find_root(g, cfg);

  // The bracketed result is accurate to the tolerance; a couple of Newton steps
  // on the strictly monotone residual bring it to rounding level so that the
  // curve is smooth enough to differentiate numerically.
  double M = root.x;
  double gM = root.fx;
  for (int i = 0; i < kNewtonPolishSteps && gM != 0.0; ++i) {
    const double dg = 1.0 - p.alpha * Ms * inv_aJ * langevin_prime((Ha + p.alpha * M) * inv_aJ);
    const double trial = M - gM / dg;
    if (!(trial >= 0.0 && trial <= Ms)) break;
    const double g_trial = g(trial);
    if (!(std::abs(g_trial) < std::abs(gM))) break;
    M = trial;
    gM = g_trial;
  }
  return M;
}

double anhysteretic_slope(double Ha, double M, const AnhystereticParams& p, double Ms) {
  require_positive(p.aJ, "aJ");
  const double x = (Ha + p.alpha * M) / p.aJ;
  const double chi_eff = Ms / p.aJ * langevin_prime(x);
  const double denom = 1.0 - p.alpha * chi_eff;
  if (!(denom > 0.0))
    throw Error(ErrorCode::SingularSlope,
                "1 - alpha*(Ms/aJ)*L'(x) = " + std::to_string(denom) + " at x = " + std::to_string(x));
  return chi_eff / denom;
}

double linearized_anhysteretic(double Ha, double m1, double Ms, double T) {
  require_positive(m1, "moment m1");
  return Ms / 3.0 * (kMu0 * m1 / (kBoltzmann * T)) * Ha;
}

double moment_from_susceptibility(double chi, double Ms, double T) {
  require_positive(chi, "susceptibility");
  return 3.0 * kBoltzmann * T * chi / (kMu0 * Ms);
}

double shape_param_from_moment(double m, double T) {
  require_positive(m, "moment");
  return kBoltzmann * T / (kMu0 * m);
}

double alpha_from_susceptibilities(double chi_param, double chi_an) {
  require_positive(chi_param, "chi_param");
  require_positive(chi_an, "chi_an");
  return 1.0 / chi_param - 1.0 / chi_an;
}

}  // namespace jafit

#include "jafit/jiles92.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jafit/root.hpp"

namespace jafit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Evaluates f, mapping numerical failures to NaN so bracket expansion can step
// over inadmissible regions.
template <class F>
auto guarded(F f) {
  return [f](double x) {
    try {
      return f(x);
    } catch (const Error&) {
      return kNaN;
    }
  };
}

template <class F>
double solve_from(F f, double guess, const char* what) {
  const std::function<double(double)> g = guarded(f);
  const Bracket b = expand_bracket(g, guess, 1.5);
  if (b.lo == b.hi) return b.lo;
  RootConfig cfg;
  cfg.abs_tol = std::numeric_limits<double>::min();
  cfg.rel_tol = 1e-12;
  cfg.max_iter = 200;
  cfg.bracket = b;
  try {
    return find_root(g, cfg).x;
  } catch (const Error& e) {
    throw Error(e.code(), std::string(what) + ": " + e.what());
  }
}

void require_not_degenerate(double c) {
  if (c == 1.0) throw Error(ErrorCode::DegenerateC, "c = 1 makes 1/(1-c) singular");
}

}  // namespace

void Jiles92Config::validate() const {
  if (!(alpha_seed > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha_seed must be positive");
  if (!(fit_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "fit_tol must be positive");
  if (max_outer_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_outer_iter must be >= 1");
  for (double s : restart_seeds)
    if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "restart seeds must be positive");
  if (conditioning_cycles < 0)
    throw Error(ErrorCode::InvalidArgument, "conditioning_cycles must be >= 0");
}

std::vector<double> Jiles92Config::seeds() const {
  std::vector<double> out{alpha_seed};
  for (double s : restart_seeds)
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  return out;
}

double c_from_susceptibilities(double chi_in, double chi_an) {
  if (chi_an == 0.0) throw Error(ErrorCode::ZeroDenominator, "chi_an is zero");
  return chi_in / chi_an;
}

double aJ_initial(double Ms, double chi_an, double alpha) {
  return Ms / 3.0 * (1.0 / chi_an + alpha);
}

double k_from_coercive(const LoopFeatures& f, double c, const AnhystereticParams& params,
                       double Ms) {
  require_not_degenerate(c);
  const double man = anhysteretic_explicit(f.Hc, Ms, params.aJ);
  const double slope = anhysteretic_slope(f.Hc, 0.0, params, Ms);
  const double inv = 1.0 / (1.0 - c);
  const double denom = inv * f.chi_max - c * inv * slope;
  if (denom == 0.0 || !std::isfinite(denom))
    throw Error(ErrorCode::SingularDenominator, "coercive susceptibility term vanishes");
  return man * inv * (params.alpha + 1.0 / denom);
}

double remanence_residual(const LoopFeatures& f, double c, double k, double aJ, double alpha,
                          double Ms) {
  require_not_degenerate(c);
  const AnhystereticParams p{aJ, alpha};
  const double man = Ms * langevin(alpha * f.Mr / aJ);
  const double slope = anhysteretic_slope(0.0, f.Mr, p, Ms);
  const double inner = f.chi_r - c * slope;
  if (inner == 0.0) throw Error(ErrorCode::SingularDenominator, "chi_r - c*dMan/dH vanishes");
  const double denom = alpha / (1.0 - c) + 1.0 / inner;
  if (denom == 0.0) throw Error(ErrorCode::SingularDenominator, "remanence denominator vanishes");
  return man + k / denom - f.Mr;
}

double alpha_update(const LoopFeatures& f, double c, double k, const AnhystereticParams& params,
                    double Ms, double alpha_guess) {
  require_not_degenerate(c);
  return solve_from(
      [&](double a) { return remanence_residual(f, c, k, params.aJ, a, Ms); }, alpha_guess,
      "alpha update");
}

double tip_residual(const LoopFeatures& f, double c, double k, double alpha, double aJ,
                    double Ms) {
  if (!(aJ > 0.0)) throw Error(ErrorCode::InvalidArgument, "aJ must be positive");
  const double man = Ms * langevin((f.Hm + alpha * f.Mm) / aJ);
  return man - (1.0 - c) * k * f.chi_m / (alpha * f.chi_m + 1.0) - f.Mm;
}

double aJ_update(const LoopFeatures& f, double c, double k, const AnhystereticParams& params,
                 double Ms, double aJ_guess) {
  return solve_from([&](double a) { return tip_residual(f, c, k, params.alpha, a, Ms); },
                    aJ_guess, "aJ update");
}

double loop_mse(const HysteresisParams& p, const MagnetizationCurve& loop, double hmax,
                const Jiles92Config& cfg) {
  const std::vector<double> fields = loop.fields();
  const double step = cfg.max_field_step > 0.0 ? cfg.max_field_step : hmax / 500.0;
  const std::vector<double> sim =
      simulate_on_grid(p, fields, hmax, cfg.conditioning_cycles, step, {cfg.clamp});
  double sum = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const double r = kMu0 * (sim[i] - loop.samples[i].M);
    sum += r * r;
  }
  return sum / static_cast<double>(fields.size());
}

Jiles92Result estimate(const LoopFeatures& features, const MaterialSpec& material,
                       const MagnetizationCurve& loop, const Jiles92Config& cfg) {
  cfg.validate();
  material.validate();
  if (loop.empty()) throw Error(ErrorCode::InsufficientSamples, "measured loop is empty");
  const double Ms = material.Ms;

  Jiles92Result result;
  result.assumptions = {
      "Man at the coercive point uses argument Hc/aJ (M = 0)",
      "Man at remanence uses argument alpha*Mr/aJ (H = 0)",
      "Man at the loop tip uses argument (Hm + alpha*Mm)/aJ",
  };

  const double c = c_from_susceptibilities(features.chi_in, features.chi_an);
  require_not_degenerate(c);
  if (c < 0.0 || c > 1.0)
    result.warnings.push_back({"ReversibilityOutOfRange", "c = " + std::to_string(c)});
  features.validate();

  bool have_best = false;
  for (double seed : cfg.seeds()) {
    SeedOutcome outcome{seed, 0, kNaN, {}};
    double alpha = seed;
    double aJ = aJ_initial(Ms, features.chi_an, alpha);
    try {
      for (int iter = 1; iter <= cfg.max_outer_iter; ++iter) {
        ++outcome.iterations;
        ++result.iterations;
        const double k = k_from_coercive(features, c, {aJ, alpha}, Ms);
        if (!(k > 0.0)) throw Error(ErrorCode::NoSolution, "k = " + std::to_string(k) + " <= 0");
        const double next_alpha = alpha_update(features, c, k, {aJ, alpha}, Ms, alpha);
        if (!(next_alpha > 0.0))
          throw Error(ErrorCode::NoSolution, "alpha = " + std::to_string(next_alpha) + " <= 0");
        const double next_aJ = aJ_update(features, c, k, {aJ, next_alpha}, Ms, aJ);
        if (!(next_aJ > 0.0))
          throw Error(ErrorCode::NoSolution, "aJ = " + std::to_string(next_aJ) + " <= 0");
        const HysteresisParams p{next_aJ, next_alpha, c, k, Ms};
        if (coupling_ratio(p.anhysteretic(), Ms) >= 1.0)
          throw Error(ErrorCode::UnstableParams, "alpha*Ms/(3aJ) >= 1");

        const double mse = loop_mse(p, loop, features.Hm, cfg);
        outcome.mse = mse;
        if (!have_best || mse < result.mse) {
          result.params = p;
          result.mse = mse;
          have_best = true;
        }
        const bool settled = std::abs(next_alpha - alpha) <= 1e-10 * std::abs(alpha) &&
                             std::abs(next_aJ - aJ) <= 1e-10 * std::abs(aJ);
        alpha = next_alpha;
        aJ = next_aJ;
        if (mse <= cfg.fit_tol) {
          result.fit_condition_met = true;
          break;
        }
        if (settled) break;
      }
    } catch (const Error& e) {
      outcome.failure = e.what();
    }
    result.seeds.push_back(outcome);
    if (result.fit_condition_met) break;
  }

  if (!have_best) {
    std::string detail;
    for (const auto& s : result.seeds) detail += "\n  seed " + std::to_string(s.seed) + ": " + s.failure;
    throw Error(ErrorCode::NoSolution, "no seed produced admissible parameters" + detail);
  }
  if (!result.fit_condition_met)
    result.warnings.push_back(
        {"FitConditionNotMet", "best MSE " + std::to_string(result.mse) + " T^2 exceeds fit_tol " +
                                   std::to_string(cfg.fit_tol) + " T^2"});
  return result;
}

}  // namespace jafit

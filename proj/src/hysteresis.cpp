#include "jafit/hysteresis.hpp"

#include <cmath>
#include <string>

namespace jafit {

std::vector<Warning> HysteresisParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive");
  };
  positive(aJ, "aJ");
  positive(k, "k");
  positive(Ms, "Ms");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw Error(ErrorCode::InvalidArgument, "alpha must be non-negative");
  if (!std::isfinite(c) || c <= -1.0) throw Error(ErrorCode::InvalidArgument, "c must exceed -1");
  std::vector<Warning> warnings;
  if (c < 0.0 || c > 1.0)
    warnings.push_back({"ReversibilityOutOfRange", "c = " + std::to_string(c) + " is outside [0, 1]"});
  return warnings;
}

void FieldWaveform::validate() const {
  if (targets.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "waveform needs at least one segment");
  if (steps_per_segment < 2)
    throw Error(ErrorCode::InvalidArgument, "steps per segment must be at least 2");
  for (double t : targets)
    if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "waveform target is not finite");
}

FieldWaveform FieldWaveform::symmetric_cycles(double hmax, int cycles, int steps_per_segment) {
  FieldWaveform w;
  w.steps_per_segment = steps_per_segment;
  w.targets = {0.0, hmax};
  for (int i = 0; i < cycles; ++i) {
    w.targets.push_back(-hmax);
    w.targets.push_back(hmax);
  }
  return w;
}

double ja_slope(double man, double dman_dh, double M, int delta, const HysteresisParams& p,
                const SimulationOptions& opts) {
  const double diff = man - M;
  const double denom = delta * p.k - p.alpha * diff;
  if (denom == 0.0 || !std::isfinite(denom))
    throw Error(ErrorCode::SingularDenominator,
                "delta*k - alpha*(Man - M) vanishes at Man - M = " + std::to_string(diff));
  double irreversible = diff / denom;
  if (opts.clamp && delta * diff < 0.0) irreversible = 0.0;
  return irreversible / (1.0 + p.c) + p.c / (1.0 + p.c) * dman_dh;
}

double dMdH(double H, double M, int delta, const HysteresisParams& p,
            const SimulationOptions& opts) {
  if (delta != 1 && delta != -1) throw Error(ErrorCode::InvalidArgument, "delta must be +1 or -1");
  const AnhystereticParams ap = p.anhysteretic();
  const double man = anhysteretic_implicit(H, ap, p.Ms);
  const double slope = anhysteretic_slope(H, man, ap, p.Ms);
  return ja_slope(man, slope, M, delta, p, opts);
}

JaIntegrator::JaIntegrator(const HysteresisParams& p, double H0, double M0, SimulationOptions opts)
    : p_(p), opts_(opts), H_(H0), M_(M0) {
  (void)p_.validate();
  if (!(std::abs(M0) <= p.Ms))
    throw Error(ErrorCode::InvalidArgument, "|M0| must not exceed Ms");
}

double JaIntegrator::anhysteretic_at(double H, double& slope) {
  for (const auto& c : cache_)
    if (c && c->H == H) {
      slope = c->slope;
      return c->man;
    }
  const AnhystereticParams ap = p_.anhysteretic();
  const double man = anhysteretic_implicit(H, ap, p_.Ms);
  slope = anhysteretic_slope(H, man, ap, p_.Ms);
  cache_[next_slot_] = Cached{H, man, slope};
  next_slot_ = 1 - next_slot_;
  return man;
}

double JaIntegrator::rhs(double H, double M, int delta) {
  double slope = 0.0;
  const double man = anhysteretic_at(H, slope);
  return ja_slope(man, slope, M, delta, p_, opts_);
}

void JaIntegrator::advance(double target, int steps, std::vector<Sample>* sink) {
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "advance needs at least one step");
  const double start = H_;
  if (target == start) return;
  const int delta = target > start ? 1 : -1;
  for (int i = 0; i < steps; ++i) {
    const double H0 = H_;
    const double H1 = (i + 1 == steps) ? target : start + (target - start) * (i + 1) / steps;
    const double h = H1 - H0;
    const double half = H0 + 0.5 * h;
    try {
      const double k1 = rhs(H0, M_, delta);
      const double k2 = rhs(half, M_ + 0.5 * h * k1, delta);
      const double k3 = rhs(half, M_ + 0.5 * h * k2, delta);
      const double k4 = rhs(H1, M_ + h * k3, delta);
      const double M1 = M_ + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!std::isfinite(M1))
        throw Error(ErrorCode::SingularDenominator, "magnetization became non-finite");
      if (std::abs(M1) > p_.Ms)
        throw Error(ErrorCode::SaturationExceeded,
                    "|M| = " + std::to_string(std::abs(M1)) + " exceeds Ms");
      M_ = M1;
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(steps_ + 1) + " (H = " + std::to_string(H0) +
                                "): " + e.what());
    }
    H_ = H1;
    ++steps_;
    if (sink) sink->push_back({H_, M_});
  }
}

MagnetizationCurve integrate(const HysteresisParams& p, const FieldWaveform& waveform, double M0,
                             const SimulationOptions& opts) {
  waveform.validate();
  JaIntegrator integrator(p, waveform.targets.front(), M0, opts);
  MagnetizationCurve out;
  out.kind = CurveKind::FullLoop;
  out.samples.reserve(waveform.segments() * static_cast<std::size_t>(waveform.steps_per_segment) + 1);
  out.samples.push_back({integrator.H(), integrator.M()});
  for (std::size_t s = 1; s < waveform.targets.size(); ++s) {
    if (waveform.targets[s] == integrator.H()) {
      for (int i = 0; i < waveform.steps_per_segment; ++i)
        out.samples.push_back({integrator.H(), integrator.M()});
      continue;
    }
    integrator.advance(waveform.targets[s], waveform.steps_per_segment, &out.samples);
  }
  return out;
}

std::vector<double> simulate_on_grid(const HysteresisParams& p, const std::vector<double>& fields,
                                     double hmax, int cycles, double max_step,
                                     const SimulationOptions& opts) {
  if (!(max_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "max_step must be positive");
  if (!(hmax > 0.0)) throw Error(ErrorCode::InvalidArgument, "hmax must be positive");
  JaIntegrator integrator(p, 0.0, 0.0, opts);
  auto go = [&](double target) {
    const double span = std::abs(target - integrator.H());
    if (span == 0.0) return;
    integrator.advance(target, std::max(1, static_cast<int>(std::ceil(span / max_step))));
  };
  go(hmax);
  for (int i = 0; i < cycles; ++i) {
    go(-hmax);
    go(hmax);
  }
  std::vector<double> out;
  out.reserve(fields.size());
  for (double H : fields) {
    go(H);
    out.push_back(integrator.M());
  }
  return out;
}

LoopParams loop_params_from_features(const LoopFeatures& features) {
  if (features.chi_an == 0.0)
    throw Error(ErrorCode::ZeroDenominator, "chi_an is zero; c = chi_in/chi_an is undefined");
  LoopParams out{features.chi_in / features.chi_an, features.Hc, {}};
  if (out.c >= 1.0)
    out.warnings.push_back({"ReversibilityAtLimit", "c = " + std::to_string(out.c) +
                                                        " >= 1 (fully reversible material)"});
  else if (out.c < 0.0)
    out.warnings.push_back({"ReversibilityOutOfRange", "c = " + std::to_string(out.c) + " < 0"});
  if (out.k == 0.0)
    out.warnings.push_back({"ZeroCoercivity", "Hc = 0 gives k = 0 (lossless material)"});
  return out;
}

}  // namespace jafit

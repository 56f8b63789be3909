#pragma once

// Jiles-Atherton hysteresis ODE
//
//   dM/dH = 1/(1+c) (Man - M)/(delta*k - alpha*(Man - M)) + c/(1+c) dMan/dH
//
// integrated in H with a fixed-step classical RK4 scheme. Man(H) is the
// implicit anhysteretic curve and dMan/dH its exact slope.

#include <optional>
#include <vector>

#include "jafit/curve.hpp"
#include "jafit/errors.hpp"
#include "jafit/features.hpp"
#include "jafit/magnetics.hpp"

namespace jafit {

struct HysteresisParams {
  double aJ = 0.0;     // A/m
  double alpha = 0.0;
  double c = 0.0;      // reversibility
  double k = 0.0;      // pinning, A/m
  double Ms = 0.0;     // A/m

  AnhystereticParams anhysteretic() const { return {aJ, alpha}; }
  /// Throws InvalidArgument on aJ, k, Ms <= 0 or alpha < 0; returns warnings
  /// for c outside [0, 1].
  std::vector<Warning> validate() const;
};

struct FieldWaveform {
  std::vector<double> targets;  // first entry is the starting field
  int steps_per_segment = 2000;

  std::size_t segments() const { return targets.empty() ? 0 : targets.size() - 1; }
  void validate() const;

  /// 0 -> hmax, then `cycles` full cycles hmax -> -hmax -> hmax.
  static FieldWaveform symmetric_cycles(double hmax, int cycles, int steps_per_segment);
};

struct SimulationOptions {
  /// Drop the irreversible term when delta*(Man - M) < 0.
  bool clamp = false;
};

/// The right-hand side with the anhysteretic value and slope supplied.
double ja_slope(double man, double dman_dh, double M, int delta, const HysteresisParams& p,
                const SimulationOptions& opts = {});

/// The right-hand side at (H, M) for field direction delta.
double dMdH(double H, double M, int delta, const HysteresisParams& p,
            const SimulationOptions& opts = {});

/// Stateful fixed-step integrator; keeps H, M and a global step counter.
class JaIntegrator {
 public:
  JaIntegrator(const HysteresisParams& p, double H0, double M0, SimulationOptions opts = {});

  /// Moves H linearly to `target` in `steps` RK4 steps. Each accepted step is
  /// passed to `sink` when given.
  void advance(double target, int steps, std::vector<Sample>* sink = nullptr);

  double H() const { return H_; }
  double M() const { return M_; }
  long step_count() const { return steps_; }

 private:
  double rhs(double H, double M, int delta);
  double anhysteretic_at(double H, double& slope);

  HysteresisParams p_;
  SimulationOptions opts_;
  double H_;
  double M_;
  long steps_ = 0;

  struct Cached {
    double H;
    double man;
    double slope;
  };
  std::optional<Cached> cache_[2];
  int next_slot_ = 0;
};

/// Samples the trajectory at the start point and after every step.
MagnetizationCurve integrate(const HysteresisParams& p, const FieldWaveform& waveform,
                             double M0 = 0.0, const SimulationOptions& opts = {});

/// Conditions the material on `cycles` symmetric cycles of amplitude hmax from
/// the demagnetized state, then follows `fields` in order, taking steps no
/// longer than `max_step`. Returns M at each entry of `fields`.
std::vector<double> simulate_on_grid(const HysteresisParams& p, const std::vector<double>& fields,
                                     double hmax, int cycles, double max_step,
                                     const SimulationOptions& opts = {});

struct LoopParams {
  double c;
  double k;
  std::vector<Warning> warnings;
};

/// c = chi_in/chi_an, k = Hc.
LoopParams loop_params_from_features(const LoopFeatures& features);

}  // namespace jafit

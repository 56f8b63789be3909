#include "jafit/japar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "jafit/root.hpp"

namespace jafit {

std::string_view to_string(SweepMode mode) {
  switch (mode) {
    case SweepMode::FullArgmin: return "argmin";
    case SweepMode::FirstLocalMin: return "first-local-min";
  }
  return "unknown";
}

SweepMode parse_sweep_mode(std::string_view text) {
  if (text == "argmin" || text == "full-argmin") return SweepMode::FullArgmin;
  if (text == "first-local-min") return SweepMode::FirstLocalMin;
  throw Error(ErrorCode::InvalidArgument, "unknown sweep mode '" + std::string(text) + "'");
}

void JaParConfig::validate() const {
  if (!(ha1 > 0.0) || !std::isfinite(ha1))
    throw Error(ErrorCode::InvalidArgument, "ha1 must be positive");
  if (!(eta0 > 0.0 && eta0 < eta_max && eta_max <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "eta range must satisfy 0 < eta0 < eta_max <= 1");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (coarse_to_fine && coarse_stride < 2)
    throw Error(ErrorCode::InvalidArgument, "coarse_stride must be at least 2");
  if (threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be at least 1");
}

std::size_t JaParConfig::sweep_size() const {
  auto n = static_cast<std::size_t>(std::ceil((eta_max - eta0) / eps));
  while (n > 0 && eta_at(n - 1) >= eta_max) --n;
  while (eta_at(n) < eta_max) ++n;
  return n;
}

double initial_susceptibility(const MagnetizationCurve& data, std::size_t slope_points) {
  double shh = 0.0;
  double shm = 0.0;
  std::size_t used = 0;
  const std::size_t wanted = std::max<std::size_t>(slope_points, 1);
  for (const auto& s : data.samples) {
    if (!(s.H > 0.0 && s.M > 0.0)) continue;
    if (slope_points == 0) return s.M / s.H;
    shh += s.H * s.H;
    shm += s.H * s.M;
    if (++used == wanted) break;
  }
  if (used == 0) throw Error(ErrorCode::NoPositiveSample, "no sample with H > 0 and M > 0");
  return shm / shh;
}

ParamagnetReference paramagnet_reference(double m1, double Ms, double T, double ha1) {
  if (!(m1 > 0.0) || !(ha1 > 0.0))
    throw Error(ErrorCode::InvalidArgument, "paramagnet reference needs m1 > 0 and ha1 > 0");
  const double M_an1 = Ms * langevin(kMu0 * m1 * ha1 / (kBoltzmann * T));
  return {M_an1, M_an1 / ha1};
}

double solve_chi_param(double eta, double chi_an1, double ha1, double Ms) {
  const double target = eta * chi_an1;
  // L(y) must reach u = target*ha1/Ms, which requires 0 < u < 1.
  const double u = target * ha1 / Ms;
  if (!(target > 0.0) || !(u < 1.0) || !std::isfinite(u))
    throw Error(ErrorCode::NoSolution, "eta*chi_an1*ha1/Ms = " + std::to_string(u) +
                                           " is outside (0, 1)");
  const double scale = 3.0 * ha1 / Ms;
  auto f = [&](double chi) { return target - Ms / ha1 * langevin(scale * chi); };

  // Closed-form start from the small- and large-argument asymptotes of L; it
  // depends on eta alone so results do not depend on sweep order.
  const double y0 = (u < 0.5) ? 3.0 * u : 1.0 / (1.0 - u);
  const double chi0 = y0 / scale;

  Bracket b;
  try {
    b = expand_bracket(f, chi0, 2.0);
  } catch (const Error& e) {
    throw Error(ErrorCode::NoSolution, std::string("bracket search failed: ") + e.what());
  }
  if (b.lo == b.hi) return b.lo;

  RootConfig cfg;
  cfg.abs_tol = std::numeric_limits<double>::min();
  cfg.rel_tol = 1e-15;
  cfg.max_iter = 200;
  cfg.bracket = b;
  return find_root(f, cfg).x;
}

std::vector<double> reconstruct_curve(const AnhystereticParams& params, double Ms,
                                      std::span<const double> fields) {
  std::vector<double> out;
  out.reserve(fields.size());
  for (double H : fields) out.push_back(anhysteretic_implicit(H, params, Ms));
  return out;
}

Residual residual(std::span<const double> data, std::span<const double> reconstruction) {
  if (data.size() != reconstruction.size())
    throw Error(ErrorCode::LengthMismatch, "data has " + std::to_string(data.size()) +
                                               " samples, reconstruction " +
                                               std::to_string(reconstruction.size()));
  Residual out;
  out.r.reserve(data.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = kMu0 * (reconstruction[i] - data[i]);
    out.r.push_back(r);
    sum += r * r;
  }
  out.norm = std::sqrt(sum);
  return out;
}

bool is_unimodal(std::span<const ProfilePoint> profile) {
  std::vector<double> v;
  for (const auto& p : profile)
    if (std::isfinite(p.residual_norm)) v.push_back(p.residual_norm);
  if (v.size() < 3) return true;
  const auto min_it = std::min_element(v.begin(), v.end());
  const auto imin = static_cast<std::size_t>(min_it - v.begin());
  const double tol = 1e-9 * *std::max_element(v.begin(), v.end());
  for (std::size_t j = 0; j < imin; ++j)
    if (v[j] < v[j + 1] - tol) return false;
  for (std::size_t j = imin + 1; j < v.size(); ++j)
    if (v[j] < v[j - 1] - tol) return false;
  return true;
}

namespace {

struct Candidate {
  double eta;
  double chi_param;
  double m;
  double aJ;
  double alpha;
  double norm;
};

class Sweep {
 public:
  Sweep(const MagnetizationCurve& data, const MaterialSpec& material, const JaParConfig& cfg,
        double chi_an_a, double chi_an1)
      : material_(material),
        cfg_(cfg),
        chi_an_a_(chi_an_a),
        chi_an1_(chi_an1),
        fields_(data.fields()),
        measured_(data.magnetizations()) {}

  Candidate evaluate(std::size_t k) const {
    Candidate c{};
    c.eta = cfg_.eta_at(k);
    c.chi_param = solve_chi_param(c.eta, chi_an1_, cfg_.ha1, material_.Ms);
    c.m = moment_from_susceptibility(c.chi_param, material_.Ms, material_.T);
    c.aJ = shape_param_from_moment(c.m, material_.T);
    c.alpha = alpha_from_susceptibilities(c.chi_param, chi_an_a_);
    const AnhystereticParams p{c.aJ, c.alpha};
    double sum = 0.0;
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      const double r = kMu0 * (anhysteretic_implicit(fields_[i], p, material_.Ms) - measured_[i]);
      sum += r * r;
    }
    c.norm = std::sqrt(sum);
    return c;
  }

  /// Like evaluate, but a numerical failure yields a NaN norm.
  ProfilePoint probe(std::size_t k) const {
    try {
      const Candidate c = evaluate(k);
      return {c.eta, c.chi_param, c.norm};
    } catch (const Error&) {
      return {cfg_.eta_at(k), std::numeric_limits<double>::quiet_NaN(),
              std::numeric_limits<double>::quiet_NaN()};
    }
  }

  const std::vector<double>& fields() const { return fields_; }
  const std::vector<double>& measured() const { return measured_; }

 private:
  const MaterialSpec& material_;
  const JaParConfig& cfg_;
  double chi_an_a_;
  double chi_an1_;
  std::vector<double> fields_;
  std::vector<double> measured_;
};

void probe_indices(const Sweep& sweep, const std::vector<std::size_t>& ks,
                   std::vector<ProfilePoint>& out, unsigned threads) {
  out.resize(ks.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(ks.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < ks.size(); ++i) out[i] = sweep.probe(ks[i]);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (ks.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(ks.size(), begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) out[i] = sweep.probe(ks[i]);
    });
  }
}

// Index into `ks` of the smallest finite norm; earliest wins ties.
std::optional<std::size_t> argmin(const std::vector<ProfilePoint>& pts) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i].residual_norm)) continue;
    if (!best || pts[i].residual_norm < pts[*best].residual_norm) best = i;
  }
  return best;
}

}  // namespace

FitReport fit(const MagnetizationCurve& data, const MaterialSpec& material,
              const JaParConfig& cfg) {
  cfg.validate();
  material.validate();
  if (data.size() < 3)
    throw Error(ErrorCode::InsufficientSamples,
                "JA_par needs at least 3 samples, got " + std::to_string(data.size()));
  for (std::size_t i = 1; i < data.size(); ++i)
    if (!(data.samples[i].H > data.samples[i - 1].H))
      throw Error(ErrorCode::NonMonotone,
                  "field must be strictly increasing (sample " + std::to_string(i + 1) + ")");
  data.validate(material.Ms);

  FitReport report;
  report.chi_an_a = initial_susceptibility(data, cfg.slope_points);
  report.m1 = moment_from_susceptibility(report.chi_an_a, material.Ms, material.T);
  report.a1 = shape_param_from_moment(report.m1, material.T);
  const ParamagnetReference ref = paramagnet_reference(report.m1, material.Ms, material.T, cfg.ha1);
  report.M_an1 = ref.M_an1;
  report.chi_an1 = ref.chi_an1;

  const Sweep sweep(data, material, cfg, report.chi_an_a, report.chi_an1);
  const std::size_t n = cfg.sweep_size();

  // The first eta must produce a solution; its error explains why not.
  try {
    (void)sweep.evaluate(0);
  } catch (const Error& e) {
    throw Error(ErrorCode::DegenerateSweep,
                "first eta = " + std::to_string(cfg.eta0) + " failed: " + e.what());
  }

  std::vector<ProfilePoint> profile;
  std::size_t best_k = 0;
  if (cfg.mode == SweepMode::FirstLocalMin) {
    for (std::size_t k = 0; k < n; ++k) {
      const ProfilePoint p = sweep.probe(k);
      profile.push_back(p);
      if (!std::isfinite(p.residual_norm)) {
        report.warnings.push_back({"NonFiniteResidual", "eta = " + std::to_string(p.eta) +
                                                            " could not be evaluated; sweep stopped"});
        break;
      }
      if (k > 0 && !(p.residual_norm < profile[k - 1].residual_norm)) break;
      best_k = k;
    }
  } else {
    std::vector<std::size_t> ks;
    if (cfg.coarse_to_fine) {
      for (std::size_t k = 0; k < n; k += cfg.coarse_stride) ks.push_back(k);
      if (ks.back() != n - 1) ks.push_back(n - 1);
      std::vector<ProfilePoint> coarse;
      probe_indices(sweep, ks, coarse, cfg.threads);
      const auto ic = argmin(coarse);
      if (!ic) throw Error(ErrorCode::DegenerateSweep, "no eta produced a finite residual");
      const std::size_t kc = ks[*ic];
      const std::size_t lo = kc >= cfg.coarse_stride ? kc - cfg.coarse_stride : 0;
      const std::size_t hi = std::min(n - 1, kc + cfg.coarse_stride);
      std::vector<std::size_t> fine_ks;
      for (std::size_t k = lo; k <= hi; ++k)
        if (k % cfg.coarse_stride != 0 && k != n - 1) fine_ks.push_back(k);
      std::vector<ProfilePoint> fine;
      probe_indices(sweep, fine_ks, fine, cfg.threads);
      ks.insert(ks.end(), fine_ks.begin(), fine_ks.end());
      coarse.insert(coarse.end(), fine.begin(), fine.end());
      std::vector<std::size_t> order(ks.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ks[a] < ks[b]; });
      std::vector<std::size_t> sorted_ks;
      for (std::size_t i : order) {
        profile.push_back(coarse[i]);
        sorted_ks.push_back(ks[i]);
      }
      ks = std::move(sorted_ks);
    } else {
      ks.resize(n);
      for (std::size_t k = 0; k < n; ++k) ks[k] = k;
      probe_indices(sweep, ks, profile, cfg.threads);
    }
    const auto ib = argmin(profile);
    if (!ib) throw Error(ErrorCode::DegenerateSweep, "no eta produced a finite residual");
    best_k = ks[*ib];
    const auto bad = std::count_if(profile.begin(), profile.end(), [](const ProfilePoint& p) {
      return !std::isfinite(p.residual_norm);
    });
    if (bad > 0)
      report.warnings.push_back(
          {"NonFiniteResidual", std::to_string(bad) + " eta values could not be evaluated"});
  }

  const Candidate best = sweep.evaluate(best_k);
  report.eta_star = best.eta;
  report.chi_param = best.chi_param;
  report.m = best.m;
  report.aJ = best.aJ;
  report.alpha = best.alpha;
  report.fitted = reconstruct_curve(report.params(), material.Ms, sweep.fields());
  Residual res = residual(sweep.measured(), report.fitted);
  report.residual = std::move(res.r);
  report.residual_norm = res.norm;
  report.residual_rms = res.norm / std::sqrt(static_cast<double>(report.residual.size()));
  report.iterations = profile.size();
  report.profile = std::move(profile);
  report.profile_unimodal = is_unimodal(report.profile);

  if (!report.profile_unimodal)
    report.warnings.push_back(
        {"ResidualProfileNotUnimodal", "residual norm has more than one local minimum in the sweep"});
  if (report.alpha < 0.0)
    report.warnings.push_back({"NonPhysicalAlpha", "alpha = " + std::to_string(report.alpha) +
                                                       " is negative (chi_param > chi_an)"});
  if (cfg.mode == SweepMode::FullArgmin && (best_k == 0 || best_k + 1 == n))
    report.warnings.push_back(
        {"EtaAtSweepBoundary", "minimum lies on the sweep boundary; widen [eta0, eta_max)"});
  return report;
}

}  // namespace jafit

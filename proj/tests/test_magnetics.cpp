#include <cmath>
#include <random>

#include "doctest.h"
#include "jafit/errors.hpp"
#include "jafit/magnetics.hpp"

using namespace jafit;

namespace {
// Reference values from 30-digit evaluations of coth(x) - 1/x and 1 - csch^2(x) - ...
constexpr double kL1 = 0.313035285499331;
constexpr double kL001 = 0.0033333111113227;
constexpr double kLp1 = 0.27593833903369;
constexpr double kLp10 = 0.0099999917553855;

constexpr double kMs = 1.6e6;
const AnhystereticParams kRow1{972.0, 1.4e-3};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("langevin reference values") {
  CHECK(langevin(0.0) == 0.0);
  CHECK(rel(langevin(1.0), kL1) < 1e-13);
  CHECK(rel(langevin(0.01), kL001) < 1e-12);
  CHECK(langevin(800.0) == doctest::Approx(1.0 - 1.0 / 800.0).epsilon(1e-14));
  CHECK(langevin(1e300) == doctest::Approx(1.0));
}

TEST_CASE("langevin_prime reference values") {
  CHECK(langevin_prime(0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(rel(langevin_prime(1.0), kLp1) < 1e-12);
  CHECK(rel(langevin_prime(10.0), kLp10) < 1e-12);
  CHECK(langevin_prime(-1.0) == langevin_prime(1.0));
}

TEST_CASE("langevin is odd and increasing") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> mag(-8.0, 3.0);
  double prev_x = 0.0;
  double prev = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double x = std::pow(10.0, mag(rng));
    CHECK(langevin(-x) == -langevin(x));
    CHECK(langevin(x) > 0.0);
    CHECK(langevin(x) < 1.0);
    if (x > prev_x) CHECK(langevin(x) >= prev);
    prev_x = x;
    prev = langevin(x);
  }
}

TEST_CASE("closed form and series agree near zero") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mag(-6.0, -1.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::pow(10.0, mag(rng)) * (i % 2 ? 1.0 : -1.0);
    const double series = x / 3.0 - x * x * x / 45.0 + 2.0 * std::pow(x, 5) / 945.0;
    CHECK(std::abs(langevin(x) - series) <= 2.0 * std::pow(std::abs(x), 5) / 945.0 + 1e-12);
  }
}

TEST_CASE("langevin_prime matches central differences") {
  const double h = 1e-5;
  for (double x : {-7.0, -1.5, -0.2, 0.0005, 0.002, 0.05, 0.7, 2.0, 5.0, 30.0}) {
    const double fd = (langevin(x + h) - langevin(x - h)) / (2.0 * h);
    CHECK(rel(langevin_prime(x), fd) <= 1e-6);
  }
}

TEST_CASE("explicit anhysteretic curve") {
  CHECK(anhysteretic_explicit(0.0, kMs, 972.0) == 0.0);
  CHECK(anhysteretic_explicit(972.0, kMs, 972.0) == doctest::Approx(500856.4567989).epsilon(1e-12));
  CHECK(anhysteretic_explicit(-972.0, kMs, 972.0) == -anhysteretic_explicit(972.0, kMs, 972.0));
  CHECK(anhysteretic_explicit(1e12, kMs, 972.0) == doctest::Approx(kMs).epsilon(1e-8));
  double prev = 0.0;
  for (double H = 1.0; H < 1e6; H *= 1.3) {
    const double M = anhysteretic_explicit(H, kMs, 972.0);
    CHECK(M > prev);
    prev = M;
  }
  CHECK_THROWS_AS(anhysteretic_explicit(1.0, kMs, 0.0), Error);
  CHECK_THROWS_AS(anhysteretic_explicit(1.0, -1.0, 10.0), Error);
}

TEST_CASE("implicit anhysteretic curve") {
  CHECK(anhysteretic_implicit(0.0, kRow1, kMs) == 0.0);
  // Oracle: 50-digit bisection of M = Ms L((H + alpha M)/aJ).
  CHECK(anhysteretic_implicit(1000.0, kRow1, kMs) == doctest::Approx(963624.08856668).epsilon(1e-10));
  CHECK(anhysteretic_implicit(50.0, kRow1, kMs) == doctest::Approx(116727.1492942).epsilon(1e-10));
  CHECK(anhysteretic_implicit(5000.0, kRow1, kMs) == doctest::Approx(1375444.640182).epsilon(1e-10));
  CHECK(anhysteretic_implicit(-1000.0, kRow1, kMs) == -anhysteretic_implicit(1000.0, kRow1, kMs));

  SUBCASE("fixed point holds") {
    for (double H : {3.0, 120.0, 800.0, 4000.0, 9e4}) {
      const double M = anhysteretic_implicit(H, kRow1, kMs);
      CHECK(std::abs(M - kMs * langevin((H + kRow1.alpha * M) / kRow1.aJ)) <= 1e-9 * kMs);
    }
  }
  SUBCASE("alpha = 0 reduces to the explicit curve") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> h(-2e4, 2e4);
    for (int i = 0; i < 500; ++i) {
      const double H = h(rng);
      CHECK(std::abs(anhysteretic_implicit(H, {972.0, 0.0}, kMs) -
                     anhysteretic_explicit(H, kMs, 972.0)) <= 1e-9 * kMs);
    }
  }
  SUBCASE("strictly increasing") {
    double prev = -kMs;
    for (double H = -2e4; H <= 2e4; H += 37.0) {
      const double M = anhysteretic_implicit(H, kRow1, kMs);
      CHECK(M > prev);
      prev = M;
    }
  }
  SUBCASE("unstable coupling is rejected") {
    const AnhystereticParams bad{972.0, 3.0 * 972.0 / kMs};
    CHECK(coupling_ratio(bad, kMs) == doctest::Approx(1.0));
    CHECK_THROWS_AS(anhysteretic_implicit(10.0, bad, kMs), Error);
    try {
      anhysteretic_implicit(10.0, bad, kMs);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnstableParams);
    }
  }
}

TEST_CASE("anhysteretic slope") {
  CHECK(anhysteretic_slope(0.0, 0.0, {972.0, 0.0}, kMs) == doctest::Approx(kMs / (3.0 * 972.0)));
  CHECK(anhysteretic_slope(0.0, 0.0, {1246.0, 0.0}, kMs) == doctest::Approx(428.0363830926).epsilon(1e-12));

  for (const AnhystereticParams& p : {kRow1, AnhystereticParams{800.0, 1.4e-3},
                                      AnhystereticParams{1200.0, 1.8e-3}}) {
    // At coupling ratios near 1 the curve bends so sharply around H = 0 that
    // the truncation error of the difference quotient alone reaches 2e-4 at
    // h = 1e-3*aJ; a shorter step isolates the slope itself.
    const double h = (coupling_ratio(p, kMs) > 0.9 ? 1e-4 : 1e-3) * p.aJ;
    for (double H : {0.0, 15.0, 300.0, 1500.0, 7000.0, -2500.0}) {
      const double fd = (anhysteretic_implicit(H + h, p, kMs) - anhysteretic_implicit(H - h, p, kMs)) /
                        (2.0 * h);
      const double s = anhysteretic_slope(H, anhysteretic_implicit(H, p, kMs), p, kMs);
      CHECK(rel(s, fd) <= 1e-4);
    }
  }
}

TEST_CASE("linearized curve and moment relations") {
  const double T = 303.5;
  const double m1 = moment_from_susceptibility(428.0, kMs, T);
  CHECK(linearized_anhysteretic(0.0, m1, kMs, T) == 0.0);
  CHECK(linearized_anhysteretic(1.0, m1, kMs, T) == doctest::Approx(428.0).epsilon(1e-13));

  CHECK(moment_from_susceptibility(45.7954, kMs, T) == doctest::Approx(2.8632234536e-19).epsilon(1e-9));
  CHECK(moment_from_susceptibility(45.7954, kMs, T) == doctest::Approx(2.8738e-19).epsilon(0.01));
  CHECK(moment_from_susceptibility(91.5908, kMs, T) ==
        doctest::Approx(2.0 * moment_from_susceptibility(45.7954, kMs, T)).epsilon(1e-15));

  CHECK(shape_param_from_moment(2.8738e-19, T) == doctest::Approx(11603.141).epsilon(1e-7));
  CHECK(shape_param_from_moment(2.8738e-19, T) == doctest::Approx(1.1584e4).epsilon(0.002));
  CHECK(shape_param_from_moment(2.5512e-18, T) == doctest::Approx(1307.036).epsilon(1e-6));
  CHECK(shape_param_from_moment(2.5512e-18, T) == doctest::Approx(1.3049e3).epsilon(0.002));

  // With alpha = 0 the shape parameter follows from the initial slope alone.
  for (double chi : {1.0, 45.8, 428.0, 5000.0})
    CHECK(shape_param_from_moment(moment_from_susceptibility(chi, kMs, T), T) ==
          doctest::Approx(kMs / (3.0 * chi)).epsilon(1e-13));

  const AnhystereticParams p = AnhystereticParams::from_moment(2.5512e-18, 0.0021, T);
  CHECK(p.moment(T) == doctest::Approx(2.5512e-18).epsilon(1e-14));
  CHECK(p.alpha == 0.0021);
}

TEST_CASE("alpha from susceptibilities") {
  CHECK(alpha_from_susceptibilities(428.0, 428.0) == 0.0);
  CHECK(alpha_from_susceptibilities(45.7954, 428.03559595) == doctest::Approx(0.0195).epsilon(1e-8));
  const double chi_an = 1.0 / (1.0 / 406.5476 - 0.0021);
  CHECK(alpha_from_susceptibilities(406.5476, chi_an) == doctest::Approx(0.0021).epsilon(1e-10));
  CHECK_THROWS_AS(alpha_from_susceptibilities(0.0, 1.0), Error);
}

TEST_CASE("material validation") {
  CHECK_NOTHROW((MaterialSpec{1.6e6, 303.5, 1023.5}.validate()));
  CHECK_THROWS_AS((MaterialSpec{0.0, 303.5, {}}.validate()), Error);
  CHECK_THROWS_AS((MaterialSpec{1.6e6, -1.0, {}}.validate()), Error);
}

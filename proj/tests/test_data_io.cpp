#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "jafit/curve.hpp"
#include "jafit/features.hpp"
#include "jafit/hysteresis.hpp"

using namespace jafit;

namespace {
constexpr double kMs = 1.6e6;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

// Loop that walks the anhysteretic curve down and back up.
MagnetizationCurve single_valued_loop(int n) {
  const AnhystereticParams p{972.0, 1.4e-3};
  MagnetizationCurve loop;
  loop.kind = CurveKind::FullLoop;
  for (int i = 0; i <= 2 * n; ++i) {
    const double H = 5000.0 - 5000.0 * i / n;
    loop.samples.push_back({H, anhysteretic_implicit(H, p, kMs)});
  }
  for (int i = 1; i <= 2 * n; ++i) {
    const double H = -5000.0 + 5000.0 * i / n;
    loop.samples.push_back({H, anhysteretic_implicit(H, p, kMs)});
  }
  return loop;
}

MagnetizationCurve line(double slope, int n, double step) {
  MagnetizationCurve c;
  for (int i = 0; i <= n; ++i) c.samples.push_back({i * step, slope * i * step});
  return c;
}
}  // namespace

TEST_CASE("parse basic CSV") {
  const auto c = parse_curve_text("H,M\n10,4280\n20,8500\n", {});
  REQUIRE(c.size() == 2);
  CHECK(c.samples[0] == Sample{10.0, 4280.0});
  CHECK(c.samples[1] == Sample{20.0, 8500.0});
  CHECK(c.source_units == MagUnit::MAPerMeter);
}

TEST_CASE("delimiters, comments and column selection") {
  CHECK(parse_curve_text("# comment\n\n1;2\n3;4\n", {}).size() == 2);
  CHECK(parse_curve_text("1\t2\n3\t4\n", {}).samples[1] == Sample{3.0, 4.0});
  CHECK(parse_curve_text("  1   2\n 3  4 \n", {}).samples[1] == Sample{3.0, 4.0});
  CHECK(parse_curve_text("\xEF\xBB\xBFH,M\r\n1,2\r\n", {}).samples[0] == Sample{1.0, 2.0});

  ParseOptions o;
  o.h_column = 2;
  o.m_column = 0;
  o.delimiter = '|';
  const auto c = parse_curve_text("7|x|1\n8|y|2\n", o);
  CHECK(c.samples[0] == Sample{1.0, 7.0});

  ParseOptions skip;
  skip.skip_rows = 2;
  CHECK(parse_curve_text("title\nH,M\n1,2\n", skip).size() == 1);
}

TEST_CASE("parse errors") {
  const std::string msg = message_of([] { parse_curve_text("H,M\n1,2\n3,abc\n", {}); });
  CHECK(msg.find("ParseError") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(code_of([] { parse_curve_text("H,M\n1,2\n3,abc\n", {}); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_curve_text("1,2\n3\n", {}); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_curve_text("# nothing\n\n", {}); }) == ErrorCode::EmptyFile);
  CHECK(code_of([] { parse_unit("oersted"); }) == ErrorCode::UnitError);

  ParseOptions with_ms;
  with_ms.Ms = 1e3;
  CHECK(code_of([&] { parse_curve_text("1,5000\n", with_ms); }) == ErrorCode::UnitError);

  ParseOptions loop;
  loop.kind = CurveKind::FirstMagnetization;
  CHECK(code_of([&] { parse_curve_text("1,2\n1,3\n", loop); }) == ErrorCode::NonMonotone);
}

TEST_CASE("anhysteretic rows are sorted by field") {
  const auto c = parse_curve_text("30,3\n10,1\n20,2\n", {});
  CHECK(c.fields() == std::vector<double>{10.0, 20.0, 30.0});
  ParseOptions loop;
  loop.kind = CurveKind::FullLoop;
  CHECK(parse_curve_text("30,3\n10,1\n20,2\n", loop).fields() == std::vector<double>{30.0, 10.0, 20.0});
}

TEST_CASE("unit conversion") {
  CHECK(parse_unit("j") == MagUnit::JTesla);
  CHECK(parse_unit("b") == MagUnit::BTesla);
  CHECK(parse_unit("m") == MagUnit::MAPerMeter);

  ParseOptions j;
  j.unit = MagUnit::JTesla;
  CHECK(parse_curve_text("10,1.2566e-2\n", j).samples[0].M == doctest::Approx(1e4).epsilon(1e-4));
  ParseOptions b;
  b.unit = MagUnit::BTesla;
  const double B = kMu0 * (10.0 + 1e4);
  char cell[64];
  std::snprintf(cell, sizeof(cell), "10,%.17g\n", B);
  CHECK(parse_curve_text(cell, b).samples[0].M == doctest::Approx(1e4).epsilon(1e-12));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> m(-kMs, kMs);
  std::uniform_real_distribution<double> h(-1e5, 1e5);
  for (int i = 0; i < 1000; ++i) {
    const double M = m(rng);
    const double H = h(rng);
    for (MagUnit u : {MagUnit::MAPerMeter, MagUnit::JTesla, MagUnit::BTesla}) {
      const double back = to_magnetization(from_magnetization(M, H, u), H, u);
      CHECK(std::abs(back - M) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                       std::max(std::abs(M), std::abs(H)));
    }
  }
}

TEST_CASE("column writer round trip") {
  const std::vector<double> a{0.1, -2.5e-7, 1e300};
  const std::vector<double> b{3.0, 0.0, -1.0 / 3.0};
  const std::string text = format_columns({"H", "M"}, {a, b});
  CHECK(text.rfind("H,M\n", 0) == 0);
  const auto c = parse_curve_text(text, {.kind = CurveKind::FullLoop});
  REQUIRE(c.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(c.samples[i].H == a[i]);
    CHECK(c.samples[i].M == b[i]);
  }
  CHECK(code_of([&] { format_columns({"H"}, {a, b}); }) == ErrorCode::LengthMismatch);

  const auto path = std::filesystem::temp_directory_path() / "jafit_io_roundtrip.csv";
  write_columns(path, {"H", "M"}, {a, b});
  CHECK(parse_curve(path, {.kind = CurveKind::FullLoop}).samples == c.samples);
  std::ofstream(path, std::ios::trunc).close();
  CHECK(code_of([&] { parse_curve(path, {}); }) == ErrorCode::EmptyFile);
  std::filesystem::remove(path);
  CHECK(code_of([&] { parse_curve(path, {}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("slope at origin") {
  CHECK(slope_at_origin(line(428.0, 10, 2.0), 5) == doctest::Approx(428.0).epsilon(1e-14));
  CHECK(code_of([] { slope_at_origin(line(428.0, 3, 2.0), 5); }) == ErrorCode::InsufficientSamples);
}

TEST_CASE("features of a single-valued loop") {
  const MagnetizationCurve loop = single_valued_loop(50);
  const LoopFeatures f = extract_features(line(50.0, 20, 1.0), loop, line(500.0, 20, 1.0));
  CHECK(std::abs(f.Hc) <= 1e-9);
  CHECK(std::abs(f.Mr) <= 1e-6);
  CHECK(f.Hm == 5000.0);
  CHECK(f.chi_in == doctest::Approx(50.0));
  CHECK(f.chi_an == doctest::Approx(500.0));
  CHECK(f.chi_max == doctest::Approx(f.chi_r));
}

TEST_CASE("short branches are rejected") {
  const MagnetizationCurve loop = single_valued_loop(2);  // 5 points per branch
  CHECK(code_of([&] { split_branches(loop); }) == ErrorCode::InsufficientSamples);
  MagnetizationCurve up;
  for (int i = 0; i < 40; ++i) up.samples.push_back({i * 10.0, i * 100.0});
  CHECK(code_of([&] { split_branches(up); }) == ErrorCode::MissingBranch);
}

TEST_CASE("features of a simulated loop") {
  const HysteresisParams p{972.0, 1.4e-3, 0.1, 500.0, kMs};
  const int n = 1000;
  const double step = 5000.0 / n;
  const auto sim = integrate(p, FieldWaveform::symmetric_cycles(5000.0, 3, n));
  MagnetizationCurve loop;
  loop.kind = CurveKind::FullLoop;
  loop.samples.assign(sim.samples.end() - (2 * n + 1), sim.samples.end());
  MagnetizationCurve first;
  first.samples.assign(sim.samples.begin(), sim.samples.begin() + n + 1);

  const LoopFeatures f = extract_features(first, loop, first);
  const LoopBranches br = split_branches(loop);

  // Zero crossing from the raw simulated samples.
  double raw = NAN;
  for (std::size_t i = 1; i < loop.size(); ++i) {
    const auto& a = loop.samples[i - 1];
    const auto& b = loop.samples[i];
    if (b.H < a.H && a.M > 0.0 && b.M <= 0.0) {
      raw = std::abs(a.H + (b.H - a.H) * a.M / (a.M - b.M));
      break;
    }
  }
  CHECK(std::abs(f.Hc - raw) <= step);
  CHECK(std::abs(std::abs(br.ascending.zero_crossing()) - f.Hc) <= step);
  CHECK(f.Hm == doctest::Approx(5000.0));
  CHECK(f.Mr > 0.0);
  CHECK(f.Mr < f.Mm);
  CHECK(f.chi_max > 0.0);
  CHECK(f.chi_r > 0.0);
  CHECK_NOTHROW(f.validate());
}

#pragma once

// Magnetization curves and their delimited-text representation.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jafit {

/// Unit of the magnetization column in an input file.
enum class MagUnit {
  MAPerMeter,  // M in A/m
  JTesla,      // polarization J = mu0*M in T
  BTesla,      // flux density B = mu0*(H + M) in T
};

enum class CurveKind { Anhysteretic, FirstMagnetization, LoopBranch, FullLoop };

std::string_view to_string(MagUnit unit);
std::string_view to_string(CurveKind kind);
/// Accepts "m", "j", "b" (CLI spelling) as well as the to_string names.
MagUnit parse_unit(std::string_view text);

struct Sample {
  double H;  // A/m
  double M;  // A/m

  bool operator==(const Sample&) const = default;
};

struct MagnetizationCurve {
  std::vector<Sample> samples;
  MagUnit source_units = MagUnit::MAPerMeter;
  CurveKind kind = CurveKind::Anhysteretic;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::vector<double> fields() const;
  std::vector<double> magnetizations() const;

  /// Kinds whose field column must be strictly increasing.
  bool requires_monotone() const;

  /// Checks finiteness, monotone H where required, and |M| <= 1.1*Ms when Ms
  /// is known.
  void validate(std::optional<double> Ms = std::nullopt) const;
};

/// Converts a value in `unit` at field H into magnetization in A/m.
double to_magnetization(double value, double H, MagUnit unit);
/// Inverse of to_magnetization.
double from_magnetization(double M, double H, MagUnit unit);

struct ParseOptions {
  /// Column delimiter; auto-detected among ',', ';' and tab (falling back to
  /// whitespace) when unset.
  std::optional<char> delimiter;
  std::size_t h_column = 0;
  std::size_t m_column = 1;
  /// Leading rows to skip. When unset, a first row that does not parse as
  /// numbers is treated as a header.
  std::optional<std::size_t> skip_rows;
  MagUnit unit = MagUnit::MAPerMeter;
  CurveKind kind = CurveKind::Anhysteretic;
  std::optional<double> Ms;
};

MagnetizationCurve parse_curve_text(std::string_view text, const ParseOptions& options);
MagnetizationCurve parse_curve(const std::filesystem::path& path, const ParseOptions& options);

/// Writes named columns as comma-separated text with a header row. Values are
/// printed with round-trip precision.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& names,
                   const std::vector<std::vector<double>>& columns);
std::string format_columns(const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& columns);

}  // namespace jafit

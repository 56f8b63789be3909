#include "jafit/curve.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "jafit/errors.hpp"
#include "jafit/magnetics.hpp"

namespace jafit {

std::string_view to_string(MagUnit unit) {
  switch (unit) {
    case MagUnit::MAPerMeter: return "M_A_per_m";
    case MagUnit::JTesla: return "J_tesla";
    case MagUnit::BTesla: return "B_tesla";
  }
  return "unknown";
}

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::Anhysteretic: return "anhysteretic";
    case CurveKind::FirstMagnetization: return "first_magnetization";
    case CurveKind::LoopBranch: return "loop_branch";
    case CurveKind::FullLoop: return "full_loop";
  }
  return "unknown";
}

MagUnit parse_unit(std::string_view text) {
  if (text == "m" || text == "M_A_per_m") return MagUnit::MAPerMeter;
  if (text == "j" || text == "J_tesla") return MagUnit::JTesla;
  if (text == "b" || text == "B_tesla") return MagUnit::BTesla;
  throw Error(ErrorCode::UnitError, "unknown magnetization unit '" + std::string(text) + "'");
}

std::vector<double> MagnetizationCurve::fields() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.H);
  return out;
}

std::vector<double> MagnetizationCurve::magnetizations() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.M);
  return out;
}

bool MagnetizationCurve::requires_monotone() const {
  return kind == CurveKind::Anhysteretic || kind == CurveKind::FirstMagnetization;
}

void MagnetizationCurve::validate(std::optional<double> Ms) const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.H) || !std::isfinite(s.M))
      throw Error(ErrorCode::ParseError, "non-finite value in sample " + std::to_string(i + 1));
    if (Ms && std::abs(s.M) > 1.1 * *Ms)
      throw Error(ErrorCode::UnitError, "|M| = " + std::to_string(std::abs(s.M)) +
                                            " exceeds 1.1*Ms in sample " + std::to_string(i + 1) +
                                            "; check the magnetization unit");
    if (requires_monotone() && i > 0 && !(s.H > samples[i - 1].H))
      throw Error(ErrorCode::NonMonotone,
                  "field is not strictly increasing at sample " + std::to_string(i + 1));
  }
}

double to_magnetization(double value, double H, MagUnit unit) {
  switch (unit) {
    case MagUnit::MAPerMeter: return value;
    case MagUnit::JTesla: return value / kMu0;
    case MagUnit::BTesla: return value / kMu0 - H;
  }
  throw Error(ErrorCode::UnitError, "unknown unit");
}

double from_magnetization(double M, double H, MagUnit unit) {
  switch (unit) {
    case MagUnit::MAPerMeter: return M;
    case MagUnit::JTesla: return kMu0 * M;
    case MagUnit::BTesla: return kMu0 * (H + M);
  }
  throw Error(ErrorCode::UnitError, "unknown unit");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\v\f");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\v\f");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view line, std::optional<char> delimiter) {
  std::vector<std::string_view> cells;
  if (delimiter) {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(*delimiter, start);
      cells.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  } else {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) cells.push_back(line.substr(start, i - start));
    }
  }
  return cells;
}

std::optional<char> detect_delimiter(std::string_view line) {
  for (char c : {',', ';', '\t'})
    if (line.find(c) != std::string_view::npos) return c;
  return std::nullopt;
}

}  // namespace

MagnetizationCurve parse_curve_text(std::string_view text, const ParseOptions& options) {
  MagnetizationCurve curve;
  curve.source_units = options.unit;
  curve.kind = options.kind;

  std::optional<char> delimiter = options.delimiter;
  bool delimiter_known = options.delimiter.has_value();
  std::size_t line_no = 0;
  std::size_t content_rows = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    std::string_view line = trim(raw);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line = trim(line.substr(3));
    if (line.empty() || line.front() == '#') continue;
    ++content_rows;
    if (options.skip_rows && content_rows <= *options.skip_rows) continue;
    if (!delimiter_known) {
      delimiter = detect_delimiter(line);
      delimiter_known = true;
    }

    const auto cells = split(line, delimiter);
    const std::size_t needed = std::max(options.h_column, options.m_column) + 1;
    std::optional<double> h;
    std::optional<double> v;
    if (cells.size() >= needed) {
      h = parse_number(cells[options.h_column]);
      v = parse_number(cells[options.m_column]);
    }
    if (!h || !v) {
      if (!options.skip_rows && content_rows == 1) continue;  // header row
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": expected numeric values in columns " +
                      std::to_string(options.h_column + 1) + " and " +
                      std::to_string(options.m_column + 1));
    }
    if (!std::isfinite(*h) || !std::isfinite(*v))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": non-finite value");
    curve.samples.push_back({*h, to_magnetization(*v, *h, options.unit)});
  }

  if (curve.samples.empty()) throw Error(ErrorCode::EmptyFile, "no data rows found");
  if (curve.requires_monotone())
    std::stable_sort(curve.samples.begin(), curve.samples.end(),
                     [](const Sample& a, const Sample& b) { return a.H < b.H; });
  curve.validate(options.Ms);
  return curve;
}

MagnetizationCurve parse_curve(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (trim(text).empty()) throw Error(ErrorCode::EmptyFile, "'" + path.string() + "' is empty");
  return parse_curve_text(text, options);
}

std::string format_columns(const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size())
    throw Error(ErrorCode::LengthMismatch, "column names and data differ in count");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw Error(ErrorCode::LengthMismatch, "columns differ in length");

  std::string out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out += ',';
    out += names[j];
  }
  out += '\n';
  char buf[64];
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out += ',';
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), columns[j][i]);
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

void write_columns(const std::filesystem::path& path, const std::vector<std::string>& names,
                   const std::vector<std::vector<double>>& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  out << format_columns(names, columns);
}

}  // namespace jafit

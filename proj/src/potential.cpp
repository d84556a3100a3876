#include "cantor/potential.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>

#include "cantor/error.hpp"

namespace cantor {

PiecewisePotential::PiecewisePotential(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2) {
    throw ValidationError("potential needs at least two breakpoints");
  }
  if (values_.size() + 1 != breakpoints_.size()) {
    throw ValidationError("potential needs exactly one value per segment");
  }
  if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0) {
    throw ValidationError("breakpoints must span exactly [0, 1]");
  }
  for (std::size_t j = 0; j + 1 < breakpoints_.size(); ++j) {
    if (!(breakpoints_[j] < breakpoints_[j + 1])) {
      throw ValidationError("breakpoints must be strictly increasing (segment " +
                            std::to_string(j) + ")");
    }
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!(values_[j] >= -1.0 && values_[j] <= 1.0)) {
      throw ValidationError("potential value outside [-1, 1] (segment " + std::to_string(j) + ")");
    }
  }
}

double PiecewisePotential::min_value() const noexcept {
  return *std::min_element(values_.begin(), values_.end());
}

double PiecewisePotential::max_value() const noexcept {
  return *std::max_element(values_.begin(), values_.end());
}

double PiecewisePotential::min_segment_width() const noexcept {
  double w = 1.0;
  for (std::size_t j = 0; j < values_.size(); ++j) w = std::min(w, segment_width(j));
  return w;
}

std::size_t PiecewisePotential::segment_index(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("sample position outside [0, 1]");
  }
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto j = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return std::min(j, values_.size() - 1);
}

void CantorSpec::validate() const {
  if (order < 0) throw ValidationError("cantor order must be nonnegative");
  if (order > kMaxCantorOrder) {
    throw ValidationError("cantor order above " + std::to_string(kMaxCantorOrder));
  }
  if (!(well_value >= -1.0 && well_value <= 1.0 && barrier_value >= -1.0 && barrier_value <= 1.0)) {
    throw ValidationError("well and barrier values must lie in [-1, 1]");
  }
  if (!(well_value < barrier_value)) {
    throw ValidationError("well value must be below barrier value");
  }
  if (!(removal_fraction > 0.0 && removal_fraction < 1.0)) {
    throw ValidationError("removal fraction must lie in (0, 1)");
  }
}

namespace {

// Middle thirds on the integer lattice {0, ..., 3^N}; divided by 3^N once at
// the end so every breakpoint is the correctly rounded ternary rational.
std::vector<double> ternary_breakpoints(int order) {
  std::vector<std::int64_t> wells{0, 1};  // flattened [start, end) pairs
  std::int64_t scale = 1;
  for (int k = 0; k < order; ++k) {
    scale *= 3;
    std::vector<std::int64_t> next;
    next.reserve(wells.size() * 2);
    for (std::size_t i = 0; i < wells.size(); i += 2) {
      const std::int64_t a = wells[i] * 3;
      const std::int64_t b = wells[i + 1] * 3;
      const std::int64_t third = (b - a) / 3;
      next.insert(next.end(), {a, a + third, b - third, b});
    }
    wells = std::move(next);
  }
  std::vector<double> out;
  out.reserve(wells.size());
  const auto denom = static_cast<double>(scale);
  for (std::size_t i = 0; i < wells.size(); ++i) {
    // Interior well boundaries appear once; wells never touch each other.
    out.push_back(static_cast<double>(wells[i]) / denom);
  }
  return out;
}

std::vector<double> generic_breakpoints(int order, double removal_fraction) {
  std::vector<double> wells{0.0, 1.0};
  for (int k = 0; k < order; ++k) {
    std::vector<double> next;
    next.reserve(wells.size() * 2);
    for (std::size_t i = 0; i < wells.size(); i += 2) {
      const double a = wells[i];
      const double b = wells[i + 1];
      const double flank = 0.5 * (1.0 - removal_fraction) * (b - a);
      next.insert(next.end(), {a, a + flank, b - flank, b});
    }
    wells = std::move(next);
  }
  return wells;
}

}  // namespace

PiecewisePotential build_cantor_potential(const CantorSpec& spec) {
  spec.validate();
  const std::vector<double> edges = spec.removal_fraction == 1.0 / 3.0
                                        ? ternary_breakpoints(spec.order)
                                        : generic_breakpoints(spec.order, spec.removal_fraction);
  // edges = w0s, w0e, w1s, w1e, ...; gaps between consecutive wells are barriers.
  std::vector<double> values;
  values.reserve(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    values.push_back(i % 2 == 0 ? spec.well_value : spec.barrier_value);
  }
  return PiecewisePotential(edges, std::move(values));
}

double sample_potential(const PiecewisePotential& p, double x) {
  return p.values()[p.segment_index(x)];
}

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string serialize_potential(const PiecewisePotential& p) {
  std::string out;
  for (std::size_t j = 0; j < p.segment_count(); ++j) {
    out += format_real(p.segment_start(j));
    out += ' ';
    out += format_real(p.segment_end(j));
    out += ' ';
    out += format_real(p.values()[j]);
    out += '\n';
  }
  return out;
}

namespace {

bool parse_real(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return res.ec == std::errc() && res.ptr == token.data() + token.size() && std::isfinite(out);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

PiecewisePotential parse_potential(std::string_view text) {
  std::vector<double> breakpoints;
  std::vector<double> values;
  std::size_t line_no = 0;
  std::size_t last_record_line = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 3) throw ParseError(line_no, "expected 3 fields \"start end value\"");

    double start = 0.0;
    double end = 0.0;
    double value = 0.0;
    if (!parse_real(tokens[0], start) || !parse_real(tokens[1], end) ||
        !parse_real(tokens[2], value)) {
      throw ParseError(line_no, "malformed number");
    }
    if (breakpoints.empty()) {
      if (start != 0.0) throw ParseError(line_no, "first segment must start at 0");
      breakpoints.push_back(start);
    } else if (start != breakpoints.back()) {
      throw ParseError(line_no, start < breakpoints.back() ? "segment overlaps its predecessor"
                                                           : "gap after previous segment");
    }
    if (!(end > start)) throw ParseError(line_no, "segment end must exceed its start");
    if (!(value >= -1.0 && value <= 1.0)) throw ParseError(line_no, "value outside [-1, 1]");
    breakpoints.push_back(end);
    values.push_back(value);
    last_record_line = line_no;
  }
  if (values.empty()) throw ParseError(line_no, "no segments");
  if (breakpoints.back() != 1.0) throw ParseError(last_record_line, "last segment must end at 1");
  return PiecewisePotential(std::move(breakpoints), std::move(values));
}

}  // namespace cantor

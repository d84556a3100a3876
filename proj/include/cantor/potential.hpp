#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cantor {

/// Piecewise-constant dimensionless potential v(x) on the unit interval
/// between two infinite walls at x = 0 and x = 1.
///
/// Segment j covers [breakpoints[j], breakpoints[j+1]); the last segment
/// also owns x = 1. Immutable once constructed.
class PiecewisePotential {
 public:
  /// Throws ValidationError unless breakpoints run strictly increasing from
  /// 0 to 1, there is one value per segment, and every value is in [-1, 1].
  PiecewisePotential(std::vector<double> breakpoints, std::vector<double> values);

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t segment_count() const noexcept { return values_.size(); }

  double segment_start(std::size_t j) const { return breakpoints_[j]; }
  double segment_end(std::size_t j) const { return breakpoints_[j + 1]; }
  double segment_width(std::size_t j) const { return breakpoints_[j + 1] - breakpoints_[j]; }

  double min_value() const noexcept;
  double max_value() const noexcept;
  double min_segment_width() const noexcept;

  /// Index of the segment owning x. Throws DomainError outside [0, 1].
  std::size_t segment_index(double x) const;

  friend bool operator==(const PiecewisePotential&, const PiecewisePotential&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// Parameters of the middle-removal construction. Retained intervals are
/// wells, removed intervals are barriers.
struct CantorSpec {
  int order = 4;
  double well_value = -1.0;
  double barrier_value = 1.0;
  double removal_fraction = 1.0 / 3.0;

  /// Throws ValidationError when the fields are inconsistent.
  void validate() const;
};

/// Largest order accepted by build_cantor_potential (2^(N+1) - 1 segments).
inline constexpr int kMaxCantorOrder = 20;

PiecewisePotential build_cantor_potential(const CantorSpec& spec);

/// v(x) with half-open segments and x = 1 owned by the last segment.
double sample_potential(const PiecewisePotential& p, double x);

/// One "start end value" record per line, 17 significant digits.
std::string serialize_potential(const PiecewisePotential& p);

/// Inverse of serialize_potential. Blank lines and '#' comments are
/// skipped. Throws ParseError naming the offending line.
PiecewisePotential parse_potential(std::string_view text);

/// Shortest round-trip-safe rendering at 17 significant digits ("%.17g").
std::string format_real(double value);

}  // namespace cantor

#include <doctest.h>

#include <cmath>
#include <random>

#include "cantor/error.hpp"
#include "cantor/potential.hpp"

using namespace cantor;

namespace {

PiecewisePotential cantor_order(int n) {
  CantorSpec spec;
  spec.order = n;
  return build_cantor_potential(spec);
}

}  // namespace

TEST_CASE("order 0 is a single well") {
  const auto p = cantor_order(0);
  REQUIRE(p.segment_count() == 1);
  CHECK(p.segment_start(0) == 0.0);
  CHECK(p.segment_end(0) == 1.0);
  CHECK(p.values()[0] == -1.0);
  CHECK(serialize_potential(p) == "0 1 -1\n");
}

TEST_CASE("order 1 removes the middle third") {
  const auto p = cantor_order(1);
  REQUIRE(p.segment_count() == 3);
  CHECK(p.breakpoints()[1] == 1.0 / 3.0);
  CHECK(p.breakpoints()[2] == 2.0 / 3.0);
  CHECK(p.values()[0] == -1.0);
  CHECK(p.values()[1] == 1.0);
  CHECK(p.values()[2] == -1.0);
  CHECK(sample_potential(p, 0.5) == 1.0);
  CHECK(sample_potential(p, 1.0 / 3.0) == 1.0);
  CHECK(sample_potential(p, 1.0) == -1.0);
  CHECK(sample_potential(p, 0.0) == -1.0);
}

TEST_CASE("order 2 wells") {
  const auto p = cantor_order(2);
  REQUIRE(p.segment_count() == 7);
  const std::vector<double> expected{0.0, 1.0 / 9, 2.0 / 9, 1.0 / 3, 2.0 / 3, 7.0 / 9, 8.0 / 9, 1.0};
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(p.breakpoints()[i] == expected[i]);
  for (std::size_t j = 0; j < 7; ++j) CHECK(p.values()[j] == (j % 2 == 0 ? -1.0 : 1.0));
}

TEST_CASE("well count, widths and measure are exact ternary values") {
  for (int n = 0; n <= 10; ++n) {
    CAPTURE(n);
    const auto p = cantor_order(n);
    CHECK(p.segment_count() == (std::size_t{2} << n) - 1);
    std::size_t wells = 0;
    double measure = 0.0;
    const double width = std::pow(3.0, -n);
    for (std::size_t j = 0; j < p.segment_count(); ++j) {
      if (p.values()[j] == -1.0) {
        ++wells;
        measure += p.segment_width(j);
        CHECK(std::abs(p.segment_width(j) - width) <= 1e-15);
      }
    }
    CHECK(wells == std::size_t{1} << n);
    CHECK(std::abs(measure - std::pow(2.0 / 3.0, n)) <= 1e-15);
    CHECK(p.min_value() == -1.0);
    CHECK(p.max_value() == (n == 0 ? -1.0 : 1.0));
  }
}

TEST_CASE("sampling agrees with the segment table at random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n = 0; n <= 8; ++n) {
    const auto p = cantor_order(n);
    const auto b = p.breakpoints();
    for (int trial = 0; trial < 10000; ++trial) {
      const double x = unit(rng);
      std::size_t j = 0;
      while (j + 1 < p.segment_count() && x >= b[j + 1]) ++j;
      REQUIRE(sample_potential(p, x) == p.values()[j]);
    }
  }
}

TEST_CASE("sampling outside the unit interval is a domain error") {
  const auto p = cantor_order(2);
  CHECK_THROWS_AS(sample_potential(p, -1e-12), DomainError);
  CHECK_THROWS_AS(sample_potential(p, 1.0 + 1e-12), DomainError);
  CHECK_THROWS_AS(sample_potential(p, std::nan("")), DomainError);
}

TEST_CASE("generic removal fraction") {
  CantorSpec spec;
  spec.order = 2;
  spec.removal_fraction = 0.5;
  spec.barrier_value = 0.25;
  const auto p = build_cantor_potential(spec);
  REQUIRE(p.segment_count() == 7);
  CHECK(p.breakpoints()[1] == doctest::Approx(0.0625));
  CHECK(p.breakpoints()[3] == doctest::Approx(0.25));
  CHECK(p.max_value() == 0.25);
}

TEST_CASE("invalid specs are rejected") {
  CantorSpec spec;
  spec.order = -1;
  CHECK_THROWS_AS(build_cantor_potential(spec), ValidationError);
  spec = {};
  spec.well_value = 1.0;
  CHECK_THROWS_AS(build_cantor_potential(spec), ValidationError);
  spec = {};
  spec.removal_fraction = 1.0;
  CHECK_THROWS_AS(build_cantor_potential(spec), ValidationError);
  spec = {};
  spec.barrier_value = 1.5;
  CHECK_THROWS_AS(build_cantor_potential(spec), ValidationError);
  spec = {};
  spec.order = kMaxCantorOrder + 1;
  CHECK_THROWS_AS(build_cantor_potential(spec), ValidationError);
}

TEST_CASE("constructor invariants") {
  CHECK_THROWS_AS(PiecewisePotential({0.0, 0.5}, {-1.0}), ValidationError);
  CHECK_THROWS_AS(PiecewisePotential({0.0, 0.5, 0.5, 1.0}, {-1.0, 1.0, -1.0}), ValidationError);
  CHECK_THROWS_AS(PiecewisePotential({0.0, 1.0}, {-2.0}), ValidationError);
  CHECK_THROWS_AS(PiecewisePotential({0.0, 1.0}, {-1.0, 1.0}), ValidationError);
  CHECK_NOTHROW(PiecewisePotential({0.0, 0.25, 1.0}, {-1.0, 0.5}));
}

TEST_CASE("serialize and parse round-trip bit-exactly") {
  for (int n = 0; n <= 8; ++n) {
    const auto p = cantor_order(n);
    CHECK(parse_potential(serialize_potential(p)) == p);
  }
  CantorSpec spec;
  spec.order = 5;
  spec.removal_fraction = 0.2;
  spec.well_value = -0.7;
  const auto q = build_cantor_potential(spec);
  CHECK(parse_potential(serialize_potential(q)) == q);
}

TEST_CASE("parser skips comments and blank lines") {
  const auto p = parse_potential("# header\n\n0 0.5 -1   # left\n0.5 1 1\n");
  CHECK(p == PiecewisePotential({0.0, 0.5, 1.0}, {-1.0, 1.0}));
}

TEST_CASE("parse errors name the line") {
  const auto line_of = [](const std::string& text) {
    try {
      parse_potential(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("0 0.6 -1\n0.5 1 1\n") == 2);
  CHECK(line_of("0 0.5 -1\n0.6 1 1\n") == 2);
  CHECK(line_of("0 0.5 -1\n0.5 1 x\n") == 2);
  CHECK(line_of("0 0.5\n") == 1);
  CHECK(line_of("0.1 1 -1\n") == 1);
  CHECK(line_of("0 1 3\n") == 1);
  CHECK(line_of("0 0.5 -1 7\n") == 1);
  CHECK_THROWS_AS(parse_potential("0 0.5 -1\n"), ParseError);
  CHECK_THROWS_AS(parse_potential(""), ParseError);
}

TEST_CASE("format_real keeps 17 significant digits") {
  CHECK(format_real(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_real(-1.0) == "-1");
  CHECK(format_real(0.0) == "0");
}

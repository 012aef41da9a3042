#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vcert/semialg.hpp"

using namespace vcert;

TEST_CASE("box_set constraints") {
  auto s = VariableSpace::states(2);
  auto X = box_set(s, {{-4, -4}, {4, 4}});
  REQUIRE(X.constraints().size() == 2);
  // (x1+4)(4-x1) at x1 = 0: 16
  CHECK(X.constraints()[0].eval({0, 0}) == doctest::Approx(16.0));
  CHECK(X.contains({3.9, -3.9}));
  CHECK_FALSE(X.contains({4.1, 0}));

  auto s1 = VariableSpace::states(1);
  auto U = box_set(s1, {{0}, {1}});
  CHECK(U.constraints()[0].eval({0.5}) == doctest::Approx(0.25));
  CHECK(U.contains({1.0}));
  CHECK_FALSE(U.contains({1.01}));

  auto B = box_set(s, {{0, 0.5}, {0.5, 1}});
  CHECK(B.constraints()[0].eval({0.25, 0.75}) > 0);
  CHECK(B.constraints()[1].eval({0.25, 0.75}) > 0);

  CHECK_THROWS_AS(box_set(s, {{1, 0}, {0, 1}}), Error);
}

TEST_CASE("product_set lifts constraints") {
  auto s = VariableSpace::states(2);
  auto X = box_set(s, {{-4, -4}, {4, 4}});
  auto XX = product_set(X, X);
  CHECK(XX.space().arity() == 4);
  CHECK(XX.constraints().size() == 4);
  CHECK(XX.contains({0, 0, 3, -3}));
  CHECK_FALSE(XX.contains({0, 0, 5, 0}));

  auto whole = SemiAlgebraicSet(s, {});
  auto lifted = product_set(whole, X);
  CHECK(lifted.constraints().size() == 2);

  auto X0 = box_set(s, {{0, -3.5}, {0.5, -3}});
  auto Xu1 = box_set(s, {{-4, 1}, {-1, 4}});
  auto prod = product_set(X0, Xu1);
  CHECK(prod.constraints().size() == 4);
  CHECK(prod.contains({0.25, -3.25, -2, 2}));
}

TEST_CASE("product membership equivalence") {
  auto s = VariableSpace::states(2);
  auto A = box_set(s, {{-1, 0}, {1, 2}});
  auto B = box_set(s, {{0.5, -1}, {2, 0.5}});
  auto P = product_set(A, B);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-2, 3);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> a = {d(rng), d(rng)}, b = {d(rng), d(rng)};
    std::vector<double> ab = {a[0], a[1], b[0], b[1]};
    CHECK(P.contains(ab) == (A.contains(a) && B.contains(b)));
  }
}

TEST_CASE("box_complement tilings") {
  // 1D: [0,2] minus [0,0.7] -> [0.7,2]
  auto pieces = box_complement({{0}, {2}}, {{0}, {0.7}});
  REQUIRE(pieces.size() == 1);
  CHECK(pieces[0].lo[0] == doctest::Approx(0.7));
  CHECK(pieces[0].hi[0] == doctest::Approx(2.0));

  // 2D: [0,2]^2 minus [0,1]^2 -> two pieces with total area 3
  auto p2 = box_complement({{0, 0}, {2, 2}}, {{0, 0}, {1, 1}});
  REQUIRE(p2.size() == 2);
  double area = 0;
  for (const auto& b : p2) area += b.volume();
  CHECK(area == doctest::Approx(3.0).epsilon(1e-12));

  CHECK_THROWS_AS(box_complement({{0}, {1}}, {{0}, {1}}), Error);
  CHECK_THROWS_AS(box_complement({{0}, {1}}, {{-1}, {0.5}}), Error);
}

TEST_CASE("box_complement pieces are interior-disjoint and exhaustive") {
  Box outer{{-4, -4}, {4, 4}};
  Box inner{{-1, 0}, {2, 3}};
  auto pieces = box_complement(outer, inner);
  double vol = 0;
  for (const auto& b : pieces) vol += b.volume();
  CHECK(vol == doctest::Approx(outer.volume() - inner.volume()).epsilon(1e-9));
  for (size_t i = 0; i < pieces.size(); ++i)
    for (size_t j = i + 1; j < pieces.size(); ++j) {
      // overlap must have zero volume
      double overlap = 1.0;
      for (int d = 0; d < 2; ++d) {
        double lo = std::max(pieces[i].lo[d], pieces[j].lo[d]);
        double hi = std::min(pieces[i].hi[d], pieces[j].hi[d]);
        overlap *= std::max(0.0, hi - lo);
      }
      CHECK(overlap == doctest::Approx(0.0));
    }
}

TEST_CASE("subtract_boxes keeps untouched pieces whole") {
  // Kuramoto X \ X_VF tiling: subtracting in the right order gives 3 pieces.
  Box X{{0, 0, 0}, {2, 2, 2}};
  Box vf2{{0, 1.45, 1.45}, {2, 2, 2}};
  Box vf1{{0, 0, 0}, {0.7, 0.7, 2}};
  auto tiling = subtract_boxes(X, {vf2, vf1});
  CHECK(tiling.size() == 3);
  double vol = 0;
  for (const auto& b : tiling) vol += b.volume();
  CHECK(vol == doctest::Approx(X.volume() - vf1.volume() - vf2.volume()).epsilon(1e-9));
}

TEST_CASE("sampling a box") {
  auto s = VariableSpace::states(2);
  auto X = box_set(s, {{-1, -1}, {1, 1}});
  auto r = sample_set(X, 500, 42);
  CHECK(r.points.size() == 500);
  for (const auto& p : r.points) CHECK(X.min_constraint_value(p) >= 0.0);

  // determinism
  auto r2 = sample_set(X, 500, 42);
  CHECK(r.points == r2.points);
}

TEST_CASE("sampling the unit disk estimates pi/4") {
  auto s = VariableSpace::states(2);
  auto x = Polynomial::variable(s, 0), y = Polynomial::variable(s, 1);
  auto disk = SemiAlgebraicSet(s, {Polynomial::constant(s, 1.0) - x * x - y * y});
  disk.set_bounding_box({{-1, -1}, {1, 1}});
  auto r = sample_set(disk, 10000, 7);
  for (const auto& p : r.points) CHECK(disk.min_constraint_value(p) >= 0.0);
  CHECK(r.acceptance_rate == doctest::Approx(3.14159265 / 4).epsilon(0.05 / (3.14159 / 4)));
}

TEST_CASE("sampling an infeasible set fails") {
  auto s = VariableSpace::states(1);
  auto x = Polynomial::variable(s, 0);
  // x >= 1 and x <= 0
  auto empty = SemiAlgebraicSet(
      s, {x - Polynomial::constant(s, 1.0), Polynomial::constant(s, 0.0) - x});
  empty.set_bounding_box({{-2}, {2}});
  CHECK_THROWS_AS(sample_set(empty, 10, 3), Error);
}

TEST_CASE("boundary biased sampling stays in the box") {
  auto s = VariableSpace::states(2);
  auto X = box_set(s, {{0, 0}, {1, 2}});
  auto r = sample_set_boundary_biased(X, 1000, 11, 0.2);
  int on_boundary = 0;
  for (const auto& p : r.points) {
    CHECK(X.contains(p));
    for (int i = 0; i < 2; ++i)
      if (p[i] == X.exact_box()->lo[i] || p[i] == X.exact_box()->hi[i]) {
        ++on_boundary;
        break;
      }
  }
  CHECK(on_boundary > 100);  // roughly 20% of 1000
}

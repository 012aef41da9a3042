#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "vcert/sdp.hpp"
#include "vcert/poly.hpp"

using namespace vcert;
using namespace vcert::sdp;

TEST_CASE("minimize trace with a fixed corner") {
  // min trace(X), X psd 2x2, X11 = 1  ->  1 at X = diag(1,0)
  SdpProblem p;
  p.psd_dims = {2};
  p.add_row({{p.psd_entry_col(0, 0, 0), 1.0}}, 1.0);
  p.add_objective(p.psd_entry_col(0, 0, 0), 1.0);
  p.add_objective(p.psd_entry_col(0, 1, 1), 1.0);
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.psd_blocks[0](0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.psd_blocks[0](1, 1) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("negative diagonal is infeasible") {
  SdpProblem p;
  p.psd_dims = {2};
  p.add_row({{p.psd_entry_col(0, 0, 0), 1.0}}, -1.0);
  auto sol = solve(p);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("off-diagonal forces diagonal mass") {
  // min X11 + X22 st X12 = 1 -> 2 at [[1,1],[1,1]]
  SdpProblem p;
  p.psd_dims = {2};
  // svec carries sqrt(2) on off-diagonals: <A,X> = sqrt(2)*svec_entry
  const double s2 = std::sqrt(2.0);
  p.add_row({{p.psd_entry_col(0, 0, 1), s2 * 0.5 * 2.0 / s2}}, 1.0);
  // coefficient: want <A,X> = 2*A12*X12 = X12 -> A12 = 0.5, svec coef = sqrt(2)*0.5
  p.rows.back()[0].coef = s2 * 0.5;
  p.add_objective(p.psd_entry_col(0, 0, 0), 1.0);
  p.add_objective(p.psd_entry_col(0, 1, 1), 1.0);
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(sol.psd_blocks[0](0, 1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("free variables and lower bounds") {
  // min eta st eta - X11 = 0, X11 >= ... with eta >= 0.5: optimum 0.5
  SdpProblem p;
  p.psd_dims = {1};
  p.free_count = 1;
  p.add_row({{p.free_col(0), 1.0}, {p.psd_entry_col(0, 0, 0), -1.0}}, 0.0);
  p.free_lower_bounds = {{0, 0.5}};
  p.add_objective(p.free_col(0), 1.0);
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.free_vars[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("pure LP through the same interface") {
  // min -x1 - 2 x2 st x1 + x2 = 1, x >= 0 -> -2 at (0, 1)
  SdpProblem p;
  p.nonneg_count = 2;
  p.add_row({{p.nonneg_col(0), 1.0}, {p.nonneg_col(1), 1.0}}, 1.0);
  p.add_objective(p.nonneg_col(0), -1.0);
  p.add_objective(p.nonneg_col(1), -2.0);
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-2.0).epsilon(1e-7));
  CHECK(sol.nonneg[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("infeasible LP gives a Farkas signal") {
  // x1 >= 0, x1 = -3
  SdpProblem p;
  p.nonneg_count = 1;
  p.add_row({{p.nonneg_col(0), 1.0}}, -3.0);
  auto sol = solve(p);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded problem") {
  // min -x, x >= 0, no rows binding x: use a row on a second variable
  SdpProblem p;
  p.nonneg_count = 2;
  p.add_row({{p.nonneg_col(1), 1.0}}, 1.0);
  p.add_objective(p.nonneg_col(0), -1.0);
  auto sol = solve(p);
  CHECK(sol.status == SolveStatus::Unbounded);
}

TEST_CASE("empty program is trivially optimal") {
  SdpProblem p;
  auto sol = solve(p);
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(0.0));
}

TEST_CASE("validate finds zero rows and duplicates") {
  SdpProblem p;
  p.psd_dims = {2};
  p.add_row({{p.psd_entry_col(0, 0, 0), 1.0}}, 1.0);
  p.add_row({{p.psd_entry_col(0, 0, 0), 1.0}}, 1.0);
  p.rows.push_back({});
  p.rhs.push_back(0.0);
  auto d = validate(p);
  CHECK_FALSE(d.ok());
  bool has_dup = false;
  for (const auto& w : d.warnings)
    if (w.find("duplicates") != std::string::npos) has_dup = true;
  CHECK(has_dup);
}

TEST_CASE("size guardrail rejects oversized problems") {
  SdpProblem p;
  p.nonneg_count = 1;
  for (int i = 0; i < 10; ++i) p.add_row({{p.nonneg_col(0), 1.0}}, 1.0);
  SolveOptions o;
  o.max_equality_rows = 5;
  CHECK_THROWS_AS(solve(p, o), Error);
}

TEST_CASE("text round trip") {
  SdpProblem p;
  p.psd_dims = {2, 3};
  p.nonneg_count = 2;
  p.free_count = 1;
  p.add_row({{p.psd_entry_col(0, 0, 1), 0.5}, {p.nonneg_col(0), -2.0}}, 1.25);
  p.add_row({{p.free_col(0), 3.0}}, -0.5);
  p.add_objective(p.nonneg_col(1), 1.0);
  p.free_lower_bounds = {{0, 0.125}};
  std::stringstream ss;
  p.write_text(ss);
  auto q = SdpProblem::read_text(ss);
  CHECK(q.psd_dims == p.psd_dims);
  CHECK(q.nonneg_count == p.nonneg_count);
  CHECK(q.rows.size() == p.rows.size());
  CHECK(q.rows[0][0].col == p.rows[0][0].col);
  CHECK(q.rhs[0] == p.rhs[0]);
  CHECK(q.free_lower_bounds == p.free_lower_bounds);
}

namespace {

// A feasible random SDP built around a known interior primal-dual pair.
SdpProblem random_feasible(std::mt19937_64& rng, int dim, int m, int nonneg) {
  std::normal_distribution<double> g(0.0, 1.0);
  SdpProblem p;
  p.psd_dims = {dim};
  p.nonneg_count = nonneg;
  const int ncols = static_cast<int>(p.cone_cols());

  // interior X0: I + 0.1*sym noise, Z0 likewise
  Eigen::MatrixXd N(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) N(i, j) = g(rng);
  Eigen::MatrixXd X0 = Eigen::MatrixXd::Identity(dim, dim) + 0.1 * (N + N.transpose());
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) N(i, j) = g(rng);
  Eigen::MatrixXd Z0 = Eigen::MatrixXd::Identity(dim, dim) + 0.1 * (N + N.transpose());

  auto svec_of = [&](const Eigen::MatrixXd& M) {
    std::vector<double> v(static_cast<size_t>(ncols), 0.0);
    int k = 0;
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i <= j; ++i, ++k) v[k] = (i == j) ? M(i, j) : M(i, j) * std::sqrt(2.0);
    return v;
  };
  auto x0v = svec_of(X0);
  auto z0v = svec_of(Z0);
  std::vector<double> xnn(nonneg), znn(nonneg);
  for (int i = 0; i < nonneg; ++i) {
    xnn[i] = 0.5 + std::abs(g(rng));
    znn[i] = 0.5 + std::abs(g(rng));
    x0v[p.nonneg_col(i)] = xnn[i];
    z0v[p.nonneg_col(i)] = znn[i];
  }

  std::vector<double> y0(m);
  for (auto& v : y0) v = g(rng);

  std::vector<std::vector<double>> A(m, std::vector<double>(ncols));
  for (int r = 0; r < m; ++r)
    for (int c2 = 0; c2 < ncols; ++c2) A[r][c2] = g(rng);

  for (int r = 0; r < m; ++r) {
    double b = 0;
    std::vector<SdpProblem::Entry> es;
    for (int c2 = 0; c2 < ncols; ++c2) {
      b += A[r][c2] * x0v[c2];
      es.push_back({c2, A[r][c2]});
    }
    p.add_row(std::move(es), b);
  }
  // c = z0 + A' y0 makes (X0, y0, Z0) dual feasible
  for (int c2 = 0; c2 < ncols; ++c2) {
    double v = z0v[c2];
    for (int r = 0; r < m; ++r) v += A[r][c2] * y0[r];
    p.add_objective(c2, v);
  }
  return p;
}

}  // namespace

TEST_CASE("50 random feasible SDPs reach small duality gap") {
  std::mt19937_64 rng(20250809);
  for (int k = 0; k < 50; ++k) {
    const int dim = 2 + static_cast<int>(rng() % 4);
    const int nonneg = static_cast<int>(rng() % 3);
    const int m = 2 + static_cast<int>(rng() % 6);
    auto p = random_feasible(rng, dim, m, nonneg);
    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.duality_gap <= 1e-7);
    // weak duality with a small slack for floating error
    const double scale = std::max(1.0, std::abs(sol.objective));
    CHECK(sol.objective >= sol.dual_objective - 1e-6 * scale);
  }
}

TEST_CASE("determinism: identical runs, identical outputs") {
  std::mt19937_64 rng(77);
  auto p = random_feasible(rng, 4, 6, 2);
  auto a = solve(p);
  auto b = solve(p);
  REQUIRE(a.status == SolveStatus::Optimal);
  CHECK(a.iterations == b.iterations);
  CHECK(a.objective == b.objective);  // bitwise
  CHECK(a.duality_gap == b.duality_gap);
}

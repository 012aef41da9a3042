#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "vcert/discrete.hpp"

using namespace vcert;
using namespace vcert::discrete;

namespace {

// The five-state counterexample: initial q0, unsafe q1 and q3,
// edges q0->q0, q0->q2, q2->q0, q2->q4, q4->q4, q1->q2, q3->q4.
FiniteTransitionSystem fig1() {
  FiniteTransitionSystem ts;
  ts.names = {"q0", "q1", "q2", "q3", "q4"};
  ts.embedding = {0, 1, 2, 3, 4};
  ts.initial = {0};
  ts.unsafe = {1, 3};
  ts.transitions = {{0, 0}, {0, 2}, {2, 0}, {2, 4}, {4, 4}, {1, 2}, {3, 4}};
  return ts;
}

// The printed inequality list of the proof: T(0,2)>=0, T(2,4)>=0,
// T(0,1)<=-eta, T(0,3)<=-eta, T(0,0)>=lam T(2,0), T(0,4)>=lam T(2,4).
std::vector<CcInstance> fig1_printed_list() {
  using K = CcInstance::Kind;
  return {
      {K::TransitionNonneg, 0, -1, 2}, {K::TransitionNonneg, 2, -1, 4},
      {K::InitialUnsafe, 0, -1, 1},    {K::InitialUnsafe, 0, -1, 3},
      {K::Decay, 0, 2, 0},             {K::Decay, 0, 2, 4},
  };
}

VariableSpace pair_xy() { return VariableSpace(std::vector<std::string>{"x", "y"}); }

}  // namespace

TEST_CASE("reach on the counterexample") {
  auto ts = fig1();
  auto r = reach(ts);
  CHECK(r == std::set<int>{0, 2, 4});
  CHECK_FALSE(r.count(1));
  CHECK_FALSE(r.count(3));

  FiniteTransitionSystem no_edges = ts;
  no_edges.transitions.clear();
  CHECK(reach(no_edges) == std::set<int>{0});

  FiniteTransitionSystem complete = ts;
  complete.transitions.clear();
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) complete.transitions.push_back({a, b});
  CHECK(reach(complete).size() == 5);
}

TEST_CASE("lambda grid is infeasible on the printed list") {
  auto ts = fig1();
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(0.1 * i);
  auto res = cc_feasible_quadratic(ts, grid, 1e-4, InstanceMode::ExplicitList,
                                   fig1_printed_list());
  CHECK_FALSE(res.feasible);
  REQUIRE(res.cells.size() == 51);
  for (const auto& c : res.cells) CHECK_FALSE(c.feasible);
}

TEST_CASE("full instantiation is also infeasible at a few lambdas") {
  auto ts = fig1();
  auto res = cc_feasible_quadratic(ts, {0.0, 0.5, 1.0}, 1e-4, InstanceMode::Full);
  CHECK_FALSE(res.feasible);
}

TEST_CASE("a chain with isolated unsafe state is feasible at lambda 0") {
  FiniteTransitionSystem ts;
  ts.names = {"s0", "s1", "s2"};
  ts.embedding = {0, 1, 2};
  ts.initial = {0};
  ts.unsafe = {2};
  ts.transitions = {{0, 1}};
  auto res = cc_feasible_quadratic(ts, {0.0, 0.5, 1.0}, 1e-4, InstanceMode::Reachable);
  REQUIRE(res.feasible);
  CHECK(res.lambda == 0.0);
  REQUIRE(res.T.has_value());
  // witness satisfies the forbidden-pair condition
  CHECK(res.T->eval({0.0, 2.0}) <= -1e-4 + 1e-9);
}

TEST_CASE("eta must be positive") {
  auto ts = fig1();
  CHECK_THROWS_AS(
      cc_feasible_quadratic(ts, {0.0}, 0.0, InstanceMode::Full), Error);
}

TEST_CASE("printed certificate audits exactly") {
  auto ts = fig1();
  auto s = pair_xy();
  auto T1 = Polynomial::parse(s, "847.87*x*y - 883.63*y^2 - 3391.47*x + 4442.96*y - 3633.71");
  auto T2 = Polynomial::parse(s, "0.080*x*y + 0.081*y^2 - 0.319*x - 0.564*y + 0.965");
  Eigen::MatrixXd A(2, 2);
  A << 4.703, 4.703, 1.621, 0.354;

  // transcribed-rounded mode: 0.05 * scale per condition
  auto rep = vcc_audit_discrete(ts, {T1, T2}, A, 1e-3, InstanceMode::ExplicitList,
                                fig1_printed_list(), 1e-9, 0.05);
  CHECK(rep.verdict == DiscreteAuditReport::Verdict::PassWithRounding);

  // spot margins reproduced to 1e-9 of direct arithmetic
  const double t1_02 = -883.63 * 4.0 + 4442.96 * 2.0 - 3633.71;  // 1717.69
  const double t1_01 = -883.63 + 4442.96 - 3633.71;              // -74.38
  bool saw_eq21 = false, saw_eq23 = false, saw_slack = false;
  for (const auto& rec : rep.records) {
    if (rec.condition == "eq21 T1(q0,q2)") {
      CHECK(rec.margin == doctest::Approx(t1_02).epsilon(1e-12));
      CHECK(rec.margin == doctest::Approx(1717.69).epsilon(1e-9));
      saw_eq21 = true;
    }
    if (rec.condition.find("eq23 (q0,q1)") == 0) {
      // satisfied via T1: margin = -eta - T1(0,1) = -0.001 + 74.38
      CHECK(rec.margin == doctest::Approx(-1e-3 - t1_01).epsilon(1e-12));
      CHECK(rec.pass);
      saw_eq23 = true;
    }
    if (rec.condition.find("eq23 (q0,q3)") == 0) {
      // rounding-induced violation of about 0.003 via T2(0,3) = +0.002
      CHECK(rec.margin == doctest::Approx(-0.003).epsilon(1e-9));
      CHECK(rec.pass);
      CHECK(rec.needed_rounding);
      saw_slack = true;
    }
  }
  CHECK(saw_eq21);
  CHECK(saw_eq23);
  CHECK(saw_slack);

  // exact mode fails on the same list
  auto strict = vcc_audit_discrete(ts, {T1, T2}, A, 1e-3, InstanceMode::ExplicitList,
                                   fig1_printed_list(), 1e-9, -1.0);
  CHECK(strict.verdict == DiscreteAuditReport::Verdict::Fail);
}

TEST_CASE("identity A reduces the audit to per-component closure conditions") {
  FiniteTransitionSystem ts;
  ts.names = {"a", "b", "c"};
  ts.embedding = {0, 1, 2};
  ts.initial = {0};
  ts.unsafe = {2};
  ts.transitions = {{0, 1}, {1, 1}};
  auto s = pair_xy();
  // x-independent witness: 3 - y^2 is nonnegative at the reachable targets
  // and -1 at the isolated unsafe state
  auto T = Polynomial::parse(s, "3 - y^2");
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(1, 1);
  auto rep = vcc_audit_discrete(ts, {T}, I, 1e-3, InstanceMode::Reachable, {}, 1e-9, -1.0);
  CHECK(rep.verdict == DiscreteAuditReport::Verdict::Pass);
  CHECK(safety_oracle_consistent(ts, true));
}

TEST_CASE("oversized eta fails with a witness") {
  auto ts = fig1();
  auto s = pair_xy();
  auto T1 = Polynomial::parse(s, "847.87*x*y - 883.63*y^2 - 3391.47*x + 4442.96*y - 3633.71");
  auto T2 = Polynomial::parse(s, "0.080*x*y + 0.081*y^2 - 0.319*x - 0.564*y + 0.965");
  Eigen::MatrixXd A(2, 2);
  A << 4.703, 4.703, 1.621, 0.354;
  auto rep = vcc_audit_discrete(ts, {T1, T2}, A, 1e6, InstanceMode::ExplicitList,
                                fig1_printed_list(), 1e-9, 0.05);
  CHECK(rep.verdict == DiscreteAuditReport::Verdict::Fail);
  CHECK(rep.worst_margin < 0);
}

TEST_CASE("soundness harness over random small systems") {
  std::mt19937_64 rng(20250101);
  int feasible_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);  // up to 6 states
    FiniteTransitionSystem ts;
    for (int i = 0; i < n; ++i) {
      ts.names.push_back("s" + std::to_string(i));
      ts.embedding.push_back(i);
    }
    ts.initial = {0};
    const int u = 1 + static_cast<int>(rng() % (n - 1));
    ts.unsafe = {u};
    const int edges = 1 + static_cast<int>(rng() % (2 * n));
    for (int e = 0; e < edges; ++e)
      ts.transitions.push_back(
          {static_cast<int>(rng() % n), static_cast<int>(rng() % n)});

    auto res = cc_feasible_quadratic(ts, {0.0, 0.5, 1.0}, 1e-4, InstanceMode::Full);
    if (res.feasible) {
      ++feasible_count;
      auto r = reach(ts);
      CHECK_FALSE(r.count(u));  // certificate implies safety
      // audit the LP witness as a k=1 closure certificate
      Eigen::MatrixXd A(1, 1);
      A << res.lambda;
      auto rep = vcc_audit_discrete(ts, {*res.T}, A, 1e-4, InstanceMode::Full, {}, 1e-7, -1.0);
      CHECK(rep.verdict == DiscreteAuditReport::Verdict::Pass);
      CHECK(safety_oracle_consistent(ts, true));
    }
  }
  // the harness must actually exercise feasible cases
  CHECK(feasible_count > 20);
}

TEST_CASE("corrupted certificate fails and the oracle stays consistent") {
  FiniteTransitionSystem ts;
  ts.names = {"a", "b"};
  ts.embedding = {0, 1};
  ts.initial = {0};
  ts.unsafe = {1};
  ts.transitions = {{0, 1}};  // unsafe reachable
  auto s = pair_xy();
  auto T = Polynomial::parse(s, "1 + 0*x");  // T(0,1) = 1 > -eta: fails eq23
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(1, 1);
  auto rep = vcc_audit_discrete(ts, {T}, I, 1e-3, InstanceMode::Full, {}, 1e-9, -1.0);
  CHECK(rep.verdict == DiscreteAuditReport::Verdict::Fail);
  CHECK(safety_oracle_consistent(ts, false));
}

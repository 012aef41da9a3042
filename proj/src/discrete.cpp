#include "vcert/discrete.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "vcert/sdp.hpp"

namespace vcert::discrete {

void FiniteTransitionSystem::validate() const {
  if (names.size() != embedding.size())
    throw Error("finite system: one embedding value per state required");
  std::set<double> vals(embedding.begin(), embedding.end());
  if (vals.size() != embedding.size()) throw Error("finite system: embedding must be injective");
  auto in_range = [&](int s) { return s >= 0 && s < state_count(); };
  for (int s : initial)
    if (!in_range(s)) throw Error("finite system: initial state out of range");
  for (int s : unsafe)
    if (!in_range(s)) throw Error("finite system: unsafe state out of range");
  for (const auto& [a, b] : transitions)
    if (!in_range(a) || !in_range(b)) throw Error("finite system: transition out of range");
}

std::set<int> reach(const FiniteTransitionSystem& ts) {
  std::set<int> seen(ts.initial.begin(), ts.initial.end());
  std::deque<int> queue(ts.initial.begin(), ts.initial.end());
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (const auto& [a, b] : ts.transitions)
      if (a == s && seen.insert(b).second) queue.push_back(b);
  }
  return seen;
}

std::vector<CcInstance> cc_instances(const FiniteTransitionSystem& ts, InstanceMode mode,
                                     const std::vector<CcInstance>& explicit_list) {
  if (mode == InstanceMode::ExplicitList) {
    if (explicit_list.empty()) throw Error("explicit instance mode requires an instance list");
    return explicit_list;
  }
  std::set<int> allowed;
  if (mode == InstanceMode::Reachable)
    allowed = reach(ts);
  else
    for (int s = 0; s < ts.state_count(); ++s) allowed.insert(s);

  std::vector<CcInstance> out;
  for (const auto& [a, b] : ts.transitions)
    if (allowed.count(a))
      out.push_back({CcInstance::Kind::TransitionNonneg, a, -1, b});
  for (const auto& [a, b] : ts.transitions) {
    if (!allowed.count(a)) continue;
    for (int y = 0; y < ts.state_count(); ++y) {
      if (mode == InstanceMode::Reachable && !allowed.count(y)) continue;
      out.push_back({CcInstance::Kind::Decay, a, b, y});
    }
  }
  for (int x0 : ts.initial)
    for (int xu : ts.unsafe) out.push_back({CcInstance::Kind::InitialUnsafe, x0, -1, xu});
  return out;
}

namespace {

// quadratic template coefficients over (x, y): 1, x, y, x^2, xy, y^2
std::array<double, 6> quad_basis(double x, double y) {
  return {1.0, x, y, x * x, x * y, y * y};
}

}  // namespace

CcGridResult cc_feasible_quadratic(const FiniteTransitionSystem& ts,
                                   const std::vector<double>& lambda_grid, double eta,
                                   InstanceMode mode,
                                   const std::vector<CcInstance>& explicit_list) {
  ts.validate();
  if (lambda_grid.empty()) throw Error("cc_feasible_quadratic: empty lambda grid");
  for (double l : lambda_grid)
    if (l < 0) throw Error("cc_feasible_quadratic: lambda must be nonnegative");
  if (!(eta > 0)) throw Error("cc_feasible_quadratic: eta must be positive (strictness lost)");

  auto instances = cc_instances(ts, mode, explicit_list);
  const auto& e = ts.embedding;

  CcGridResult result;
  for (double lambda : lambda_grid) {
    // LP over 6 free coefficients; one slack per inequality.
    sdp::SdpProblem lp;
    lp.free_count = 6;
    lp.nonneg_count = static_cast<int>(instances.size());
    int slack = 0;
    for (const auto& inst : instances) {
      std::vector<sdp::SdpProblem::Entry> row;
      double rhs = 0.0;
      auto add_T = [&](double x, double y, double scale) {
        auto b = quad_basis(x, y);
        for (int c = 0; c < 6; ++c) row.push_back({lp.free_col(c), scale * b[c]});
      };
      switch (inst.kind) {
        case CcInstance::Kind::TransitionNonneg:
          // T(x, y) - s = 0
          add_T(e[inst.x], e[inst.y], 1.0);
          break;
        case CcInstance::Kind::Decay:
          // T(x, y) - lambda T(x', y) - s = 0
          add_T(e[inst.x], e[inst.y], 1.0);
          add_T(e[inst.xp], e[inst.y], -lambda);
          break;
        case CcInstance::Kind::InitialUnsafe:
          // -T(x0, xu) - s = eta
          add_T(e[inst.x], e[inst.y], -1.0);
          rhs = eta;
          break;
      }
      row.push_back({lp.nonneg_col(slack), -1.0});
      lp.add_row(std::move(row), rhs);
      ++slack;
    }
    sdp::SolveOptions opts;
    opts.tol = 1e-9;
    auto sol = sdp::solve(lp, opts);
    const bool feasible = sol.status == sdp::SolveStatus::Optimal;
    result.cells.push_back({lambda, feasible, sdp::to_string(sol.status)});
    if (feasible && !result.feasible) {
      result.feasible = true;
      result.lambda = lambda;
      VariableSpace pair(std::vector<std::string>{"x", "y"});
      Polynomial T(pair);
      const std::vector<std::vector<int>> exps = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
      for (int c = 0; c < 6; ++c)
        if (sol.free_vars[c] != 0.0)
          T = T + Polynomial::monomial(pair, Monomial(exps[c]), sol.free_vars[c]);
      result.T = T;
    }
  }
  return result;
}

DiscreteAuditReport vcc_audit_discrete(const FiniteTransitionSystem& ts,
                                       const std::vector<Polynomial>& T,
                                       const Eigen::MatrixXd& A, double eta, InstanceMode mode,
                                       const std::vector<CcInstance>& explicit_list,
                                       double abs_tol, double rounding_tol_factor) {
  ts.validate();
  const int k = static_cast<int>(T.size());
  if (A.rows() != k || A.cols() != k) throw Error("vcc_audit_discrete: A must be k x k");
  for (const auto& t : T)
    if (t.space().arity() != 2) throw Error("vcc_audit_discrete: T must be over a pair (x, y)");

  auto instances = cc_instances(ts, mode, explicit_list);
  const auto& e = ts.embedding;
  auto evalT = [&](int i, double x, double y) { return T[i].eval({x, y}); };

  DiscreteAuditReport report;
  report.verdict = DiscreteAuditReport::Verdict::Pass;
  report.worst_margin = std::numeric_limits<double>::infinity();

  auto push = [&](const std::string& cond, double margin, double scale) {
    DiscreteAuditRecord rec;
    rec.condition = cond;
    rec.margin = margin;
    rec.scale = scale;
    const double rounding_tol = rounding_tol_factor > 0 ? rounding_tol_factor * scale : abs_tol;
    rec.pass = margin >= -std::max(abs_tol, rounding_tol);
    rec.needed_rounding = rec.pass && margin < -abs_tol;
    if (!rec.pass)
      report.verdict = DiscreteAuditReport::Verdict::Fail;
    else if (rec.needed_rounding && report.verdict == DiscreteAuditReport::Verdict::Pass)
      report.verdict = DiscreteAuditReport::Verdict::PassWithRounding;
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      report.worst_condition = cond;
    }
    report.records.push_back(std::move(rec));
  };

  auto scale_of = [&](const std::vector<int>& funcs, bool with_A) {
    double s = 0;
    for (int i : funcs) s = std::max(s, T[i].max_abs_coefficient());
    if (with_A)
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) s = std::max(s, std::abs(A(i, j)));
    return s;
  };

  for (const auto& inst : instances) {
    switch (inst.kind) {
      case CcInstance::Kind::TransitionNonneg: {
        for (int i = 0; i < k; ++i) {
          const double v = evalT(i, e[inst.x], e[inst.y]);
          push("eq21 T" + std::to_string(i + 1) + "(" + ts.names[inst.x] + "," +
                   ts.names[inst.y] + ")",
               v, scale_of({i}, false));
        }
        break;
      }
      case CcInstance::Kind::Decay: {
        for (int i = 0; i < k; ++i) {
          double rhs = 0;
          for (int j = 0; j < k; ++j) rhs += A(i, j) * evalT(j, e[inst.xp], e[inst.y]);
          const double v = evalT(i, e[inst.x], e[inst.y]) - rhs;
          std::vector<int> funcs;
          for (int j = 0; j < k; ++j) funcs.push_back(j);
          push("eq22 row" + std::to_string(i + 1) + " T(" + ts.names[inst.x] + ",*) vs T(" +
                   ts.names[inst.xp] + "," + ts.names[inst.y] + ")",
               v, scale_of(funcs, true));
        }
        break;
      }
      case CcInstance::Kind::InitialUnsafe: {
        // disjunction: some T_i(x0, xu) <= -eta
        double best = -std::numeric_limits<double>::infinity();
        int best_i = 0;
        for (int i = 0; i < k; ++i) {
          const double m = -eta - evalT(i, e[inst.x], e[inst.y]);
          if (m > best) {
            best = m;
            best_i = i;
          }
        }
        push("eq23 (" + ts.names[inst.x] + "," + ts.names[inst.y] + ") via T" +
                 std::to_string(best_i + 1),
             best, scale_of({best_i}, false));
        break;
      }
    }
  }
  return report;
}

bool safety_oracle_consistent(const FiniteTransitionSystem& ts, bool certificate_passed) {
  if (!certificate_passed) return true;
  auto r = reach(ts);
  for (int u : ts.unsafe)
    if (r.count(u)) return false;
  return true;
}

}  // namespace vcert::discrete

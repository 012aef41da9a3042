#pragma once

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vcert/poly.hpp"

namespace vcert::discrete {

// Finite transition system with a real-valued state embedding; the
// counterexample uses q_i -> i on five states.
struct FiniteTransitionSystem {
  std::vector<std::string> names;
  std::vector<double> embedding;  // injective
  std::vector<int> initial;
  std::vector<int> unsafe;
  std::vector<std::pair<int, int>> transitions;  // possibly nondeterministic

  int state_count() const { return static_cast<int>(names.size()); }
  void validate() const;
};

std::set<int> reach(const FiniteTransitionSystem& ts);

// Which closure-certificate instances to impose over the finite system.
//  ExplicitList: exactly the instances supplied by the caller (the printed
//    inequality list of the counterexample proof).
//  Full: the entire definition over all states and transitions.
//  Reachable: the definition restricted to reachable sources and targets.
enum class InstanceMode { ExplicitList, Full, Reachable };

struct CcInstance {
  enum class Kind { TransitionNonneg, Decay, InitialUnsafe } kind;
  int x = -1;   // source state
  int xp = -1;  // successor (Decay)
  int y = -1;   // second argument (TransitionNonneg: the successor; Decay: the y state)
};

std::vector<CcInstance> cc_instances(const FiniteTransitionSystem& ts, InstanceMode mode,
                                     const std::vector<CcInstance>& explicit_list = {});

struct CcGridCell {
  double lambda;
  bool feasible;
  std::string status;
};

struct CcGridResult {
  bool feasible = false;
  double lambda = 0.0;                  // first feasible grid point
  std::optional<Polynomial> T;          // quadratic witness over (x, y)
  std::vector<CcGridCell> cells;        // one per grid point, in grid order
};

// Fixes lambda on a grid and solves the quadratic-template feasibility LP
// for Def. 2.5 instances; every grid point is solved independently.
CcGridResult cc_feasible_quadratic(const FiniteTransitionSystem& ts,
                                   const std::vector<double>& lambda_grid, double eta,
                                   InstanceMode mode,
                                   const std::vector<CcInstance>& explicit_list = {});

struct DiscreteAuditRecord {
  std::string condition;
  double margin;      // >= 0 means satisfied exactly
  double scale;       // max-abs coefficient entering the condition
  bool pass;          // within the active tolerance
  bool needed_rounding;
};

struct DiscreteAuditReport {
  enum class Verdict { Pass, PassWithRounding, Fail } verdict;
  std::vector<DiscreteAuditRecord> records;
  double worst_margin = 0.0;
  std::string worst_condition;
};

// Exhaustive (not sampled) evaluation of the vector closure-certificate
// conditions over the instance list; margins are exact arithmetic on the
// supplied coefficients. rounding_tol_factor < 0 disables the rounded mode.
DiscreteAuditReport vcc_audit_discrete(const FiniteTransitionSystem& ts,
                                       const std::vector<Polynomial>& T,
                                       const Eigen::MatrixXd& A, double eta, InstanceMode mode,
                                       const std::vector<CcInstance>& explicit_list = {},
                                       double abs_tol = 0.0, double rounding_tol_factor = -1.0);

// Soundness cross-check: a passing certificate audit plus a reachable
// unsafe state is a contradiction.
bool safety_oracle_consistent(const FiniteTransitionSystem& ts, bool certificate_passed);

}  // namespace vcert::discrete

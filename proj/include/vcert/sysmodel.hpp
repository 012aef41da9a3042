#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vcert/semialg.hpp"

namespace vcert {

// Discrete-time polynomial system x' = f(x) with named regions
// (unsafe set, finitely-visited set, letter partition pieces).
struct DynamicalSystem {
  VariableSpace state_space;
  std::vector<Polynomial> f;  // one component per state variable
  SemiAlgebraicSet X;
  SemiAlgebraicSet X0;
  std::map<std::string, RegionUnion> regions;

  void validate() const;
  std::vector<double> step(const std::vector<double>& x) const;
  const RegionUnion& region(const std::string& name) const;
};

struct BuchiAutomaton {
  std::vector<std::string> states;
  std::vector<std::string> letters;
  std::vector<int> initial;    // indices into states
  std::vector<int> accepting;  // indices into states
  // (from, letter, to), all indices
  std::vector<std::array<int, 3>> transitions;

  int state_index(const std::string& name) const;
  int letter_index(const std::string& name) const;
  bool is_accepting(int q) const;
  void validate() const;
};

// {(q, q') : q' in delta(q, letter)} in declaration order.
std::vector<std::pair<int, int>> letter_relation(const BuchiAutomaton& aut, int letter);

struct LabelingPartition {
  // (letter name, region); regions must tile X, earliest declaration wins
  // on shared boundaries.
  std::vector<std::pair<std::string, RegionUnion>> letters;

  int letter_of(const std::vector<double>& point, double tol = 0.0) const;  // -1 if none
};

struct PartitionAuditResult {
  bool covered = true;           // every sample claimed by some letter
  bool interior_disjoint = true; // no sample strictly inside two letters
  int samples = 0;
  std::vector<double> witness;   // first failing sample, if any
};

PartitionAuditResult audit_partition(const LabelingPartition& lab, const Box& x_box,
                                     int samples, std::uint64_t seed);

// Constraint instances of the product system, enumerated once and shared
// by the LTL builders and their tests.
struct ProductInstances {
  struct Edge {
    int letter;
    int from;
    int to;
  };
  // one per (letter, (n,n') in delta_letter): step/invariant instances
  std::vector<Edge> step;
  // one per (letter, (n,n'), p in Q): pair-space propagation instances
  std::vector<std::pair<Edge, int>> step_pair;
  // decrease instances split by acceptance of the source state
  std::vector<Edge> decrease_nonaccepting;
  std::vector<Edge> decrease_accepting;
  // one per (q0, r accepting): initial/ranking instances
  std::vector<std::pair<int, int>> initial_accepting;
};

ProductInstances product_constraint_instances(const BuchiAutomaton& aut);

struct Trajectory {
  std::vector<std::vector<double>> states;  // length steps+1 unless truncated
  std::vector<int> letter_per_step;         // when a labeling is supplied
  bool truncated = false;                   // left the X bounding box
};

Trajectory simulate(const DynamicalSystem& sys, const std::vector<double>& x0, int steps,
                    const LabelingPartition* labeling = nullptr);

}  // namespace vcert

#include "vcert/sysmodel.hpp"

#include <algorithm>

namespace vcert {

void DynamicalSystem::validate() const {
  if (static_cast<int>(f.size()) != state_space.arity())
    throw Error("dynamics must have one component per state variable");
  for (const auto& fi : f)
    if (fi.space() != state_space) throw Error("dynamics component over wrong space");
  if (X.space() != state_space || X0.space() != state_space)
    throw Error("state sets over wrong space");
  for (const auto& [name, region] : regions) {
    if (region.pieces.empty()) throw Error("region '" + name + "' is empty");
    if (region.space() != state_space) throw Error("region '" + name + "' over wrong space");
  }
}

std::vector<double> DynamicalSystem::step(const std::vector<double>& x) const {
  std::vector<double> y(f.size());
  for (size_t i = 0; i < f.size(); ++i) y[i] = f[i].eval(x);
  return y;
}

const RegionUnion& DynamicalSystem::region(const std::string& name) const {
  auto it = regions.find(name);
  if (it == regions.end()) throw Error("unknown region '" + name + "'");
  return it->second;
}

int BuchiAutomaton::state_index(const std::string& name) const {
  auto it = std::find(states.begin(), states.end(), name);
  if (it == states.end()) throw Error("unknown automaton state '" + name + "'");
  return static_cast<int>(it - states.begin());
}

int BuchiAutomaton::letter_index(const std::string& name) const {
  auto it = std::find(letters.begin(), letters.end(), name);
  if (it == letters.end()) throw Error("unknown letter '" + name + "'");
  return static_cast<int>(it - letters.begin());
}

bool BuchiAutomaton::is_accepting(int q) const {
  return std::find(accepting.begin(), accepting.end(), q) != accepting.end();
}

void BuchiAutomaton::validate() const {
  const int ns = static_cast<int>(states.size());
  const int nl = static_cast<int>(letters.size());
  for (int q : initial)
    if (q < 0 || q >= ns) throw Error("automaton initial state out of range");
  for (int q : accepting)
    if (q < 0 || q >= ns) throw Error("automaton accepting state out of range");
  for (const auto& t : transitions) {
    if (t[0] < 0 || t[0] >= ns || t[2] < 0 || t[2] >= ns)
      throw Error("automaton transition references unknown state");
    if (t[1] < 0 || t[1] >= nl) throw Error("automaton transition references unknown letter");
  }
}

std::vector<std::pair<int, int>> letter_relation(const BuchiAutomaton& aut, int letter) {
  if (letter < 0 || letter >= static_cast<int>(aut.letters.size()))
    throw Error("letter_relation: unknown letter");
  std::vector<std::pair<int, int>> rel;
  for (const auto& t : aut.transitions)
    if (t[1] == letter) rel.emplace_back(t[0], t[2]);
  return rel;
}

int LabelingPartition::letter_of(const std::vector<double>& point, double tol) const {
  for (size_t i = 0; i < letters.size(); ++i)
    if (letters[i].second.contains(point, tol)) return static_cast<int>(i);
  return -1;
}

PartitionAuditResult audit_partition(const LabelingPartition& lab, const Box& x_box,
                                     int samples, std::uint64_t seed) {
  PartitionAuditResult res;
  res.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> p(x_box.arity());
  for (int k = 0; k < samples; ++k) {
    for (int i = 0; i < x_box.arity(); ++i)
      p[i] = x_box.lo[i] + (x_box.hi[i] - x_box.lo[i]) * unit(rng);
    int strictly_inside = 0, touching = 0;
    for (const auto& [name, region] : lab.letters) {
      bool strict = false, touch = false;
      for (const auto& piece : region.pieces) {
        const double m = piece.min_constraint_value(p);
        if (m > 0) strict = true;
        if (m >= 0) touch = true;
      }
      if (strict) ++strictly_inside;
      if (touch) ++touching;
    }
    if (touching == 0) {
      res.covered = false;
      if (res.witness.empty()) res.witness = p;
    }
    if (strictly_inside > 1) {
      res.interior_disjoint = false;
      if (res.witness.empty()) res.witness = p;
    }
  }
  return res;
}

ProductInstances product_constraint_instances(const BuchiAutomaton& aut) {
  aut.validate();
  ProductInstances out;
  const int nq = static_cast<int>(aut.states.size());
  for (int letter = 0; letter < static_cast<int>(aut.letters.size()); ++letter) {
    for (const auto& [from, to] : letter_relation(aut, letter)) {
      ProductInstances::Edge e{letter, from, to};
      out.step.push_back(e);
      for (int p = 0; p < nq; ++p) out.step_pair.emplace_back(e, p);
      if (aut.is_accepting(from))
        out.decrease_accepting.push_back(e);
      else
        out.decrease_nonaccepting.push_back(e);
    }
  }
  for (int q0 : aut.initial)
    for (int r : aut.accepting) out.initial_accepting.emplace_back(q0, r);
  return out;
}

Trajectory simulate(const DynamicalSystem& sys, const std::vector<double>& x0, int steps,
                    const LabelingPartition* labeling) {
  Trajectory tr;
  tr.states.push_back(x0);
  const Box* bounds = sys.X.bounding_box() ? &*sys.X.bounding_box() : nullptr;
  std::vector<double> x = x0;
  for (int t = 0; t < steps; ++t) {
    if (labeling) tr.letter_per_step.push_back(labeling->letter_of(x));
    x = sys.step(x);
    if (bounds && !bounds->contains(x, 1e-9)) {
      tr.truncated = true;
      break;
    }
    tr.states.push_back(x);
  }
  if (labeling && !tr.truncated) tr.letter_per_step.push_back(labeling->letter_of(x));
  return tr;
}

}  // namespace vcert

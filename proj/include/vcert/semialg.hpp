#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vcert/poly.hpp"

namespace vcert {

// Axis-aligned box; used both as a set constructor and as the sampling
// bounding box attached to general semi-algebraic sets.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int arity() const { return static_cast<int>(lo.size()); }
  double volume() const;
  bool contains(const std::vector<double>& p, double tol = 0.0) const;
  static Box concat(const Box& a, const Box& b);
};

// {x : g_i(x) >= 0 for all i}. An empty constraint list is the whole space.
class SemiAlgebraicSet {
 public:
  SemiAlgebraicSet() = default;
  SemiAlgebraicSet(VariableSpace space, std::vector<Polynomial> constraints,
                   std::string label = "");

  const VariableSpace& space() const { return space_; }
  const std::vector<Polynomial>& constraints() const { return constraints_; }
  const std::string& label() const { return label_; }
  void set_label(std::string l) { label_ = std::move(l); }

  const std::optional<Box>& bounding_box() const { return bounds_; }
  void set_bounding_box(Box b) { bounds_ = std::move(b); }
  // The box this set was built from, when it is an exact box.
  const std::optional<Box>& exact_box() const { return exact_box_; }

  bool contains(const std::vector<double>& point, double tol = 0.0) const;
  // Smallest constraint value at the point (+inf convention for empty list).
  double min_constraint_value(const std::vector<double>& point) const;

  friend SemiAlgebraicSet box_set(const VariableSpace& space, const Box& box,
                                  std::string label);

 private:
  VariableSpace space_;
  std::vector<Polynomial> constraints_;
  std::string label_;
  std::optional<Box> bounds_;
  std::optional<Box> exact_box_;
};

// Finite union of pieces over a common space.
struct RegionUnion {
  std::vector<SemiAlgebraicSet> pieces;
  std::string label;

  const VariableSpace& space() const;
  bool contains(const std::vector<double>& point, double tol = 0.0) const;
};

// One constraint (x_i - lo_i)(hi_i - x_i) >= 0 per dimension.
SemiAlgebraicSet box_set(const VariableSpace& space, const Box& box, std::string label = "");

// Concatenated space; constraints of each factor lifted to its block.
SemiAlgebraicSet product_set(const SemiAlgebraicSet& a, const SemiAlgebraicSet& b,
                             std::string label = "");
SemiAlgebraicSet product_set(const SemiAlgebraicSet& a, const SemiAlgebraicSet& b,
                             const SemiAlgebraicSet& c, std::string label = "");

// Tiles `outer` minus `inner` into at most 2*arity boxes (closed overlap on
// shared faces). Errors if inner is not contained in outer or if the
// difference is empty.
std::vector<Box> box_complement(const Box& outer, const Box& inner);

// Iterated subtraction: removes each box of `inner` in order from the
// running tiling of `outer`. Pieces that do not meet a subtrahend are kept
// whole, so subtraction order controls the piece count.
std::vector<Box> subtract_boxes(const Box& outer, const std::vector<Box>& inner);

RegionUnion boxes_to_region(const VariableSpace& space, const std::vector<Box>& boxes,
                            std::string label = "");

struct SampleResult {
  std::vector<std::vector<double>> points;
  double acceptance_rate = 0.0;
};

// Seeded rejection sampling inside the set's bounding box. Every returned
// point satisfies all constraints (>= 0). Throws after the trial budget if
// the acceptance rate stays below 1e-4.
SampleResult sample_set(const SemiAlgebraicSet& set, int count, std::uint64_t seed);

// Like sample_set but snaps `boundary_fraction` of the samples to the
// faces of the exact box (boundary-biased audit sampling). Sets that are
// not exact boxes fall back to plain rejection sampling.
SampleResult sample_set_boundary_biased(const SemiAlgebraicSet& set, int count,
                                        std::uint64_t seed, double boundary_fraction = 0.2);

}  // namespace vcert

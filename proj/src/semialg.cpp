#include "vcert/semialg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vcert {

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < arity(); ++i) v *= (hi[i] - lo[i]);
  return v;
}

bool Box::contains(const std::vector<double>& p, double tol) const {
  for (int i = 0; i < arity(); ++i)
    if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
  return true;
}

Box Box::concat(const Box& a, const Box& b) {
  Box r;
  r.lo = a.lo;
  r.lo.insert(r.lo.end(), b.lo.begin(), b.lo.end());
  r.hi = a.hi;
  r.hi.insert(r.hi.end(), b.hi.begin(), b.hi.end());
  return r;
}

SemiAlgebraicSet::SemiAlgebraicSet(VariableSpace space, std::vector<Polynomial> constraints,
                                   std::string label)
    : space_(std::move(space)), constraints_(std::move(constraints)), label_(std::move(label)) {
  for (const auto& g : constraints_)
    if (g.space() != space_) throw Error("set constraint over wrong space");
}

bool SemiAlgebraicSet::contains(const std::vector<double>& point, double tol) const {
  for (const auto& g : constraints_)
    if (g.eval(point) < -tol) return false;
  return true;
}

double SemiAlgebraicSet::min_constraint_value(const std::vector<double>& point) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& g : constraints_) m = std::min(m, g.eval(point));
  return m;
}

const VariableSpace& RegionUnion::space() const {
  if (pieces.empty()) throw Error("empty region union");
  return pieces.front().space();
}

bool RegionUnion::contains(const std::vector<double>& point, double tol) const {
  for (const auto& p : pieces)
    if (p.contains(point, tol)) return true;
  return false;
}

SemiAlgebraicSet box_set(const VariableSpace& space, const Box& box, std::string label) {
  if (box.arity() != space.arity()) throw Error("box arity mismatch");
  for (int i = 0; i < box.arity(); ++i)
    if (!(box.lo[i] < box.hi[i])) throw Error("box_set: inverted or empty bounds");
  std::vector<Polynomial> gs;
  gs.reserve(box.arity());
  for (int i = 0; i < box.arity(); ++i) {
    auto x = Polynomial::variable(space, i);
    auto lo = Polynomial::constant(space, box.lo[i]);
    auto hi = Polynomial::constant(space, box.hi[i]);
    gs.push_back((x - lo) * (hi - x));
  }
  SemiAlgebraicSet s(space, std::move(gs), std::move(label));
  s.bounds_ = box;
  s.exact_box_ = box;
  return s;
}

namespace {

// Picks names for the second factor of a product. Colliding blocks are
// renamed wholesale with the first free prefix (x, y, z, u, v, w), so
// X x X over x1..xn becomes (x1..xn, y1..yn).
VariableSpace product_space(const VariableSpace& a, const VariableSpace& b) {
  bool collision = false;
  for (const auto& n : b.names())
    if (a.index_of(n)) collision = true;
  if (!collision) return VariableSpace::concat(a, b);
  for (const char* prefix : {"y", "z", "u", "v", "w"}) {
    auto candidate = VariableSpace::states(b.arity(), prefix);
    bool ok = true;
    for (const auto& n : candidate.names())
      if (a.index_of(n)) ok = false;
    if (ok) return VariableSpace::concat(a, candidate);
  }
  throw Error("product_set: could not find fresh names for the second factor");
}

}  // namespace

SemiAlgebraicSet product_set(const SemiAlgebraicSet& a, const SemiAlgebraicSet& b,
                             std::string label) {
  auto space = product_space(a.space(), b.space());
  std::vector<Polynomial> gs;
  std::vector<int> map_a(a.space().arity()), map_b(b.space().arity());
  for (int i = 0; i < a.space().arity(); ++i) map_a[i] = i;
  for (int i = 0; i < b.space().arity(); ++i) map_b[i] = a.space().arity() + i;
  for (const auto& g : a.constraints()) gs.push_back(g.embed(space, map_a));
  for (const auto& g : b.constraints()) gs.push_back(g.embed(space, map_b));
  SemiAlgebraicSet s(space, std::move(gs), std::move(label));
  if (a.bounding_box() && b.bounding_box())
    s.set_bounding_box(Box::concat(*a.bounding_box(), *b.bounding_box()));
  return s;
}

SemiAlgebraicSet product_set(const SemiAlgebraicSet& a, const SemiAlgebraicSet& b,
                             const SemiAlgebraicSet& c, std::string label) {
  return product_set(product_set(a, b), c, std::move(label));
}

std::vector<Box> box_complement(const Box& outer, const Box& inner) {
  const int n = outer.arity();
  if (inner.arity() != n) throw Error("box_complement: arity mismatch");
  for (int i = 0; i < n; ++i)
    if (inner.lo[i] < outer.lo[i] - 1e-12 || inner.hi[i] > outer.hi[i] + 1e-12)
      throw Error("box_complement: inner box not contained in outer");
  bool equal = true;
  for (int i = 0; i < n; ++i)
    if (inner.lo[i] > outer.lo[i] + 1e-12 || inner.hi[i] < outer.hi[i] - 1e-12) equal = false;
  if (equal) throw Error("box_complement: difference is empty");

  std::vector<Box> pieces;
  Box core = outer;  // shrinks toward `inner` as slabs peel off
  for (int i = 0; i < n; ++i) {
    if (inner.lo[i] > core.lo[i]) {
      Box slab = core;
      slab.hi[i] = inner.lo[i];
      pieces.push_back(slab);
      core.lo[i] = inner.lo[i];
    }
    if (inner.hi[i] < core.hi[i]) {
      Box slab = core;
      slab.lo[i] = inner.hi[i];
      pieces.push_back(slab);
      core.hi[i] = inner.hi[i];
    }
  }
  return pieces;
}

namespace {

std::optional<Box> intersect(const Box& a, const Box& b) {
  Box r = a;
  for (int i = 0; i < a.arity(); ++i) {
    r.lo[i] = std::max(a.lo[i], b.lo[i]);
    r.hi[i] = std::min(a.hi[i], b.hi[i]);
    if (!(r.lo[i] < r.hi[i])) return std::nullopt;  // empty or degenerate
  }
  return r;
}

}  // namespace

std::vector<Box> subtract_boxes(const Box& outer, const std::vector<Box>& inner) {
  std::vector<Box> tiling = {outer};
  for (const auto& cut : inner) {
    std::vector<Box> next;
    for (const auto& piece : tiling) {
      auto overlap = intersect(piece, cut);
      if (!overlap) {
        next.push_back(piece);
        continue;
      }
      bool covers = true;
      for (int i = 0; i < piece.arity(); ++i)
        if (overlap->lo[i] > piece.lo[i] + 1e-12 || overlap->hi[i] < piece.hi[i] - 1e-12)
          covers = false;
      if (covers) continue;  // piece fully removed
      auto parts = box_complement(piece, *overlap);
      next.insert(next.end(), parts.begin(), parts.end());
    }
    tiling = std::move(next);
  }
  return tiling;
}

RegionUnion boxes_to_region(const VariableSpace& space, const std::vector<Box>& boxes,
                            std::string label) {
  RegionUnion r;
  r.label = std::move(label);
  int idx = 0;
  for (const auto& b : boxes) {
    auto s = box_set(space, b, r.label.empty() ? "" : r.label + "#" + std::to_string(idx));
    r.pieces.push_back(std::move(s));
    ++idx;
  }
  if (r.pieces.empty()) throw Error("region union must be nonempty");
  return r;
}

SampleResult sample_set(const SemiAlgebraicSet& set, int count, std::uint64_t seed) {
  if (count < 1) throw Error("sample_set: count must be >= 1");
  if (!set.bounding_box()) throw Error("sample_set: bounding box required");
  const Box& box = *set.bounding_box();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SampleResult out;
  out.points.reserve(count);
  std::int64_t trials = 0;
  const std::int64_t budget =
      std::max<std::int64_t>(static_cast<std::int64_t>(count) * 20000, 1000000);
  std::vector<double> p(box.arity());
  while (static_cast<int>(out.points.size()) < count) {
    if (trials >= budget) throw Error("sample_set: acceptance rate below 1e-4, giving up");
    ++trials;
    for (int i = 0; i < box.arity(); ++i) p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    if (set.contains(p)) out.points.push_back(p);
  }
  out.acceptance_rate = static_cast<double>(out.points.size()) / static_cast<double>(trials);
  return out;
}

SampleResult sample_set_boundary_biased(const SemiAlgebraicSet& set, int count,
                                        std::uint64_t seed, double boundary_fraction) {
  if (!set.exact_box()) return sample_set(set, count, seed);
  const Box& box = *set.exact_box();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SampleResult out;
  out.points.reserve(count);
  std::vector<double> p(box.arity());
  for (int k = 0; k < count; ++k) {
    for (int i = 0; i < box.arity(); ++i) p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    if (unit(rng) < boundary_fraction) {
      const int dim = static_cast<int>(unit(rng) * box.arity()) % box.arity();
      p[dim] = (unit(rng) < 0.5) ? box.lo[dim] : box.hi[dim];
    }
    out.points.push_back(p);
  }
  out.acceptance_rate = 1.0;
  return out;
}

}  // namespace vcert

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcert {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Ordered list of named variables. Pair/triple spaces are concatenations:
// first block holds "current" variables, later blocks the "target" ones.
class VariableSpace {
 public:
  VariableSpace() = default;
  explicit VariableSpace(std::vector<std::string> names);

  static VariableSpace states(int n, const std::string& prefix = "x");
  static VariableSpace concat(const VariableSpace& a, const VariableSpace& b);

  int arity() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int i) const { return names_.at(i); }
  std::optional<int> index_of(const std::string& name) const;

  bool operator==(const VariableSpace& o) const { return names_ == o.names_; }
  bool operator!=(const VariableSpace& o) const { return !(*this == o); }

 private:
  std::vector<std::string> names_;
};

// Exponent vector; length equals the arity of its space.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  static Monomial one(int arity) { return Monomial(std::vector<int>(arity, 0)); }

  int arity() const { return static_cast<int>(exp_.size()); }
  int exponent(int i) const { return exp_[i]; }
  const std::vector<int>& exponents() const { return exp_; }
  int degree() const;

  Monomial times(const Monomial& o) const;
  double eval(const std::vector<double>& point) const;

  bool operator==(const Monomial& o) const { return exp_ == o.exp_; }

 private:
  std::vector<int> exp_;
};

// Graded lexicographic order: degree first, then lex on exponent vectors.
// This is the canonical basis order everywhere (SDP indexing, reports).
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(VariableSpace space) : space_(std::move(space)) {}
  Polynomial(VariableSpace space, TermMap terms);

  static Polynomial zero(const VariableSpace& s) { return Polynomial(s); }
  static Polynomial constant(const VariableSpace& s, double c);
  static Polynomial variable(const VariableSpace& s, int index);
  static Polynomial monomial(const VariableSpace& s, Monomial m, double coef);

  const VariableSpace& space() const { return space_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // degree(0) is defined as 0 so template sizing needs no special case.
  int degree() const;
  double coefficient(const Monomial& m) const;
  double max_abs_coefficient() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(double s) const;
  Polynomial negated() const { return scaled(-1.0); }

  bool operator==(const Polynomial& o) const {
    return space_ == o.space_ && terms_ == o.terms_;
  }

  // Substitutes variables by polynomials over `target`. `subst[i]`, when
  // present, replaces variable i; absent entries keep the variable, which
  // requires `target` to contain a variable of the same name.
  Polynomial compose(const std::vector<std::optional<Polynomial>>& subst,
                     const VariableSpace& target) const;

  // Re-homes the polynomial into `target`, sending variable i to
  // variable `var_map[i]` of the target space.
  Polynomial embed(const VariableSpace& target, const std::vector<int>& var_map) const;

  // Term summation in graded-lex order; deterministic.
  double eval(const std::vector<double>& point) const;

  // Text form: sum of coef*x1^a*y2^b terms in graded-lex order.
  std::string to_string(int precision = 17) const;
  static Polynomial parse(const VariableSpace& space, const std::string& text);

 private:
  void add_term(const Monomial& m, double c);

  VariableSpace space_;
  TermMap terms_;
};

// All monomials of degree <= max_degree in graded-lex order;
// count equals C(arity + max_degree, max_degree).
std::vector<Monomial> monomial_basis(const VariableSpace& space, int max_degree);

std::int64_t binomial(int n, int k);

// Substitution helper: applies dynamics f to the first block of a pair
// space, i.e. p(x, y) -> p(f(x), y) when `block_offset` = 0, or to any
// other block. `f` has one polynomial per block variable, all over the
// same space as the result.
Polynomial substitute_block(const Polynomial& p, const std::vector<Polynomial>& f,
                            int block_offset, const VariableSpace& target);

}  // namespace vcert

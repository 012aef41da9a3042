#pragma once

#include <map>
#include <string>
#include <vector>

#include "vcert/sdp.hpp"
#include "vcert/semialg.hpp"

namespace vcert::sos {

struct TemplateId {
  int id = -1;
};

// Polynomial expression affine in scalar decision variables:
//   fixed(x) + sum_v v * weight_v(x).
// The A matrices, gamma/rho constants and region assignments are fixed
// numbers at build time, so every certificate condition stays affine.
class AffinePolyExpr {
 public:
  AffinePolyExpr() = default;
  explicit AffinePolyExpr(const VariableSpace& space)
      : space_(space), fixed_(Polynomial::zero(space)) {}
  static AffinePolyExpr from_poly(Polynomial p);

  const VariableSpace& space() const { return space_; }
  const Polynomial& fixed() const { return fixed_; }
  const std::map<int, Polynomial>& linear() const { return linear_; }
  bool has_decision_terms() const { return !linear_.empty(); }

  void add_fixed(const Polynomial& p);
  void add_scalar_term(int scalar_var, const Polynomial& weight);

  AffinePolyExpr operator+(const AffinePolyExpr& o) const;
  AffinePolyExpr operator-(const AffinePolyExpr& o) const;
  AffinePolyExpr scaled(double s) const;

  // Product with the affinity guard: multiplying two decision-bearing
  // expressions would create bilinear terms and is rejected.
  static AffinePolyExpr multiply(const AffinePolyExpr& a, const AffinePolyExpr& b);

  int max_degree() const;  // over fixed part and all weights

  // Substitutes realized scalar values, yielding a plain polynomial.
  Polynomial realize(const std::vector<double>& scalar_values) const;

 private:
  VariableSpace space_;
  Polynomial fixed_;
  std::map<int, Polynomial> linear_;
};

// head - sum_i (const_i * antecedent_i); the S-procedure with fixed
// nonnegative constants (gamma, rho, A entries).
AffinePolyExpr s_procedure_expr(const AffinePolyExpr& head,
                                const std::vector<std::pair<double, AffinePolyExpr>>& antecedents);

struct ScalarVar {
  std::string name;
  bool lower_bounded = false;
  double lower_bound = 0.0;
};

struct TemplateInfo {
  std::string name;
  VariableSpace space;
  int degree = 0;
  std::vector<Monomial> basis;  // graded-lex
  int first_scalar = 0;         // coefficient scalars are contiguous
};

struct SosConstraint {
  AffinePolyExpr expr;
  SemiAlgebraicSet domain;
  int target_degree = 0;  // even Putinar degree D
  std::string label;
};

struct CompiledBlockInfo {
  int sdp_block = -1;
  std::vector<Monomial> basis;
  Polynomial weight;  // the g_i it multiplies (constant 1 for the principal)
};

struct CompiledConstraint {
  int first_row = 0;
  int row_count = 0;
  CompiledBlockInfo principal;
  std::vector<CompiledBlockInfo> multipliers;
};

struct CompiledProgram {
  sdp::SdpProblem sdp;
  std::vector<CompiledConstraint> constraints;
  std::string size_report;
};

class SosProgram {
 public:
  int add_scalar(const std::string& name);
  int add_scalar_lower_bounded(const std::string& name, double lb);
  int scalar_count() const { return static_cast<int>(scalars_.size()); }
  const std::vector<ScalarVar>& scalars() const { return scalars_; }

  // minimized linear objective over scalars
  void add_objective_term(int scalar, double coef);

  TemplateId declare_template(const std::string& name, const VariableSpace& space, int degree);
  const TemplateInfo& info(TemplateId t) const { return templates_.at(t.id); }
  int template_count() const { return static_cast<int>(templates_.size()); }

  // T over its own space
  AffinePolyExpr template_expr(TemplateId t) const;
  // T with its variables renamed into `target` via var_map
  AffinePolyExpr template_embedded(TemplateId t, const VariableSpace& target,
                                   const std::vector<int>& var_map) const;
  // T with every variable substituted by a polynomial over `target`
  AffinePolyExpr template_composed(TemplateId t, const std::vector<Polynomial>& images,
                                   const VariableSpace& target) const;

  // Adds "expr is SOS on domain". target_degree -1 picks the smallest even
  // degree covering the expression; `boost` raises it by 2*boost.
  int add_sos_on_set(AffinePolyExpr expr, SemiAlgebraicSet domain, int target_degree = -1,
                     const std::string& label = "", int boost = 0);
  int constraint_count() const { return static_cast<int>(constraints_.size()); }
  const SosConstraint& constraint(int i) const { return constraints_.at(i); }

  CompiledProgram compile() const;

  // Extracts the realized polynomial of a template from solved scalars.
  Polynomial extract(TemplateId t, const std::vector<double>& scalar_values) const;
  // Scalar values (free block) from an SDP solution of the compiled program.
  std::vector<double> scalar_values(const sdp::SdpSolution& sol) const;

 private:
  std::vector<ScalarVar> scalars_;
  std::vector<TemplateInfo> templates_;
  std::vector<SosConstraint> constraints_;
  std::vector<std::pair<int, double>> objective_;
};

// Gram-side reconstruction of one compiled constraint: the polynomial
// sigma_0 + sum_i sigma_i g_i assembled from solved Gram blocks.
Polynomial reconstruct_constraint(const CompiledProgram& prog, int constraint,
                                  const sdp::SdpSolution& sol);

}  // namespace vcert::sos

#include "vcert/sosprog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vcert::sos {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

AffinePolyExpr AffinePolyExpr::from_poly(Polynomial p) {
  AffinePolyExpr e(p.space());
  e.fixed_ = std::move(p);
  return e;
}

void AffinePolyExpr::add_fixed(const Polynomial& p) {
  if (p.space() != space_) throw Error("affine expr: space mismatch");
  fixed_ = fixed_ + p;
}

void AffinePolyExpr::add_scalar_term(int scalar_var, const Polynomial& weight) {
  if (weight.space() != space_) throw Error("affine expr: weight space mismatch");
  auto it = linear_.find(scalar_var);
  if (it == linear_.end())
    linear_.emplace(scalar_var, weight);
  else {
    it->second = it->second + weight;
    if (it->second.is_zero()) linear_.erase(it);
  }
}

AffinePolyExpr AffinePolyExpr::operator+(const AffinePolyExpr& o) const {
  if (space_ != o.space_) throw Error("affine expr: space mismatch in add");
  AffinePolyExpr r = *this;
  r.fixed_ = r.fixed_ + o.fixed_;
  for (const auto& [v, w] : o.linear_) r.add_scalar_term(v, w);
  return r;
}

AffinePolyExpr AffinePolyExpr::operator-(const AffinePolyExpr& o) const {
  return *this + o.scaled(-1.0);
}

AffinePolyExpr AffinePolyExpr::scaled(double s) const {
  AffinePolyExpr r(space_);
  r.fixed_ = fixed_.scaled(s);
  if (s != 0.0)
    for (const auto& [v, w] : linear_) r.linear_.emplace(v, w.scaled(s));
  return r;
}

AffinePolyExpr AffinePolyExpr::multiply(const AffinePolyExpr& a, const AffinePolyExpr& b) {
  if (a.has_decision_terms() && b.has_decision_terms())
    throw Error("bilinear term: cannot multiply two decision-bearing expressions");
  const AffinePolyExpr& dec = a.has_decision_terms() ? a : b;
  const AffinePolyExpr& fix = a.has_decision_terms() ? b : a;
  AffinePolyExpr r(a.space());
  r.fixed_ = dec.fixed_ * fix.fixed_;
  for (const auto& [v, w] : dec.linear_) r.linear_.emplace(v, w * fix.fixed_);
  return r;
}

int AffinePolyExpr::max_degree() const {
  int d = fixed_.degree();
  for (const auto& [v, w] : linear_) d = std::max(d, w.degree());
  return d;
}

Polynomial AffinePolyExpr::realize(const std::vector<double>& scalar_values) const {
  Polynomial p = fixed_;
  for (const auto& [v, w] : linear_) {
    if (v < 0 || v >= static_cast<int>(scalar_values.size()))
      throw Error("realize: scalar index out of range");
    p = p + w.scaled(scalar_values[v]);
  }
  return p;
}

AffinePolyExpr s_procedure_expr(
    const AffinePolyExpr& head,
    const std::vector<std::pair<double, AffinePolyExpr>>& antecedents) {
  AffinePolyExpr r = head;
  for (const auto& [c, ante] : antecedents) {
    if (c < 0) throw Error("s_procedure_expr: negative multiplier constant");
    if (c != 0.0) r = r - ante.scaled(c);
  }
  return r;
}

int SosProgram::add_scalar(const std::string& name) {
  scalars_.push_back({name, false, 0.0});
  return static_cast<int>(scalars_.size()) - 1;
}

int SosProgram::add_scalar_lower_bounded(const std::string& name, double lb) {
  scalars_.push_back({name, true, lb});
  return static_cast<int>(scalars_.size()) - 1;
}

void SosProgram::add_objective_term(int scalar, double coef) {
  objective_.emplace_back(scalar, coef);
}

TemplateId SosProgram::declare_template(const std::string& name, const VariableSpace& space,
                                        int degree) {
  if (degree < 0) throw Error("declare_template: negative degree");
  TemplateInfo info;
  info.name = name;
  info.space = space;
  info.degree = degree;
  info.basis = monomial_basis(space, degree);
  info.first_scalar = static_cast<int>(scalars_.size());
  for (size_t k = 0; k < info.basis.size(); ++k)
    add_scalar(name + "[" + std::to_string(k) + "]");
  templates_.push_back(std::move(info));
  return TemplateId{static_cast<int>(templates_.size()) - 1};
}

AffinePolyExpr SosProgram::template_expr(TemplateId t) const {
  const auto& info = templates_.at(t.id);
  AffinePolyExpr e(info.space);
  for (size_t k = 0; k < info.basis.size(); ++k)
    e.add_scalar_term(info.first_scalar + static_cast<int>(k),
                      Polynomial::monomial(info.space, info.basis[k], 1.0));
  return e;
}

AffinePolyExpr SosProgram::template_embedded(TemplateId t, const VariableSpace& target,
                                             const std::vector<int>& var_map) const {
  const auto& info = templates_.at(t.id);
  AffinePolyExpr e(target);
  for (size_t k = 0; k < info.basis.size(); ++k) {
    auto mono = Polynomial::monomial(info.space, info.basis[k], 1.0);
    e.add_scalar_term(info.first_scalar + static_cast<int>(k), mono.embed(target, var_map));
  }
  return e;
}

AffinePolyExpr SosProgram::template_composed(TemplateId t, const std::vector<Polynomial>& images,
                                             const VariableSpace& target) const {
  const auto& info = templates_.at(t.id);
  if (static_cast<int>(images.size()) != info.space.arity())
    throw Error("template_composed: one image per template variable required");
  std::vector<std::optional<Polynomial>> subst(images.size());
  for (size_t i = 0; i < images.size(); ++i) subst[i] = images[i];
  AffinePolyExpr e(target);
  for (size_t k = 0; k < info.basis.size(); ++k) {
    auto mono = Polynomial::monomial(info.space, info.basis[k], 1.0);
    e.add_scalar_term(info.first_scalar + static_cast<int>(k), mono.compose(subst, target));
  }
  return e;
}

int SosProgram::add_sos_on_set(AffinePolyExpr expr, SemiAlgebraicSet domain, int target_degree,
                               const std::string& label, int boost) {
  if (expr.space() != domain.space()) throw Error("add_sos_on_set: expr/domain space mismatch");
  const int need = expr.max_degree();
  int D = target_degree;
  if (D < 0) D = 2 * ((need + 1) / 2);
  D += 2 * boost;
  if (D % 2 != 0) throw Error("add_sos_on_set: target degree must be even");
  if (D < need)
    throw Error("add_sos_on_set: target degree " + std::to_string(D) +
                " below expression degree " + std::to_string(need));
  for (const auto& g : domain.constraints())
    if (g.degree() > D)
      throw Error("add_sos_on_set: domain constraint degree exceeds target degree");
  constraints_.push_back({std::move(expr), std::move(domain), D, label});
  return static_cast<int>(constraints_.size()) - 1;
}

CompiledProgram SosProgram::compile() const {
  CompiledProgram out;
  auto& sdp = out.sdp;
  sdp.free_count = static_cast<int>(scalars_.size());
  for (size_t v = 0; v < scalars_.size(); ++v)
    if (scalars_[v].lower_bounded)
      sdp.free_lower_bounds.emplace_back(static_cast<int>(v), scalars_[v].lower_bound);
  for (const auto& [v, c] : objective_) sdp.add_objective(sdp.free_col(v), c);

  for (const auto& con : constraints_) {
    CompiledConstraint cc;
    const auto& S = con.expr.space();
    const int D = con.target_degree;
    cc.principal.sdp_block = static_cast<int>(sdp.psd_dims.size());
    cc.principal.basis = monomial_basis(S, D / 2);
    cc.principal.weight = Polynomial::constant(S, 1.0);
    sdp.psd_dims.push_back(static_cast<int>(cc.principal.basis.size()));
    for (const auto& g : con.domain.constraints()) {
      CompiledBlockInfo mb;
      mb.sdp_block = static_cast<int>(sdp.psd_dims.size());
      mb.basis = monomial_basis(S, (D - g.degree()) / 2);
      mb.weight = g;
      sdp.psd_dims.push_back(static_cast<int>(mb.basis.size()));
      cc.multipliers.push_back(std::move(mb));
    }
    out.constraints.push_back(std::move(cc));
  }

  for (size_t ci = 0; ci < constraints_.size(); ++ci) {
    const auto& con = constraints_[ci];
    auto& cc = out.constraints[ci];
    const auto& S = con.expr.space();
    const int D = con.target_degree;
    auto rows_basis = monomial_basis(S, D);
    std::map<Monomial, int, GradedLexLess> row_of;
    for (size_t r = 0; r < rows_basis.size(); ++r)
      row_of.emplace(rows_basis[r], static_cast<int>(r));

    std::vector<std::vector<sdp::SdpProblem::Entry>> entries(rows_basis.size());
    std::vector<double> rhs(rows_basis.size(), 0.0);

    auto scatter_block = [&](const CompiledBlockInfo& blk) {
      const auto& basis = blk.basis;
      for (size_t a = 0; a < basis.size(); ++a)
        for (size_t b = a; b < basis.size(); ++b) {
          const auto prod = basis[a].times(basis[b]);
          const double w = (a == b) ? 1.0 : kSqrt2;
          const auto col =
              sdp.psd_entry_col(blk.sdp_block, static_cast<int>(a), static_cast<int>(b));
          for (const auto& [gm, gc] : blk.weight.terms()) {
            auto it = row_of.find(prod.times(gm));
            if (it == row_of.end())
              throw Error("compile: block term degree exceeds target degree");
            entries[it->second].push_back({col, w * gc});
          }
        }
    };
    scatter_block(cc.principal);
    for (const auto& mb : cc.multipliers) scatter_block(mb);

    // decision-variable terms move to the left-hand side with flipped sign
    for (const auto& [v, w] : con.expr.linear())
      for (const auto& [m, c] : w.terms()) {
        auto it = row_of.find(m);
        if (it == row_of.end()) throw Error("compile: expression degree exceeds target degree");
        entries[it->second].push_back({sdp.free_col(v), -c});
      }
    for (const auto& [m, c] : con.expr.fixed().terms()) {
      auto it = row_of.find(m);
      if (it == row_of.end()) throw Error("compile: expression degree exceeds target degree");
      rhs[it->second] += c;
    }

    cc.first_row = static_cast<int>(sdp.rows.size());
    cc.row_count = static_cast<int>(rows_basis.size());
    for (size_t r = 0; r < rows_basis.size(); ++r) sdp.add_row(std::move(entries[r]), rhs[r]);
  }

  std::ostringstream rep;
  rep << "sos program: " << constraints_.size() << " constraints, " << scalars_.size()
      << " scalars\n";
  for (size_t ci = 0; ci < constraints_.size(); ++ci) {
    const auto& con = constraints_[ci];
    const auto& cc = out.constraints[ci];
    rep << "  [" << ci << "] " << (con.label.empty() ? "sos" : con.label)
        << ": D=" << con.target_degree << " principal " << cc.principal.basis.size() << "x"
        << cc.principal.basis.size() << " multipliers";
    for (const auto& mb : cc.multipliers) rep << " " << mb.basis.size() << "x" << mb.basis.size();
    rep << " rows " << cc.row_count << "\n";
  }
  rep << "  sdp: " << sdp.size_report();
  out.size_report = rep.str();
  return out;
}

Polynomial SosProgram::extract(TemplateId t, const std::vector<double>& scalar_values) const {
  const auto& info = templates_.at(t.id);
  Polynomial p(info.space);
  for (size_t k = 0; k < info.basis.size(); ++k) {
    const double c = scalar_values.at(info.first_scalar + k);
    if (c != 0.0) p = p + Polynomial::monomial(info.space, info.basis[k], c);
  }
  return p;
}

std::vector<double> SosProgram::scalar_values(const sdp::SdpSolution& sol) const {
  if (sol.free_vars.size() != static_cast<int>(scalars_.size()))
    throw Error("scalar_values: solution does not match program");
  std::vector<double> v(scalars_.size());
  for (size_t i = 0; i < scalars_.size(); ++i) v[i] = sol.free_vars[static_cast<int>(i)];
  return v;
}

Polynomial reconstruct_constraint(const CompiledProgram& prog, int constraint,
                                  const sdp::SdpSolution& sol) {
  const auto& cc = prog.constraints.at(constraint);
  auto accumulate = [&](const CompiledBlockInfo& blk, Polynomial acc) {
    const auto& Q = sol.psd_blocks.at(blk.sdp_block);
    const auto& space = blk.weight.space();
    Polynomial sigma(space);
    for (size_t a = 0; a < blk.basis.size(); ++a)
      for (size_t b = a; b < blk.basis.size(); ++b) {
        const double q = Q(static_cast<int>(a), static_cast<int>(b));
        if (q == 0.0) continue;
        const double coef = (a == b) ? q : 2.0 * q;
        sigma = sigma + Polynomial::monomial(space, blk.basis[a].times(blk.basis[b]), coef);
      }
    return acc + sigma * blk.weight;
  };
  Polynomial total = Polynomial::zero(cc.principal.weight.space());
  total = accumulate(cc.principal, total);
  for (const auto& mb : cc.multipliers) total = accumulate(mb, total);
  return total;
}

}  // namespace vcert::sos

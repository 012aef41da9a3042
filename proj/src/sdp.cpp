#include "vcert/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "vcert/poly.hpp"  // for vcert::Error

namespace vcert::sdp {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

std::int64_t SdpProblem::psd_svec_len() const {
  std::int64_t n = 0;
  for (int d : psd_dims) n += static_cast<std::int64_t>(d) * (d + 1) / 2;
  return n;
}

std::int64_t SdpProblem::psd_block_offset(int block) const {
  std::int64_t off = 0;
  for (int b = 0; b < block; ++b)
    off += static_cast<std::int64_t>(psd_dims[b]) * (psd_dims[b] + 1) / 2;
  return off;
}

std::int64_t SdpProblem::psd_entry_col(int block, int i, int j) const {
  if (i > j) std::swap(i, j);
  return psd_block_offset(block) + static_cast<std::int64_t>(j) * (j + 1) / 2 + i;
}

int SdpProblem::add_row(std::vector<Entry> entries, double b) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b2) { return a.col < b2.col; });
  // merge duplicate columns
  std::vector<Entry> merged;
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().col == e.col)
      merged.back().coef += e.coef;
    else
      merged.push_back(e);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Entry& e) { return e.coef == 0.0; }),
               merged.end());
  rows.push_back(std::move(merged));
  rhs.push_back(b);
  return static_cast<int>(rows.size()) - 1;
}

void SdpProblem::add_objective(std::int64_t col, double coef) {
  for (auto& e : objective)
    if (e.col == col) {
      e.coef += coef;
      return;
    }
  objective.push_back({col, coef});
}

std::string SdpProblem::size_report() const {
  std::ostringstream out;
  out << "blocks " << psd_dims.size() << " [";
  for (size_t i = 0; i < psd_dims.size(); ++i) out << (i ? " " : "") << psd_dims[i];
  out << "] nonneg " << nonneg_count << " free " << free_count << " equalities " << rows.size()
      << " cone_cols " << cone_cols();
  return out.str();
}

void SdpProblem::write_text(std::ostream& out) const {
  out << "sdp v1\n";
  out << "psd";
  for (int d : psd_dims) out << " " << d;
  out << "\nnonneg " << nonneg_count << "\nfree " << free_count << "\n";
  out << "rows " << rows.size() << "\n";
  out.precision(17);
  for (size_t i = 0; i < rows.size(); ++i) {
    out << "row " << rows[i].size();
    for (const auto& e : rows[i]) out << " " << e.col << " " << e.coef;
    out << " " << rhs[i] << "\n";
  }
  out << "obj " << objective.size();
  for (const auto& e : objective) out << " " << e.col << " " << e.coef;
  out << "\nbounds " << free_lower_bounds.size();
  for (const auto& [i, lb] : free_lower_bounds) out << " " << i << " " << lb;
  out << "\n";
}

SdpProblem SdpProblem::read_text(std::istream& in) {
  SdpProblem p;
  std::string tok;
  in >> tok;
  if (tok != "sdp") throw Error("sdp text: bad magic");
  in >> tok;  // version
  in >> tok;
  if (tok != "psd") throw Error("sdp text: expected psd");
  // dims until "nonneg"
  while (in >> tok && tok != "nonneg") p.psd_dims.push_back(std::stoi(tok));
  in >> p.nonneg_count;
  in >> tok >> p.free_count;
  size_t m;
  in >> tok >> m;
  for (size_t i = 0; i < m; ++i) {
    in >> tok;
    size_t nnz;
    in >> nnz;
    std::vector<Entry> es(nnz);
    for (auto& e : es) in >> e.col >> e.coef;
    double b;
    in >> b;
    p.rows.push_back(std::move(es));
    p.rhs.push_back(b);
  }
  size_t nobj;
  in >> tok >> nobj;
  p.objective.resize(nobj);
  for (auto& e : p.objective) in >> e.col >> e.coef;
  size_t nb;
  in >> tok >> nb;
  p.free_lower_bounds.resize(nb);
  for (auto& [i, lb] : p.free_lower_bounds) in >> i >> lb;
  return p;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

Diagnostics validate(const SdpProblem& p) {
  Diagnostics d;
  for (int dim : p.psd_dims)
    if (dim <= 0) d.errors.push_back("empty PSD block");
  const auto total = p.total_cols();
  std::vector<char> referenced(static_cast<size_t>(total), 0);
  for (size_t i = 0; i < p.rows.size(); ++i) {
    if (p.rows[i].empty()) d.errors.push_back("zero equality row " + std::to_string(i));
    for (const auto& e : p.rows[i]) {
      if (e.col < 0 || e.col >= total)
        d.errors.push_back("row " + std::to_string(i) + " references unknown column");
      else
        referenced[static_cast<size_t>(e.col)] = 1;
    }
  }
  for (const auto& e : p.objective)
    if (e.col >= 0 && e.col < total) referenced[static_cast<size_t>(e.col)] = 1;
  for (int i = 0; i < p.free_count; ++i)
    if (!referenced[static_cast<size_t>(p.free_col(i))])
      d.warnings.push_back("free scalar " + std::to_string(i) +
                           " unreferenced (unbounded direction)");
  // duplicate rows
  std::map<std::string, int> seen;
  for (size_t i = 0; i < p.rows.size(); ++i) {
    std::ostringstream key;
    for (const auto& e : p.rows[i]) key << e.col << ":" << e.coef << ";";
    key << "=" << p.rhs[i];
    auto [it, inserted] = seen.emplace(key.str(), static_cast<int>(i));
    if (!inserted)
      d.warnings.push_back("row " + std::to_string(i) + " duplicates row " +
                           std::to_string(it->second));
  }
  // rank check only at small scale
  if (!p.rows.empty() && p.rows.size() <= 500 && p.total_cols() <= 20000) {
    Eigen::MatrixXd A(p.rows.size(), p.total_cols());
    A.setZero();
    for (size_t i = 0; i < p.rows.size(); ++i)
      for (const auto& e : p.rows[i]) A(static_cast<int>(i), e.col) = e.coef;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A.transpose());
    if (qr.rank() < static_cast<int>(p.rows.size()))
      d.warnings.push_back("equality rows are rank deficient (rank " +
                           std::to_string(qr.rank()) + " of " + std::to_string(p.rows.size()) +
                           ")");
  }
  return d;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct BlockEntry {
  int i, j;
  double val;  // matrix value A(i,j) (= A(j,i))
};

// the solver-internal, presolved problem: bounded free scalars shifted
// into the nonneg cone
struct Presolved {
  std::vector<int> dims;
  int p = 0;  // nonneg
  int f = 0;  // free
  int m = 0;
  std::vector<std::vector<SdpProblem::Entry>> rows;  // cone part only (col < cone_cols)
  VectorXd rhs;
  VectorXd c_cone;
  VectorXd c_free;
  MatrixXd A_free;  // m x f
  double obj_offset = 0.0;
  // mapping back: for each original free var, either (true, nonneg index,
  // lower bound) or (false, new free index, 0)
  struct FreeMap {
    bool bounded;
    int index;
    double lb;
  };
  std::vector<FreeMap> free_map;
  std::vector<double> row_scale;
  double c_scale = 1.0;

  std::int64_t svec_len = 0;
  std::int64_t cone_len = 0;
  std::vector<std::int64_t> block_off;
  // per PSD block: rows touching it with their local entries
  std::vector<std::vector<std::pair<int, std::vector<BlockEntry>>>> block_rows;
  std::vector<std::vector<BlockEntry>> block_c;  // objective per block
  // nonneg: per column, list of (row, coef)
  std::vector<std::vector<std::pair<int, double>>> nn_cols;
};

Presolved presolve(const SdpProblem& in) {
  Presolved P;
  P.dims = in.psd_dims;
  P.m = static_cast<int>(in.rows.size());
  std::map<int, double> bound_of;
  for (const auto& [i, lb] : in.free_lower_bounds) bound_of[i] = lb;
  // layout of transformed columns
  const std::int64_t in_cone = in.cone_cols();
  P.p = in.nonneg_count + static_cast<int>(bound_of.size());
  P.f = in.free_count - static_cast<int>(bound_of.size());
  P.free_map.resize(in.free_count);
  {
    int next_nn = in.nonneg_count, next_free = 0;
    for (int i = 0; i < in.free_count; ++i) {
      auto it = bound_of.find(i);
      if (it != bound_of.end())
        P.free_map[i] = {true, next_nn++, it->second};
      else
        P.free_map[i] = {false, next_free++, 0.0};
    }
  }
  P.svec_len = in.psd_svec_len();
  P.cone_len = P.svec_len + P.p;
  P.block_off.resize(P.dims.size());
  for (size_t b = 0; b < P.dims.size(); ++b) P.block_off[b] = in.psd_block_offset(static_cast<int>(b));

  P.rhs = VectorXd::Zero(P.m);
  P.A_free = MatrixXd::Zero(P.m, P.f);
  P.rows.resize(P.m);
  P.row_scale.assign(P.m, 1.0);
  for (int r = 0; r < P.m; ++r) {
    double b = in.rhs[r];
    double maxabs = std::abs(b);
    for (const auto& e : in.rows[r]) maxabs = std::max(maxabs, std::abs(e.coef));
    const double s = maxabs > 1.0 ? 1.0 / maxabs : 1.0;
    P.row_scale[r] = s;
    for (const auto& e : in.rows[r]) {
      if (e.col < in_cone) {
        P.rows[r].push_back({e.col, e.coef * s});
      } else {
        const int fi = static_cast<int>(e.col - in_cone);
        const auto& fm = P.free_map[fi];
        if (fm.bounded) {
          P.rows[r].push_back({P.svec_len + fm.index, e.coef * s});
          b -= e.coef * fm.lb;
        } else {
          P.A_free(r, fm.index) += e.coef * s;
        }
      }
    }
    P.rhs[r] = b * s;
  }
  P.c_cone = VectorXd::Zero(P.cone_len);
  P.c_free = VectorXd::Zero(P.f);
  double cmax = 0.0;
  for (const auto& e : in.objective) cmax = std::max(cmax, std::abs(e.coef));
  P.c_scale = cmax > 1.0 ? 1.0 / cmax : 1.0;
  for (const auto& e : in.objective) {
    if (e.col < in_cone) {
      P.c_cone[e.col] += e.coef * P.c_scale;
    } else {
      const int fi = static_cast<int>(e.col - in_cone);
      const auto& fm = P.free_map[fi];
      if (fm.bounded) {
        P.c_cone[P.svec_len + fm.index] += e.coef * P.c_scale;
        P.obj_offset += e.coef * fm.lb;  // unscaled offset
      } else {
        P.c_free[fm.index] += e.coef * P.c_scale;
      }
    }
  }
  // incidence structures
  P.block_rows.resize(P.dims.size());
  P.nn_cols.resize(P.p);
  auto locate = [&](std::int64_t col) -> std::pair<int, std::pair<int, int>> {
    // returns (block, (i,j)) for svec columns, block=-1 for nonneg
    if (col >= P.svec_len) return {-1, {static_cast<int>(col - P.svec_len), 0}};
    int b = 0;
    while (b + 1 < static_cast<int>(P.dims.size()) && col >= P.block_off[b + 1]) ++b;
    std::int64_t local = col - P.block_off[b];
    int j = static_cast<int>((std::sqrt(8.0 * static_cast<double>(local) + 1) - 1) / 2);
    while (static_cast<std::int64_t>(j) * (j + 1) / 2 > local) --j;
    while (static_cast<std::int64_t>(j + 1) * (j + 2) / 2 <= local) ++j;
    int i = static_cast<int>(local - static_cast<std::int64_t>(j) * (j + 1) / 2);
    return {b, {i, j}};
  };
  std::vector<std::map<int, std::vector<BlockEntry>>> tmp(P.dims.size());
  for (int r = 0; r < P.m; ++r) {
    for (const auto& e : P.rows[r]) {
      auto [b, ij] = locate(e.col);
      if (b < 0) {
        P.nn_cols[ij.first].push_back({r, e.coef});
      } else {
        const double matval = (ij.first == ij.second) ? e.coef : e.coef / kSqrt2;
        tmp[b][r].push_back({ij.first, ij.second, matval});
      }
    }
  }
  for (size_t b = 0; b < P.dims.size(); ++b) {
    P.block_rows[b].assign(tmp[b].begin(), tmp[b].end());
  }
  P.block_c.resize(P.dims.size());
  for (size_t b = 0; b < P.dims.size(); ++b) {
    const int n = P.dims[b];
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= j; ++i) {
        const double v = P.c_cone[P.block_off[b] + static_cast<std::int64_t>(j) * (j + 1) / 2 + i];
        if (v != 0.0) P.block_c[b].push_back({i, j, i == j ? v : v / kSqrt2});
      }
  }
  return P;
}

MatrixXd smat(const Presolved& P, int b, const VectorXd& v) {
  const int n = P.dims[b];
  MatrixXd M(n, n);
  std::int64_t k = P.block_off[b];
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i, ++k) {
      const double x = (i == j) ? v[k] : v[k] / kSqrt2;
      M(i, j) = x;
      M(j, i) = x;
    }
  return M;
}

void svec_into(const Presolved& P, int b, const MatrixXd& M, VectorXd& v) {
  const int n = P.dims[b];
  std::int64_t k = P.block_off[b];
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i, ++k) v[k] = (i == j) ? M(i, j) : M(i, j) * kSqrt2;
}

struct Scaling {
  // per PSD block
  std::vector<MatrixXd> R, Rinv;
  std::vector<VectorXd> lambda;  // scaled diagonal
  // nonneg
  VectorXd w2;       // w_i^2 = x_i / z_i
  VectorXd lam_nn;   // sqrt(x_i z_i)
};

bool compute_scaling(const Presolved& P, const VectorXd& x, const VectorXd& z, Scaling& S) {
  const size_t B = P.dims.size();
  S.R.resize(B);
  S.Rinv.resize(B);
  S.lambda.resize(B);
  for (size_t b = 0; b < B; ++b) {
    MatrixXd X = smat(P, static_cast<int>(b), x);
    MatrixXd Z = smat(P, static_cast<int>(b), z);
    Eigen::LLT<MatrixXd> lx(X), lz(Z);
    if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    MatrixXd Lx = lx.matrixL(), Lz = lz.matrixL();
    Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Lx,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
    VectorXd sv = svd.singularValues();
    if (sv.minCoeff() <= 0) return false;
    VectorXd si = sv.array().sqrt().inverse();
    S.R[b] = Lx * svd.matrixV() * si.asDiagonal();
    S.Rinv[b] = si.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
    S.lambda[b] = sv;
  }
  S.w2 = VectorXd(P.p);
  S.lam_nn = VectorXd(P.p);
  for (int i = 0; i < P.p; ++i) {
    const double xi = x[P.svec_len + i], zi = z[P.svec_len + i];
    if (xi <= 0 || zi <= 0) return false;
    S.w2[i] = xi / zi;
    S.lam_nn[i] = std::sqrt(xi * zi);
  }
  return true;
}

// v_out = W v W per PSD block and w^2 * v on the nonneg part
VectorXd apply_W(const Presolved& P, const Scaling& S, const VectorXd& v) {
  VectorXd out(P.cone_len);
  for (size_t b = 0; b < P.dims.size(); ++b) {
    MatrixXd M = smat(P, static_cast<int>(b), v);
    MatrixXd W = S.R[b] * S.R[b].transpose();
    MatrixXd U = W * M * W;
    svec_into(P, static_cast<int>(b), U, out);
  }
  for (int i = 0; i < P.p; ++i) out[P.svec_len + i] = S.w2[i] * v[P.svec_len + i];
  return out;
}

VectorXd apply_A(const Presolved& P, const VectorXd& cone) {
  VectorXd out = VectorXd::Zero(P.m);
  for (int r = 0; r < P.m; ++r) {
    double s = 0;
    for (const auto& e : P.rows[r]) s += e.coef * cone[e.col];
    out[r] = s;
  }
  return out;
}

VectorXd apply_At(const Presolved& P, const VectorXd& y) {
  VectorXd out = VectorXd::Zero(P.cone_len);
  for (int r = 0; r < P.m; ++r) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    for (const auto& e : P.rows[r]) out[e.col] += e.coef * yr;
  }
  return out;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts) {
  if (static_cast<int>(problem.rows.size()) > opts.max_equality_rows)
    throw Error("sdp size guardrail: " + std::to_string(problem.rows.size()) +
                " equality rows exceed the dense-solver limit of " +
                std::to_string(opts.max_equality_rows));
  {
    auto diag = validate(problem);
    if (!diag.ok()) throw Error("sdp validate: " + diag.errors.front());
  }
  Presolved P = presolve(problem);
  SdpSolution sol;

  auto finalize = [&](SolveStatus st, const VectorXd& x, const VectorXd& xf, const VectorXd& y,
                      double tau, const std::string& msg) {
    sol.status = st;
    sol.message = msg;
    const double t = tau > 0 ? tau : 1.0;
    sol.psd_blocks.clear();
    for (size_t b = 0; b < P.dims.size(); ++b)
      sol.psd_blocks.push_back(smat(P, static_cast<int>(b), x) / t);
    sol.nonneg = VectorXd(problem.nonneg_count);
    for (int i = 0; i < problem.nonneg_count; ++i) sol.nonneg[i] = x[P.svec_len + i] / t;
    sol.free_vars = VectorXd(problem.free_count);
    for (int i = 0; i < problem.free_count; ++i) {
      const auto& fm = P.free_map[i];
      sol.free_vars[i] = fm.bounded ? fm.lb + x[P.svec_len + fm.index] / t : xf[fm.index] / t;
    }
    sol.dual_y = VectorXd(P.m);
    for (int r = 0; r < P.m; ++r) sol.dual_y[r] = y[r] * P.row_scale[r] / (P.c_scale * t);
    double pobj = 0;
    for (const auto& e : problem.objective) {
      if (e.col < problem.cone_cols()) {
        // read from x via its column
        // svec columns match P columns directly
        pobj += e.coef * x[e.col] / t;
      } else {
        pobj += e.coef * sol.free_vars[e.col - problem.cone_cols()];
      }
    }
    sol.objective = pobj;
  };

  // trivial cases
  if (P.m == 0) {
    VectorXd x = VectorXd::Zero(P.cone_len), xf = VectorXd::Zero(P.f), y(0);
    if (P.c_free.size() > 0 && P.c_free.cwiseAbs().maxCoeff() > 0) {
      finalize(SolveStatus::Unbounded, x, xf, y, 1.0, "free variable with nonzero cost, no constraints");
      return sol;
    }
    bool bounded = true;
    for (size_t b = 0; b < P.dims.size(); ++b) {
      MatrixXd C = smat(P, static_cast<int>(b), P.c_cone);
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(C);
      if (es.eigenvalues().minCoeff() < -1e-12) bounded = false;
    }
    for (int i = 0; i < P.p; ++i)
      if (P.c_cone[P.svec_len + i] < -1e-12) bounded = false;
    finalize(bounded ? SolveStatus::Optimal : SolveStatus::Unbounded, x, xf, y, 1.0,
             "no equality constraints");
    return sol;
  }

  // HSD state
  VectorXd x(P.cone_len), z(P.cone_len);
  x.setZero();
  z.setZero();
  for (size_t b = 0; b < P.dims.size(); ++b) {
    const int n = P.dims[b];
    for (int j = 0; j < n; ++j) {
      x[P.block_off[b] + static_cast<std::int64_t>(j) * (j + 1) / 2 + j] = 1.0;
      z[P.block_off[b] + static_cast<std::int64_t>(j) * (j + 1) / 2 + j] = 1.0;
    }
  }
  for (int i = 0; i < P.p; ++i) {
    x[P.svec_len + i] = 1.0;
    z[P.svec_len + i] = 1.0;
  }
  VectorXd xf = VectorXd::Zero(P.f);
  VectorXd y = VectorXd::Zero(P.m);
  double tau = 1.0, kappa = 1.0;

  double nu = 0;
  for (int d : P.dims) nu += d;
  nu += P.p;

  const double bnorm = 1.0 + P.rhs.norm();
  const double cnorm = 1.0 + std::sqrt(P.c_cone.squaredNorm() + P.c_free.squaredNorm());

  Scaling S;
  const int m = P.m;
  MatrixXd M(m, m);

  auto form_M = [&]() {
    M.setZero();
    for (size_t b = 0; b < P.dims.size(); ++b) {
      const auto& rows_b = P.block_rows[b];
      if (rows_b.empty()) continue;
      const int n = P.dims[b];
      MatrixXd W = S.R[b] * S.R[b].transpose();
      const int nr = static_cast<int>(rows_b.size());
      std::vector<MatrixXd> U(nr);
      for (int t = 0; t < nr; ++t) {
        MatrixXd Ai = MatrixXd::Zero(n, n);
        for (const auto& e : rows_b[t].second) {
          Ai(e.i, e.j) = e.val;
          Ai(e.j, e.i) = e.val;
        }
        U[t] = W * Ai * W;
      }
      for (int t = 0; t < nr; ++t) {
        const int rt = rows_b[t].first;
        for (int s2 = t; s2 < nr; ++s2) {
          const int rs = rows_b[s2].first;
          double acc = 0;
          for (const auto& e : rows_b[s2].second) {
            acc += (e.i == e.j ? 1.0 : 2.0) * e.val * U[t](e.i, e.j);
          }
          M(rt, rs) += acc;
          if (rt != rs) M(rs, rt) += acc;
        }
      }
    }
    for (int i = 0; i < P.p; ++i) {
      const auto& colrows = P.nn_cols[i];
      const double w2 = S.w2[i];
      for (size_t a = 0; a < colrows.size(); ++a)
        for (size_t c = a; c < colrows.size(); ++c) {
          const double v = w2 * colrows[a].second * colrows[c].second;
          M(colrows[a].first, colrows[c].first) += v;
          if (colrows[a].first != colrows[c].first) M(colrows[c].first, colrows[a].first) += v;
        }
    }
  };

  Eigen::LLT<MatrixXd> lltM;
  Eigen::LLT<MatrixXd> lltSf;
  MatrixXd MinvAf;

  auto factorize = [&]() -> bool {
    lltM.compute(M);
    if (lltM.info() != Eigen::Success) {
      // static ridge fallback
      const double ridge = 1e-12 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
      MatrixXd M2 = M + ridge * MatrixXd::Identity(m, m);
      lltM.compute(M2);
      if (lltM.info() != Eigen::Success) return false;
    }
    if (P.f > 0) {
      MinvAf = lltM.solve(P.A_free);
      MatrixXd Sf = P.A_free.transpose() * MinvAf;
      Sf += 1e-14 * (1.0 + Sf.diagonal().cwiseAbs().maxCoeff()) *
            MatrixXd::Identity(P.f, P.f);
      lltSf.compute(Sf);
      if (lltSf.info() != Eigen::Success) return false;
    }
    return true;
  };

  // solve [M Af; Af' 0] [p; q] = [r; s]
  auto solve_k2 = [&](const VectorXd& r, const VectorXd& s, VectorXd& pv, VectorXd& qv) {
    VectorXd w = lltM.solve(r);
    if (P.f > 0) {
      qv = lltSf.solve(P.A_free.transpose() * w - s);
      pv = w - MinvAf * qv;
    } else {
      qv = VectorXd(0);
      pv = w;
    }
  };

  // scaled-space helpers for directions
  auto lambda_inv_circ = [&](const std::vector<MatrixXd>& D4, const VectorXd& d4nn,
                             std::vector<MatrixXd>& E, VectorXd& Enn) {
    E.resize(P.dims.size());
    for (size_t b = 0; b < P.dims.size(); ++b) {
      const int n = P.dims[b];
      E[b] = MatrixXd(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          E[b](i, j) = 2.0 * D4[b](i, j) / (S.lambda[b][i] + S.lambda[b][j]);
    }
    Enn = VectorXd(P.p);
    for (int i = 0; i < P.p; ++i) Enn[i] = d4nn[i] / S.lam_nn[i];
  };

  struct Direction {
    VectorXd dx, dz, dxf, dy;
    double dtau = 0, dkappa = 0;
  };

  VectorXd rp(m), rdK(P.cone_len), rdf(P.f);
  double rg = 0;

  auto compute_direction = [&](double gamma, const std::vector<MatrixXd>& E, const VectorXd& Enn,
                               double d5, Direction& dir) {
    // s1 = from_scaled_x(E) : R E R'
    VectorXd s1(P.cone_len);
    for (size_t b = 0; b < P.dims.size(); ++b) {
      MatrixXd T = S.R[b] * E[b] * S.R[b].transpose();
      svec_into(P, static_cast<int>(b), T, s1);
    }
    for (int i = 0; i < P.p; ++i) s1[P.svec_len + i] = std::sqrt(S.w2[i]) * Enn[i];

    VectorXd Wc = apply_W(P, S, P.c_cone);
    VectorXd h1 = apply_A(P, Wc);
    VectorXd WrdK = apply_W(P, S, rdK);

    const double om = 1.0 - gamma;
    VectorXd u1 = -om * rp - apply_A(P, s1) + om * apply_A(P, WrdK);
    const double cWc = P.c_cone.dot(Wc);
    const double u3 =
        -om * rg + P.c_cone.dot(s1) - om * Wc.dot(rdK) + d5 / tau;

    VectorXd y1, q1, y2, q2;
    solve_k2(u1, om * rdf, y1, q1);
    solve_k2(P.rhs + h1, P.c_free, y2, q2);

    const double denom = (P.rhs - h1).dot(y2) - (P.f > 0 ? P.c_free.dot(q2) : 0.0) + cWc +
                         kappa / tau;
    double num = u3 - (P.rhs - h1).dot(y1) + (P.f > 0 ? P.c_free.dot(q1) : 0.0);
    dir.dtau = denom != 0 ? num / denom : 0.0;
    dir.dy = y1 + dir.dtau * y2;
    dir.dxf = P.f > 0 ? VectorXd(q1 + dir.dtau * q2) : VectorXd(0);
    dir.dz = -apply_At(P, dir.dy) + P.c_cone * dir.dtau + om * rdK;
    dir.dx = s1 - apply_W(P, S, dir.dz);
    dir.dkappa = (d5 - kappa * dir.dtau) / tau;
  };

  auto max_step = [&](const VectorXd& dx, const VectorXd& dz, double dtau, double dkappa) {
    double alpha = 1.0 / 0.99;  // allows full steps after the 0.99 damping
    for (size_t b = 0; b < P.dims.size(); ++b) {
      // scaled dx: Rinv mat(dx) Rinv' ; scaled dz: R' mat(dz) R ; current scaled point diag(lambda)
      MatrixXd DX = S.Rinv[b] * smat(P, static_cast<int>(b), dx) * S.Rinv[b].transpose();
      MatrixXd DZ = S.R[b].transpose() * smat(P, static_cast<int>(b), dz) * S.R[b];
      VectorXd li = S.lambda[b].array().sqrt().inverse();
      MatrixXd NX = li.asDiagonal() * DX * li.asDiagonal();
      MatrixXd NZ = li.asDiagonal() * DZ * li.asDiagonal();
      Eigen::SelfAdjointEigenSolver<MatrixXd> ex(NX), ez(NZ);
      const double mx = ex.eigenvalues().minCoeff();
      const double mz = ez.eigenvalues().minCoeff();
      if (mx < 0) alpha = std::min(alpha, -1.0 / mx);
      if (mz < 0) alpha = std::min(alpha, -1.0 / mz);
    }
    for (int i = 0; i < P.p; ++i) {
      const double xi = x[P.svec_len + i], zi = z[P.svec_len + i];
      if (dx[P.svec_len + i] < 0) alpha = std::min(alpha, -xi / dx[P.svec_len + i]);
      if (dz[P.svec_len + i] < 0) alpha = std::min(alpha, -zi / dz[P.svec_len + i]);
    }
    if (dtau < 0) alpha = std::min(alpha, -tau / dtau);
    if (dkappa < 0) alpha = std::min(alpha, -kappa / dkappa);
    return alpha;
  };

  int iter = 0;
  std::string fail_msg;
  for (; iter < opts.max_iter; ++iter) {
    rp = apply_A(P, x) + (P.f > 0 ? VectorXd(P.A_free * xf) : VectorXd::Zero(m)) - P.rhs * tau;
    rdK = -apply_At(P, y) + P.c_cone * tau - z;
    rdf = P.f > 0 ? VectorXd(-P.A_free.transpose() * y + P.c_free * tau) : VectorXd(0);
    const double cx = P.c_cone.dot(x) + (P.f > 0 ? P.c_free.dot(xf) : 0.0);
    const double by = P.rhs.dot(y);
    rg = by - cx - kappa;
    const double xz = x.dot(z);
    const double mu = (xz + tau * kappa) / (nu + 1);

    const double pres = rp.norm() / (tau * bnorm);
    const double dres =
        std::sqrt(rdK.squaredNorm() + rdf.squaredNorm()) / (tau * cnorm);
    const double pobj = cx / tau, dobj = by / tau;
    const double relgap = (xz / (tau * tau)) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (opts.verbosity > 0) {
      std::ostringstream line;
      line << "iter " << iter << " mu " << mu << " pres " << pres << " dres " << dres
           << " gap " << relgap << " tau " << tau << " kappa " << kappa;
      sol.message += line.str() + "\n";
    }

    if (pres <= opts.tol && dres <= opts.tol && relgap <= opts.tol) {
      sol.primal_residual = pres;
      sol.dual_residual = dres;
      sol.duality_gap = relgap;
      sol.iterations = iter;
      finalize(SolveStatus::Optimal, x, xf, y, tau, "converged");
      sol.dual_objective = (by / tau) / P.c_scale + P.obj_offset;
      return sol;
    }

    // infeasibility via the homogeneous model: tau -> 0, kappa bounded away
    if (tau < 1e-10 * std::max(1.0, kappa) ||
        (mu < opts.tol * 1e-2 && tau < 1e-6 * std::max(1.0, kappa))) {
      if (by > opts.tol * std::max(1.0, y.cwiseAbs().maxCoeff())) {
        sol.iterations = iter;
        finalize(SolveStatus::Infeasible, x, xf, y, 1.0,
                 "homogeneous model: tau -> 0 with b'y > 0 (Farkas ray in dual_y)");
        return sol;
      }
      if (cx < -opts.tol * std::max(1.0, x.cwiseAbs().maxCoeff())) {
        sol.iterations = iter;
        finalize(SolveStatus::Unbounded, x, xf, y, 1.0,
                 "homogeneous model: tau -> 0 with c'x < 0 (improving primal ray)");
        return sol;
      }
      sol.iterations = iter;
      finalize(SolveStatus::NumericalFailure, x, xf, y, tau, "tau and kappa both vanish");
      return sol;
    }

    if (!compute_scaling(P, x, z, S)) {
      fail_msg = "scaling breakdown (iterate left the cone)";
      break;
    }
    form_M();
    if (!factorize()) {
      fail_msg = "Cholesky factorization breakdown";
      break;
    }

    // affine direction
    std::vector<MatrixXd> D4(P.dims.size());
    for (size_t b = 0; b < P.dims.size(); ++b) {
      D4[b] = MatrixXd::Zero(P.dims[b], P.dims[b]);
      D4[b].diagonal() = -S.lambda[b].array().square();
    }
    VectorXd d4nn = -S.lam_nn.array().square();
    std::vector<MatrixXd> E;
    VectorXd Enn;
    lambda_inv_circ(D4, d4nn, E, Enn);
    Direction aff;
    compute_direction(0.0, E, Enn, -tau * kappa, aff);
    double alpha_aff = std::min(1.0, max_step(aff.dx, aff.dz, aff.dtau, aff.dkappa));

    // Mehrotra centering parameter
    VectorXd xa = x + alpha_aff * aff.dx;
    VectorXd za = z + alpha_aff * aff.dz;
    const double mu_aff = (xa.dot(za) + (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa)) / (nu + 1);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::min(sigma, 0.99999);

    // combined direction with Mehrotra correction
    for (size_t b = 0; b < P.dims.size(); ++b) {
      MatrixXd DXh = S.Rinv[b] * smat(P, static_cast<int>(b), aff.dx) * S.Rinv[b].transpose();
      MatrixXd DZh = S.R[b].transpose() * smat(P, static_cast<int>(b), aff.dz) * S.R[b];
      MatrixXd corr = 0.5 * (DXh * DZh + DZh * DXh);
      D4[b] = -corr;
      D4[b].diagonal().array() += sigma * mu;
      D4[b].diagonal() -= S.lambda[b].array().square().matrix();
    }
    for (int i = 0; i < P.p; ++i) {
      const double dxh = aff.dx[P.svec_len + i] / std::sqrt(S.w2[i]);
      const double dzh = aff.dz[P.svec_len + i] * std::sqrt(S.w2[i]);
      d4nn[i] = sigma * mu - S.lam_nn[i] * S.lam_nn[i] - dxh * dzh;
    }
    lambda_inv_circ(D4, d4nn, E, Enn);
    Direction dir;
    compute_direction(sigma, E, Enn, sigma * mu - tau * kappa - aff.dtau * aff.dkappa, dir);

    double alpha = 0.99 * max_step(dir.dx, dir.dz, dir.dtau, dir.dkappa);
    alpha = std::min(alpha, 1.0);
    if (!(alpha > 1e-14)) {
      fail_msg = "step length collapsed";
      break;
    }

    x += alpha * dir.dx;
    z += alpha * dir.dz;
    if (P.f > 0) xf += alpha * dir.dxf;
    y += alpha * dir.dy;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;
  }

  sol.iterations = iter;
  sol.primal_residual = rp.norm() / (tau * bnorm);
  sol.dual_residual = std::sqrt(rdK.squaredNorm() + rdf.squaredNorm()) / (tau * cnorm);
  sol.duality_gap = x.dot(z) / (tau * tau);
  if (!fail_msg.empty()) {
    finalize(SolveStatus::NumericalFailure, x, xf, y, tau, fail_msg);
  } else {
    // max iterations: report whether the trajectory points at infeasibility
    const double by = P.rhs.dot(y);
    if (tau < 1e-6 * std::max(1.0, kappa) && by > 0) {
      finalize(SolveStatus::Infeasible, x, xf, y, 1.0,
               "max iterations; homogeneous trend indicates infeasibility");
    } else {
      finalize(SolveStatus::MaxIter, x, xf, y, tau, "maximum iterations reached");
    }
  }
  return sol;
}

}  // namespace vcert::sdp

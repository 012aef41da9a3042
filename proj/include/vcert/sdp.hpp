#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vcert::sdp {

// Standard-form conic problem
//   min c'x  s.t.  A x = b,  x in K,
// K = PSD(d1) x ... x PSD(dB) x R+^p x R^f (free block last).
// PSD blocks use symmetric vectorization: entries (i <= j) stored as
// X_ij (diagonal) and sqrt(2)*X_ij (off-diagonal), so <A,X> is the plain
// dot product of the two svec vectors.
struct SdpProblem {
  std::vector<int> psd_dims;
  int nonneg_count = 0;
  int free_count = 0;

  struct Entry {
    std::int64_t col;
    double coef;
  };
  std::vector<std::vector<Entry>> rows;  // sparse equality rows
  std::vector<double> rhs;
  std::vector<Entry> objective;
  // optional lower bounds on free scalars (index into the free block)
  std::vector<std::pair<int, double>> free_lower_bounds;

  // column layout helpers
  std::int64_t psd_svec_len() const;
  std::int64_t cone_cols() const { return psd_svec_len() + nonneg_count; }
  std::int64_t total_cols() const { return cone_cols() + free_count; }
  std::int64_t psd_block_offset(int block) const;
  // svec column of entry (i, j), i <= j, of the given block
  std::int64_t psd_entry_col(int block, int i, int j) const;
  std::int64_t nonneg_col(int i) const { return psd_svec_len() + i; }
  std::int64_t free_col(int i) const { return cone_cols() + i; }

  int add_row(std::vector<Entry> entries, double b);
  void add_objective(std::int64_t col, double coef);

  std::string size_report() const;
  void write_text(std::ostream& out) const;
  static SdpProblem read_text(std::istream& in);
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter, NumericalFailure };

std::string to_string(SolveStatus s);

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 200;
  int verbosity = 0;
  // desk-scale guardrail for the dense factorizations
  int max_equality_rows = 4200;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<Eigen::MatrixXd> psd_blocks;
  Eigen::VectorXd nonneg;
  Eigen::VectorXd free_vars;
  Eigen::VectorXd dual_y;
  double objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
  std::string message;
};

// Dense primal-dual interior point method on the homogeneous self-dual
// embedding with Nesterov-Todd scaling and a Mehrotra corrector.
// Infeasibility is declared from the tau/kappa ratio together with a
// Farkas certificate check; "MaxIter" is reported when neither an optimum
// nor a certificate is reached at tolerance.
SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts = {});

struct Diagnostics {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

Diagnostics validate(const SdpProblem& problem);

}  // namespace vcert::sdp

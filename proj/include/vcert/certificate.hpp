#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vcert/poly.hpp"

namespace vcert {

enum class CertificateKind {
  BC,
  CC_Safety,
  CC_Persistence,
  CC_LTL,
  VCBRF_Persistence,
  VCBRF_LTL,
  VCC_Safety,
  VCC_Persistence,
  VCC_LTL,
};

std::string kind_name(CertificateKind k);
CertificateKind kind_from_name(const std::string& name);
bool kind_uses_pair_space(CertificateKind k);
bool kind_is_ltl(CertificateKind k);

// Index of one polynomial of the family: function index (1-based), plus
// automaton state (LTL ranking functions) or state pair (LTL closure
// certificates); -1 where unused.
struct PolyKey {
  int func = 1;
  int q1 = -1;
  int q2 = -1;
  bool operator<(const PolyKey& o) const {
    return std::tie(func, q1, q2) < std::tie(o.func, o.q1, o.q2);
  }
  bool operator==(const PolyKey& o) const {
    return func == o.func && q1 == o.q1 && q2 == o.q2;
  }
};

// One solved SOS constraint kept for the Gram audit: the realized
// expression polynomial and every Gram block with its basis and weight.
struct GramBlock {
  Eigen::MatrixXd Q;
  std::vector<Monomial> basis;
  Polynomial weight;
};

struct SosRecord {
  std::string label;
  Polynomial realized_expr;
  std::vector<GramBlock> blocks;
};

struct VectorCertificate {
  CertificateKind kind = CertificateKind::VCC_Safety;
  int k = 1;
  VariableSpace poly_space;
  std::map<PolyKey, Polynomial> polys;

  Eigen::MatrixXd A;   // VCC / VBC / scalar decay as 1x1
  Eigen::MatrixXd A1;  // VCBRF
  Eigen::MatrixXd A2;
  Eigen::MatrixXd A3;
  std::vector<double> eta;    // per region piece or accepting state; single for VCBRF
  std::vector<double> gamma;  // S-procedure constants (persistence/LTL closure)
  std::vector<double> rho;
  std::vector<int> assignment;  // region piece -> function index (1-based)
  double lambda = 1.0;          // scalar BC/CC decay constant

  std::vector<SosRecord> gram;  // empty for transcribed certificates
  std::string provenance = "synthesized";

  void validate() const;  // A nonnegativity, eta positivity, key shapes
  const Polynomial& poly(const PolyKey& key) const;
};

void write_certificate(std::ostream& out, const VectorCertificate& cert);
VectorCertificate read_certificate(std::istream& in);

std::uint64_t gram_hash(const Eigen::MatrixXd& Q);

}  // namespace vcert

#include "vcert/certificate.hpp"

#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace vcert {

std::string kind_name(CertificateKind k) {
  switch (k) {
    case CertificateKind::BC: return "bc";
    case CertificateKind::CC_Safety: return "cc_safety";
    case CertificateKind::CC_Persistence: return "cc_persistence";
    case CertificateKind::CC_LTL: return "cc_ltl";
    case CertificateKind::VCBRF_Persistence: return "vcbrf_persistence";
    case CertificateKind::VCBRF_LTL: return "vcbrf_ltl";
    case CertificateKind::VCC_Safety: return "vcc_safety";
    case CertificateKind::VCC_Persistence: return "vcc_persistence";
    case CertificateKind::VCC_LTL: return "vcc_ltl";
  }
  return "?";
}

CertificateKind kind_from_name(const std::string& name) {
  for (auto k : {CertificateKind::BC, CertificateKind::CC_Safety, CertificateKind::CC_Persistence,
                 CertificateKind::CC_LTL, CertificateKind::VCBRF_Persistence,
                 CertificateKind::VCBRF_LTL, CertificateKind::VCC_Safety,
                 CertificateKind::VCC_Persistence, CertificateKind::VCC_LTL})
    if (kind_name(k) == name) return k;
  throw Error("unknown certificate kind '" + name + "'");
}

bool kind_uses_pair_space(CertificateKind k) {
  switch (k) {
    case CertificateKind::BC:
    case CertificateKind::VCBRF_Persistence:
    case CertificateKind::VCBRF_LTL:
      return false;
    default:
      return true;
  }
}

bool kind_is_ltl(CertificateKind k) {
  return k == CertificateKind::CC_LTL || k == CertificateKind::VCBRF_LTL ||
         k == CertificateKind::VCC_LTL;
}

void VectorCertificate::validate() const {
  auto check_nonneg = [](const Eigen::MatrixXd& M, const char* name) {
    for (int i = 0; i < M.rows(); ++i)
      for (int j = 0; j < M.cols(); ++j)
        if (M(i, j) < 0)
          throw Error(std::string(name) + " must be elementwise nonnegative (entry " +
                      std::to_string(i) + "," + std::to_string(j) + " is negative)");
  };
  check_nonneg(A, "A");
  check_nonneg(A1, "A1");
  check_nonneg(A2, "A2");
  check_nonneg(A3, "A3");
  for (double e : eta)
    if (!(e > 0)) throw Error("eta must be positive");
  for (double g : gamma)
    if (g < 0) throw Error("gamma must be nonnegative");
  for (double r : rho)
    if (r < 0) throw Error("rho must be nonnegative");
  for (const auto& [key, p] : polys) {
    if (key.func < 1 || key.func > k) throw Error("certificate poly with function index out of range");
    if (p.space() != poly_space) throw Error("certificate poly over wrong space");
    const bool ltl = kind_is_ltl(kind);
    if (!ltl && (key.q1 != -1 || key.q2 != -1))
      throw Error("non-LTL certificate must not carry automaton indices");
    if (kind == CertificateKind::VCBRF_LTL && (key.q1 < 0 || key.q2 != -1))
      throw Error("LTL ranking polynomials are indexed by one automaton state");
    if ((kind == CertificateKind::VCC_LTL || kind == CertificateKind::CC_LTL) &&
        (key.q1 < 0 || key.q2 < 0))
      throw Error("LTL closure polynomials are indexed by automaton state pairs");
  }
  for (int a : assignment)
    if (a < 1 || a > k) throw Error("assignment entry out of range");
}

const Polynomial& VectorCertificate::poly(const PolyKey& key) const {
  auto it = polys.find(key);
  if (it == polys.end())
    throw Error("certificate has no polynomial for (" + std::to_string(key.func) + "," +
                std::to_string(key.q1) + "," + std::to_string(key.q2) + ")");
  return it->second;
}

std::uint64_t gram_hash(const Eigen::MatrixXd& Q) {
  // FNV-1a over the row-major upper triangle bytes
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  };
  for (int i = 0; i < Q.rows(); ++i)
    for (int j = i; j < Q.cols(); ++j) mix(Q(i, j));
  return h;
}

namespace {

void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& M) {
  out << name << " " << M.rows() << " " << M.cols() << "\n";
  out.precision(17);
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) out << (j ? " " : "") << M(i, j);
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  int r, c;
  in >> r >> c;
  Eigen::MatrixXd M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) in >> M(i, j);
  return M;
}

void write_vec(std::ostream& out, const char* name, const std::vector<double>& v) {
  out << name << " " << v.size();
  out.precision(17);
  for (double x : v) out << " " << x;
  out << "\n";
}

std::vector<double> read_vec(std::istream& in) {
  size_t n;
  in >> n;
  std::vector<double> v(n);
  for (auto& x : v) in >> x;
  return v;
}

}  // namespace

void write_certificate(std::ostream& out, const VectorCertificate& cert) {
  out << "vcert-certificate v1\n";
  out << "kind " << kind_name(cert.kind) << "\n";
  out << "provenance " << (cert.provenance.empty() ? "synthesized" : cert.provenance) << "\n";
  out << "k " << cert.k << "\n";
  out << "space " << cert.poly_space.arity();
  for (const auto& n : cert.poly_space.names()) out << " " << n;
  out << "\n";
  out.precision(17);
  out << "lambda " << cert.lambda << "\n";
  write_matrix(out, "A", cert.A);
  write_matrix(out, "A1", cert.A1);
  write_matrix(out, "A2", cert.A2);
  write_matrix(out, "A3", cert.A3);
  write_vec(out, "eta", cert.eta);
  write_vec(out, "gamma", cert.gamma);
  write_vec(out, "rho", cert.rho);
  out << "assignment " << cert.assignment.size();
  for (int a : cert.assignment) out << " " << a;
  out << "\n";
  out << "polys " << cert.polys.size() << "\n";
  for (const auto& [key, p] : cert.polys)
    out << "poly " << key.func << " " << key.q1 << " " << key.q2 << " " << p.to_string() << "\n";
  out << "gram_hashes " << cert.gram.size() << "\n";
  for (const auto& rec : cert.gram) {
    out << rec.label << " ";
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& blk : rec.blocks) h ^= gram_hash(blk.Q);
    out << std::hex << h << std::dec << "\n";
  }
  out << "end\n";
}

VectorCertificate read_certificate(std::istream& in) {
  VectorCertificate cert;
  std::string tok, version;
  in >> tok >> version;
  if (tok != "vcert-certificate") throw Error("certificate file: bad magic");
  std::string kindname;
  in >> tok >> kindname;
  cert.kind = kind_from_name(kindname);
  in >> tok >> cert.provenance;
  in >> tok >> cert.k;
  in >> tok;
  int arity;
  in >> arity;
  std::vector<std::string> names(arity);
  for (auto& n : names) in >> n;
  cert.poly_space = VariableSpace(names);
  in >> tok >> cert.lambda;
  in >> tok;
  cert.A = read_matrix(in);
  in >> tok;
  cert.A1 = read_matrix(in);
  in >> tok;
  cert.A2 = read_matrix(in);
  in >> tok;
  cert.A3 = read_matrix(in);
  in >> tok;
  cert.eta = read_vec(in);
  in >> tok;
  cert.gamma = read_vec(in);
  in >> tok;
  cert.rho = read_vec(in);
  in >> tok;
  size_t na;
  in >> na;
  cert.assignment.resize(na);
  for (auto& a : cert.assignment) in >> a;
  in >> tok;
  size_t np;
  in >> np;
  for (size_t i = 0; i < np; ++i) {
    PolyKey key;
    in >> tok >> key.func >> key.q1 >> key.q2;
    std::string line;
    std::getline(in, line);
    cert.polys.emplace(key, Polynomial::parse(cert.poly_space, line));
  }
  // gram hashes are informational; skip to end
  return cert;
}

}  // namespace vcert

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vcert/certificate.hpp"
#include "vcert/sysmodel.hpp"

namespace vcert::audit {

enum class Verdict { Pass, PassWithRounding, Fail };
std::string to_string(Verdict v);

struct ConditionRecord {
  std::string condition;  // which equation family, which instance
  int samples = 0;
  double worst_margin = 0.0;  // >= 0 satisfied; negative = violation size
  std::vector<double> worst_point;
  double scale = 1.0;      // max-abs coefficient entering the condition
  double tolerance = 0.0;  // absolute tolerance applied
  bool pass = true;
  bool needed_rounding = false;
};

struct GramRecord {
  std::string label;
  double min_eigenvalue = 0.0;
  double reconstruction_residual = 0.0;
  bool pass = true;
};

struct AuditReport {
  Verdict verdict = Verdict::Pass;
  std::vector<ConditionRecord> conditions;
  std::vector<GramRecord> gram;
  std::string worst_condition;
  double worst_margin = 0.0;

  std::string to_text() const;  // structured, deterministic
};

enum class AuditMode { Synthesized, TranscribedRounded };

struct AuditOptions {
  AuditMode mode = AuditMode::Synthesized;
  int samples = 10000;
  std::uint64_t seed = 911;
  double synthesized_tol_factor = 1e-6;  // times per-condition scale
  double rounded_tol_factor = 0.05;      // times per-condition scale
  double psd_tol = 1e-8;
  double boundary_fraction = 0.2;
  bool strict_disjunction = false;  // max over all i instead of the assigned one
};

// Everything a certificate is checked against.
struct CertificateProblem {
  DynamicalSystem sys;
  std::optional<RegionUnion> unsafe;         // safety kinds
  std::optional<RegionUnion> vf;             // persistence kinds
  std::optional<RegionUnion> vf_complement;  // tiling of X minus vf
  std::optional<LabelingPartition> labeling;
  std::optional<BuchiAutomaton> automaton;
};

// Samples every defining condition of the certificate kind and records
// worst margins; Gram blocks, when present, are checked by eigenvalue and
// reconstruction residual.
AuditReport check_certificate(const VectorCertificate& cert, const CertificateProblem& problem,
                              const AuditOptions& opts = {});

// Gram-side audit alone (min eigenvalues and reconstruction residuals).
std::vector<GramRecord> gram_audit(const VectorCertificate& cert, double psd_tol = 1e-8,
                                   double residual_tol = 1e-6);

struct TrajectoryAuditReport {
  int trajectories = 0;
  int horizon = 0;
  int truncated = 0;
  int max_visits = 0;         // most region visits of any trajectory
  int last_visit_step = -1;   // latest step at which any trajectory was inside
  bool visits_cease = true;   // no visit at the final step of any trajectory
  int total_visits = 0;
};

// Simulates trajectories from sampled initial states and counts visits of
// `region` (the finitely-visited set, or the unsafe set for safety kinds).
TrajectoryAuditReport trajectory_audit(const DynamicalSystem& sys, const RegionUnion& region,
                                       int trajectories, int horizon, std::uint64_t seed);

}  // namespace vcert::audit

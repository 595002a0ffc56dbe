#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perflab/conditions.hpp"

namespace perflab {

enum class CertificateName { PROP1_OPTIMALITY, EX1_SUBOPT_LB, EX2_DIST_SQRT, EX3_DIST_LIN };
enum class CertificateStatus { holds, fails, inconclusive };
std::string_view to_string(CertificateName name);
std::string_view to_string(CertificateStatus status);

// For the three example bounds, holds means actual_value <= bound_value + tolerance.
// For PROP1_OPTIMALITY, bound_value is the grid-oracle PR minimum and
// actual_value is PR(theta_stable); holds means the premise was met at every
// probe and the oracle agrees.
struct Certificate {
  CertificateName name = CertificateName::PROP1_OPTIMALITY;
  CertificateStatus status = CertificateStatus::inconclusive;
  double bound_value = 0.0;
  double actual_value = 0.0;
  double tolerance = 0.0;
  bool holds = false;
  std::vector<NamedConstant> constants;
  std::size_t n_probes = 0;
  std::size_t n_failing = 0;
  std::vector<Witness> failing_probes;  // worst five
  std::string note;
};

// Oracle ground truth shared by the certificates.
struct GroundTruth {
  Theta theta_po;
  double pr_min = 0.0;
  double pr_min_std_err = 0.0;
  double grid_step = 0.0;
};

struct BoundsOptions {
  // Grid spacing of the PR oracle; unset means width/6000 in 1-D and diameter/100 in 2-D.
  std::optional<double> grid_step;
  ProbeSpec probes;
  // Largest fixed-point residual ||T(theta) - theta|| accepted for theta_stable.
  double stable_tol = 1e-4;
};

GroundTruth ground_truth(const Instance& inst, const EvalOptions& opts, const BoundsOptions& bopts = {});

// PR(theta') - PR(theta) - Delta_theta(theta') + L * W1(D(theta), D(theta')).
// Both risks are evaluated on coupled batches.
double gap_inequality_residual(const Instance& inst, const Theta& theta, const Theta& theta_prime, double lip_L,
                               const EvalOptions& opts);
// Same, with L taken from the instance's declared constants. Throws
// MissingConstantError when L is not declared.
double gap_inequality_residual(const Instance& inst, const Theta& theta, const Theta& theta_prime,
                               const EvalOptions& opts);

// Throws ContractError when theta_stable is not a fixed point of the retraining map.
Certificate prop1_certificate(const Instance& inst, const Theta& theta_stable, const EvalOptions& opts,
                              const BoundsOptions& bopts = {}, const std::optional<GroundTruth>& truth = {});
Certificate example1_bound(const Instance& inst, const Theta& theta_stable, const EvalOptions& opts,
                           const BoundsOptions& bopts = {}, const std::optional<GroundTruth>& truth = {});
// Examples 2 and 3 need the quadratic-growth constant of Delta_theta_stable;
// the certificate is inconclusive when it is neither declared nor certified.
Certificate example2_bound(const Instance& inst, const Theta& theta_stable, const EvalOptions& opts,
                           const BoundsOptions& bopts = {}, const std::optional<GroundTruth>& truth = {});
Certificate example3_bound(const Instance& inst, const Theta& theta_stable, const EvalOptions& opts,
                           const BoundsOptions& bopts = {}, const std::optional<GroundTruth>& truth = {});

struct CertificationRun {
  OracleResult stable;
  GroundTruth truth;
  std::vector<Certificate> certificates;  // PROP1, EX1, EX2, EX3
};

// Locates theta_PS with the fixed-point oracle and issues all four
// certificates there. Throws ContractError if the stable point search is
// inconclusive.
CertificationRun certify_all(const Instance& inst, const EvalOptions& opts, const BoundsOptions& bopts = {});

// Measures W1(D(theta), D(theta')) / ||grad_{theta'} DPR(theta, theta')||^2
// over probes theta'. Reports only; nothing is asserted about the ratio.
struct ShiftGradientRatio {
  double max_ratio = 0.0;
  Theta argmax;
  double median_ratio = 0.0;
  std::size_t n_probes = 0;
  std::size_t n_skipped = 0;  // gradient numerically zero
};
ShiftGradientRatio shift_gradient_ratio(const Instance& inst, const Theta& theta, const EvalOptions& opts,
                                        const ProbeSpec& probes = {});

}  // namespace perflab

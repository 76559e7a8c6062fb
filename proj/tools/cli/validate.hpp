#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "commands.hpp"
#include "thermosense/chain_model.hpp"

namespace thermosense::cli {

struct CheckResult {
  std::string check;
  std::string detail;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Fixed 30-spec grid over N in {4,6,8,10}, both models, beta in {2,20,100},
/// h/J in {0.5,0.9,1.2}, gamma in {0,0.5,1}.
std::vector<ChainSpec> regression_grid();

/// `count` seeded random XX specs (N 20..200, beta 0.5..10, h/J 0..1.2) whose
/// log Z curvature is resolvable by finite differences in double precision.
std::vector<ChainSpec> random_xx_specs(std::size_t count, std::uint64_t seed);

// Each check passes iff residual < tolerance * scale.

/// log Z, <J_z>, F(h) and (XX) F(J) against the dense oracle.
std::vector<CheckResult> oracle_equivalence(const std::vector<ChainSpec>& specs, double scale,
                                            int threads);
/// F(h) vs beta d<J_z>/dh vs d2 log Z/dh2 (both by finite differences).
std::vector<CheckResult> susceptibility_identity(const std::vector<ChainSpec>& specs,
                                                 double scale);
/// SLD defining relation and tr{tau L^2} = F.
std::vector<CheckResult> sld_checks(const std::vector<ChainSpec>& specs, double scale,
                                    int threads);
/// Estimator sensitivities never exceed the matching QFI; XX Jz->h and
/// OJ->J saturate it.
std::vector<CheckResult> cramer_rao_checks(const std::vector<ChainSpec>& specs, double scale,
                                           int threads);
/// Fitted C near 0.64 and stable between the beta subsets.
std::vector<CheckResult> c_fit_checks(bool minimal, double scale);

ValidationReport validate(const ValidateOptions& o, const CommonOptions& common);

void write_report_csv(std::ostream& out, const ValidationReport& r, const CommonOptions& common,
                      const ValidateOptions& o);
void write_report_json(std::ostream& out, const ValidationReport& r,
                       const CommonOptions& common, const ValidateOptions& o);

}  // namespace thermosense::cli

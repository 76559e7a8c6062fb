#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "thermosense/chain_model.hpp"
#include "thermosense/sector_ensemble.hpp"

namespace thermosense {

enum class FloorPolicy { StopAtThermalFloor, RunToKmax };
enum class Termination { ThermalFloor, KmaxReached, WindowViolation };

std::string_view to_string(FloorPolicy p);
std::string_view to_string(Termination t);
FloorPolicy parse_floor_policy(std::string_view text);
Termination parse_termination(std::string_view text);

/// Identifier of the generator recorded in every trace.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64";

struct ProtocolConfig {
  double h_true = 0.8;
  double h_min = 0.5;
  double h_max = 1.0;
  double beta = 1000.0;
  int n_spins = 1000;
  int nu = 50;
  int k_max = 4;
  double retune_margin = 3.0;  // J_{k+1} = h_est + m dh_k
  FloorPolicy floor_policy = FloorPolicy::StopAtThermalFloor;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct ProtocolIteration {
  int k = 0;
  double coupling = 0.0;       // J_k
  std::vector<int> outcomes;   // nu measured J_z values
  double h_est = 0.0;
  double delta_h = 0.0;
  double fisher = 0.0;         // 1 / delta_h^2
};

struct ProtocolTrace {
  ProtocolConfig config;
  std::string rng_algorithm{kRngAlgorithm};
  std::vector<ProtocolIteration> iterations;
  Termination terminated_by = Termination::KmaxReached;
};

/// One projective J_z measurement on an XX thermal state.
int sample_jz(const ChainSpec& spec, std::mt19937_64& rng);

struct Inversion {
  double field = 0.0;
  bool clamped = false;  // mean outside the attainable range; endpoint returned
};

/// Solves <J_z>(h) = mean_outcome for h in [h_lo, h_hi] at the coupling and
/// temperature of `spec` (its field is ignored). Safeguarded Newton; the
/// residual is below 1e-10 N unless the bracket collapses first.
Inversion invert_magnetization(double mean_outcome, const ChainSpec& spec, double h_lo,
                               double h_hi);
Inversion invert_magnetization(double mean_outcome, const XxProbe& probe, double coupling,
                               double beta, double h_lo, double h_hi);

/// Feedforward run: J_1 = h_max, then J_{k+1} = h_est_k + m dh_k, where dh_k
/// is the standard error of the nu single-shot inversions.
ProtocolTrace run_protocol(const ProtocolConfig& cfg);
/// Same, reusing a probe built for cfg.n_spins.
ProtocolTrace run_protocol(const ProtocolConfig& cfg, const XxProbe& probe);

/// Deterministic per-run seed from a base seed and two coordinates.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

/// Runs `runs` seeds for every size. Output is ordered by (size, run) and
/// does not depend on `threads`.
std::vector<ProtocolTrace> run_ensemble(const ProtocolConfig& base, const std::vector<int>& sizes,
                                        int runs, int threads = 1);

struct ScalingFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  int iteration = 0;
  std::size_t runs_used = 0;
  std::size_t runs_excluded = 0;
  std::vector<std::string> warnings;
};

/// OLS slope of log dh_k against log N over every trace that reached
/// iteration k. Needs >= 5 distinct sizes spanning >= 1.5 decades.
ScalingFit scaling_exponent(const std::vector<ProtocolTrace>& traces, int k);

/// C beta nu N / (h_max sqrt(1 - (h/h_max)^2)).
double first_iteration_fisher(const ProtocolConfig& cfg, double c);
/// C beta / sqrt(2 h).
double recursion_coefficient(const ProtocolConfig& cfg, double c);
/// A^{1/4^{k-1}} B^{4/3 (1 - 1/4^{k-1})} (nu N)^{4/3 (1 - 1/4^k)}, A = F_1/(nu N).
double predicted_fisher(const ProtocolConfig& cfg, int k, double c);

/// JSON lines: a header with the config, generator and terminator, then one
/// line per iteration.
void write_trace(std::ostream& out, const ProtocolTrace& trace);
ProtocolTrace read_trace(std::istream& in);

}  // namespace thermosense

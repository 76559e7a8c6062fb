#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thermosense/chain_model.hpp"

namespace thermosense {

enum class Parameter { Field, Coupling };
enum class Provenance { ExactFreeFermion, LowTempApprox, Oracle, EstimatorBased };

std::string_view to_string(Parameter p);
std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view text);

/// Fitted prefactor of the low-temperature sensitivity law.
inline constexpr double kDefaultSensitivityConstant = 0.64;

struct SensitivityReport {
  Parameter parameter = Parameter::Field;
  double value = 0.0;
  double per_spin = 0.0;
  Provenance provenance = Provenance::ExactFreeFermion;
  ChainSpec spec;
  /// Only meaningful for LowTempApprox: false outside k_B T < J - h.
  bool within_validity_window = true;
};

SensitivityReport make_report(Parameter parameter, double value, Provenance provenance,
                              const ChainSpec& spec, bool valid = true);

// Exact finite-N thermodynamics (both fermion-parity sectors).

double log_partition(const ChainSpec& spec);
double free_energy(const ChainSpec& spec);
double magnetization_z(const ChainSpec& spec);
double susceptibility_h(const ChainSpec& spec);
SensitivityReport qfi_h(const ChainSpec& spec);
SensitivityReport qfi_j(const ChainSpec& spec);

/// d<J_z>/dJ of the XX chain (mixed second derivative of log Z over beta).
double magnetization_dcoupling(const ChainSpec& spec);

// Single-sector product forms on the antiperiodic grid; these are the
// large-N forms and differ from the exact values by sector corrections.

/// 2 sum_p n_p - N (XX only).
double magnetization_z_modes(const ModeTable& table);

/// Per-mode field QFI. XX: 4 beta^2 n(1-n). XY: population term plus the
/// basis-rotation term of the (p, -p) pair split evenly between p and -p.
std::vector<double> qfi_h_per_mode(const ModeTable& table);
double qfi_h_modes(const ModeTable& table);

/// 4 beta^2 sum_p cos^2 p n_p (1 - n_p) (XX only).
double qfi_j_modes(const ModeTable& table);

// Low-temperature approximations.

/// C beta N / (J sqrt(1 - (h/J)^2)). Throws std::domain_error for |h| >= J.
SensitivityReport qfi_h_approx(const ChainSpec& spec, double c = kDefaultSensitivityConstant);

/// C h^2 beta N / (J^3 sqrt(1 - (h/J)^2)).
SensitivityReport qfi_j_approx(const ChainSpec& spec, double c = kDefaultSensitivityConstant);

/// k_B T < J - h.
bool in_low_temperature_window(const ChainSpec& spec);

struct FitSweep {
  std::vector<double> betas;
  std::vector<int> sizes;
  std::vector<double> field_ratios;  // h / J
  double coupling = 1.0;
};

struct CFitResult {
  double c = 0.0;
  double residual = 0.0;  // RMS relative residual
  std::size_t points = 0;
  std::string window;
};

/// Least-squares fit of exact qfi_h to the low-temperature form, minimising
/// relative residuals. Every sweep point must satisfy beta J >= 50,
/// N >= 1000 and k_B T <= (J - h)/2 unless `enforce_window` is false;
/// violations throw std::invalid_argument.
CFitResult fit_c(const FitSweep& sweep, bool enforce_window = true);

}  // namespace thermosense

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace thermosense {

enum class Model { XX, XY };
enum class Boundary { Periodic };

std::string_view to_string(Model model);
Model parse_model(std::string_view text);

/// Full description of a thermal spin-chain probe.
///
/// Energies are in units where k_B = hbar = 1; `beta` is the inverse
/// temperature. The XX model always carries gamma = 0.
struct ChainSpec {
  Model model = Model::XX;
  int n_spins = 4;
  double coupling = 1.0;  // J
  double field = 0.0;     // h
  double gamma = 0.0;
  double beta = 1.0;
  Boundary boundary = Boundary::Periodic;

  static ChainSpec xx(int n_spins, double coupling, double field, double beta);
  static ChainSpec xy(int n_spins, double coupling, double field, double gamma, double beta);

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;

  ChainSpec with_field(double h) const;
  ChainSpec with_coupling(double j) const;
  ChainSpec with_beta(double b) const;
};

/// Momentum of mode index l on the antiperiodic grid, pi (2l+1)/N.
double mode_momentum(int n_spins, int l);

/// XX dispersion 2J(cos p - h/J); may be negative.
double dispersion_xx(const ChainSpec& spec, int l);

/// XY quasiparticle energy 2J sqrt((cos p - h/J)^2 + (gamma sin p)^2) >= 0.
double dispersion_xy(const ChainSpec& spec, int l);

/// Bogoliubov angle with tan(2 theta) = gamma sin p / (h/J - cos p), taken
/// as theta = atan2(gamma sin p, h/J - cos p) / 2. The degenerate point
/// (both arguments zero) maps to 0.
double bogoliubov_angle(const ChainSpec& spec, int l);

/// d theta_p / dh for the convention above.
double bogoliubov_angle_dfield(const ChainSpec& spec, int l);

/// Fermi factor 1/(1 + exp(x)), evaluated without overflow.
double fermi_occupation(double beta_energy);

/// log of the Fermi factor, usable where the factor itself underflows.
double log_fermi_occupation(double beta_energy);

/// Thermal occupation of mode l; uses the model's own dispersion.
double occupation(const ChainSpec& spec, int l);

struct Mode {
  int index = 0;
  double momentum = 0.0;
  double energy = 0.0;
  double occupation = 0.0;
  double theta = 0.0;
};

/// Per-mode data of the antiperiodic (even fermion parity) sector, l ascending.
struct ModeTable {
  ChainSpec spec;
  std::vector<Mode> modes;

  double occupation_sum() const;
};

ModeTable mode_table(const ChainSpec& spec);

}  // namespace thermosense

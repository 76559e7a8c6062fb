#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "thermosense/chain_model.hpp"

namespace thermosense {

/// Jordan-Wigner fermion-parity sectors of the periodic chain. Even parity
/// lives on the antiperiodic grid p = pi(2l+1)/N, odd parity on the periodic
/// grid p = 2 pi l / N.
enum class Sector { EvenAntiperiodic, OddPeriodic };

/// Energy of one fermionic mode and its derivatives with respect to (h, J).
/// The mode contributes energy(n - 1/2) for occupation n in {0, 1}.
struct ModeEnergy {
  double momentum = 0.0;
  double energy = 0.0;
  double d_h = 0.0;
  double d_j = 0.0;
  double d_hh = 0.0;
  double d_hj = 0.0;
  double d_jj = 0.0;
  bool paired = false;  // Bogoliubov-mixed with -p (XY, gamma > 0)
};

/// Mode energies of one sector, ordered so that paired modes p, -p are
/// adjacent. For gamma = 0 every mode uses the signed XX dispersion.
std::vector<ModeEnergy> sector_modes(const ChainSpec& spec, Sector sector);

/// Exact thermal moments of the chain, summed over both parity sectors.
///
/// Every eigenstate has energy E = sum_m eps_m (n_m - 1/2) within its
/// sector. Means and covariances refer to the Gibbs distribution over these
/// eigenstates of the derivative energies dE/dh, dE/dJ and d2E.
struct ThermalMoments {
  double log_z = 0.0;
  double mean_dh = 0.0;
  double mean_dj = 0.0;
  double var_hh = 0.0;
  double cov_hj = 0.0;
  double var_jj = 0.0;
  double mean_d2_hh = 0.0;
  double mean_d2_hj = 0.0;
  double mean_d2_jj = 0.0;
  double odd_sector_weight = 0.0;

  double dlogz_dh(double beta) const { return -beta * mean_dh; }
  double dlogz_dj(double beta) const { return -beta * mean_dj; }
  double d2logz_hh(double beta) const { return beta * beta * var_hh - beta * mean_d2_hh; }
  double d2logz_hj(double beta) const { return beta * beta * cov_hj - beta * mean_d2_hj; }
  double d2logz_jj(double beta) const { return beta * beta * var_jj - beta * mean_d2_jj; }
};

ThermalMoments thermal_moments(const ChainSpec& spec);

/// Contribution of the h-dependence of the Bogoliubov eigenbasis to the
/// field QFI (zero when gamma = 0).
double basis_rotation_qfi(const ChainSpec& spec);

/// Fast exact evaluation of the XX chain at large N for fixed N: momenta are
/// sorted once, modes with beta |eps| above a cutoff are treated as frozen
/// and aggregated through prefix sums. Used by the feedforward simulation,
/// which evaluates the same N at many (J, h).
class XxProbe {
 public:
  explicit XxProbe(int n_spins, double frozen_cutoff = 60.0);

  int n_spins() const { return n_spins_; }

  ThermalMoments moments(double coupling, double field, double beta) const;

  /// <J_z> and its field derivative.
  double magnetization(double coupling, double field, double beta) const;
  double susceptibility(double coupling, double field, double beta) const;

  /// One projective J_z measurement on the thermal state.
  int sample_jz(double coupling, double field, double beta, std::mt19937_64& rng) const;

  /// `count` independent measurements; the sector weights and the parity
  /// tables are built once.
  std::vector<int> sample_jz(double coupling, double field, double beta, std::size_t count,
                             std::mt19937_64& rng) const;

 private:
  struct SortedSector {
    std::vector<double> cosines;       // descending
    std::vector<double> prefix_cos;    // prefix_cos[i] = sum of first i
  };

  struct Window {
    std::size_t empty_end = 0;  // [0, empty_end) frozen empty (eps > 0)
    std::size_t active_end = 0; // [empty_end, active_end) active, rest frozen filled
  };

  Window window(const SortedSector& s, double coupling, double field, double beta) const;

  int n_spins_;
  double cutoff_;
  SortedSector even_;
  SortedSector odd_;
};

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double uniform01(std::mt19937_64& rng);

}  // namespace thermosense

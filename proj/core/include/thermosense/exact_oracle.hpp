#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "thermosense/chain_model.hpp"
#include "thermosense/thermo_metrology.hpp"

namespace thermosense::oracle {

/// Largest chain the dense oracle accepts (Hilbert dimension 4096).
inline constexpr int kMaxSpins = 12;

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Pauli-string operators on the 2^N computational basis; bit i set means
// spin i points up (sigma^z = +1).

Matrix total_sz(int n_spins);  // J_z
Matrix total_sx(int n_spins);  // J_x
/// sum_i (x_i x_{i+1} + y_i y_{i+1}), periodic.
Matrix hopping_operator(int n_spins);
/// dH/dJ = -sum_i ((1+g)/2 x_i x_{i+1} + (1-g)/2 y_i y_{i+1}).
Matrix coupling_derivative(int n_spins, double gamma);

/// Dense Hamiltonian, literal periodic sum (for N = 2 each bond appears twice).
Matrix build_hamiltonian(const ChainSpec& spec);

/// dH/dlambda for lambda in {h, J}.
Matrix hamiltonian_derivative(const ChainSpec& spec, Parameter target);

struct DenseThermalState {
  ChainSpec spec;
  int dim = 0;
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // columns
  Vector populations;   // Gibbs weights
  double log_z = 0.0;

  /// tau in the computational basis.
  Matrix density_matrix() const;
  /// V^T O V
  Matrix to_eigenbasis(const Matrix& op) const;
  Matrix from_eigenbasis(const Matrix& op) const;
};

DenseThermalState thermal_state(const ChainSpec& spec);

/// log Z from the spectrum only (cheaper than thermal_state).
double log_partition(const ChainSpec& spec);

enum class Derivative {
  /// exact divided differences of exp(-beta H) in the eigenbasis
  Analytic,
  /// central difference of the full state, step max(1e-6, 1e-6 |lambda|)
  FiniteDifference,
};

/// d tau / d lambda expressed in the eigenbasis of tau.
Matrix state_derivative(const DenseThermalState& state, Parameter target,
                        Derivative method = Derivative::Analytic);

/// Spectral QFI sum_{k,l} 2 |<k| d tau |l>|^2 / (p_k + p_l) over pairs with
/// p_k + p_l > cutoff. With FiniteDifference pass a positive cutoff: the
/// difference noise on nearly empty pairs is divided by p_k + p_l.
double qfi_spectral(const ChainSpec& spec, Parameter target,
                    Derivative method = Derivative::Analytic, double cutoff = 0.0);
double qfi_spectral(const DenseThermalState& state, const Matrix& dtau_eigen,
                    double cutoff = 0.0);

/// Symmetric logarithmic derivative in the computational basis.
Matrix sld(const ChainSpec& spec, Parameter target, Derivative method = Derivative::Analytic,
           double cutoff = 0.0);
Matrix sld_eigenbasis(const DenseThermalState& state, const Matrix& dtau_eigen,
                      double cutoff = 0.0);

/// tr{tau O^k} for k = 1..order (order <= 4).
std::vector<double> observable_moments(const DenseThermalState& state, const Matrix& observable,
                                       int order);

/// Same, with O already in the eigenbasis of tau.
std::vector<double> observable_moments_eigen(const DenseThermalState& state,
                                             const Matrix& observable_eigen, int order);

/// tr{d tau O} with both operators in the eigenbasis.
double expectation_derivative(const Matrix& dtau_eigen, const Matrix& observable_eigen);

}  // namespace thermosense::oracle

#include "thermosense/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace thermosense::oracle {

namespace {

void require_size(int n_spins) {
  if (n_spins > kMaxSpins)
    throw ResourceError("dense oracle supports N <= " + std::to_string(kMaxSpins) + ", got N=" +
                        std::to_string(n_spins));
  if (n_spins < 2) throw std::invalid_argument("dense oracle needs N >= 2");
}

Eigen::Index dimension(int n_spins) { return Eigen::Index{1} << n_spins; }

double spin_z(Eigen::Index state, int site) { return ((state >> site) & 1) ? 1.0 : -1.0; }

// Adds amp * (flip of both spins on every bond) according to alignment:
// antiparallel pairs get `anti`, parallel pairs get `para`.
void add_bond_flips(Matrix& m, int n_spins, double anti, double para) {
  const Eigen::Index dim = dimension(n_spins);
  for (Eigen::Index s = 0; s < dim; ++s) {
    for (int i = 0; i < n_spins; ++i) {
      const int j = (i + 1) % n_spins;
      const bool bi = (s >> i) & 1;
      const bool bj = (s >> j) & 1;
      const Eigen::Index t = s ^ (Eigen::Index{1} << i) ^ (Eigen::Index{1} << j);
      m(t, s) += (bi != bj) ? anti : para;
    }
  }
}

// phi(x) = (1 - e^{-x}) / x, phi(0) = 1
double relative_decay(double x) {
  if (x < 1e-300) return 1.0;
  return -std::expm1(-x) / x;
}

DenseThermalState diagonalize(const ChainSpec& spec, const Matrix& h) {
  DenseThermalState state;
  state.spec = spec;
  state.dim = static_cast<int>(h.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  state.eigenvalues = solver.eigenvalues();
  state.eigenvectors = solver.eigenvectors();
  const double e0 = state.eigenvalues(0);
  state.populations = (-spec.beta * (state.eigenvalues.array() - e0)).exp().matrix();
  const double z = state.populations.sum();
  state.populations /= z;
  state.log_z = -spec.beta * e0 + std::log(z);
  return state;
}

ChainSpec displaced(const ChainSpec& spec, Parameter target, double delta) {
  return target == Parameter::Field ? spec.with_field(spec.field + delta)
                                    : spec.with_coupling(spec.coupling + delta);
}

Matrix analytic_derivative(const DenseThermalState& state, Parameter target) {
  const Matrix dh = state.to_eigenbasis(hamiltonian_derivative(state.spec, target));
  const double beta = state.spec.beta;
  const Vector& e = state.eigenvalues;
  const Vector& p = state.populations;
  const Eigen::Index dim = e.size();
  double mean = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) mean += p(k) * dh(k, k);
  Matrix out(dim, dim);
  for (Eigen::Index l = 0; l < dim; ++l) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      if (k == l) {
        out(k, k) = -beta * p(k) * (dh(k, k) - mean);
        continue;
      }
      const double p_low = std::max(p(k), p(l));
      const double gap = std::abs(e(k) - e(l));
      out(k, l) = -beta * p_low * relative_decay(beta * gap) * dh(k, l);
    }
  }
  return out;
}

Matrix finite_difference(const DenseThermalState& state, Parameter target, double step) {
  const ChainSpec& spec = state.spec;
  const DenseThermalState plus = thermal_state(displaced(spec, target, step));
  const DenseThermalState minus = thermal_state(displaced(spec, target, -step));
  const Matrix d = (plus.density_matrix() - minus.density_matrix()) / (2.0 * step);
  return state.to_eigenbasis(d);
}

}  // namespace

Matrix total_sz(int n_spins) {
  require_size(n_spins);
  const Eigen::Index dim = dimension(n_spins);
  Vector diag(dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    double sz = 0.0;
    for (int i = 0; i < n_spins; ++i) sz += spin_z(s, i);
    diag(s) = sz;
  }
  return diag.asDiagonal();
}

Matrix total_sx(int n_spins) {
  require_size(n_spins);
  const Eigen::Index dim = dimension(n_spins);
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s)
    for (int i = 0; i < n_spins; ++i) m(s ^ (Eigen::Index{1} << i), s) += 1.0;
  return m;
}

Matrix hopping_operator(int n_spins) {
  require_size(n_spins);
  const Eigen::Index dim = dimension(n_spins);
  Matrix m = Matrix::Zero(dim, dim);
  add_bond_flips(m, n_spins, 2.0, 0.0);
  return m;
}

Matrix coupling_derivative(int n_spins, double gamma) {
  require_size(n_spins);
  const Eigen::Index dim = dimension(n_spins);
  Matrix m = Matrix::Zero(dim, dim);
  add_bond_flips(m, n_spins, -1.0, -gamma);
  return m;
}

Matrix build_hamiltonian(const ChainSpec& spec) {
  spec.validate();
  require_size(spec.n_spins);
  Matrix h = spec.coupling * coupling_derivative(spec.n_spins, spec.gamma);
  h.diagonal() -= spec.field * total_sz(spec.n_spins).diagonal();
  return h;
}

Matrix hamiltonian_derivative(const ChainSpec& spec, Parameter target) {
  require_size(spec.n_spins);
  if (target == Parameter::Field) return -total_sz(spec.n_spins);
  return coupling_derivative(spec.n_spins, spec.gamma);
}

Matrix DenseThermalState::density_matrix() const {
  return eigenvectors * populations.asDiagonal() * eigenvectors.transpose();
}

Matrix DenseThermalState::to_eigenbasis(const Matrix& op) const {
  if (op.rows() != dim || op.cols() != dim)
    throw std::invalid_argument("operator dimension does not match the thermal state");
  return eigenvectors.transpose() * op * eigenvectors;
}

Matrix DenseThermalState::from_eigenbasis(const Matrix& op) const {
  return eigenvectors * op * eigenvectors.transpose();
}

DenseThermalState thermal_state(const ChainSpec& spec) {
  return diagonalize(spec, build_hamiltonian(spec));
}

double log_partition(const ChainSpec& spec) {
  const Matrix h = build_hamiltonian(spec);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  const Vector& e = solver.eigenvalues();
  const double e0 = e(0);
  return -spec.beta * e0 + std::log((-spec.beta * (e.array() - e0)).exp().sum());
}

Matrix state_derivative(const DenseThermalState& state, Parameter target, Derivative method) {
  if (method == Derivative::Analytic) return analytic_derivative(state, target);
  const double lambda = target == Parameter::Field ? state.spec.field : state.spec.coupling;
  const double step = std::max(1e-6, 1e-6 * std::abs(lambda));
  const Matrix coarse = finite_difference(state, target, step);
  const Matrix fine = finite_difference(state, target, 0.5 * step);
  const double scale = std::max(fine.norm(), 1e-300);
  if ((coarse - fine).norm() > 1e-4 * scale)
    throw std::runtime_error("finite-difference derivative failed the step-halving check");
  return fine;
}

double qfi_spectral(const DenseThermalState& state, const Matrix& dtau, double cutoff) {
  const Vector& p = state.populations;
  const Eigen::Index dim = p.size();
  double sum = 0.0;
  for (Eigen::Index l = 0; l < dim; ++l) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double s = p(k) + p(l);
      if (!(s > cutoff) || s == 0.0) continue;
      sum += 2.0 * dtau(k, l) * dtau(k, l) / s;
    }
  }
  return sum;
}

double qfi_spectral(const ChainSpec& spec, Parameter target, Derivative method, double cutoff) {
  const DenseThermalState state = thermal_state(spec);
  return qfi_spectral(state, state_derivative(state, target, method), cutoff);
}

Matrix sld_eigenbasis(const DenseThermalState& state, const Matrix& dtau, double cutoff) {
  const Vector& p = state.populations;
  const Eigen::Index dim = p.size();
  Matrix out = Matrix::Zero(dim, dim);
  for (Eigen::Index l = 0; l < dim; ++l) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double s = p(k) + p(l);
      if (!(s > cutoff) || s == 0.0) continue;
      out(k, l) = 2.0 * dtau(k, l) / s;
    }
  }
  return out;
}

Matrix sld(const ChainSpec& spec, Parameter target, Derivative method, double cutoff) {
  const DenseThermalState state = thermal_state(spec);
  return state.from_eigenbasis(sld_eigenbasis(state, state_derivative(state, target, method), cutoff));
}

std::vector<double> observable_moments_eigen(const DenseThermalState& state, const Matrix& o,
                                             int order) {
  if (order < 1 || order > 4) throw std::invalid_argument("moment order must be in 1..4");
  if (o.rows() != state.dim || o.cols() != state.dim)
    throw std::invalid_argument("observable dimension does not match the thermal state");
  const Vector& p = state.populations;
  std::vector<double> out;
  out.push_back(p.dot(o.diagonal()));
  if (order >= 2) out.push_back(p.dot(o.rowwise().squaredNorm()));
  if (order >= 3) {
    const Matrix o2 = o * o;
    out.push_back(p.dot(o2.cwiseProduct(o.transpose()).rowwise().sum()));
    if (order >= 4) out.push_back(p.dot(o2.rowwise().squaredNorm()));
  }
  return out;
}

std::vector<double> observable_moments(const DenseThermalState& state, const Matrix& observable,
                                       int order) {
  if (observable.rows() != state.dim || observable.cols() != state.dim)
    throw std::invalid_argument("observable dimension does not match the thermal state");
  if ((observable - observable.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + observable.norm()))
    throw std::invalid_argument("observable must be Hermitian");
  return observable_moments_eigen(state, state.to_eigenbasis(observable), order);
}

double expectation_derivative(const Matrix& dtau, const Matrix& o) {
  return dtau.cwiseProduct(o.transpose()).sum();
}

}  // namespace thermosense::oracle

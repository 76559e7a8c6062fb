#include "thermosense/estimator_bench.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "thermosense/sector_ensemble.hpp"

namespace thermosense {

std::string_view to_string(Observable o) {
  switch (o) {
    case Observable::Jz: return "Jz";
    case Observable::JxSquared: return "JxSquared";
    case Observable::OJ: return "OJ";
  }
  return "Jz";
}

Observable parse_observable(std::string_view text) {
  if (text == "Jz") return Observable::Jz;
  if (text == "JxSquared") return Observable::JxSquared;
  if (text == "OJ") return Observable::OJ;
  throw std::invalid_argument("unknown observable '" + std::string(text) + "'");
}

void EstimatorSpec::validate() const {
  if (observable == Observable::JxSquared && target == Parameter::Coupling)
    throw std::invalid_argument("JxSquared is only defined as an estimator of h");
}

std::string EstimatorSpec::label() const {
  return std::string(to_string(observable)) + "->" + std::string(to_string(target));
}

namespace {

double error_propagation(double slope, double variance) {
  // a deterministic observable carries no information (and no slope)
  if (!(variance > 0.0)) return 0.0;
  return slope * slope / variance;
}

double closed_form(const ChainSpec& spec, const EstimatorSpec& est) {
  const ThermalMoments m = thermal_moments(spec);
  const double beta = spec.beta;
  // H = -J/2 O_J - h J_z, so J_z = -dE/dh and O_J = -2 dE/dJ on eigenstates
  if (est.observable == Observable::Jz) {
    const double slope = est.target == Parameter::Field ? m.d2logz_hh(beta) / beta
                                                         : m.d2logz_hj(beta) / beta;
    return error_propagation(slope, m.var_hh);
  }
  const double slope = est.target == Parameter::Field ? 2.0 * m.d2logz_hj(beta) / beta
                                                      : 2.0 * m.d2logz_jj(beta) / beta;
  return error_propagation(slope, 4.0 * m.var_jj);
}

double via_oracle(const ChainSpec& spec, const EstimatorSpec& est, oracle::Derivative method) {
  using oracle::Matrix;
  const oracle::DenseThermalState state = oracle::thermal_state(spec);
  const Matrix dtau = oracle::state_derivative(state, est.target, method);
  if (est.observable == Observable::JxSquared) {
    const Matrix jx = state.to_eigenbasis(oracle::total_sx(spec.n_spins));
    const std::vector<double> mom = oracle::observable_moments_eigen(state, jx, 4);
    if (std::abs(mom[0]) >= 1e-12)
      throw std::logic_error("thermal state breaks the Z2 symmetry: <J_x> = " +
                             std::to_string(mom[0]));
    const double slope = oracle::expectation_derivative(dtau, jx * jx);
    return error_propagation(slope, mom[3] - mom[1] * mom[1]);
  }
  const Matrix op = est.observable == Observable::Jz ? oracle::total_sz(spec.n_spins)
                                                     : oracle::hopping_operator(spec.n_spins);
  const Matrix op_eigen = state.to_eigenbasis(op);
  const std::vector<double> mom = oracle::observable_moments_eigen(state, op_eigen, 2);
  const double slope = oracle::expectation_derivative(dtau, op_eigen);
  return error_propagation(slope, mom[1] - mom[0] * mom[0]);
}

}  // namespace

SensitivityReport estimator_sensitivity(const ChainSpec& spec, const EstimatorSpec& est,
                                        oracle::Derivative method) {
  spec.validate();
  est.validate();
  if (spec.model == Model::XX && est.observable != Observable::JxSquared)
    return make_report(est.target, closed_form(spec, est), Provenance::ExactFreeFermion, spec);
  return make_report(est.target, via_oracle(spec, est, method), Provenance::Oracle, spec);
}

double jz_variance_xx(const ChainSpec& spec) {
  if (spec.model != Model::XX) throw std::invalid_argument("jz_variance_xx: XX only");
  return thermal_moments(spec).var_hh;
}

}  // namespace thermosense

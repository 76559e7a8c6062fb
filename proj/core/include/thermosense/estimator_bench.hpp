#pragma once

#include <string_view>

#include "thermosense/chain_model.hpp"
#include "thermosense/exact_oracle.hpp"
#include "thermosense/thermo_metrology.hpp"

namespace thermosense {

/// Jz: total magnetization; JxSquared: J_x^2 (its mean is the variance of
/// J_x since <J_x> = 0); OJ: sum_i (x_i x_{i+1} + y_i y_{i+1}).
enum class Observable { Jz, JxSquared, OJ };

std::string_view to_string(Observable o);
Observable parse_observable(std::string_view text);

struct EstimatorSpec {
  Observable observable = Observable::Jz;
  Parameter target = Parameter::Field;

  /// Throws std::invalid_argument for (JxSquared, J).
  void validate() const;
  std::string label() const;  // e.g. "Jz->h"
};

/// Error-propagation sensitivity |d<O>/dlambda|^2 / Var(O) for a single shot.
///
/// XX with Jz or OJ uses closed-form moments (provenance ExactFreeFermion).
/// Everything else goes through the dense oracle (provenance Oracle) and
/// throws oracle::ResourceError above N = 12.
SensitivityReport estimator_sensitivity(
    const ChainSpec& spec, const EstimatorSpec& est,
    oracle::Derivative method = oracle::Derivative::Analytic);

/// Var(J_z) of the XX thermal state, equal to qfi_h / beta^2.
double jz_variance_xx(const ChainSpec& spec);

}  // namespace thermosense

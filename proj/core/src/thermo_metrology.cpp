#include "thermosense/thermo_metrology.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "thermosense/sector_ensemble.hpp"

namespace thermosense {

std::string_view to_string(Parameter p) {
  return p == Parameter::Field ? "h" : "J";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::ExactFreeFermion: return "exact";
    case Provenance::LowTempApprox: return "approx";
    case Provenance::Oracle: return "oracle";
    case Provenance::EstimatorBased: return "estimator";
  }
  return "exact";
}

Provenance parse_provenance(std::string_view text) {
  if (text == "exact") return Provenance::ExactFreeFermion;
  if (text == "approx") return Provenance::LowTempApprox;
  if (text == "oracle") return Provenance::Oracle;
  if (text == "estimator") return Provenance::EstimatorBased;
  throw std::invalid_argument("unknown provenance '" + std::string(text) + "'");
}

SensitivityReport make_report(Parameter parameter, double value, Provenance provenance,
                              const ChainSpec& spec, bool valid) {
  SensitivityReport r;
  r.parameter = parameter;
  r.value = value;
  r.per_spin = value / spec.n_spins;
  r.provenance = provenance;
  r.spec = spec;
  r.within_validity_window = valid;
  return r;
}

double log_partition(const ChainSpec& spec) { return thermal_moments(spec).log_z; }

double free_energy(const ChainSpec& spec) { return -log_partition(spec) / spec.beta; }

double magnetization_z(const ChainSpec& spec) { return -thermal_moments(spec).mean_dh; }

double susceptibility_h(const ChainSpec& spec) {
  const ThermalMoments m = thermal_moments(spec);
  return m.d2logz_hh(spec.beta) / spec.beta;
}

double magnetization_dcoupling(const ChainSpec& spec) {
  const ThermalMoments m = thermal_moments(spec);
  return m.d2logz_hj(spec.beta) / spec.beta;
}

SensitivityReport qfi_h(const ChainSpec& spec) {
  const ThermalMoments m = thermal_moments(spec);
  const double population = spec.beta * spec.beta * m.var_hh;
  const double rotation = spec.model == Model::XY ? basis_rotation_qfi(spec) : 0.0;
  return make_report(Parameter::Field, population + rotation, Provenance::ExactFreeFermion, spec);
}

SensitivityReport qfi_j(const ChainSpec& spec) {
  if (spec.model != Model::XX) throw std::invalid_argument("qfi_j: only the XX model is supported");
  const ThermalMoments m = thermal_moments(spec);
  return make_report(Parameter::Coupling, spec.beta * spec.beta * m.var_jj,
                     Provenance::ExactFreeFermion, spec);
}

double magnetization_z_modes(const ModeTable& table) {
  if (table.spec.model != Model::XX)
    throw std::invalid_argument("magnetization_z_modes: XX only");
  return 2.0 * table.occupation_sum() - table.spec.n_spins;
}

std::vector<double> qfi_h_per_mode(const ModeTable& table) {
  const ChainSpec& spec = table.spec;
  const double beta = spec.beta;
  std::vector<double> out;
  out.reserve(table.modes.size());
  for (const auto& m : table.modes) {
    const double n = m.occupation;
    if (spec.model == Model::XX || spec.gamma == 0.0) {
      out.push_back(4.0 * beta * beta * n * (1.0 - n));
      continue;
    }
    const double c = std::cos(m.momentum);
    const double xi = 2.0 * (spec.coupling * c - spec.field);
    const double d_h = -2.0 * xi / m.energy;
    const double population = beta * beta * d_h * d_h * n * (1.0 - n);
    const double dtheta = bogoliubov_angle_dfield(spec, m.index);
    // pair block {00, 11} with weights e^{x}, e^{-x}; pair partition (2 cosh(x/2))^2
    const double x = beta * m.energy;
    const double t = std::tanh(0.5 * x);
    const double pair_fraction = 0.5 * (1.0 + t * t);  // (e^x + e^-x) / z
    const double contrast = std::tanh(x);               // (e^x - e^-x) / (e^x + e^-x)
    const double rotation = 4.0 * dtheta * dtheta * contrast * contrast * pair_fraction;
    out.push_back(population + 0.5 * rotation);
  }
  return out;
}

double qfi_h_modes(const ModeTable& table) {
  double sum = 0.0;
  for (double v : qfi_h_per_mode(table)) sum += v;
  return sum;
}

double qfi_j_modes(const ModeTable& table) {
  if (table.spec.model != Model::XX) throw std::invalid_argument("qfi_j_modes: XX only");
  const double beta = table.spec.beta;
  double sum = 0.0;
  for (const auto& m : table.modes) {
    const double c = std::cos(m.momentum);
    sum += c * c * m.occupation * (1.0 - m.occupation);
  }
  return 4.0 * beta * beta * sum;
}

bool in_low_temperature_window(const ChainSpec& spec) {
  return 1.0 / spec.beta < spec.coupling - spec.field;
}

namespace {

double critical_factor(const ChainSpec& spec) {
  const double r = spec.field / spec.coupling;
  if (!(std::abs(r) < 1.0))
    throw std::domain_error("low-temperature approximation needs |h| < J");
  return std::sqrt(1.0 - r * r);
}

}  // namespace

SensitivityReport qfi_h_approx(const ChainSpec& spec, double c) {
  spec.validate();
  const double value = c * spec.beta * spec.n_spins / (spec.coupling * critical_factor(spec));
  return make_report(Parameter::Field, value, Provenance::LowTempApprox, spec,
                     in_low_temperature_window(spec));
}

SensitivityReport qfi_j_approx(const ChainSpec& spec, double c) {
  spec.validate();
  const double j3 = spec.coupling * spec.coupling * spec.coupling;
  const double value =
      c * spec.field * spec.field * spec.beta * spec.n_spins / (j3 * critical_factor(spec));
  return make_report(Parameter::Coupling, value, Provenance::LowTempApprox, spec,
                     in_low_temperature_window(spec));
}

CFitResult fit_c(const FitSweep& sweep, bool enforce_window) {
  if (sweep.betas.empty() || sweep.sizes.empty() || sweep.field_ratios.empty())
    throw std::invalid_argument("fit_c: empty sweep");
  double num = 0.0, den = 0.0;
  std::vector<double> ratios;
  for (double beta : sweep.betas) {
    for (int n : sweep.sizes) {
      for (double r : sweep.field_ratios) {
        ChainSpec spec = ChainSpec::xx(n, sweep.coupling, r * sweep.coupling, beta);
        if (enforce_window) {
          const bool ok = beta * spec.coupling >= 50.0 && n >= 1000 &&
                          1.0 / beta <= 0.5 * (spec.coupling - spec.field);
          if (!ok) {
            std::ostringstream msg;
            msg << "fit_c: point beta=" << beta << " N=" << n << " h/J=" << r
                << " lies outside the fit window";
            throw std::invalid_argument(msg.str());
          }
        }
        const double exact = qfi_h(spec).value;
        const double shape = qfi_h_approx(spec, 1.0).value;
        // minimise sum ((c shape - exact) / exact)^2
        const double g = shape / exact;
        num += g;
        den += g * g;
        ratios.push_back(g);
      }
    }
  }
  CFitResult out;
  out.c = num / den;
  double ss = 0.0;
  for (double g : ratios) {
    const double rel = out.c * g - 1.0;
    ss += rel * rel;
  }
  out.points = ratios.size();
  out.residual = std::sqrt(ss / static_cast<double>(ratios.size()));
  std::ostringstream w;
  w << "beta in [" << sweep.betas.front() << ".." << sweep.betas.back() << "], N in ["
    << sweep.sizes.front() << ".." << sweep.sizes.back() << "], h/J in ["
    << sweep.field_ratios.front() << ".." << sweep.field_ratios.back() << "], J=" << sweep.coupling;
  out.window = w.str();
  return out;
}

}  // namespace thermosense

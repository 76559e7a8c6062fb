#include "thermosense/chain_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace thermosense {

std::string_view to_string(Model model) {
  return model == Model::XX ? "XX" : "XY";
}

Model parse_model(std::string_view text) {
  if (text == "XX" || text == "xx") return Model::XX;
  if (text == "XY" || text == "xy") return Model::XY;
  throw std::invalid_argument("unknown model '" + std::string(text) + "'");
}

ChainSpec ChainSpec::xx(int n_spins, double coupling, double field, double beta) {
  ChainSpec spec;
  spec.model = Model::XX;
  spec.n_spins = n_spins;
  spec.coupling = coupling;
  spec.field = field;
  spec.gamma = 0.0;
  spec.beta = beta;
  spec.validate();
  return spec;
}

ChainSpec ChainSpec::xy(int n_spins, double coupling, double field, double gamma,
                        double beta) {
  ChainSpec spec;
  spec.model = Model::XY;
  spec.n_spins = n_spins;
  spec.coupling = coupling;
  spec.field = field;
  spec.gamma = gamma;
  spec.beta = beta;
  spec.validate();
  return spec;
}

void ChainSpec::validate() const {
  if (n_spins < 2 || n_spins % 2 != 0)
    throw std::invalid_argument("ChainSpec: N must be even and >= 2, got " +
                                std::to_string(n_spins));
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("ChainSpec: beta must be positive and finite");
  if (!(coupling > 0.0) || !std::isfinite(coupling))
    throw std::invalid_argument("ChainSpec: J must be positive and finite");
  if (!std::isfinite(field)) throw std::invalid_argument("ChainSpec: h must be finite");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("ChainSpec: gamma must lie in [0, 1]");
  if (model == Model::XX && gamma != 0.0)
    throw std::invalid_argument("ChainSpec: XX model requires gamma = 0");
}

ChainSpec ChainSpec::with_field(double h) const {
  ChainSpec out = *this;
  out.field = h;
  return out;
}

ChainSpec ChainSpec::with_coupling(double j) const {
  ChainSpec out = *this;
  out.coupling = j;
  return out;
}

ChainSpec ChainSpec::with_beta(double b) const {
  ChainSpec out = *this;
  out.beta = b;
  return out;
}

namespace {

void check_index(const ChainSpec& spec, int l) {
  const int half = spec.n_spins / 2;
  if (l < -half || l > half - 1)
    throw std::out_of_range("mode index " + std::to_string(l) + " outside [-N/2, N/2-1]");
}

}  // namespace

double mode_momentum(int n_spins, int l) {
  return std::numbers::pi * (2.0 * l + 1.0) / static_cast<double>(n_spins);
}

double dispersion_xx(const ChainSpec& spec, int l) {
  if (spec.model != Model::XX) throw std::invalid_argument("dispersion_xx: model must be XX");
  check_index(spec, l);
  const double p = mode_momentum(spec.n_spins, l);
  return 2.0 * spec.coupling * std::cos(p) - 2.0 * spec.field;
}

double dispersion_xy(const ChainSpec& spec, int l) {
  if (spec.model != Model::XY) throw std::invalid_argument("dispersion_xy: model must be XY");
  check_index(spec, l);
  const double p = mode_momentum(spec.n_spins, l);
  const double a = std::cos(p) - spec.field / spec.coupling;
  const double b = spec.gamma * std::sin(p);
  return 2.0 * spec.coupling * std::hypot(a, b);
}

double bogoliubov_angle(const ChainSpec& spec, int l) {
  if (spec.model != Model::XY) throw std::invalid_argument("bogoliubov_angle: model must be XY");
  check_index(spec, l);
  const double p = mode_momentum(spec.n_spins, l);
  const double y = spec.gamma * std::sin(p);
  const double x = spec.field / spec.coupling - std::cos(p);
  if (x == 0.0 && y == 0.0) return 0.0;
  return 0.5 * std::atan2(y, x);
}

double bogoliubov_angle_dfield(const ChainSpec& spec, int l) {
  if (spec.model != Model::XY)
    throw std::invalid_argument("bogoliubov_angle_dfield: model must be XY");
  check_index(spec, l);
  const double p = mode_momentum(spec.n_spins, l);
  const double y = spec.gamma * std::sin(p);
  const double x = spec.field / spec.coupling - std::cos(p);
  const double r2 = x * x + y * y;
  if (r2 == 0.0) return 0.0;
  // d/dh [atan2(y, x) / 2] with dx/dh = 1/J
  return -0.5 * y / (spec.coupling * r2);
}

double fermi_occupation(double beta_energy) {
  if (beta_energy > 0.0) {
    const double e = std::exp(-beta_energy);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(beta_energy));
}

double log_fermi_occupation(double beta_energy) {
  if (beta_energy > 0.0) return -beta_energy - std::log1p(std::exp(-beta_energy));
  return -std::log1p(std::exp(beta_energy));
}

double occupation(const ChainSpec& spec, int l) {
  const double eps = spec.model == Model::XX ? dispersion_xx(spec, l) : dispersion_xy(spec, l);
  return fermi_occupation(spec.beta * eps);
}

double ModeTable::occupation_sum() const {
  double sum = 0.0;
  for (const auto& m : modes) sum += m.occupation;
  return sum;
}

ModeTable mode_table(const ChainSpec& spec) {
  spec.validate();
  ModeTable table;
  table.spec = spec;
  const int half = spec.n_spins / 2;
  table.modes.reserve(static_cast<std::size_t>(spec.n_spins));
  for (int l = -half; l < half; ++l) {
    Mode m;
    m.index = l;
    m.momentum = mode_momentum(spec.n_spins, l);
    if (spec.model == Model::XX) {
      m.energy = dispersion_xx(spec, l);
      m.theta = 0.0;
    } else {
      m.energy = dispersion_xy(spec, l);
      m.theta = bogoliubov_angle(spec, l);
    }
    m.occupation = fermi_occupation(spec.beta * m.energy);
    table.modes.push_back(m);
  }
  return table;
}

}  // namespace thermosense

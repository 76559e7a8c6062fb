#include "thermosense/sector_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace thermosense {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Gibbs statistics of the configurations with one fixed fermion parity.
struct ParityClass {
  double log_w = kNegInf;
  double mean[2] = {0.0, 0.0};   // dE/dh, dE/dJ
  double cov[3] = {0.0, 0.0, 0.0};
  double curv[3] = {0.0, 0.0, 0.0};

  bool empty() const { return log_w == kNegInf; }
};

struct StateShift {
  double log_w;
  double x[2];
  double y[3];
};

ParityClass shifted(const ParityClass& c, const StateShift& s) {
  ParityClass out = c;
  if (c.empty()) return out;
  out.log_w += s.log_w;
  out.mean[0] += s.x[0];
  out.mean[1] += s.x[1];
  for (int i = 0; i < 3; ++i) out.curv[i] += s.y[i];
  return out;
}

ParityClass mixed(const ParityClass& a, const ParityClass& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  ParityClass out;
  out.log_w = log_add_exp(a.log_w, b.log_w);
  const double wa = std::exp(a.log_w - out.log_w);
  const double wb = std::exp(b.log_w - out.log_w);
  const double d0 = a.mean[0] - b.mean[0];
  const double d1 = a.mean[1] - b.mean[1];
  out.mean[0] = wa * a.mean[0] + wb * b.mean[0];
  out.mean[1] = wa * a.mean[1] + wb * b.mean[1];
  const double wab = wa * wb;
  out.cov[0] = wa * a.cov[0] + wb * b.cov[0] + wab * d0 * d0;
  out.cov[1] = wa * a.cov[1] + wb * b.cov[1] + wab * d0 * d1;
  out.cov[2] = wa * a.cov[2] + wb * b.cov[2] + wab * d1 * d1;
  for (int i = 0; i < 3; ++i) out.curv[i] = wa * a.curv[i] + wb * b.curv[i];
  return out;
}

// Class log-weights are kept relative to a common offset: the absolute values
// reach ~beta*N, where double spacing would swamp the class-weight ratios.
struct ClassPair {
  ParityClass even;
  ParityClass odd;
  long double offset = 0.0L;

  ClassPair() { even.log_w = 0.0; }

  void add_mode(const ModeEnergy& m, double beta) {
    const StateShift empty{0.5 * beta * m.energy,
                           {-0.5 * m.d_h, -0.5 * m.d_j},
                           {-0.5 * m.d_hh, -0.5 * m.d_hj, -0.5 * m.d_jj}};
    const StateShift filled{-0.5 * beta * m.energy,
                            {0.5 * m.d_h, 0.5 * m.d_j},
                            {0.5 * m.d_hh, 0.5 * m.d_hj, 0.5 * m.d_jj}};
    ParityClass new_even = mixed(shifted(even, empty), shifted(odd, filled));
    ParityClass new_odd = mixed(shifted(odd, empty), shifted(even, filled));
    even = new_even;
    odd = new_odd;
    normalize();
  }

  void shift_all(StateShift s, bool flip_parity) {
    offset += s.log_w;
    s.log_w = 0.0;
    even = shifted(even, s);
    odd = shifted(odd, s);
    if (flip_parity) std::swap(even, odd);
  }

  void normalize() {
    const double m = std::max(even.log_w, odd.log_w);
    if (m == kNegInf) return;
    if (!even.empty()) even.log_w -= m;
    if (!odd.empty()) odd.log_w -= m;
    offset += m;
  }
};

// Mixes one class from each grid, each carrying its own offset.
ThermalMoments combine(const ClassPair& even_grid, const ClassPair& odd_grid) {
  ParityClass e = even_grid.even;
  ParityClass o = odd_grid.odd;
  const long double ref = std::max(even_grid.offset, odd_grid.offset);
  if (!e.empty()) e.log_w = static_cast<double>(e.log_w + (even_grid.offset - ref));
  if (!o.empty()) o.log_w = static_cast<double>(o.log_w + (odd_grid.offset - ref));
  const ParityClass total = mixed(e, o);
  ThermalMoments out;
  out.log_z = static_cast<double>(ref + total.log_w);
  out.mean_dh = total.mean[0];
  out.mean_dj = total.mean[1];
  out.var_hh = total.cov[0];
  out.cov_hj = total.cov[1];
  out.var_jj = total.cov[2];
  out.mean_d2_hh = total.curv[0];
  out.mean_d2_hj = total.curv[1];
  out.mean_d2_jj = total.curv[2];
  out.odd_sector_weight = o.empty() ? 0.0 : std::exp(o.log_w - total.log_w);
  return out;
}

ModeEnergy signed_mode(double p, double cos_p, double coupling, double field) {
  ModeEnergy m;
  m.momentum = p;
  m.energy = 2.0 * coupling * cos_p - 2.0 * field;
  m.d_h = -2.0;
  m.d_j = 2.0 * cos_p;
  return m;
}

ModeEnergy paired_mode(double p, const ChainSpec& spec) {
  const double c = std::cos(p);
  const double s = std::sin(p);
  const double xi = 2.0 * (spec.coupling * c - spec.field);
  const double delta = 2.0 * spec.coupling * spec.gamma * s;
  const double xi_h = -2.0, xi_j = 2.0 * c;
  const double delta_h = 0.0, delta_j = 2.0 * spec.gamma * s;
  ModeEnergy m;
  m.momentum = p;
  m.paired = true;
  m.energy = std::hypot(xi, delta);
  const double e = m.energy;
  m.d_h = (xi * xi_h + delta * delta_h) / e;
  m.d_j = (xi * xi_j + delta * delta_j) / e;
  m.d_hh = (xi_h * xi_h + delta_h * delta_h - m.d_h * m.d_h) / e;
  m.d_hj = (xi_h * xi_j + delta_h * delta_j - m.d_h * m.d_j) / e;
  m.d_jj = (xi_j * xi_j + delta_j * delta_j - m.d_j * m.d_j) / e;
  return m;
}

// 2 sinh^2(x) / cosh(x), in log form.
double log_rotation_weight(double x) {
  x = std::abs(x);
  if (x == 0.0) return kNegInf;
  const double log_sinh = x - std::numbers::ln2 + std::log(-std::expm1(-2.0 * x));
  const double log_cosh = x - std::numbers::ln2 + std::log1p(std::exp(-2.0 * x));
  return std::numbers::ln2 + 2.0 * log_sinh - log_cosh;
}

}  // namespace

std::vector<ModeEnergy> sector_modes(const ChainSpec& spec, Sector sector) {
  spec.validate();
  const int n = spec.n_spins;
  const bool mixing = spec.gamma > 0.0;
  std::vector<ModeEnergy> modes;
  modes.reserve(static_cast<std::size_t>(n));
  const double pi = std::numbers::pi;

  if (sector == Sector::EvenAntiperiodic) {
    // l and -l-1 are partners: p and -p.
    for (int l = 0; l < n / 2; ++l) {
      const double p = pi * (2.0 * l + 1.0) / n;
      if (mixing) {
        ModeEnergy m = paired_mode(p, spec);
        modes.push_back(m);
        m.momentum = -p;
        modes.push_back(m);
      } else {
        const double c = std::cos(p);
        modes.push_back(signed_mode(p, c, spec.coupling, spec.field));
        modes.push_back(signed_mode(-p, c, spec.coupling, spec.field));
      }
    }
    return modes;
  }

  // Periodic grid: p = 0 and p = pi never mix.
  modes.push_back(signed_mode(0.0, 1.0, spec.coupling, spec.field));
  modes.push_back(signed_mode(pi, -1.0, spec.coupling, spec.field));
  for (int l = 1; l < n / 2; ++l) {
    const double p = 2.0 * pi * l / n;
    if (mixing) {
      ModeEnergy m = paired_mode(p, spec);
      modes.push_back(m);
      m.momentum = -p;
      modes.push_back(m);
    } else {
      const double c = std::cos(p);
      modes.push_back(signed_mode(p, c, spec.coupling, spec.field));
      modes.push_back(signed_mode(-p, c, spec.coupling, spec.field));
    }
  }
  return modes;
}

ThermalMoments thermal_moments(const ChainSpec& spec) {
  ClassPair even_grid;
  for (const auto& m : sector_modes(spec, Sector::EvenAntiperiodic)) even_grid.add_mode(m, spec.beta);
  ClassPair odd_grid;
  for (const auto& m : sector_modes(spec, Sector::OddPeriodic)) odd_grid.add_mode(m, spec.beta);
  return combine(even_grid, odd_grid);
}

double basis_rotation_qfi(const ChainSpec& spec) {
  spec.validate();
  if (spec.gamma == 0.0) return 0.0;
  const double beta = spec.beta;

  // Per-unit weights are stored relative to `shift` so prefix/suffix sums stay
  // O(1); the summed shifts (~beta N) are carried in extended precision.
  struct Unit {
    double log_even;
    double log_odd;
    double shift;
    double energy;
    double dtheta;  // 0 for unpaired units
  };
  struct SectorData {
    std::vector<Unit> units;
    std::vector<double> pre_e, pre_o, suf_e, suf_o;
    long double shift = 0.0L;
    double log_weight = 0.0;  // relative to `shift`, sector parity only
  };

  SectorData data[2];
  const Sector sectors[2] = {Sector::EvenAntiperiodic, Sector::OddPeriodic};
  for (int s = 0; s < 2; ++s) {
    SectorData& d = data[s];
    const auto modes = sector_modes(spec, sectors[s]);
    for (std::size_t i = 0; i < modes.size();) {
      const auto& m = modes[i];
      const double x = beta * m.energy;
      if (m.paired) {
        // 00 and 11 carry weights e^{x}, e^{-x}; 10 and 01 weight 1 each.
        const double ax = std::abs(x);
        const double log_even = ax + std::log1p(std::exp(-2.0 * ax));
        const double dtheta = -2.0 * spec.coupling * spec.gamma * std::sin(m.momentum) /
                              (m.energy * m.energy);
        d.units.push_back({log_even - ax, std::numbers::ln2 - ax, ax, m.energy, dtheta});
        i += 2;
      } else {
        const double ax = 0.5 * std::abs(x);
        d.units.push_back({0.5 * x - ax, -0.5 * x - ax, ax, m.energy, 0.0});
        i += 1;
      }
      d.shift += d.units.back().shift;
    }
    const std::size_t k = d.units.size();
    // prefix[i] covers units [0, i), suffix[i] covers [i, k)
    d.pre_e.assign(k + 1, 0.0);
    d.pre_o.assign(k + 1, kNegInf);
    d.suf_e.assign(k + 1, 0.0);
    d.suf_o.assign(k + 1, kNegInf);
    for (std::size_t i = 0; i < k; ++i) {
      const Unit& u = d.units[i];
      d.pre_e[i + 1] = log_add_exp(d.pre_e[i] + u.log_even, d.pre_o[i] + u.log_odd);
      d.pre_o[i + 1] = log_add_exp(d.pre_o[i] + u.log_even, d.pre_e[i] + u.log_odd);
    }
    for (std::size_t i = k; i-- > 0;) {
      const Unit& u = d.units[i];
      d.suf_e[i] = log_add_exp(d.suf_e[i + 1] + u.log_even, d.suf_o[i + 1] + u.log_odd);
      d.suf_o[i] = log_add_exp(d.suf_o[i + 1] + u.log_even, d.suf_e[i + 1] + u.log_odd);
    }
    d.log_weight = s == 1 ? d.pre_o[k] : d.pre_e[k];
  }

  const long double ref = std::max(data[0].shift, data[1].shift);
  double rel_shift[2];
  for (int s = 0; s < 2; ++s) rel_shift[s] = static_cast<double>(data[s].shift - ref);
  const double log_z =
      log_add_exp(rel_shift[0] + data[0].log_weight, rel_shift[1] + data[1].log_weight);

  double total = 0.0;
  for (int s = 0; s < 2; ++s) {
    const SectorData& d = data[s];
    const bool want_odd = s == 1;
    for (std::size_t i = 0; i < d.units.size(); ++i) {
      const Unit& u = d.units[i];
      if (u.dtheta == 0.0) continue;
      // rest of the chain must carry the sector parity; the 00/11 block is even
      const double log_rest =
          want_odd ? log_add_exp(d.pre_e[i] + d.suf_o[i + 1], d.pre_o[i] + d.suf_e[i + 1])
                   : log_add_exp(d.pre_e[i] + d.suf_e[i + 1], d.pre_o[i] + d.suf_o[i + 1]);
      const double log_term = rel_shift[s] + log_rest - u.shift +
                              log_rotation_weight(beta * u.energy) - log_z;
      total += 4.0 * u.dtheta * u.dtheta * std::exp(log_term);
    }
  }
  return total;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

XxProbe::XxProbe(int n_spins, double frozen_cutoff) : n_spins_(n_spins), cutoff_(frozen_cutoff) {
  if (n_spins < 2 || n_spins % 2 != 0)
    throw std::invalid_argument("XxProbe: N must be even and >= 2");
  const double pi = std::numbers::pi;
  auto build = [&](SortedSector& s, bool antiperiodic) {
    s.cosines.reserve(static_cast<std::size_t>(n_spins));
    for (int l = -n_spins / 2; l < n_spins / 2; ++l) {
      const double p = antiperiodic ? pi * (2.0 * l + 1.0) / n_spins : 2.0 * pi * l / n_spins;
      double c = std::cos(p);
      if (!antiperiodic && l == 0) c = 1.0;
      if (!antiperiodic && l == -n_spins / 2) c = -1.0;
      s.cosines.push_back(c);
    }
    std::sort(s.cosines.begin(), s.cosines.end(), std::greater<>());
    s.prefix_cos.assign(s.cosines.size() + 1, 0.0);
    for (std::size_t i = 0; i < s.cosines.size(); ++i)
      s.prefix_cos[i + 1] = s.prefix_cos[i] + s.cosines[i];
  };
  build(even_, true);
  build(odd_, false);
}

XxProbe::Window XxProbe::window(const SortedSector& s, double coupling, double field,
                                double beta) const {
  const double upper = (field + 0.5 * cutoff_ / beta) / coupling;
  const double lower = (field - 0.5 * cutoff_ / beta) / coupling;
  Window w;
  // descending order: count of entries above the thresholds
  w.empty_end = static_cast<std::size_t>(
      std::upper_bound(s.cosines.begin(), s.cosines.end(), upper, std::greater<>()) -
      s.cosines.begin());
  w.active_end = static_cast<std::size_t>(
      std::upper_bound(s.cosines.begin(), s.cosines.end(), lower, std::greater<>()) -
      s.cosines.begin());
  w.active_end = std::max(w.active_end, w.empty_end);
  return w;
}

ThermalMoments XxProbe::moments(double coupling, double field, double beta) const {
  auto evaluate = [&](const SortedSector& s) {
    const Window w = window(s, coupling, field, beta);
    ClassPair classes;
    for (std::size_t i = w.empty_end; i < w.active_end; ++i)
      classes.add_mode(signed_mode(0.0, s.cosines[i], coupling, field), beta);

    const std::size_t n_total = s.cosines.size();
    const double n_empty = static_cast<double>(w.empty_end);
    const double sum_empty = s.prefix_cos[w.empty_end];
    const double n_filled = static_cast<double>(n_total - w.active_end);
    const double sum_filled = s.prefix_cos[n_total] - s.prefix_cos[w.active_end];
    StateShift frozen{};
    // empty: -beta E = beta (J c - h); filled: -beta (J c - h)
    const long double b = beta, j = coupling, h = field;
    classes.offset += b * (j * sum_empty - h * n_empty) - b * (j * sum_filled - h * n_filled);
    frozen.x[0] = n_empty - n_filled;
    frozen.x[1] = -sum_empty + sum_filled;
    classes.shift_all(frozen, (n_total - w.active_end) % 2 == 1);
    return classes;
  };
  const ClassPair even_grid = evaluate(even_);
  const ClassPair odd_grid = evaluate(odd_);
  return combine(even_grid, odd_grid);
}

double XxProbe::magnetization(double coupling, double field, double beta) const {
  return -moments(coupling, field, beta).mean_dh;
}

double XxProbe::susceptibility(double coupling, double field, double beta) const {
  return beta * moments(coupling, field, beta).var_hh;
}

int XxProbe::sample_jz(double coupling, double field, double beta,
                       std::mt19937_64& rng) const {
  return sample_jz(coupling, field, beta, 1, rng).front();
}

std::vector<int> XxProbe::sample_jz(double coupling, double field, double beta,
                                    std::size_t count, std::mt19937_64& rng) const {
  struct Table {
    std::size_t first = 0;
    std::size_t n_filled = 0;
    std::vector<double> q, suf_even, suf_odd;
  };
  auto prepare = [&](const SortedSector& s) {
    const Window w = window(s, coupling, field, beta);
    Table t;
    t.first = w.empty_end;
    t.n_filled = s.cosines.size() - w.active_end;
    const std::size_t active = w.active_end - w.empty_end;
    t.q.resize(active);
    for (std::size_t i = 0; i < active; ++i) {
      const double eps = 2.0 * coupling * s.cosines[w.empty_end + i] - 2.0 * field;
      t.q[i] = fermi_occupation(beta * eps);
    }
    // suffix parity probabilities of the independent product measure
    t.suf_even.assign(active + 1, 1.0);
    t.suf_odd.assign(active + 1, 0.0);
    for (std::size_t i = active; i-- > 0;) {
      t.suf_even[i] = t.q[i] * t.suf_odd[i + 1] + (1.0 - t.q[i]) * t.suf_even[i + 1];
      t.suf_odd[i] = t.q[i] * t.suf_even[i + 1] + (1.0 - t.q[i]) * t.suf_odd[i + 1];
    }
    return t;
  };
  const double odd_weight = moments(coupling, field, beta).odd_sector_weight;
  const Table even_table = prepare(even_);
  const Table odd_table = prepare(odd_);

  std::vector<int> out;
  out.reserve(count);
  for (std::size_t draw = 0; draw < count; ++draw) {
    const bool odd_sector = uniform01(rng) < odd_weight;
    const Table& t = odd_sector ? odd_table : even_table;
    bool need_odd = odd_sector != (t.n_filled % 2 == 1);
    std::size_t occupied = t.n_filled;
    for (std::size_t i = 0; i < t.q.size(); ++i) {
      const double take = t.q[i] * (need_odd ? t.suf_even[i + 1] : t.suf_odd[i + 1]);
      const double skip = (1.0 - t.q[i]) * (need_odd ? t.suf_odd[i + 1] : t.suf_even[i + 1]);
      const double denom = take + skip;
      const double p_take = denom > 0.0 ? take / denom : t.q[i];
      if (uniform01(rng) < p_take) {
        ++occupied;
        need_odd = !need_odd;
      }
    }
    out.push_back(2 * static_cast<int>(occupied) - n_spins_);
  }
  return out;
}

}  // namespace thermosense

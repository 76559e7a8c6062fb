#include "validate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "grid.hpp"
#include "thermosense/estimator_bench.hpp"
#include "thermosense/exact_oracle.hpp"
#include "thermosense/sector_ensemble.hpp"
#include "thermosense/thermo_metrology.hpp"

namespace thermosense::cli {

namespace {

std::string describe(const ChainSpec& s) {
  std::ostringstream o;
  o.precision(6);
  o << to_string(s.model) << " N=" << s.n_spins << " J=" << s.coupling << " h=" << s.field;
  if (s.model == Model::XY) o << " g=" << s.gamma;
  o << " beta=" << s.beta;
  return o.str();
}

double rel(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

CheckResult make(std::string check, std::string detail, double residual, double tol,
                 double scale) {
  return {std::move(check), std::move(detail), residual, tol * scale, residual < tol * scale};
}

template <class F>
std::vector<CheckResult> per_spec(const std::vector<ChainSpec>& specs, int threads, F f) {
  std::vector<std::vector<CheckResult>> out(specs.size());
  parallel_for(specs.size(), threads, [&](std::size_t i) { out[i] = f(specs[i]); });
  std::vector<CheckResult> flat;
  for (auto& v : out)
    for (auto& c : v) flat.push_back(std::move(c));
  return flat;
}

// Five-point central differences of f at x.
template <class F>
double diff1(F f, double x, double d) {
  return (f(x - 2 * d) - 8 * f(x - d) + 8 * f(x + d) - f(x + 2 * d)) / (12 * d);
}

template <class F>
double diff2(F f, double x, double d) {
  return (-f(x - 2 * d) + 16 * f(x - d) - 30 * f(x) + 16 * f(x + d) - f(x + 2 * d)) /
         (12 * d * d);
}

}  // namespace

static std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::vector<ChainSpec> regression_grid() {
  const int sizes[] = {4, 6, 8, 10};
  const double betas[] = {2.0, 20.0, 100.0};
  const double ratios[] = {0.5, 0.9, 1.2};
  const double gammas[] = {0.0, 0.5, 1.0};
  const double couplings[] = {1.0, 0.75, 1.5};  // J varies too
  std::vector<ChainSpec> out;
  for (int i = 0; i < 30; ++i) {
    const int n = sizes[i % 4];
    const double b = betas[(i / 2) % 3];
    const double r = ratios[(i / 6) % 3];
    const double j = couplings[(i / 7) % 3];
    if (i % 2 == 0) {
      out.push_back(ChainSpec::xx(n, j, r * j, b));
    } else {
      out.push_back(ChainSpec::xy(n, j, r * j, gammas[(i / 3) % 3], b));
    }
  }
  return out;
}

std::vector<ChainSpec> random_xx_specs(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ChainSpec> out;
  for (std::size_t i = 0; i < count; ++i) {
    const int n = 2 * (10 + static_cast<int>(rng() % 91));  // 20..200
    const double j = 0.5 + 1.5 * uniform01(rng);
    const double r = 1.2 * uniform01(rng);
    const double b = 0.5 + 9.5 * uniform01(rng);
    out.push_back(ChainSpec::xx(n, j, r * j, b));
  }
  return out;
}

std::vector<CheckResult> oracle_equivalence(const std::vector<ChainSpec>& specs, double scale,
                                            int threads) {
  return per_spec(specs, threads, [&](const ChainSpec& s) {
    const std::string d = describe(s);
    const oracle::DenseThermalState st = oracle::thermal_state(s);
    const auto jz = oracle::observable_moments(st, oracle::total_sz(s.n_spins), 1);
    const double qh = oracle::qfi_spectral(st, oracle::state_derivative(st, Parameter::Field));
    std::vector<CheckResult> r;
    r.push_back(make("oracle.log_z", d, rel(log_partition(s), st.log_z), 1e-8, scale));
    r.push_back(make("oracle.magnetization_z", d, rel(magnetization_z(s), jz[0]), 1e-8, scale));
    r.push_back(make("oracle.qfi_h", d, rel(qfi_h(s).value, qh),
                     s.model == Model::XY ? 1e-6 : 1e-8, scale));
    if (s.model == Model::XX) {
      const double qj =
          oracle::qfi_spectral(st, oracle::state_derivative(st, Parameter::Coupling));
      r.push_back(make("oracle.qfi_j", d, rel(qfi_j(s).value, qj), 1e-8, scale));
    }
    return r;
  });
}

std::vector<CheckResult> susceptibility_identity(const std::vector<ChainSpec>& specs,
                                                 double scale) {
  std::vector<CheckResult> r;
  for (const auto& s : specs) {
    const std::string d = describe(s);
    const double f = qfi_h(s).value;
    const double step = 1e-3 / std::max(1.0, s.beta / 10.0);
    const double chi =
        diff1([&](double h) { return magnetization_z(s.with_field(h)); }, s.field, step);
    const double curv =
        diff2([&](double h) { return log_partition(s.with_field(h)); }, s.field, step);
    r.push_back(make("identity.beta_chi", d, rel(s.beta * chi, f), 1e-6, scale));
    r.push_back(make("identity.d2_log_z", d, rel(curv, f), 1e-6, scale));
  }
  return r;
}

std::vector<CheckResult> sld_checks(const std::vector<ChainSpec>& specs, double scale,
                                    int threads) {
  return per_spec(specs, threads, [&](const ChainSpec& s) {
    std::vector<CheckResult> r;
    const oracle::DenseThermalState st = oracle::thermal_state(s);
    const oracle::Matrix tau = st.density_matrix();
    for (Parameter target : {Parameter::Field, Parameter::Coupling}) {
      const std::string d = describe(s) + " target=" + std::string(to_string(target));
      const oracle::Matrix dtau_e = oracle::state_derivative(st, target);
      const oracle::Matrix lam = st.from_eigenbasis(oracle::sld_eigenbasis(st, dtau_e));
      const oracle::Matrix dtau = st.from_eigenbasis(dtau_e);
      const oracle::Matrix res = lam * tau + tau * lam - 2.0 * dtau;
      const double opnorm = res.jacobiSvd().singularValues()(0);
      r.push_back(make("sld.relation", d, opnorm, 1e-8, scale));
      const double f = oracle::qfi_spectral(st, dtau_e);
      const double trace = (tau * lam * lam).trace();
      r.push_back(make("sld.trace_qfi", d, rel(trace, f), 1e-8, scale));
      r.push_back(make("sld.traceless", d, std::abs((tau * lam).trace()), 1e-10, scale));
    }
    return r;
  });
}

std::vector<CheckResult> cramer_rao_checks(const std::vector<ChainSpec>& specs, double scale,
                                           int threads) {
  return per_spec(specs, threads, [&](const ChainSpec& s) {
    std::vector<CheckResult> r;
    const std::string d = describe(s);
    const double qh = qfi_h(s).value;
    std::vector<EstimatorSpec> ests{{Observable::Jz, Parameter::Field}};
    if (s.n_spins <= oracle::kMaxSpins) ests.push_back({Observable::JxSquared, Parameter::Field});
    if (s.model == Model::XX) {
      ests.push_back({Observable::Jz, Parameter::Coupling});
      ests.push_back({Observable::OJ, Parameter::Coupling});
      ests.push_back({Observable::OJ, Parameter::Field});
    }
    for (const auto& e : ests) {
      const double q = e.target == Parameter::Field ? qh : qfi_j(s).value;
      const double f = estimator_sensitivity(s, e).value;
      // excess over the bound, in units of the bound
      const double excess = q > 0.0 ? (f - q) / q : (f > 0.0 ? 1.0 : 0.0);
      r.push_back(make("cramer_rao." + e.label(), d, std::max(0.0, excess), 1e-9, scale));
      const bool saturating = s.model == Model::XX &&
                              ((e.observable == Observable::Jz && e.target == Parameter::Field) ||
                               (e.observable == Observable::OJ && e.target == Parameter::Coupling));
      if (saturating)
        r.push_back(make("saturation." + e.label(), d, rel(f, q), 1e-10, scale));
    }
    return r;
  });
}

std::vector<CheckResult> c_fit_checks(bool minimal, double scale) {
  FitSweep all;
  all.betas = {100.0, 200.0};
  all.sizes = minimal ? std::vector<int>{10000} : std::vector<int>{10000, 100000};
  for (int i = 0; i <= (minimal ? 3 : 9); ++i) all.field_ratios.push_back(minimal ? 0.3 * i : 0.1 * i);
  const CFitResult fit = fit_c(all);
  FitSweep lo = all, hi = all;
  lo.betas = {100.0};
  hi.betas = {200.0};
  const double c_lo = fit_c(lo).c;
  const double c_hi = fit_c(hi).c;
  std::vector<CheckResult> r;
  std::ostringstream d;
  d.precision(6);
  d << "C=" << fit.c << " over " << fit.window;
  r.push_back(make("c_fit.value", d.str(), std::abs(fit.c - kDefaultSensitivityConstant), 0.05,
                   scale));
  std::ostringstream d2;
  d2.precision(6);
  d2 << "C(beta=100)=" << c_lo << " C(beta=200)=" << c_hi;
  r.push_back(make("c_fit.subset_spread", d2.str(), std::abs(c_lo - c_hi), 0.02, scale));
  return r;
}

ValidationReport validate(const ValidateOptions& o, const CommonOptions& common) {
  if (!(o.tolerance_scale >= 0.0)) throw ConfigError("--tolerance-scale must be >= 0");
  ValidationReport rep;
  auto add = [&](std::vector<CheckResult> v) {
    for (auto& c : v) rep.checks.push_back(std::move(c));
  };
  const double s = o.tolerance_scale;
  const int t = common.threads;
  if (o.minimal) {
    const std::vector<ChainSpec> one{ChainSpec::xx(4, 1.0, 0.5, 20.0)};
    add(oracle_equivalence(one, s, t));
    add(susceptibility_identity(random_xx_specs(1, common.seed), s));
    add(sld_checks(one, s, t));
    add(cramer_rao_checks(one, s, t));
    add(c_fit_checks(true, s));
    return rep;
  }
  const std::vector<ChainSpec> grid = regression_grid();
  add(oracle_equivalence(grid, s, t));
  add(susceptibility_identity(random_xx_specs(20, common.seed), s));
  std::vector<ChainSpec> small;
  for (const auto& g : grid)
    if (g.n_spins <= 8) small.push_back(g);
  add(sld_checks(small, s, t));
  add(cramer_rao_checks(small, s, t));
  add(c_fit_checks(false, s));
  return rep;
}

void write_report_csv(std::ostream& out, const ValidationReport& r, const CommonOptions& common,
                      const ValidateOptions& o) {
  out << "# command = validate\n# seed = " << common.seed << "\n# threads = " << common.threads
      << "\n# tolerance_scale = " << o.tolerance_scale
      << "\n# minimal = " << (o.minimal ? "true" : "false") << '\n';
  out << "check,detail,residual,tolerance,pass\n";
  for (const auto& c : r.checks)
    out << c.check << ',' << csv_safe(c.detail) << ',' << format_csv_double(c.residual) << ','
        << format_csv_double(c.tolerance) << ',' << (c.pass ? "true" : "false") << '\n';
}

void write_report_json(std::ostream& out, const ValidationReport& r,
                       const CommonOptions& common, const ValidateOptions& o) {
  using nlohmann::json;
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"check", c.check},
                      {"detail", c.detail},
                      {"residual", c.residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  const json doc{{"config",
                  {{"command", "validate"}, {"seed", common.seed}, {"threads", common.threads},
                   {"tolerance_scale", o.tolerance_scale}, {"minimal", o.minimal}}},
                 {"passed", r.all_passed()},
                 {"checks", checks}};
  out << doc.dump(1) << '\n';
}

}  // namespace thermosense::cli

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "grid.hpp"
#include "thermosense/estimator_bench.hpp"
#include "thermosense/thermo_metrology.hpp"

namespace thermosense::cli {

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

RecordTable start_table(const CommonOptions& common,
                        std::vector<std::pair<std::string, std::string>> params) {
  RecordTable t;
  t.config.emplace_back("command", common.command);
  t.config.emplace_back("seed", std::to_string(common.seed));
  t.config.emplace_back("threads", std::to_string(common.threads));
  t.config.emplace_back("format", common.format);
  for (auto& p : params) t.config.push_back(std::move(p));
  return t;
}

std::vector<int> sizes(const std::string& text) {
  auto out = parse_int_grid(text, "n");
  for (int n : out)
    if (n < 2 || n % 2 != 0) throw ConfigError("--n: spin counts must be even and >= 2");
  return out;
}

std::vector<double> positive(const std::string& text, const std::string& name) {
  auto out = parse_grid(text, name);
  for (double v : out)
    if (!(v > 0.0)) throw ConfigError("--" + name + ": values must be positive");
  return out;
}

void require_positive(double v, const std::string& name) {
  if (!(v > 0.0)) throw ConfigError("--" + name + ": must be positive");
}

// Evaluates `eval` on every grid spec in parallel and keeps the grid order.
template <class Eval>
void fill(RecordTable& t, const std::vector<ChainSpec>& specs, int threads, Eval eval) {
  std::vector<std::vector<SweepRecord>> rows(specs.size());
  parallel_for(specs.size(), threads, [&](std::size_t i) { rows[i] = eval(specs[i]); });
  for (auto& r : rows)
    for (auto& x : r) t.rows.push_back(std::move(x));
  t.sort_rows();
}

}  // namespace

RecordTable fig1(const Fig1Options& o, const CommonOptions& common) {
  require_positive(o.coupling, "j");
  std::vector<ChainSpec> specs;
  for (double b : positive(o.beta, "beta"))
    for (int n : sizes(o.n))
      for (double r : parse_grid(o.h_over_j, "h-over-j"))
        specs.push_back(ChainSpec::xx(n, o.coupling, r * o.coupling, b));
  RecordTable t = start_table(common, {{"beta", o.beta}, {"n", o.n}, {"j", num(o.coupling)},
                                       {"h_over_j", o.h_over_j}});
  fill(t, specs, common.threads, [](const ChainSpec& s) {
    const SensitivityReport q = qfi_h(s);
    return std::vector{SweepRecord::from(s, "qfi_h_per_spin", q.per_spin, q.provenance)};
  });
  return t;
}

RecordTable fig2(const Fig2Options& o, const CommonOptions& common) {
  require_positive(o.coupling, "j");
  std::vector<ChainSpec> specs;
  for (double b : positive(o.beta, "beta"))
    for (int n : sizes(o.n))
      for (double r : parse_grid(o.h_over_j, "h-over-j"))
        specs.push_back(ChainSpec::xx(n, o.coupling, r * o.coupling, b));
  RecordTable t = start_table(common, {{"beta", o.beta}, {"n", o.n}, {"j", num(o.coupling)},
                                       {"h_over_j", o.h_over_j}});
  t.extras = {ExtraColumn::Valid};
  fill(t, specs, common.threads, [](const ChainSpec& s) {
    const bool valid = in_low_temperature_window(s);
    const SensitivityReport q = qfi_h(s);
    std::vector<SweepRecord> rows{SweepRecord::from(s, "qfi_h_per_spin", q.per_spin, q.provenance)};
    rows.back().valid = valid;
    // the approximation exists only for |h| < J and a non-empty window k_B T < J
    if (std::abs(s.field) < s.coupling && 1.0 / s.beta < s.coupling) {
      const SensitivityReport a = qfi_h_approx(s);
      rows.push_back(SweepRecord::from(s, "qfi_h_app_per_spin", a.per_spin, a.provenance));
      rows.back().valid = valid;
    }
    return rows;
  });
  return t;
}

RecordTable fig3(const Fig3Options& o, const CommonOptions& common) {
  require_positive(o.field, "field");
  std::vector<ChainSpec> specs;
  for (double b : positive(o.beta, "beta"))
    for (int n : sizes(o.n))
      for (double r : positive(o.j_over_h, "j-over-h"))
        specs.push_back(ChainSpec::xx(n, r * o.field, o.field, b));
  RecordTable t = start_table(common, {{"beta", o.beta}, {"n", o.n}, {"field", num(o.field)},
                                       {"j_over_h", o.j_over_h}});
  t.extras = {ExtraColumn::Estimator};
  fill(t, specs, common.threads, [](const ChainSpec& s) {
    const SensitivityReport q = qfi_j(s);
    const EstimatorSpec est{Observable::Jz, Parameter::Coupling};
    const SensitivityReport f = estimator_sensitivity(s, est);
    std::vector<SweepRecord> rows{SweepRecord::from(s, "qfi_j_per_spin", q.per_spin, q.provenance),
                                  SweepRecord::from(s, "sens_per_spin", f.per_spin, f.provenance)};
    rows.back().estimator = est.label();
    return rows;
  });
  return t;
}

RecordTable fig4a(const Fig4aOptions& o, const CommonOptions& common) {
  require_positive(o.coupling, "j");
  std::vector<ChainSpec> specs;
  for (double b : positive(o.beta, "beta"))
    for (int n : sizes(o.n))
      for (double g : parse_grid(o.gamma, "gamma"))
        for (double r : parse_grid(o.h_over_j, "h-over-j"))
          specs.push_back(ChainSpec::xy(n, o.coupling, r * o.coupling, g, b));
  for (const auto& s : specs) {
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  RecordTable t = start_table(common, {{"beta", o.beta}, {"n", o.n}, {"j", num(o.coupling)},
                                       {"h_over_j", o.h_over_j}, {"gamma", o.gamma}});
  fill(t, specs, common.threads, [](const ChainSpec& s) {
    const SensitivityReport q = qfi_h(s);
    return std::vector{
        SweepRecord::from(s, "log10_qfi_h_per_spin", std::log10(q.per_spin), q.provenance)};
  });
  return t;
}

RecordTable fig4b(const Fig4bOptions& o, const CommonOptions& common) {
  require_positive(o.coupling, "j");
  std::vector<ChainSpec> specs;
  for (double b : positive(o.beta, "beta"))
    for (int n : sizes(o.n)) {
      if (n > oracle::kMaxSpins)
        throw ConfigError("fig4b: N <= " + std::to_string(oracle::kMaxSpins) +
                          " (dense oracle route), got " + std::to_string(n));
      for (double g : parse_grid(o.gamma, "gamma"))
        for (double r : parse_grid(o.h_over_j, "h-over-j"))
          specs.push_back(ChainSpec::xy(n, o.coupling, r * o.coupling, g, b));
    }
  RecordTable t = start_table(common, {{"beta", o.beta}, {"n", o.n}, {"j", num(o.coupling)},
                                       {"gamma", o.gamma}, {"h_over_j", o.h_over_j}});
  t.extras = {ExtraColumn::Estimator};
  fill(t, specs, common.threads, [](const ChainSpec& s) {
    const SensitivityReport q = qfi_h(s);
    std::vector<SweepRecord> rows{SweepRecord::from(s, "qfi_h_per_spin", q.per_spin, q.provenance)};
    for (Observable obs : {Observable::Jz, Observable::JxSquared}) {
      const EstimatorSpec est{obs, Parameter::Field};
      const SensitivityReport f = estimator_sensitivity(s, est);
      rows.push_back(SweepRecord::from(s, "sens_per_spin", f.per_spin, f.provenance));
      rows.back().estimator = est.label();
    }
    return rows;
  });
  return t;
}

RecordTable sweep(const SweepOptions& o, const CommonOptions& common) {
  require_positive(o.coupling, "j");
  Model model;
  try {
    model = parse_model(o.model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::vector<std::string> quantities;
  {
    std::istringstream in(o.quantities);
    std::string q;
    while (std::getline(in, q, ',')) {
      static const std::vector<std::string> known{"log_z",  "free_energy", "magnetization_z",
                                                  "susceptibility_h", "qfi_h", "qfi_j"};
      if (std::find(known.begin(), known.end(), q) == known.end())
        throw ConfigError("--quantities: unknown quantity '" + q + "'");
      if (q == "qfi_j" && model != Model::XX) continue;
      quantities.push_back(q);
    }
    if (quantities.empty()) throw ConfigError("--quantities: empty list");
  }
  std::vector<ChainSpec> specs;
  const std::vector<double> gammas =
      model == Model::XX ? std::vector<double>{0.0} : parse_grid(o.gamma, "gamma");
  for (double b : positive(o.beta, "beta"))
    for (int n : sizes(o.n))
      for (double g : gammas)
        for (double r : parse_grid(o.h_over_j, "h-over-j")) {
          const double h = r * o.coupling;
          specs.push_back(model == Model::XX ? ChainSpec::xx(n, o.coupling, h, b)
                                             : ChainSpec::xy(n, o.coupling, h, g, b));
          try {
            specs.back().validate();
          } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
          }
        }
  RecordTable t = start_table(common, {{"model", o.model}, {"beta", o.beta}, {"n", o.n},
                                       {"j", num(o.coupling)}, {"h_over_j", o.h_over_j},
                                       {"gamma", o.gamma}, {"quantities", o.quantities}});
  fill(t, specs, common.threads, [&](const ChainSpec& s) {
    std::vector<SweepRecord> rows;
    const auto exact = Provenance::ExactFreeFermion;
    for (const auto& q : quantities) {
      double v = 0.0;
      if (q == "log_z") v = log_partition(s);
      else if (q == "free_energy") v = free_energy(s);
      else if (q == "magnetization_z") v = magnetization_z(s);
      else if (q == "susceptibility_h") v = susceptibility_h(s);
      else if (q == "qfi_h") v = qfi_h(s).value;
      else v = qfi_j(s).value;
      rows.push_back(SweepRecord::from(s, q, v, exact));
    }
    return rows;
  });
  return t;
}

ProtocolSummary protocol(const ProtocolOptions& o, const CommonOptions& common,
                         std::ostream& traces) {
  ProtocolConfig base;
  base.h_true = o.h_true;
  base.h_min = o.h_min;
  base.h_max = o.h_max;
  base.beta = o.beta;
  base.nu = o.nu;
  base.k_max = o.k_max;
  base.retune_margin = o.margin;
  base.seed = common.seed;
  const std::vector<int> ns = sizes(o.n);
  try {
    base.floor_policy = parse_floor_policy(o.floor);
    for (int n : ns) {
      base.n_spins = n;
      base.validate();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (o.runs < 1) throw ConfigError("--runs must be >= 1");

  const std::vector<ProtocolTrace> all = run_ensemble(base, ns, o.runs, common.threads);
  for (const auto& t : all) write_trace(traces, t);

  ProtocolSummary s;
  for (int k = 1; k <= o.k_max; ++k) {
    try {
      s.fits.push_back(scaling_exponent(all, k));
    } catch (const std::invalid_argument&) {
      // too few sizes reached this depth; reported through the medians
    }
  }
  std::map<std::pair<int, int>, std::vector<double>> fisher;
  std::map<std::string, std::size_t> term;
  for (const auto& t : all) {
    ++term[std::string(to_string(t.terminated_by))];
    for (const auto& it : t.iterations) fisher[{t.config.n_spins, it.k}].push_back(it.fisher);
  }
  for (auto& [key, v] : fisher) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    const double med = m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
    s.medians.push_back({key.first, key.second, med, m});
  }
  for (auto& kv : term) s.terminations.emplace_back(kv.first, kv.second);
  return s;
}

void write_summary_json(std::ostream& out, const ProtocolSummary& s, const ProtocolOptions& o,
                        const CommonOptions& common) {
  using nlohmann::json;
  json fits = json::array();
  for (const auto& f : s.fits) {
    fits.push_back({{"k", f.iteration},
                    {"slope", f.slope},
                    {"stderr", f.stderr_slope},
                    {"runs_used", f.runs_used},
                    {"runs_excluded", f.runs_excluded},
                    {"warnings", f.warnings}});
  }
  json medians = json::array();
  for (const auto& m : s.medians)
    medians.push_back({{"N", m.n_spins}, {"k", m.k}, {"median_F", m.fisher}, {"runs", m.runs}});
  json term = json::object();
  for (const auto& [k, v] : s.terminations) term[k] = v;
  const json doc{{"config",
                  {{"h_true", o.h_true}, {"h_min", o.h_min}, {"h_max", o.h_max},
                   {"beta", o.beta}, {"n", o.n}, {"nu", o.nu}, {"kmax", o.k_max},
                   {"margin", o.margin}, {"runs", o.runs}, {"floor", o.floor},
                   {"seed", common.seed}, {"rng", std::string(kRngAlgorithm)}}},
                 {"scaling", fits},
                 {"fisher_medians", medians},
                 {"terminations", term}};
  out << doc.dump(1) << '\n';
}

void write_summary_text(std::ostream& out, const ProtocolSummary& s) {
  for (const auto& f : s.fits) {
    out << "k=" << f.iteration << " slope=" << f.slope << " +/- " << f.stderr_slope
        << " (runs used " << f.runs_used << ", excluded " << f.runs_excluded << ")\n";
    for (const auto& w : f.warnings) out << "  warning: " << w << '\n';
  }
  for (const auto& [k, v] : s.terminations) out << "terminated " << k << ": " << v << '\n';
}

}  // namespace thermosense::cli

#include "thermosense/adaptive_protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include <json.hpp>

namespace thermosense {

using nlohmann::json;

std::string_view to_string(FloorPolicy p) {
  return p == FloorPolicy::StopAtThermalFloor ? "stop_at_floor" : "run_to_kmax";
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::ThermalFloor: return "thermal_floor";
    case Termination::KmaxReached: return "kmax_reached";
    case Termination::WindowViolation: return "window_violation";
  }
  return "kmax_reached";
}

FloorPolicy parse_floor_policy(std::string_view text) {
  if (text == "stop_at_floor") return FloorPolicy::StopAtThermalFloor;
  if (text == "run_to_kmax") return FloorPolicy::RunToKmax;
  throw std::invalid_argument("unknown floor policy '" + std::string(text) + "'");
}

Termination parse_termination(std::string_view text) {
  if (text == "thermal_floor") return Termination::ThermalFloor;
  if (text == "kmax_reached") return Termination::KmaxReached;
  if (text == "window_violation") return Termination::WindowViolation;
  throw std::invalid_argument("unknown termination '" + std::string(text) + "'");
}

void ProtocolConfig::validate() const {
  if (!(h_min < h_max)) throw std::invalid_argument("protocol: need h_min < h_max");
  if (!(h_min <= h_true && h_true <= h_max))
    throw std::invalid_argument("protocol: h_true must lie in [h_min, h_max]");
  if (!(h_max > 0.0)) throw std::invalid_argument("protocol: h_max must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("protocol: beta must be positive");
  if (n_spins < 2 || n_spins % 2 != 0)
    throw std::invalid_argument("protocol: N must be even and >= 2");
  if (nu < 1) throw std::invalid_argument("protocol: nu must be >= 1");
  if (k_max < 1) throw std::invalid_argument("protocol: k_max must be >= 1");
  if (!(retune_margin >= 1.0)) throw std::invalid_argument("protocol: margin must be >= 1");
}

int sample_jz(const ChainSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  if (spec.model != Model::XX) throw std::invalid_argument("sample_jz: XX only");
  const XxProbe probe(spec.n_spins);
  return probe.sample_jz(spec.coupling, spec.field, spec.beta, rng);
}

namespace {

// <J_z>(h) at fixed (J, beta) on a bracket whose endpoint values are cached.
class MagnetizationCurve {
 public:
  MagnetizationCurve(const XxProbe& probe, double coupling, double beta, double lo, double hi)
      : probe_(probe), coupling_(coupling), beta_(beta), lo_(lo), hi_(hi) {
    if (!(lo < hi)) throw std::invalid_argument("inversion bracket must satisfy lo < hi");
    f_lo_ = probe_.magnetization(coupling_, lo_, beta_);
    f_hi_ = probe_.magnetization(coupling_, hi_, beta_);
  }

  Inversion invert(double target, double guess) const {
    if (target <= f_lo_) return {lo_, target < f_lo_};
    if (target >= f_hi_) return {hi_, target > f_hi_};
    const double tol = 1e-10 * probe_.n_spins();
    double lo = lo_, hi = hi_;
    double x = std::clamp(guess, lo, hi);
    for (int it = 0; it < 200; ++it) {
      const ThermalMoments m = probe_.moments(coupling_, x, beta_);
      const double f = -m.mean_dh;
      const double slope = beta_ * m.var_hh;
      const double r = f - target;
      if (std::abs(r) <= tol) return {x, false};
      if (r < 0.0) lo = x; else hi = x;
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
        return {x, false};
      double next = slope > 0.0 ? x - r / slope : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      x = next;
    }
    return {x, false};
  }

 private:
  const XxProbe& probe_;
  double coupling_, beta_, lo_, hi_;
  double f_lo_ = 0.0, f_hi_ = 0.0;
};

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

Inversion invert_magnetization(double mean_outcome, const XxProbe& probe, double coupling,
                               double beta, double h_lo, double h_hi) {
  const MagnetizationCurve curve(probe, coupling, beta, h_lo, h_hi);
  return curve.invert(mean_outcome, 0.5 * (h_lo + h_hi));
}

Inversion invert_magnetization(double mean_outcome, const ChainSpec& spec, double h_lo,
                               double h_hi) {
  spec.validate();
  if (spec.model != Model::XX) throw std::invalid_argument("invert_magnetization: XX only");
  const XxProbe probe(spec.n_spins);
  return invert_magnetization(mean_outcome, probe, spec.coupling, spec.beta, h_lo, h_hi);
}

ProtocolTrace run_protocol(const ProtocolConfig& cfg) {
  cfg.validate();
  const XxProbe probe(cfg.n_spins);
  return run_protocol(cfg, probe);
}

ProtocolTrace run_protocol(const ProtocolConfig& cfg, const XxProbe& probe) {
  cfg.validate();
  if (probe.n_spins() != cfg.n_spins) throw std::invalid_argument("probe size mismatch");
  ProtocolTrace trace;
  trace.config = cfg;
  std::mt19937_64 rng(cfg.seed);
  double coupling = cfg.h_max;
  const auto nu = static_cast<std::size_t>(cfg.nu);

  for (int k = 1; k <= cfg.k_max; ++k) {
    ProtocolIteration it;
    it.k = k;
    it.coupling = coupling;
    it.outcomes = probe.sample_jz(coupling, cfg.h_true, cfg.beta, nu, rng);

    const MagnetizationCurve curve(probe, coupling, cfg.beta, cfg.h_min, cfg.h_max);
    const double mean =
        std::accumulate(it.outcomes.begin(), it.outcomes.end(), 0.0) / static_cast<double>(nu);
    const Inversion est = curve.invert(mean, coupling);
    if (est.clamped || !(est.field < coupling)) {
      trace.terminated_by = Termination::WindowViolation;
      return trace;
    }
    it.h_est = est.field;

    std::map<int, double> single;  // outcomes repeat; invert each value once
    std::vector<double> shots;
    shots.reserve(nu);
    for (int o : it.outcomes) {
      auto [pos, fresh] = single.try_emplace(o, 0.0);
      if (fresh) pos->second = curve.invert(static_cast<double>(o), it.h_est).field;
      shots.push_back(pos->second);
    }
    double dh = sample_std(shots) / std::sqrt(static_cast<double>(nu));
    if (!(dh > 0.0)) {
      // no spread among the shots: plug-in standard error at the estimate
      const ThermalMoments m = probe.moments(coupling, it.h_est, cfg.beta);
      const double chi = cfg.beta * m.var_hh;
      dh = chi > 0.0 ? std::sqrt(m.var_hh) / chi / std::sqrt(static_cast<double>(nu)) : 0.0;
      if (!(dh > 0.0) || !std::isfinite(dh)) dh = cfg.h_max - cfg.h_min;
    }
    it.delta_h = dh;
    it.fisher = 1.0 / (dh * dh);
    trace.iterations.push_back(std::move(it));

    if (cfg.floor_policy == FloorPolicy::StopAtThermalFloor && dh < 1.0 / cfg.beta) {
      trace.terminated_by = Termination::ThermalFloor;
      return trace;
    }
    coupling = est.field + cfg.retune_margin * dh;
  }
  trace.terminated_by = Termination::KmaxReached;
  return trace;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ b);
}

std::vector<ProtocolTrace> run_ensemble(const ProtocolConfig& base, const std::vector<int>& sizes,
                                        int runs, int threads) {
  if (runs < 1) throw std::invalid_argument("run_ensemble: runs must be >= 1");
  std::vector<XxProbe> probes;
  probes.reserve(sizes.size());
  for (int n : sizes) probes.emplace_back(n);

  const std::size_t total = sizes.size() * static_cast<std::size_t>(runs);
  std::vector<ProtocolTrace> out(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t si = job / static_cast<std::size_t>(runs);
      const std::size_t run = job % static_cast<std::size_t>(runs);
      ProtocolConfig cfg = base;
      cfg.n_spins = sizes[si];
      cfg.seed = derive_seed(base.seed, static_cast<std::uint64_t>(sizes[si]), run);
      out[job] = run_protocol(cfg, probes[si]);
    }
  };
  const int n_threads = std::max(1, threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

ScalingFit scaling_exponent(const std::vector<ProtocolTrace>& traces, int k) {
  if (k < 1) throw std::invalid_argument("scaling_exponent: k must be >= 1");
  ScalingFit fit;
  fit.iteration = k;
  std::vector<double> xs, ys;
  std::map<int, std::size_t> excluded_per_size;
  for (const auto& t : traces) {
    if (static_cast<int>(t.iterations.size()) < k) {
      ++fit.runs_excluded;
      ++excluded_per_size[t.config.n_spins];
      continue;
    }
    xs.push_back(std::log(static_cast<double>(t.config.n_spins)));
    ys.push_back(std::log(t.iterations[static_cast<std::size_t>(k - 1)].delta_h));
  }
  for (const auto& [n, count] : excluded_per_size)
    fit.warnings.push_back("N=" + std::to_string(n) + ": " + std::to_string(count) +
                           " run(s) stopped before iteration " + std::to_string(k));
  fit.runs_used = xs.size();

  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 5 || (distinct.back() - distinct.front()) / std::log(10.0) < 1.5 - 1e-12)
    throw std::invalid_argument(
        "scaling_exponent: need >= 5 sizes spanning >= 1.5 decades at iteration " +
        std::to_string(k));

  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - my - fit.slope * (xs[i] - mx);
    sse += r * r;
  }
  fit.stderr_slope = xs.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return fit;
}

double first_iteration_fisher(const ProtocolConfig& cfg, double c) {
  const double r = cfg.h_true / cfg.h_max;
  return c * cfg.beta * cfg.nu * cfg.n_spins / (cfg.h_max * std::sqrt(1.0 - r * r));
}

double recursion_coefficient(const ProtocolConfig& cfg, double c) {
  return c * cfg.beta / std::sqrt(2.0 * cfg.h_true);
}

double predicted_fisher(const ProtocolConfig& cfg, int k, double c) {
  if (k < 1) throw std::invalid_argument("predicted_fisher: k must be >= 1");
  const double nun = static_cast<double>(cfg.nu) * cfg.n_spins;
  const double a = first_iteration_fisher(cfg, c) / nun;
  const double b = recursion_coefficient(cfg, c);
  const double q = std::pow(0.25, k - 1);
  return std::pow(a, q) * std::pow(b, 4.0 / 3.0 * (1.0 - q)) *
         std::pow(nun, 4.0 / 3.0 * (1.0 - 0.25 * q));
}

namespace {

json config_to_json(const ProtocolConfig& c) {
  return json{{"h_true", c.h_true},
              {"h_min", c.h_min},
              {"h_max", c.h_max},
              {"beta", c.beta},
              {"n_spins", c.n_spins},
              {"nu", c.nu},
              {"k_max", c.k_max},
              {"retune_margin", c.retune_margin},
              {"floor_policy", std::string(to_string(c.floor_policy))},
              {"seed", c.seed}};
}

ProtocolConfig config_from_json(const json& j) {
  ProtocolConfig c;
  c.h_true = j.at("h_true").get<double>();
  c.h_min = j.at("h_min").get<double>();
  c.h_max = j.at("h_max").get<double>();
  c.beta = j.at("beta").get<double>();
  c.n_spins = j.at("n_spins").get<int>();
  c.nu = j.at("nu").get<int>();
  c.k_max = j.at("k_max").get<int>();
  c.retune_margin = j.at("retune_margin").get<double>();
  c.floor_policy = parse_floor_policy(j.at("floor_policy").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void write_trace(std::ostream& out, const ProtocolTrace& trace) {
  const json header{{"type", "header"},
                    {"config", config_to_json(trace.config)},
                    {"rng", trace.rng_algorithm},
                    {"terminated_by", std::string(to_string(trace.terminated_by))},
                    {"iterations", trace.iterations.size()}};
  out << header.dump() << '\n';
  for (const auto& it : trace.iterations) {
    const json line{{"type", "iteration"}, {"k", it.k},         {"J", it.coupling},
                    {"outcomes", it.outcomes}, {"h_est", it.h_est}, {"delta_h", it.delta_h},
                    {"F", it.fisher}};
    out << line.dump() << '\n';
  }
}

ProtocolTrace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace: missing header line");
  const json header = json::parse(line);
  if (header.at("type") != "header") throw std::runtime_error("trace: first line is not a header");
  ProtocolTrace trace;
  trace.config = config_from_json(header.at("config"));
  trace.rng_algorithm = header.at("rng").get<std::string>();
  trace.terminated_by = parse_termination(header.at("terminated_by").get<std::string>());
  const auto count = header.at("iterations").get<std::size_t>();
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("trace: truncated");
    const json j = json::parse(line);
    ProtocolIteration it;
    it.k = j.at("k").get<int>();
    it.coupling = j.at("J").get<double>();
    it.outcomes = j.at("outcomes").get<std::vector<int>>();
    it.h_est = j.at("h_est").get<double>();
    it.delta_h = j.at("delta_h").get<double>();
    it.fisher = j.at("F").get<double>();
    trace.iterations.push_back(std::move(it));
  }
  return trace;
}

}  // namespace thermosense

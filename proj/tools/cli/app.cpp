#include "app.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "grid.hpp"
#include "thermosense/exact_oracle.hpp"
#include "validate.hpp"

namespace thermosense::cli {

namespace {

// Writes to a file, or to `fallback` for "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw ConfigError("cannot open '" + path + "' for writing");
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void emit(const RecordTable& t, const CommonOptions& c, std::ostream& out) {
  Sink sink(c.out, out);
  if (c.format == "json") write_json(sink.get(), t);
  else write_csv(sink.get(), t);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermal spin-chain metrology: sensitivities, oracle checks, feedforward runs"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  app.set_config("--config", "", "INI file with one [section] per command; flags win");
  app.add_option("--out", common.out, "Output path ('-' for stdout)");
  app.add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", common.seed, "Base RNG seed");
  app.add_option("--threads", common.threads, "Worker threads")->check(CLI::Range(1, 1024));

  Fig1Options f1;
  auto* c1 = app.add_subcommand("fig1", "Field QFI per spin vs h/J at several temperatures");
  c1->add_option("--beta", f1.beta, "Inverse temperatures (list or start:stop:step)");
  c1->add_option("--n", f1.n, "Spin counts");
  c1->add_option("--j", f1.coupling, "Coupling J");
  c1->add_option("--h-over-j", f1.h_over_j, "Field grid in units of J");

  Fig2Options f2;
  auto* c2 = app.add_subcommand("fig2", "Exact vs low-temperature field QFI per spin");
  c2->add_option("--beta", f2.beta, "Inverse temperatures");
  c2->add_option("--n", f2.n, "Spin counts");
  c2->add_option("--j", f2.coupling, "Coupling J");
  c2->add_option("--h-over-j", f2.h_over_j, "Field grid in units of J");

  Fig3Options f3;
  auto* c3 = app.add_subcommand("fig3", "Coupling QFI and the magnetization estimator vs J/h");
  c3->add_option("--beta", f3.beta, "Inverse temperatures");
  c3->add_option("--n", f3.n, "Spin counts");
  c3->add_option("--field", f3.field, "Field h");
  c3->add_option("--j-over-h", f3.j_over_h, "Coupling grid in units of h");

  Fig4aOptions f4a;
  auto* c4a = app.add_subcommand("fig4a", "log10 field QFI per spin of the XY chain over (h/J, gamma)");
  c4a->add_option("--beta", f4a.beta, "Inverse temperatures");
  c4a->add_option("--n", f4a.n, "Spin counts");
  c4a->add_option("--j", f4a.coupling, "Coupling J");
  c4a->add_option("--h-over-j", f4a.h_over_j, "Field grid in units of J");
  c4a->add_option("--gamma", f4a.gamma, "Anisotropy grid");

  Fig4bOptions f4b;
  auto* c4b = app.add_subcommand("fig4b", "Field QFI vs J_z and J_x^2 estimators (dense, N <= 12)");
  c4b->add_option("--beta", f4b.beta, "Inverse temperatures");
  c4b->add_option("--n", f4b.n, "Spin counts");
  c4b->add_option("--j", f4b.coupling, "Coupling J");
  c4b->add_option("--gamma", f4b.gamma, "Anisotropy");
  c4b->add_option("--h-over-j", f4b.h_over_j, "Field grid in units of J");

  SweepOptions sw;
  auto* cs = app.add_subcommand("sweep", "Thermodynamic quantities over a grid");
  cs->add_option("--model", sw.model, "xx or xy");
  cs->add_option("--beta", sw.beta, "Inverse temperatures");
  cs->add_option("--n", sw.n, "Spin counts");
  cs->add_option("--j", sw.coupling, "Coupling J");
  cs->add_option("--h-over-j", sw.h_over_j, "Field grid in units of J");
  cs->add_option("--gamma", sw.gamma, "Anisotropy grid (xy only)");
  cs->add_option("--quantities", sw.quantities, "Comma-separated quantities");

  ProtocolOptions pr;
  auto* cp = app.add_subcommand("protocol", "Feedforward magnetometry ensemble");
  cp->add_option("--h-true", pr.h_true, "Hidden field");
  cp->add_option("--h-min", pr.h_min, "Prior lower bound");
  cp->add_option("--h-max", pr.h_max, "Prior upper bound (first coupling)");
  cp->add_option("--beta", pr.beta, "Inverse temperature");
  cp->add_option("--n", pr.n, "Spin counts");
  cp->add_option("--nu", pr.nu, "Measurements per iteration");
  cp->add_option("--kmax", pr.k_max, "Maximum iterations");
  cp->add_option("--margin", pr.margin, "Retune margin m in J = h_est + m dh");
  cp->add_option("--runs", pr.runs, "Seeds per spin count");
  cp->add_option("--floor", pr.floor, "stop_at_floor or run_to_kmax")
      ->check(CLI::IsMember({"stop_at_floor", "run_to_kmax"}));
  cp->add_option("--summary", pr.summary, "Write a JSON scaling summary here");

  ValidateOptions va;
  auto* cv = app.add_subcommand("validate", "Oracle and identity regression suite");
  cv->add_option("--tolerance-scale", va.tolerance_scale, "Multiply every tolerance");
  cv->add_flag("--minimal", va.minimal, "Single N=4 spec and a small fit grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    common.command = sub->get_name();
    if (sub == c1) emit(fig1(f1, common), common, out);
    else if (sub == c2) emit(fig2(f2, common), common, out);
    else if (sub == c3) emit(fig3(f3, common), common, out);
    else if (sub == c4a) emit(fig4a(f4a, common), common, out);
    else if (sub == c4b) emit(fig4b(f4b, common), common, out);
    else if (sub == cs) emit(sweep(sw, common), common, out);
    else if (sub == cp) {
      Sink traces(common.out, out);
      const ProtocolSummary s = protocol(pr, common, traces.get());
      if (!pr.summary.empty()) {
        Sink summary(pr.summary, out);
        write_summary_json(summary.get(), s, pr, common);
      } else {
        write_summary_text(err, s);
      }
    } else if (sub == cv) {
      const ValidationReport rep = validate(va, common);
      Sink sink(common.out, out);
      if (common.format == "json") write_report_json(sink.get(), rep, common, va);
      else write_report_csv(sink.get(), rep, common, va);
      if (!rep.all_passed()) {
        std::size_t failed = 0;
        for (const auto& c : rep.checks) failed += c.pass ? 0 : 1;
        err << "validate: " << failed << " of " << rep.checks.size() << " checks failed\n";
        return 1;
      }
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const oracle::ResourceError& e) {
    err << "resource error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace thermosense::cli

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "thermosense/adaptive_protocol.hpp"
#include "thermosense/records.hpp"

namespace thermosense::cli {

struct CommonOptions {
  std::string command;
  std::string config_path;
  std::string out = "-";
  std::string format = "csv";
  std::uint64_t seed = 0;
  int threads = 1;
};

// Grids are kept as the text the user gave ("a,b" or "start:stop:step") so
// they can be echoed verbatim into output headers.

struct Fig1Options {
  std::string beta = "20,100,500";
  std::string n = "100000";
  double coupling = 1.0;
  std::string h_over_j = "0:2:0.02";
};

struct Fig2Options {
  std::string beta = "100";
  std::string n = "10000";
  double coupling = 1.0;
  std::string h_over_j = "0:0.99:0.01";
};

struct Fig3Options {
  std::string beta = "100,2";
  std::string n = "1000";
  double field = 1.0;
  std::string j_over_h = "0.5:1.5:0.01";
};

struct Fig4aOptions {
  std::string beta = "100";
  std::string n = "1000";
  double coupling = 1.0;
  std::string h_over_j = "0:2:0.02";
  std::string gamma = "0:1:0.1";
};

struct Fig4bOptions {
  std::string beta = "100,2";
  std::string n = "10";
  double coupling = 1.0;
  std::string gamma = "1";
  std::string h_over_j = "0.5:1.5:0.05";
};

struct SweepOptions {
  std::string model = "xx";
  std::string beta = "100";
  std::string n = "1000";
  double coupling = 1.0;
  std::string h_over_j = "0:2:0.1";
  std::string gamma = "0";
  std::string quantities = "log_z,free_energy,magnetization_z,susceptibility_h,qfi_h,qfi_j";
};

struct ProtocolOptions {
  double h_true = 0.8;
  double h_min = 0.5;
  double h_max = 1.0;
  double beta = 1000.0;
  std::string n = "1000,3000,10000,30000,100000";
  int nu = 50;
  int k_max = 4;
  double margin = 3.0;
  int runs = 100;
  std::string floor = "stop_at_floor";
  std::string summary;  // optional JSON summary path
};

struct ValidateOptions {
  double tolerance_scale = 1.0;
  bool minimal = false;
};

RecordTable fig1(const Fig1Options& o, const CommonOptions& common);
RecordTable fig2(const Fig2Options& o, const CommonOptions& common);
RecordTable fig3(const Fig3Options& o, const CommonOptions& common);
RecordTable fig4a(const Fig4aOptions& o, const CommonOptions& common);
RecordTable fig4b(const Fig4bOptions& o, const CommonOptions& common);
RecordTable sweep(const SweepOptions& o, const CommonOptions& common);

struct ProtocolSummary {
  std::vector<ScalingFit> fits;  // one per iteration depth that could be fitted
  struct Median {
    int n_spins = 0;
    int k = 0;
    double fisher = 0.0;
    std::size_t runs = 0;
  };
  std::vector<Median> medians;
  std::vector<std::pair<std::string, std::size_t>> terminations;
};

/// Runs the ensemble, writes every trace (ordered by N, then run) to
/// `traces` and returns the scaling summary.
ProtocolSummary protocol(const ProtocolOptions& o, const CommonOptions& common,
                         std::ostream& traces);
void write_summary_json(std::ostream& out, const ProtocolSummary& s, const ProtocolOptions& o,
                        const CommonOptions& common);
void write_summary_text(std::ostream& out, const ProtocolSummary& s);

}  // namespace thermosense::cli

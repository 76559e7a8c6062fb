#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "thermosense/chain_model.hpp"
#include "thermosense/thermo_metrology.hpp"

namespace thermosense {

/// One long-format row: a named quantity evaluated at a chain spec.
struct SweepRecord {
  Model model = Model::XX;
  int n_spins = 0;
  double coupling = 0.0;
  double field = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  std::string quantity;
  double value = 0.0;
  Provenance provenance = Provenance::ExactFreeFermion;
  std::string estimator;  // only written with the "estimator" column
  bool valid = true;      // only written with the "valid" column

  static SweepRecord from(const ChainSpec& spec, std::string quantity, double value,
                          Provenance provenance);
};

/// Optional columns appended after the fixed nine.
enum class ExtraColumn { Estimator, Valid };

struct RecordTable {
  /// Resolved configuration echoed into the output (key, value).
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<ExtraColumn> extras;
  std::vector<SweepRecord> rows;

  std::vector<std::string> columns() const;
  /// Lexicographic in (model, N, J, h, gamma, beta, quantity, estimator).
  void sort_rows();
};

/// 17 significant digits, scientific.
std::string format_csv_double(double v);

/// `# key = value` comment lines, one header row, then the rows.
void write_csv(std::ostream& out, const RecordTable& table);
RecordTable read_csv(std::istream& in);

/// {"config": {...}, "columns": [...], "records": [{...}, ...]} with
/// shortest round-trip doubles; non-finite values are written as null.
void write_json(std::ostream& out, const RecordTable& table);
RecordTable read_json(std::istream& in);

}  // namespace thermosense

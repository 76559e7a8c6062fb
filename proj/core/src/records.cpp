#include "thermosense/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

namespace thermosense {

using nlohmann::json;

namespace {

constexpr const char* kBaseColumns[] = {"model", "N",        "J",     "h",         "gamma",
                                        "beta",  "quantity", "value", "provenance"};

std::string_view column_name(ExtraColumn c) {
  return c == ExtraColumn::Estimator ? "estimator" : "valid";
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::runtime_error("records: bad number '" + std::string(text) + "'");
  return v;
}

int parse_int(std::string_view text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::runtime_error("records: bad integer '" + std::string(text) + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

SweepRecord SweepRecord::from(const ChainSpec& spec, std::string quantity, double value,
                              Provenance provenance) {
  SweepRecord r;
  r.model = spec.model;
  r.n_spins = spec.n_spins;
  r.coupling = spec.coupling;
  r.field = spec.field;
  r.gamma = spec.gamma;
  r.beta = spec.beta;
  r.quantity = std::move(quantity);
  r.value = value;
  r.provenance = provenance;
  return r;
}

std::vector<std::string> RecordTable::columns() const {
  std::vector<std::string> cols(std::begin(kBaseColumns), std::end(kBaseColumns));
  for (ExtraColumn c : extras) cols.emplace_back(column_name(c));
  return cols;
}

void RecordTable::sort_rows() {
  auto key = [](const SweepRecord& r) {
    return std::make_tuple(to_string(r.model), r.n_spins, r.coupling, r.field, r.gamma, r.beta,
                           std::string_view(r.quantity), std::string_view(r.estimator));
  };
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const SweepRecord& a, const SweepRecord& b) { return key(a) < key(b); });
}

std::string format_csv_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const RecordTable& table) {
  for (const auto& [k, v] : table.config) out << "# " << k << " = " << v << '\n';
  const auto cols = table.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : table.rows) {
    out << to_string(r.model) << ',' << r.n_spins << ',' << format_csv_double(r.coupling) << ','
        << format_csv_double(r.field) << ',' << format_csv_double(r.gamma) << ','
        << format_csv_double(r.beta) << ',' << r.quantity << ',' << format_csv_double(r.value)
        << ',' << to_string(r.provenance);
    for (ExtraColumn c : table.extras)
      out << ',' << (c == ExtraColumn::Estimator ? r.estimator : (r.valid ? "true" : "false"));
    out << '\n';
  }
}

RecordTable read_csv(std::istream& in) {
  RecordTable table;
  std::string line;
  bool header_seen = false;
  std::vector<std::string> cols;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      table.config.emplace_back(trim(line.substr(1, eq - 1)), trim(line.substr(eq + 1)));
      continue;
    }
    if (!header_seen) {
      cols = split(line, ',');
      const RecordTable fixed;
      const std::vector<std::string> base = fixed.columns();
      if (cols.size() < base.size() || !std::equal(base.begin(), base.end(), cols.begin()))
        throw std::runtime_error("records: unexpected header '" + line + "'");
      for (std::size_t i = base.size(); i < cols.size(); ++i) {
        if (cols[i] == "estimator") table.extras.push_back(ExtraColumn::Estimator);
        else if (cols[i] == "valid") table.extras.push_back(ExtraColumn::Valid);
        else throw std::runtime_error("records: unknown column '" + cols[i] + "'");
      }
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != cols.size()) throw std::runtime_error("records: ragged row");
    SweepRecord r;
    r.model = parse_model(f[0]);
    r.n_spins = parse_int(f[1]);
    r.coupling = parse_double(f[2]);
    r.field = parse_double(f[3]);
    r.gamma = parse_double(f[4]);
    r.beta = parse_double(f[5]);
    r.quantity = f[6];
    r.value = parse_double(f[7]);
    r.provenance = parse_provenance(f[8]);
    for (std::size_t i = 0; i < table.extras.size(); ++i) {
      if (table.extras[i] == ExtraColumn::Estimator) r.estimator = f[9 + i];
      else r.valid = f[9 + i] == "true";
    }
    table.rows.push_back(std::move(r));
  }
  if (!header_seen) throw std::runtime_error("records: missing header row");
  return table;
}

void write_json(std::ostream& out, const RecordTable& table) {
  json config = json::object();
  for (const auto& [k, v] : table.config) config[k] = v;
  json records = json::array();
  for (const auto& r : table.rows) {
    json j{{"model", std::string(to_string(r.model))},
           {"N", r.n_spins},
           {"J", number_or_null(r.coupling)},
           {"h", number_or_null(r.field)},
           {"gamma", number_or_null(r.gamma)},
           {"beta", number_or_null(r.beta)},
           {"quantity", r.quantity},
           {"value", number_or_null(r.value)},
           {"provenance", std::string(to_string(r.provenance))}};
    for (ExtraColumn c : table.extras) {
      if (c == ExtraColumn::Estimator) j["estimator"] = r.estimator;
      else j["valid"] = r.valid;
    }
    records.push_back(std::move(j));
  }
  // keep the config in insertion order for readers that care
  json keys = json::array();
  for (const auto& kv : table.config) keys.push_back(kv.first);
  const json doc{{"config", config}, {"config_order", keys}, {"columns", table.columns()},
                 {"records", records}};
  out << doc.dump(1) << '\n';
}

RecordTable read_json(std::istream& in) {
  const json doc = json::parse(in);
  RecordTable table;
  const json& config = doc.at("config");
  if (doc.contains("config_order")) {
    for (const auto& k : doc.at("config_order"))
      table.config.emplace_back(k.get<std::string>(), config.at(k.get<std::string>()).get<std::string>());
  } else {
    for (auto it = config.begin(); it != config.end(); ++it)
      table.config.emplace_back(it.key(), it.value().get<std::string>());
  }
  const auto cols = doc.at("columns").get<std::vector<std::string>>();
  for (std::size_t i = 9; i < cols.size(); ++i)
    table.extras.push_back(cols[i] == "estimator" ? ExtraColumn::Estimator : ExtraColumn::Valid);
  for (const auto& j : doc.at("records")) {
    SweepRecord r;
    r.model = parse_model(j.at("model").get<std::string>());
    r.n_spins = j.at("N").get<int>();
    r.coupling = number_from(j.at("J"));
    r.field = number_from(j.at("h"));
    r.gamma = number_from(j.at("gamma"));
    r.beta = number_from(j.at("beta"));
    r.quantity = j.at("quantity").get<std::string>();
    r.value = number_from(j.at("value"));
    r.provenance = parse_provenance(j.at("provenance").get<std::string>());
    if (j.contains("estimator")) r.estimator = j.at("estimator").get<std::string>();
    if (j.contains("valid")) r.valid = j.at("valid").get<bool>();
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace thermosense

#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "thermosense/records.hpp"

using namespace thermosense;

namespace {

RecordTable sample_table() {
  RecordTable t;
  t.config = {{"command", "sweep"}, {"beta", "20,100"}, {"seed", "7"}};
  t.extras = {ExtraColumn::Estimator, ExtraColumn::Valid};
  const ChainSpec a = ChainSpec::xx(100, 1.0, 0.1 + 0.2, 20.0);
  const ChainSpec b = ChainSpec::xy(10, 1.0, 0.95, 0.5, 100.0);
  SweepRecord r1 = SweepRecord::from(a, "qfi_h_per_spin", 1.0 / 3.0, Provenance::ExactFreeFermion);
  r1.estimator = "Jz->h";
  SweepRecord r2 = SweepRecord::from(b, "sens_per_spin", 6.02214076e23, Provenance::Oracle);
  r2.estimator = "JxSquared->h";
  r2.valid = false;
  SweepRecord r3 = SweepRecord::from(a, "qfi_h_app_per_spin", 5e-324, Provenance::LowTempApprox);
  t.rows = {r2, r1, r3};
  return t;
}

void expect_same(const RecordTable& a, const RecordTable& b) {
  EXPECT_EQ(a.config, b.config);
  EXPECT_EQ(a.extras, b.extras);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const SweepRecord &x = a.rows[i], &y = b.rows[i];
    EXPECT_EQ(x.model, y.model);
    EXPECT_EQ(x.n_spins, y.n_spins);
    EXPECT_EQ(x.coupling, y.coupling);
    EXPECT_EQ(x.field, y.field);
    EXPECT_EQ(x.gamma, y.gamma);
    EXPECT_EQ(x.beta, y.beta);
    EXPECT_EQ(x.quantity, y.quantity);
    if (std::isnan(x.value)) EXPECT_TRUE(std::isnan(y.value));
    else EXPECT_EQ(x.value, y.value);
    EXPECT_EQ(x.provenance, y.provenance);
    EXPECT_EQ(x.estimator, y.estimator);
    EXPECT_EQ(x.valid, y.valid);
  }
}

}  // namespace

TEST(Records, Columns) {
  RecordTable t;
  const std::vector<std::string> base{"model", "N", "J", "h", "gamma", "beta", "quantity", "value",
                                      "provenance"};
  EXPECT_EQ(t.columns(), base);
  t.extras = {ExtraColumn::Valid};
  EXPECT_EQ(t.columns().back(), "valid");
  EXPECT_EQ(t.columns().size(), 10u);
}

TEST(Records, CsvRoundTripIsBitExact) {
  const RecordTable t = sample_table();
  std::ostringstream out;
  write_csv(out, t);
  std::istringstream in(out.str());
  const RecordTable back = read_csv(in);
  expect_same(t, back);
  std::ostringstream again;
  write_csv(again, back);
  EXPECT_EQ(out.str(), again.str());
}

TEST(Records, JsonRoundTripIsBitExact) {
  const RecordTable t = sample_table();
  std::ostringstream out;
  write_json(out, t);
  std::istringstream in(out.str());
  const RecordTable back = read_json(in);
  expect_same(t, back);
  std::ostringstream again;
  write_json(again, back);
  EXPECT_EQ(out.str(), again.str());
}

TEST(Records, CsvLayout) {
  std::ostringstream out;
  write_csv(out, sample_table());
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("# command = sweep\n", 0), 0u);
  EXPECT_NE(s.find("\nmodel,N,J,h,gamma,beta,quantity,value,provenance,estimator,valid\n"),
            std::string::npos);
}

TEST(Records, NonFiniteValues) {
  RecordTable t;
  t.rows.push_back(SweepRecord::from(ChainSpec::xx(4, 1, 0, 1), "x",
                                     std::numeric_limits<double>::quiet_NaN(), Provenance::Oracle));
  t.rows.push_back(SweepRecord::from(ChainSpec::xx(4, 1, 0, 1), "y",
                                     std::numeric_limits<double>::infinity(), Provenance::Oracle));
  std::ostringstream csv, json;
  write_csv(csv, t);
  write_json(json, t);
  std::istringstream ci(csv.str());
  expect_same(t, read_csv(ci));
  EXPECT_NE(json.str().find("null"), std::string::npos);
  std::istringstream ji(json.str());
  const RecordTable back = read_json(ji);
  EXPECT_TRUE(std::isnan(back.rows[0].value));
}

TEST(Records, FormatDouble) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e308, 0.0, 123456789.123456789}) {
    const std::string s = format_csv_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
}

TEST(Records, SortOrder) {
  RecordTable t = sample_table();
  t.sort_rows();
  EXPECT_EQ(t.rows[0].model, Model::XX);
  EXPECT_EQ(t.rows[0].quantity, "qfi_h_app_per_spin");
  EXPECT_EQ(t.rows[1].quantity, "qfi_h_per_spin");
  EXPECT_EQ(t.rows[2].model, Model::XY);
}

TEST(Records, RejectsMalformedInput) {
  std::istringstream bad_header("# a = b\nmodel,N\nxx,4\n");
  EXPECT_ANY_THROW(read_csv(bad_header));
  std::istringstream bad_json("{\"records\": 3}");
  EXPECT_ANY_THROW(read_json(bad_json));
}

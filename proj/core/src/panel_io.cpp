#include "credkit/panel_io.hpp"

#include <nlohmann/json.hpp>

#include "credkit/csv.hpp"
#include "credkit/errors.hpp"

namespace credkit::panel {

namespace {

std::string feature_name(std::size_t f) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "f%03zu", f + 1);
  return buf;
}

}  // namespace

Panel load_panel(const std::string& path) {
  csv::Reader reader(path);

  const std::size_t c_id = reader.column("consumer_id");
  const std::size_t c_quarter = reader.column("quarter");
  const std::size_t c_dstate = reader.column("d_state");
  const std::size_t c_score = reader.column("credit_score");
  const std::size_t c_age = reader.column("age");
  const std::size_t c_income = reader.column("income_est");
  const std::size_t c_zip = reader.column("zip");
  const std::size_t c_race = reader.column("race");
  const std::size_t c_pd = reader.column("true_pd");
  std::array<std::size_t, kNumFeatures> c_feat{};
  for (std::size_t f = 0; f < kNumFeatures; ++f) c_feat[f] = reader.column(feature_name(f));

  Panel panel;
  panel.records.reserve(reader.rows.size());
  for (std::size_t i = 0; i < reader.rows.size(); ++i) {
    const auto& row = reader.rows[i];
    const std::size_t line = reader.row_lines[i];
    if (row.size() != reader.header.size()) {
      fail(Errc::parse_error, "line " + std::to_string(line) + ": expected " +
                                  std::to_string(reader.header.size()) + " fields, got " +
                                  std::to_string(row.size()));
    }
    ConsumerQuarter r;
    r.source_line = static_cast<std::uint32_t>(line);
    r.consumer_id = row[c_id];
    r.quarter = static_cast<std::int32_t>(csv::parse_int(row[c_quarter], line, "quarter"));
    r.d_state = static_cast<std::uint8_t>(csv::parse_int(row[c_dstate], line, "d_state"));
    r.credit_score = row[c_score].empty()
                         ? std::int16_t{-1}
                         : static_cast<std::int16_t>(csv::parse_int(row[c_score], line, "credit_score"));
    r.age = static_cast<std::int16_t>(csv::parse_int(row[c_age], line, "age"));
    r.income_est = static_cast<float>(csv::parse_double(row[c_income], line, "income_est"));
    r.zip = row[c_zip];
    if (!row[c_race].empty()) {
      auto race = parse_race(row[c_race]);
      if (!race) fail(Errc::parse_error, "line " + std::to_string(line) + ": unknown race '" + row[c_race] + "'");
      r.race = race;
    }
    r.true_pd = row[c_pd].empty() ? -1.0f : static_cast<float>(csv::parse_double(row[c_pd], line, "true_pd"));
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      r.features[f] = static_cast<float>(csv::parse_double(row[c_feat[f]], line, feature_name(f)));
    }
    panel.records.push_back(std::move(r));
  }
  panel.canonicalize();
  return panel;
}

void save_panel(const Panel& panel, const std::string& path) {
  csv::Writer w(path);
  std::string header = "consumer_id,quarter,d_state,credit_score,age,income_est,zip,race,true_pd";
  for (std::size_t f = 0; f < kNumFeatures; ++f) header += "," + feature_name(f);
  w.write_line(header);

  std::string line;
  for (const auto& r : panel.records) {
    line.clear();
    line += r.consumer_id;
    line += ',';
    line += std::to_string(r.quarter);
    line += ',';
    line += std::to_string(static_cast<int>(r.d_state));
    line += ',';
    if (r.has_score()) line += std::to_string(r.credit_score);
    line += ',';
    line += std::to_string(r.age);
    line += ',';
    line += csv::format_double(r.income_est);
    line += ',';
    line += r.zip;
    line += ',';
    if (r.race) line += race_token(*r.race);
    line += ',';
    if (r.has_true_pd()) line += csv::format_double(r.true_pd);
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      line += ',';
      line += csv::format_double(r.features[f]);
    }
    w.write_line(line);
  }
  w.close();
}

void save_validation_report(const ValidationReport& report, const std::string& path) {
  csv::Writer w(path);
  for (const auto& v : report.violations) {
    nlohmann::json obj = {
        {"row", v.row}, {"column", v.column}, {"code", v.code}, {"message", v.message}};
    w.write_line(obj.dump());
  }
  w.close();
}

}  // namespace credkit::panel

#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbloss/common.hpp"
#include "rbloss/risk.hpp"
#include "rbloss/spec_string.hpp"
#include "rbloss/verify.hpp"

namespace rbloss {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_dataset_csv(std::ostream& os, const Dataset& data) {
  check_dataset(data);
  for (int j = 0; j < data.d; ++j) os << "x" << (j + 1) << ",";
  os << "y\n";
  for (int i = 0; i < data.n; ++i) {
    for (int j = 0; j < data.d; ++j) os << format_g17(data.xij(i, j)) << ",";
    os << format_g17(data.y[i]) << "\n";
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_csv_number(const std::string& s) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) fail(errc::parse, "trailing characters in number: " + s);
    return v;
  } catch (const error&) {
    throw;
  } catch (const std::exception&) {
    fail(errc::parse, "not a number: " + s);
  }
}

}  // namespace detail

inline Dataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) fail(errc::parse, "empty dataset file");
  const auto header = detail::split_csv_line(line);
  if (header.empty() || header.back() != "y")
    fail(errc::parse, "dataset header must end with column y");
  Dataset data;
  data.d = static_cast<int>(header.size()) - 1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (static_cast<int>(cells.size()) != data.d + 1)
      fail(errc::parse, "row width does not match header");
    for (int j = 0; j < data.d; ++j) data.x.push_back(detail::parse_csv_number(cells[j]));
    data.y.push_back(detail::parse_csv_number(cells.back()));
    ++data.n;
  }
  check_dataset(data);
  return data;
}

inline Dataset read_dataset_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(errc::io, "cannot open " + path);
  return read_dataset_csv(is);
}

inline void write_reports_csv(std::ostream& os, const std::vector<PropertyReport>& reports) {
  os << "subject,property,expected,verdict,witness_r_or_t,witness_value,grid_id\n";
  for (const PropertyReport& r : reports) {
    std::string grid = r.grid_id;
    if (!r.note.empty()) grid += ";" + r.note;
    for (char& c : grid)
      if (c == ',') c = ';';
    os << r.subject << "," << property_name(r.property) << ","
       << (r.expected ? (*r.expected ? "holds" : "fails") : "") << "," << verdict_name(r.verdict)
       << "," << format_g17(r.witness_x) << "," << format_g17(r.witness_value) << "," << grid
       << "\n";
  }
}

inline nlohmann::json report_to_json(const PropertyReport& r) {
  nlohmann::json j;
  j["subject"] = r.subject;
  j["property"] = property_name(r.property);
  if (r.expected) j["expected"] = *r.expected ? "holds" : "fails";
  j["verdict"] = verdict_name(r.verdict);
  if (std::isfinite(r.witness_x)) j["witness_r_or_t"] = r.witness_x;
  if (std::isfinite(r.witness_value)) j["witness_value"] = r.witness_value;
  if (std::isfinite(r.estimate)) j["estimate"] = r.estimate;
  j["grid_id"] = r.grid_id;
  if (!r.note.empty()) j["note"] = r.note;
  if (r.explained) j["explained"] = true;
  return j;
}

inline nlohmann::json reports_to_json(const std::vector<PropertyReport>& reports) {
  nlohmann::json j;
  j["spec_version"] = "1";
  j["reports"] = nlohmann::json::array();
  for (const auto& r : reports) j["reports"].push_back(report_to_json(r));
  const VerifySummary s = summarize(reports);
  j["summary"] = {{"cells", s.cells},
                  {"matches", s.matches},
                  {"explained_mismatches", s.explained_mismatches},
                  {"unexplained_mismatches", s.unexplained_mismatches}};
  return j;
}

inline nlohmann::json model_to_json(const LinearModel& model, const std::string& loss_spec = "") {
  nlohmann::json j;
  j["spec_version"] = "1";
  j["w"] = model.w;
  j["b0"] = model.b0;
  if (!loss_spec.empty()) j["loss"] = loss_spec;
  return j;
}

inline LinearModel model_from_json(const nlohmann::json& j) {
  LinearModel m;
  if (!j.contains("w") || !j.contains("b0")) fail(errc::parse, "model json needs w and b0");
  m.w = j["w"].get<std::vector<double>>();
  m.b0 = j["b0"].get<double>();
  return m;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(errc::io, "cannot open " + path);
  try {
    return nlohmann::json::parse(is);
  } catch (const std::exception& e) {
    fail(errc::parse, std::string("bad json: ") + e.what());
  }
}

}  // namespace rbloss

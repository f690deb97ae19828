#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "json.hpp"

namespace aclab {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  // column by header name; throws config-error when absent
  Eigen::VectorXd column(const std::string& name) const;
};

// Numbers are written with %.17g so a read-back is exact.
std::string format_double(double v);
std::string to_csv(const CsvTable& t);
void write_csv(const std::string& path, const CsvTable& t);
// Throws config-error with the offending line number on malformed input.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

// Creates the directory and its parents.
void ensure_dir(const std::string& path);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

nlohmann::json to_json(const Eigen::VectorXd& v);

}  // namespace aclab

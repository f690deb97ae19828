#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace aclab {

// Subset of TOML: [tables], key = value with numbers, booleans, basic strings and flat arrays, # comments.
using ConfigValue = std::variant<double, bool, std::string, std::vector<double>, std::vector<std::string>>;

class Config {
 public:
  using Table = std::map<std::string, ConfigValue>;

  // Keys before the first header go to the table "".
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has_table(const std::string& table) const { return tables_.count(table) > 0; }
  const Table* table(const std::string& name) const;
  std::vector<std::string> table_names() const;

  // Typed lookups; a present key of the wrong type is a config error.
  std::optional<double> number(const std::string& table, const std::string& key) const;
  std::optional<bool> boolean(const std::string& table, const std::string& key) const;
  std::optional<std::string> string(const std::string& table, const std::string& key) const;
  std::optional<std::vector<double>> numbers(const std::string& table, const std::string& key) const;
  std::optional<std::vector<std::string>> strings(const std::string& table, const std::string& key) const;

  void set(const std::string& table, const std::string& key, ConfigValue v) { tables_[table][key] = std::move(v); }

 private:
  const ConfigValue* find(const std::string& table, const std::string& key) const;
  std::map<std::string, Table> tables_;
};

}  // namespace aclab

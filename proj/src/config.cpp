#include "aclab/config.hpp"

#include <cctype>
#include <sstream>

#include "aclab/error.hpp"
#include "aclab/io.hpp"

namespace aclab {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Drops a # comment that is not inside a string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

[[noreturn]] void bad(int line, const std::string& what) {
  fail(ErrorKind::ConfigError, "config line " + std::to_string(line) + ": " + what);
}

bool valid_name(const std::string& k) {
  if (k.empty()) return false;
  for (char ch : k)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) return false;
  return true;
}

std::string parse_string(const std::string& s, int line) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') bad(line, "unterminated string " + s);
  std::string out;
  for (size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) {
      const char e = s[++i];
      out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
    } else if (s[i] == '"') {
      bad(line, "stray quote in " + s);
    } else {
      out += s[i];
    }
  }
  return out;
}

double parse_number(const std::string& s, int line) {
  std::string t;
  for (char ch : s)
    if (ch != '_') t += ch;
  try {
    size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    bad(line, "bad value '" + s + "'");
  }
}

std::vector<std::string> split_array(const std::string& body, int line) {
  std::vector<std::string> items;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < body.size(); ++i) {
    const char ch = body[i];
    if (ch == '"' && (i == 0 || body[i - 1] != '\\')) quoted = !quoted;
    if (ch == ',' && !quoted) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) bad(line, "unterminated string in array");
  if (!trim(cur).empty()) items.push_back(trim(cur));
  for (const auto& it : items)
    if (it.empty()) bad(line, "empty array element");
  return items;
}

ConfigValue parse_value(const std::string& s, int line) {
  if (s.empty()) bad(line, "missing value");
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '"') return parse_string(s, line);
  if (s.front() == '[') {
    if (s.back() != ']') bad(line, "unterminated array");
    const auto items = split_array(s.substr(1, s.size() - 2), line);
    if (!items.empty() && items.front().front() == '"') {
      std::vector<std::string> out;
      for (const auto& it : items) out.push_back(parse_string(it, line));
      return out;
    }
    std::vector<double> out;
    for (const auto& it : items) out.push_back(parse_number(it, line));
    return out;
  }
  return parse_number(s, line);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string raw, table;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) bad(line, "bad table header");
      table = trim(s.substr(1, s.size() - 2));
      if (!valid_name(table)) bad(line, "bad table name '" + table + "'");
      c.tables_[table];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) bad(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (!valid_name(key)) bad(line, "bad key '" + key + "'");
    if (c.tables_[table].count(key)) bad(line, "duplicate key '" + key + "'");
    c.tables_[table][key] = parse_value(trim(s.substr(eq + 1)), line);
  }
  return c;
}

Config Config::load(const std::string& path) { return parse(read_text(path)); }

const Config::Table* Config::table(const std::string& name) const {
  const auto it = tables_.find(name);
  return it == tables_.end() ? nullptr : &it->second;
}

std::vector<std::string> Config::table_names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : tables_) out.push_back(k);
  return out;
}

const ConfigValue* Config::find(const std::string& table, const std::string& key) const {
  const Table* t = this->table(table);
  if (!t) return nullptr;
  const auto it = t->find(key);
  return it == t->end() ? nullptr : &it->second;
}

namespace {

template <class T>
std::optional<T> typed(const ConfigValue* v, const std::string& table, const std::string& key, const char* what) {
  if (!v) return std::nullopt;
  if (const T* p = std::get_if<T>(v)) return *p;
  fail(ErrorKind::ConfigError, "[" + table + "] " + key + " must be " + what);
}

}  // namespace

std::optional<double> Config::number(const std::string& t, const std::string& k) const {
  return typed<double>(find(t, k), t, k, "a number");
}
std::optional<bool> Config::boolean(const std::string& t, const std::string& k) const {
  return typed<bool>(find(t, k), t, k, "a boolean");
}
std::optional<std::string> Config::string(const std::string& t, const std::string& k) const {
  return typed<std::string>(find(t, k), t, k, "a string");
}
std::optional<std::vector<double>> Config::numbers(const std::string& t, const std::string& k) const {
  const ConfigValue* v = find(t, k);
  if (v && std::holds_alternative<double>(*v)) return std::vector<double>{std::get<double>(*v)};
  return typed<std::vector<double>>(v, t, k, "a number array");
}
std::optional<std::vector<std::string>> Config::strings(const std::string& t, const std::string& k) const {
  const ConfigValue* v = find(t, k);
  if (v && std::holds_alternative<std::string>(*v)) return std::vector<std::string>{std::get<std::string>(*v)};
  return typed<std::vector<std::string>>(v, t, k, "a string array");
}

}  // namespace aclab

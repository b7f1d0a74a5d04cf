#include "dpforge/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dpforge/errors.hpp"

namespace dpforge {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_bare_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

// Strips a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return s.substr(0, i);
    }
  }
  return s;
}

TomlDocument::Value parse_string(std::string_view v, int line) {
  const char quote = v.front();
  if (v.size() < 2 || v.back() != quote) fail(line, "unterminated string");
  const auto body = v.substr(1, v.size() - 2);
  if (quote == '\'') return std::string(body);
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '\\') {
      if (body[i] == '"') fail(line, "unescaped quote in string");
      out.push_back(body[i]);
      continue;
    }
    if (++i >= body.size()) fail(line, "dangling escape");
    switch (body[i]) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      default: fail(line, std::string("unsupported escape \\") + body[i]);
    }
  }
  return out;
}

TomlDocument::Value parse_value(std::string_view v, int line) {
  if (v.empty()) fail(line, "missing value");
  if (v.front() == '"' || v.front() == '\'') return parse_string(v, line);
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '[' || v.front() == '{') fail(line, "arrays and inline tables are not supported");

  std::string digits;
  for (char c : v) {
    if (c != '_') digits.push_back(c);
  }
  const bool is_float = digits.find_first_of(".eE") != std::string::npos;
  const char* first = digits.data() + (digits.front() == '+' ? 1 : 0);
  const char* last = digits.data() + digits.size();
  if (is_float) {
    double d = 0.0;
    auto [p, ec] = std::from_chars(first, last, d);
    if (ec != std::errc() || p != last) fail(line, "invalid number '" + std::string(v) + "'");
    return d;
  }
  std::int64_t i = 0;
  auto [p, ec] = std::from_chars(first, last, i);
  if (ec != std::errc() || p != last) fail(line, "invalid value '" + std::string(v) + "'");
  return i;
}

}  // namespace

TomlDocument TomlDocument::parse(std::string_view text) {
  TomlDocument doc;
  Table* current = &doc.tables_[""];
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    ++line_no;
    const auto line = trim(strip_comment(text.substr(pos, end - pos)));
    pos = end + 1;
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.starts_with("[[")) fail(line_no, "malformed table header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!is_bare_key(name)) fail(line_no, "unsupported table name '" + std::string(name) + "'");
      auto [it, inserted] = doc.tables_.try_emplace(std::string(name));
      if (!inserted && !it->second.empty()) fail(line_no, "duplicate table [" + std::string(name) + "]");
      current = &it->second;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (!is_bare_key(key)) fail(line_no, "unsupported key '" + std::string(key) + "'");
    auto value = parse_value(trim(line.substr(eq + 1)), line_no);
    if (!current->emplace(std::string(key), std::move(value)).second) {
      fail(line_no, "duplicate key '" + std::string(key) + "'");
    }
  }
  return doc;
}

TomlDocument TomlDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const TomlDocument::Table* TomlDocument::table(std::string_view name) const {
  auto it = tables_.find(name);
  return it == tables_.end() ? nullptr : &it->second;
}

std::vector<std::string> TomlDocument::table_names() const {
  std::vector<std::string> names;
  for (const auto& [name, t] : tables_) names.push_back(name);
  return names;
}

}  // namespace dpforge

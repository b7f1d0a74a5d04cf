#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dpforge {

// The subset of TOML used by generation configs: [table] headers, bare keys,
// and scalar values (strings, integers, floats, booleans). Arrays, inline
// tables and dotted keys are rejected with a line-numbered ConfigError.
class TomlDocument {
 public:
  using Value = std::variant<bool, std::int64_t, double, std::string>;
  using Table = std::map<std::string, Value, std::less<>>;

  static TomlDocument parse(std::string_view text);
  static TomlDocument load(const std::filesystem::path& path);

  bool has_table(std::string_view name) const { return tables_.find(name) != tables_.end(); }
  const Table* table(std::string_view name) const;
  std::vector<std::string> table_names() const;

 private:
  std::map<std::string, Table, std::less<>> tables_;
};

}  // namespace dpforge

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fpp::cli {

/// A parsed config value: scalar or (possibly nested) list.
struct Value {
  enum class Type { Integer, Real, Boolean, String, List };

  Type type = Type::String;
  /// Original literal for numbers, unescaped text for strings.
  std::string text;
  bool boolean = false;
  std::vector<Value> items;

  bool is_number() const noexcept { return type == Type::Integer || type == Type::Real; }
  /// Canonical spelling, used for the manifest echo and the inputs hash.
  std::string canonical() const;
};

struct Entry {
  std::string key;
  Value value;
  int line = 0;
};

/// Raised for syntax errors and duplicate keys.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string key, const std::string& message);
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Flat key = value file. Grammar:
///   line    := ws [key ws '=' ws value] ws ['#' comment]
///   key     := [A-Za-z_][A-Za-z0-9_.-]*
///   value   := number | 'true' | 'false' | '"' chars '"' | bare | '[' [value (',' value)*] ']'
///   bare    := [A-Za-z0-9_.+-]+ not forming a number
class RawConfig {
 public:
  static RawConfig parse(std::string_view text);
  static RawConfig load(const std::string& path);

  const Entry* find(std::string_view key) const;
  const std::map<std::string, Entry, std::less<>>& entries() const noexcept { return entries_; }
  /// Insert or replace; used for command-line overrides (line 0).
  void set(const std::string& key, Value value);
  void erase(std::string_view key);

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

Value make_integer(std::uint64_t v);
Value make_string(std::string s);

}  // namespace fpp::cli

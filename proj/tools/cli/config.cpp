#include "config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace fpp::cli {

ConfigError::ConfigError(int line, std::string key, const std::string& message)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "line " << line;
        if (!key.empty()) os << ", key '" << key << "'";
        os << ": " << message;
        return os.str();
      }()),
      line_(line),
      key_(std::move(key)) {}

std::string Value::canonical() const {
  switch (type) {
    case Type::Integer:
    case Type::Real:
      return text;
    case Type::Boolean:
      return boolean ? "true" : "false";
    case Type::String: {
      std::string out = "\"";
      for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case Type::List: {
      std::string out = "[";
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i].canonical();
      }
      return out + "]";
    }
  }
  return text;
}

Value make_integer(std::uint64_t v) {
  Value out;
  out.type = Value::Type::Integer;
  out.text = std::to_string(v);
  return out;
}

Value make_string(std::string s) {
  Value out;
  out.type = Value::Type::String;
  out.text = std::move(s);
  return out;
}

namespace {

bool is_key_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}
bool is_bare_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '+' || c == '-';
}

bool looks_integer(std::string_view s) {
  std::size_t i = (s.size() > 0 && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

bool looks_real(std::string_view s) {
  if (s.empty()) return false;
  std::string tmp(s);
  char* end = nullptr;
  std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size()) return false;
  // Reject spellings strtod accepts but the grammar does not (inf, nan, hex).
  for (char c : tmp) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || c == '+' || c == '-')) {
      return false;
    }
  }
  return true;
}

class LineParser {
 public:
  LineParser(std::string_view text, int line, std::string key) : s_(text), line_(line), key_(std::move(key)) {}

  Value value(int depth = 0) {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '[') return list(depth);
    if (c == '"') return quoted();
    return bare();
  }

  void finish() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail("unexpected text after value: '" + std::string(s_.substr(pos_)) + "'");
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(line_, key_, message); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  Value list(int depth) {
    if (depth > 8) fail("lists nested too deeply");
    ++pos_;
    Value out;
    out.type = Value::Type::List;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return out;
    }
    for (;;) {
      out.items.push_back(value(depth + 1));
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated list");
      if (s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      fail(std::string("expected ',' or ']' in list, found '") + s_[pos_] + "'");
    }
  }

  Value quoted() {
    ++pos_;
    Value out;
    out.type = Value::Type::String;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case '"':
          case '\\':
            c = e;
            break;
          case 'n':
            c = '\n';
            break;
          case 't':
            c = '\t';
            break;
          default:
            fail(std::string("unknown escape '\\") + e + "'");
        }
      }
      out.text += c;
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  Value bare() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_bare_char(s_[pos_])) ++pos_;
    const std::string_view word = s_.substr(start, pos_ - start);
    if (word.empty()) fail(std::string("unexpected character '") + s_[pos_] + "'");
    Value out;
    out.text = std::string(word);
    if (word == "true" || word == "false") {
      out.type = Value::Type::Boolean;
      out.boolean = word == "true";
    } else if (looks_integer(word)) {
      out.type = Value::Type::Integer;
      if (out.text[0] == '+') out.text.erase(0, 1);
    } else if (looks_real(word)) {
      out.type = Value::Type::Real;
    } else {
      out.type = Value::Type::String;
    }
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
  std::string key_;
};

}  // namespace

RawConfig RawConfig::parse(std::string_view text) {
  RawConfig cfg;
  int line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(begin, end - begin);
    ++line_no;
    begin = end + 1;

    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i == line.size() || line[i] == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (!is_key_start(line[i])) throw ConfigError(line_no, "", "expected a key");
    const std::size_t key_start = i;
    while (i < line.size() && is_key_char(line[i])) ++i;
    std::string key(line.substr(key_start, i - key_start));
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size() || line[i] != '=') throw ConfigError(line_no, key, "expected '=' after key");
    ++i;
    LineParser parser(line.substr(i), line_no, key);
    Value value = parser.value();
    parser.finish();
    if (auto it = cfg.entries_.find(key); it != cfg.entries_.end()) {
      throw ConfigError(line_no, key,
                        "duplicate key (first defined on line " + std::to_string(it->second.line) + ")");
    }
    cfg.entries_.emplace(key, Entry{key, std::move(value), line_no});
    if (end == text.size()) break;
  }
  return cfg;
}

RawConfig RawConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "", "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const Entry* RawConfig::find(std::string_view key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void RawConfig::set(const std::string& key, Value value) { entries_[key] = Entry{key, std::move(value), 0}; }

void RawConfig::erase(std::string_view key) {
  if (auto it = entries_.find(key); it != entries_.end()) entries_.erase(it);
}

}  // namespace fpp::cli

#include "csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace fpp::cli {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void append_field(std::string& out, const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void append_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    append_field(out, fields[i]);
  }
  out += "\r\n";
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable::Row& CsvTable::Row::add(const std::string& s) {
  fields_.push_back(s);
  return *this;
}

CsvTable::Row& CsvTable::Row::add(double x) {
  fields_.push_back(format_real(x));
  return *this;
}

CsvTable::Row& CsvTable::Row::add(std::int64_t x) {
  fields_.push_back(std::to_string(x));
  return *this;
}

CsvTable::Row& CsvTable::Row::add(std::uint64_t x) {
  fields_.push_back(std::to_string(x));
  return *this;
}

CsvTable::Row& CsvTable::row() {
  rows_.emplace_back();
  return rows_.back();
}

std::string CsvTable::str() const {
  std::string out;
  append_line(out, header_);
  for (const auto& r : rows_) {
    if (r.fields_.size() != header_.size()) {
      throw std::logic_error("csv row has " + std::to_string(r.fields_.size()) + " fields, header has " +
                             std::to_string(header_.size()));
    }
    append_line(out, r.fields_);
  }
  return out;
}

}  // namespace fpp::cli

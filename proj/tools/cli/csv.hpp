#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fpp::cli {

/// %.17g, which round-trips every double.
std::string format_real(double x);

/// RFC 4180 writer: CRLF line ends, fields quoted when they contain a comma,
/// a quote, CR or LF.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  class Row {
   public:
    Row& add(const std::string& s);
    Row& add(const char* s) { return add(std::string(s)); }
    Row& add(double x);
    Row& add(std::int64_t x);
    Row& add(std::uint64_t x);
    Row& add(int x) { return add(static_cast<std::int64_t>(x)); }
    Row& add(unsigned x) { return add(static_cast<std::uint64_t>(x)); }
    Row& add(bool b) { return add(std::string(b ? "true" : "false")); }

   private:
    friend class CsvTable;
    std::vector<std::string> fields_;
  };

  Row& row();
  std::size_t rows() const noexcept { return rows_.size(); }
  const std::vector<std::string>& header() const noexcept { return header_; }
  /// Throws std::logic_error if a row has the wrong number of fields.
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

}  // namespace fpp::cli

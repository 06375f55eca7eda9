#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace lzlmg {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// Comma-separated table with leading `# ` comment lines. Rows are buffered
/// and written on `save`, so a failed campaign leaves no partial file.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  void comment(const std::string& line);

  class Row {
   public:
    Row& operator<<(double v);
    Row& operator<<(long v);
    Row& operator<<(int v);
    Row& operator<<(std::uint64_t v);
    Row& operator<<(const std::string& v);
    ~Row();

   private:
    friend class CsvWriter;
    explicit Row(CsvWriter& w) : w_(w) {}
    CsvWriter& w_;
    std::vector<std::string> cells_;
  };

  Row row() { return Row(*this); }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column; throws Error if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> numeric(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

}  // namespace lzlmg

#include "lzlmg/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lzlmg/errors.hpp"

namespace lzlmg {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::comment(const std::string& line) { comments_.push_back(line); }

CsvWriter::Row& CsvWriter::Row::operator<<(double v) {
  cells_.push_back(format_double(v));
  return *this;
}
CsvWriter::Row& CsvWriter::Row::operator<<(long v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvWriter::Row& CsvWriter::Row::operator<<(int v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvWriter::Row& CsvWriter::Row::operator<<(std::uint64_t v) {
  cells_.push_back(std::to_string(v));
  return *this;
}
CsvWriter::Row& CsvWriter::Row::operator<<(const std::string& v) {
  cells_.push_back(v);
  return *this;
}
CsvWriter::Row::~Row() { w_.rows_.push_back(std::move(cells_)); }

std::string CsvWriter::str() const {
  std::ostringstream out;
  for (const auto& c : comments_) out << "# " << c << '\n';
  for (std::size_t k = 0; k < columns_.size(); ++k) out << (k ? "," : "") << columns_[k];
  out << '\n';
  for (const auto& r : rows_) {
    if (r.size() != columns_.size())
      throw Error("csv row has " + std::to_string(r.size()) + " cells, expected " +
                  std::to_string(columns_.size()));
    for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << r[k];
    out << '\n';
  }
  return out.str();
}

void CsvWriter::save(const std::filesystem::path& path) const {
  const std::string text = str();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("write failed: " + path.string());
}

namespace {
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}
}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == name) return k;
  throw Error("csv has no column '" + name + "'");
}

std::vector<double> CsvTable::numeric(const std::string& name) const {
  const std::size_t k = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (k >= r.size()) throw Error("csv row too short for column '" + name + "'");
    const std::string& s = r[k];
    double v = 0.0;
    if (s == "nan") {
      v = std::nan("");
    } else if (s == "inf" || s == "-inf") {
      v = s[0] == '-' ? -INFINITY : INFINITY;
    } else {
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error("csv column '" + name + "': not a number: '" + s + "'");
    }
    out.push_back(v);
  }
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    if (!header) {
      t.columns = split(line);
      header = true;
    } else {
      t.rows.push_back(split(line));
    }
  }
  if (!header) throw Error(path.string() + ": no header row");
  return t;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lzlmg

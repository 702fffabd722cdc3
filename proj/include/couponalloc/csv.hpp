#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace couponalloc::csv {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Parsed comma-separated file with a header row. Cells are not quoted.
class Table {
 public:
  static Table read(const std::filesystem::path& path);
  static Table parse(std::string_view text, std::string source);

  const std::string& source() const { return source_; }
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return cells_.size(); }

  /// Index of a named column; throws Error naming the file and column.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;

  const std::string& cell(std::size_t row, std::size_t col) const {
    return cells_[row][col];
  }
  double number(std::size_t row, std::size_t col) const;
  std::int64_t integer(std::size_t row, std::size_t col) const;

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> cells_;
};

/// Accumulates rows in memory and writes them in one go.
class Writer {
 public:
  explicit Writer(std::vector<std::string> header);

  Writer& cell(std::string_view text);
  Writer& cell(double v);
  Writer& cell(std::int64_t v);
  Writer& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
  Writer& cell(std::size_t v) { return cell(static_cast<std::int64_t>(v)); }
  void end_row();

  const std::string& text() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::size_t pending_ = 0;
  std::string text_;
};

}  // namespace couponalloc::csv

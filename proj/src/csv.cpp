#include "couponalloc/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "couponalloc/core.hpp"

namespace couponalloc::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const auto piece = line.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start);
    out.emplace_back(trim(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Table Table::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

Table Table::parse(std::string_view text, std::string source) {
  Table t;
  t.source_ = std::move(source);
  std::size_t pos = 0;
  bool have_header = false;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (trim(line).empty()) {
      if (nl == text.size()) break;
      continue;
    }
    auto cells = split_line(line);
    if (!have_header) {
      t.header_ = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != t.header_.size()) {
        throw Error(t.source_ + ": line " + std::to_string(line_no) +
                    " has " + std::to_string(cells.size()) +
                    " cells, header has " + std::to_string(t.header_.size()));
      }
      t.cells_.push_back(std::move(cells));
    }
    if (nl == text.size()) break;
  }
  if (!have_header) throw Error(t.source_ + ": missing header row");
  return t;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw Error(source_ + ": missing column '" + std::string(name) + "'");
}

bool Table::has_column(std::string_view name) const {
  for (const auto& h : header_) {
    if (h == name) return true;
  }
  return false;
}

double Table::number(std::size_t row, std::size_t col) const {
  const std::string& s = cells_[row][col];
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(source_ + ": row " + std::to_string(row + 1) + ", column '" +
                header_[col] + "': not a number: '" + s + "'");
  }
  return v;
}

std::int64_t Table::integer(std::size_t row, std::size_t col) const {
  const std::string& s = cells_[row][col];
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(source_ + ": row " + std::to_string(row + 1) + ", column '" +
                header_[col] + "': not an integer: '" + s + "'");
  }
  return v;
}

Writer::Writer(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

Writer& Writer::cell(std::string_view text) {
  if (pending_) text_ += ',';
  text_ += text;
  ++pending_;
  return *this;
}

Writer& Writer::cell(double v) { return cell(format_double(v)); }

Writer& Writer::cell(std::int64_t v) { return cell(std::to_string(v)); }

void Writer::end_row() {
  if (pending_ != columns_) {
    throw Error("csv writer: row has " + std::to_string(pending_) +
                " cells, expected " + std::to_string(columns_));
  }
  text_ += '\n';
  pending_ = 0;
}

void Writer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text_;
}

}  // namespace couponalloc::csv

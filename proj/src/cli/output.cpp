#include "rndiff/cli/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "rndiff/format.hpp"

namespace rndiff::cli {

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable::Row& CsvTable::Row::num(double v) {
  cells_.push_back(format_sig6(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::integer(long long v) {
  cells_.push_back(std::to_string(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::text(const std::string& v) {
  cells_.push_back(v);
  return *this;
}

CsvTable::Row& CsvTable::add_row() { return rows_.emplace_back(); }

std::string CsvTable::str() const {
  auto emit = [](std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  std::string out;
  emit(out, header_);
  for (const Row& r : rows_) {
    if (r.cells_.size() != header_.size()) throw std::logic_error("csv row width does not match header");
    emit(out, r.cells_);
  }
  return out;
}

bool all_passed(const std::vector<Gate>& gates) {
  for (const Gate& g : gates) {
    if (!g.passed) return false;
  }
  return true;
}

}  // namespace rndiff::cli

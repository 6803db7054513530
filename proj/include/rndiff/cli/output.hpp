#pragma once

#include <string>
#include <vector>

namespace rndiff::cli {

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

// Header row plus data rows; numbers go through format_sig6.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  class Row {
   public:
    Row& num(double v);
    Row& integer(long long v);
    Row& text(const std::string& v);

   private:
    friend class CsvTable;
    std::vector<std::string> cells_;
  };
  Row& add_row();
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

struct Gate {
  std::string name;
  bool passed = false;
  std::string detail;
};

bool all_passed(const std::vector<Gate>& gates);

}  // namespace rndiff::cli

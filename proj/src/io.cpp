#include "svtreg/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace svtreg {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Matrix read_csv_matrix(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) throw contract_error("cannot open matrix file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (header && line_no == 1) continue;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        std::ostringstream msg;
        msg << path << ":" << line_no << ":" << col
            << ": cannot parse numeric value '" << cell << "'";
        throw contract_error(msg.str());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": ragged row (" << row.size()
          << " columns, expected " << rows.front().size() << ")";
      throw contract_error(msg.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw contract_error(path + ": empty matrix file");
  Matrix m(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.front().size(); ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void write_csv_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw contract_error("cannot write matrix file: " + path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void Record::set(const std::string& key, const std::string& value) {
  fields_.emplace_back(key, value);
}
void Record::set(const std::string& key, double value) {
  fields_.emplace_back(key, format_double(value));
}
void Record::set(const std::string& key, std::int64_t value) {
  fields_.emplace_back(key, std::to_string(value));
}
void Record::set(const std::string& key, const Vector& values) {
  std::string joined;
  for (Index i = 0; i < values.size(); ++i) {
    if (i > 0) joined += ' ';
    joined += format_double(values(i));
  }
  fields_.emplace_back(key, joined);
}

std::string Record::to_string() const {
  std::string out;
  for (const auto& [k, v] : fields_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

void Record::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw contract_error("cannot write record file: " + path);
  out << to_string();
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw contract_error("cannot open file for digest: " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return hex;
}

}  // namespace svtreg

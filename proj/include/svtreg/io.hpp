#ifndef SVTREG_IO_HPP
#define SVTREG_IO_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "svtreg/types.hpp"

namespace svtreg {

// Comma-separated values, one matrix row per line, no header by default.
// Values are written with 17 significant digits so a round trip is lossless.
Matrix read_csv_matrix(const std::string& path, bool header = false);
void write_csv_matrix(const std::string& path, const Matrix& m);

std::string format_double(double v);  // 17 significant digits

// Self-describing "key = value" record with stable field order.
class Record {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, const Vector& values);
  void write(const std::string& path) const;
  std::string to_string() const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

// FNV-1a 64-bit digest of a file's bytes, hex-encoded.
std::string file_digest(const std::string& path);

}  // namespace svtreg

#endif

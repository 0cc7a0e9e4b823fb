#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace epirep {

// One checked inequality: observed <= bound (or, for lower-bound audits,
// observed >= bound; the producer sets pass accordingly).
struct AuditRecord {
  std::string name;
  double bound = 0.0;
  double observed = 0.0;
  bool pass = false;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string note;

  double margin() const { return bound - observed; }
};

// {name, bound, observed, margin, pass, samples, seed, note, config_hash}
std::string to_json(const AuditRecord& r, const std::string& config_hash = "");
std::string to_json(const std::vector<AuditRecord>& rs, const std::string& config_hash = "");

// RFC-4180 style writer: LF line ends, '.' decimal, fields quoted when needed.
class CsvWriter {
 public:
  // The first line is "# schema: <schema>", then the column header.
  CsvWriter(std::ostream& out, const std::string& schema, const std::vector<std::string>& columns);
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(const std::string& s);
  CsvWriter& operator<<(long long v);
  void end_row();

 private:
  void separator();
  std::ostream& out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

// Shortest round-trip decimal for a double; "inf"/"-inf"/"nan" for specials.
std::string format_double(double v);

}  // namespace epirep

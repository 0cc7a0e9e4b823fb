#include "epirep/report.hpp"
#include "epirep/errors.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>

namespace epirep {
namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);  // JSON has no infinities
}

nlohmann::json record(const AuditRecord& r, const std::string& hash) {
  nlohmann::json j;
  j["name"] = r.name;
  j["bound"] = number(r.bound);
  j["observed"] = number(r.observed);
  j["margin"] = number(r.margin());
  j["pass"] = r.pass;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  if (!r.note.empty()) j["note"] = r.note;
  j["config_hash"] = hash;
  return j;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_json(const AuditRecord& r, const std::string& config_hash) {
  return record(r, config_hash).dump(2);
}

std::string to_json(const std::vector<AuditRecord>& rs, const std::string& config_hash) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rs) arr.push_back(record(r, config_hash));
  return arr.dump(2);
}

CsvWriter::CsvWriter(std::ostream& out, const std::string& schema,
                     const std::vector<std::string>& columns)
    : out_(out), columns_(columns.size()) {
  out_ << "# schema: " << schema << '\n';
  for (const auto& c : columns) *this << c;
  end_row();
}

void CsvWriter::separator() {
  if (in_row_ >= columns_) throw Error("csv: too many fields in row");
  if (in_row_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) {
  separator();
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    out_ << s;
    return *this;
  }
  out_ << '"';
  for (char c : s) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw Error("csv: row has wrong number of fields");
  out_ << '\n';
  in_row_ = 0;
}

}  // namespace epirep

#pragma once

// RFC 4180 CSV output with LF line endings. Every file starts with the
// schema tag line `# cape-csv v1`.

#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cape::cli {

inline constexpr std::string_view kCsvSchemaTag = "# cape-csv v1";

// Shortest decimal form that parses back to the same double; "nan"/"inf"
// for non-finite values.
std::string format_double(double v);

// Quote a field if it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void schema_tag() { out_ << kCsvSchemaTag << '\n'; }
  void comment(std::string_view text) { out_ << "# " << text << '\n'; }
  void row(const std::vector<std::string>& fields);
  void row(std::initializer_list<std::string_view> fields);

 private:
  std::ostream& out_;
};

// Field helpers: empty string for a missing value.
std::string field(double v);
std::string field(std::optional<double> v);
std::string field(long long v);

}  // namespace cape::cli

#pragma once

#include <cstdint>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eepc {

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest text that parses back to exactly `value` (at most 17 significant digits).
std::string format_double(double value);

/// Fixed 17-significant-digit form used for every CSV field.
std::string format_double17(double value);

double parse_double(std::string_view text);
std::size_t parse_size(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

/// Comma-separated numbers, e.g. "1,2.5,3".
std::vector<double> parse_double_list(std::string_view text);

/// "start:stop:step" inclusive grid or a plain comma list.
std::vector<double> parse_grid(std::string_view text);

/// key=value lines; blank lines and '#' comments are skipped. Whitespace
/// around keys and values is trimmed.
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::map<std::string, std::string> read_key_value_file(const std::string& path);
std::string format_key_values(const std::map<std::string, std::string>& kv);

/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::string& path, std::string_view contents);

}  // namespace eepc

#ifndef PDIRAC_IO_HPP
#define PDIRAC_IO_HPP

#include <string>
#include <vector>

namespace pdirac {

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double x);

/// Hex SHA-1 of the git blob encoding of `content`.
std::string git_blob_hash(const std::string& content);

/// Joins one CSV row; numeric cells should already be formatted.
std::string csv_row(const std::vector<std::string>& cells);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace pdirac

#endif

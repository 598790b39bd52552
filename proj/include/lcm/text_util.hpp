#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lcm {

/// Shortest-safe decimal rendering with 17 significant digits; strtod of the
/// result gives back the same double.
std::string format_real(double value);

/// Fixed-point rendering with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

/// Strict parse of the whole field; false on any trailing or missing text.
bool parse_real(std::string_view text, double& out);
bool parse_unsigned(std::string_view text, unsigned long long& out);

std::vector<std::string_view> split(std::string_view line, char sep);

/// Calls `fn(line, line_number)` for each line (1-based), with a trailing
/// '\r' removed.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        fn(line, ++line_no);
        pos = end + 1;
    }
}

std::string read_stream(std::istream& in);
std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling file and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace lcm

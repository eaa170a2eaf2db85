#ifndef APPIC_CONFIG_HPP
#define APPIC_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace appic {

/// Ordered key/value pairs from a `key = value` config file.
/// Blank lines and lines starting with '#' are skipped; a trailing `# ...` is a comment.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

ConfigEntries parse_config_text(std::string_view text);
ConfigEntries read_config_file(const std::string& path);

/// Splits a `--set key=value` override.
std::pair<std::string, std::string> parse_override(std::string_view assignment);

namespace parse {

double real(std::string_view key, std::string_view value);
std::size_t count(std::string_view key, std::string_view value);
std::uint64_t u64(std::string_view key, std::string_view value);
int integer(std::string_view key, std::string_view value);
bool boolean(std::string_view key, std::string_view value);
std::vector<double> real_list(std::string_view key, std::string_view value);
std::vector<std::size_t> count_list(std::string_view key, std::string_view value);

} // namespace parse

std::string trim(std::string_view s);

} // namespace appic

#endif // APPIC_CONFIG_HPP

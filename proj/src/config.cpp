#include "appic/config.hpp"

#include "appic/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace appic {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

ConfigEntries parse_config_text(std::string_view text)
{
    ConfigEntries entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const std::string stripped = trim(line);
        if (stripped.empty())
            continue;

        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(std::string_view(stripped).substr(0, eq));
        std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        entries.emplace_back(std::move(key), std::move(value));
        if (end == text.size())
            break;
    }
    return entries;
}

ConfigEntries read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::pair<std::string, std::string> parse_override(std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError("override must look like key=value: " + std::string(assignment));
    std::string key = trim(assignment.substr(0, eq));
    if (key.empty())
        throw ConfigError("override with empty key: " + std::string(assignment));
    return {std::move(key), trim(assignment.substr(eq + 1))};
}

namespace parse {

namespace {

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view expected)
{
    throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) +
                      "' as " + std::string(expected));
}

template<typename T>
T number(std::string_view key, std::string_view value, std::string_view expected)
{
    const std::string v = trim(value);
    T out{};
    const auto* first = v.data();
    const auto* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || v.empty())
        bad(key, value, expected);
    return out;
}

std::vector<std::string> split_list(std::string_view value)
{
    std::vector<std::string> items;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        auto comma = value.find(',', pos);
        if (comma == std::string_view::npos)
            comma = value.size();
        std::string item = trim(value.substr(pos, comma - pos));
        if (!item.empty())
            items.push_back(std::move(item));
        pos = comma + 1;
    }
    return items;
}

} // namespace

double real(std::string_view key, std::string_view value)
{
    return number<double>(key, value, "a real number");
}

std::size_t count(std::string_view key, std::string_view value)
{
    // from_chars accepts no exponent for integers; allow "1.6e6"-style counts.
    const std::string v = trim(value);
    if (v.find_first_of("eE.") != std::string::npos) {
        const double d = real(key, value);
        if (d < 0.0 || d != static_cast<double>(static_cast<std::size_t>(d)))
            bad(key, value, "a non-negative integer");
        return static_cast<std::size_t>(d);
    }
    return number<std::size_t>(key, value, "a non-negative integer");
}

std::uint64_t u64(std::string_view key, std::string_view value)
{
    return number<std::uint64_t>(key, value, "an unsigned 64-bit integer");
}

int integer(std::string_view key, std::string_view value)
{
    return number<int>(key, value, "an integer");
}

bool boolean(std::string_view key, std::string_view value)
{
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    bad(key, value, "a boolean");
}

std::vector<double> real_list(std::string_view key, std::string_view value)
{
    std::vector<double> out;
    for (const auto& item : split_list(value))
        out.push_back(real(key, item));
    if (out.empty())
        bad(key, value, "a comma-separated list of reals");
    return out;
}

std::vector<std::size_t> count_list(std::string_view key, std::string_view value)
{
    std::vector<std::size_t> out;
    for (const auto& item : split_list(value))
        out.push_back(count(key, item));
    if (out.empty())
        bad(key, value, "a comma-separated list of integers");
    return out;
}

} // namespace parse
} // namespace appic

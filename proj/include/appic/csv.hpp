#ifndef APPIC_CSV_HPP
#define APPIC_CSV_HPP

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace appic {

/// Shortest round-trippable form is not required; every real is written with 17 significant digits.
std::string format_real(double value);

/// Comma-delimited writer with a mandatory header row.
class CsvWriter
{
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

    CsvWriter& cell(double value);
    CsvWriter& cell(std::string_view text);
    CsvWriter& cell(long long value);
    CsvWriter& cell(std::size_t value) { return cell(static_cast<long long>(value)); }
    CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
    void end_row();

private:
    void separator();

    std::ofstream out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

} // namespace appic

#endif // APPIC_CSV_HPP

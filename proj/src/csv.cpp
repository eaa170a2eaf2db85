#include "appic/csv.hpp"

#include "appic/error.hpp"

#include <cstdio>

namespace appic {

std::string format_real(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
    : out_(path, std::ios::binary), columns_(header.size())
{
    if (!out_)
        throw InputError("cannot open " + path.string() + " for writing");
    bool first = true;
    for (auto name : header) {
        if (!first)
            out_ << ',';
        out_ << name;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::separator()
{
    if (in_row_ > 0)
        out_ << ',';
    ++in_row_;
}

CsvWriter& CsvWriter::cell(double value)
{
    separator();
    out_ << format_real(value);
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text)
{
    separator();
    out_ << text;
    return *this;
}

CsvWriter& CsvWriter::cell(long long value)
{
    separator();
    out_ << value;
    return *this;
}

void CsvWriter::end_row()
{
    if (in_row_ != columns_)
        throw InputError("CSV row has " + std::to_string(in_row_) + " cells, header has " +
                         std::to_string(columns_));
    out_ << '\n';
    in_row_ = 0;
    if (!out_)
        throw InputError("CSV write failed");
}

} // namespace appic

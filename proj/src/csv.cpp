#include "qfilter/csv.hpp"

#include <cstdio>
#include <ostream>

#include "qfilter/errors.hpp"

namespace qfilter {

std::string format_double(double value) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        cells.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
}

void CsvWriter::separator() {
    if (filled_ == columns_) throw ShapeMismatch("CSV row wider than header");
    if (filled_ > 0) os_ << ',';
    ++filled_;
}

CsvWriter& CsvWriter::number(double value) {
    separator();
    os_ << format_double(value);
    return *this;
}

CsvWriter& CsvWriter::integer(std::size_t value) {
    separator();
    os_ << value;
    return *this;
}

CsvWriter& CsvWriter::text(std::string_view value) {
    separator();
    os_ << value;
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != columns_) throw ShapeMismatch("CSV row narrower than header");
    os_ << '\n';
    filled_ = 0;
}

}  // namespace qfilter

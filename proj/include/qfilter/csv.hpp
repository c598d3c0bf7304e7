#ifndef QFILTER_CSV_HPP
#define QFILTER_CSV_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qfilter {

/// Round-trippable rendering of a double (17 significant digits, %.17g).
std::string format_double(double value);

std::vector<std::string> split_csv_line(std::string_view line);

// Minimal comma-separated writer. Values are emitted in call order; end_row()
// checks that the row width matches the header.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header);

    CsvWriter& number(double value);
    CsvWriter& integer(std::size_t value);
    CsvWriter& text(std::string_view value);
    void end_row();

    std::size_t columns() const noexcept { return columns_; }

private:
    void separator();

    std::ostream& os_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

}  // namespace qfilter

#endif  // QFILTER_CSV_HPP

#ifndef QFILTER_COMMANDS_HPP
#define QFILTER_COMMANDS_HPP

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "qfilter/config.hpp"

namespace qfilter {

inline constexpr std::array<std::string_view, 6> subcommands = {"riccati", "trajectory", "grid",
                                                                "compare", "ensemble",   "martingale"};

/// Runs one experiment, writing its CSV outputs and run_record.txt into
/// out_dir and summary lines to `log`. Returns 0 when every in-run tolerance
/// summary passed and 1 otherwise; module errors propagate as exceptions.
int run_subcommand(std::string_view name, const Config& config, const std::filesystem::path& out_dir,
                   std::ostream& log);

}  // namespace qfilter

#endif  // QFILTER_COMMANDS_HPP

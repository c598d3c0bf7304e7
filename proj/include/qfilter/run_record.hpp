#ifndef QFILTER_RUN_RECORD_HPP
#define QFILTER_RUN_RECORD_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace qfilter {

struct ManifestEntry {
    std::string file;    // relative to the output directory
    std::string sha256;  // lowercase hex
};

struct RunRecord {
    std::string subcommand;
    std::string version;
    double wall_time_s = 0.0;
    std::string config_snapshot;  // render_config output
    std::vector<ManifestEntry> files;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Plain-text manifest: header lines, the config block, then one
/// "<sha256>  <file>" line per output.
void write_run_record(const std::filesystem::path& path, const RunRecord& record);

}  // namespace qfilter

#endif  // QFILTER_RUN_RECORD_HPP

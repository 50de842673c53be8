#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vlmd/types.hpp"

//
// Numeric CSV with one header row. Values are written with enough digits to
// round-trip doubles exactly; writes go to a temp file in the target
// directory and are renamed into place so readers never see partial output.
//

namespace vlmd {

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;  // rows x header.size()
};

// Throws ParseError (with 1-based line number) on malformed content.
CsvTable read_csv(const std::filesystem::path& path);

TimeSeriesMatrix read_time_series(const std::filesystem::path& path,
                                  double sample_rate_hz);

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header, const Matrix& values);

// Pre-formatted rows (for mixed-type tables such as benchmark results).
void write_csv_rows(const std::filesystem::path& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

// Atomic text write used by every artifact writer.
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content);

std::string format_double(double v);  // shortest exact round-trip form

// FNV-1a over the raw bytes of a file, hex-encoded; used in run manifests.
std::string fnv1a_hex(const std::filesystem::path& path);

}  // namespace vlmd

#include "vlmd/csv_io.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace vlmd {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);

  std::string line;
  int line_no = 0;
  CsvTable table;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line[0] == '\xEF' &&
        line[1] == '\xBB' && line[2] == '\xBF')
      line.erase(0, 3);
    if (trim(line).empty()) {
      if (line_no == 1)
        throw ParseError(path.string() + ":1: empty header", 1);
      continue;  // tolerate a trailing blank line
    }
    std::vector<std::string> fields = split_fields(line);
    if (line_no == 1) {
      for (auto& f : fields) table.header.push_back(trim(f));
      continue;
    }
    if (fields.size() != table.header.size())
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                           ": expected " + std::to_string(table.header.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no);
    std::vector<double> row(fields.size());
    for (size_t i = 0; i < fields.size(); ++i) {
      const std::string f = trim(fields[i]);
      const char* b = f.data();
      const char* e = b + f.size();
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || ptr != e)
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": bad number '" + f + "' in column " +
                             std::to_string(i + 1),
                         line_no);
      row[i] = v;
    }
    rows.push_back(std::move(row));
  }
  if (table.header.empty())
    throw ParseError(path.string() + ": empty file", 0);

  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.header.size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c)
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
  return table;
}

TimeSeriesMatrix read_time_series(const std::filesystem::path& path,
                                  double sample_rate_hz) {
  CsvTable t = read_csv(path);
  if (t.values.rows() == 0)
    throw ParseError(path.string() + ": no data rows", 0);
  TimeSeriesMatrix ts;
  ts.samples = std::move(t.values);
  ts.sample_rate_hz = sample_rate_hz;
  ts.channel_names = std::move(t.header);
  ts.validate();
  return ts;
}

std::string format_double(double v) {
  char buf[40];
  // %.17g round-trips any double; try the shorter %.15g first for readability.
  std::snprintf(buf, sizeof buf, "%.15g", v);
  double back = 0.0;
  auto [ptr, ec] = std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
  (void)ptr;
  if (ec != std::errc() || back != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("rename to " + path.string() + " failed: " + ec.message());
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header, const Matrix& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols())
    throw DimensionError("write_csv: header/column mismatch");
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      out << format_double(values(r, c));
    }
    out << '\n';
  }
  write_text_atomic(path, out.str());
}

void write_csv_rows(const std::filesystem::path& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw DimensionError("write_csv_rows: row width mismatch");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  write_text_atomic(path, out.str());
}

std::string fnv1a_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for hashing");
  std::uint64_t h = 14695981039346656037ull;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016" PRIx64, h);
  return out;
}

}  // namespace vlmd

#include "qent/export.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qent/errors.hpp"

namespace qent {

namespace fs = std::filesystem;

ExportFormat parse_format(const std::string& name) {
  if (name == "csv") return ExportFormat::Csv;
  if (name == "json") return ExportFormat::Json;
  throw ConfigError("unknown output format '" + name + "' (expected csv or json)");
}

std::string extension(ExportFormat format) {
  return format == ExportFormat::Csv ? ".csv" : ".json";
}

std::vector<std::string> csv_header(const TimeSeries& series) {
  std::vector<std::string> h{"t"};
  for (const auto& c : series.estimator_columns) h.push_back("c_" + c);
  for (int i = 1; i <= series.mu_count; ++i) h.push_back("mu_" + std::to_string(i));
  h.emplace_back("boundary_pop");
  for (const auto& c : series.estimator_columns) h.push_back("valid_" + c);
  h.emplace_back("valid_boundary");
  return h;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

/// Row values in header order; flags as 0/1.
std::vector<double> row_values(const TimeSeries& series, const TimeSeriesRecord& rec) {
  std::vector<double> row{rec.t};
  row.insert(row.end(), rec.values.begin(), rec.values.end());
  for (int i = 0; i < series.mu_count; ++i) {
    row.push_back(i < static_cast<int>(rec.mu.size()) ? rec.mu[static_cast<std::size_t>(i)]
                                                      : 0.0);
  }
  row.push_back(rec.boundary_pop);
  for (const bool v : rec.valid) row.push_back(v ? 1.0 : 0.0);
  row.push_back(rec.boundary_ok ? 1.0 : 0.0);
  return row;
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
  return out;
}

}  // namespace

std::string to_csv(const TimeSeries& series) {
  const auto header = csv_header(series);
  const std::size_t n_valid = series.estimator_columns.size() + 1;
  std::string out = join_csv(header);
  for (const auto& rec : series.records) {
    const auto row = row_values(series, rec);
    std::vector<std::string> fields;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const bool flag = i + n_valid >= row.size();
      fields.push_back(flag ? (row[i] != 0.0 ? "1" : "0") : format_real(row[i]));
    }
    out += join_csv(fields);
  }
  return out;
}

std::string to_json(const TimeSeries& series) {
  using nlohmann::ordered_json;
  ordered_json doc;
  ordered_json scenario = ordered_json::object();
  for (const auto& [key, value] : series.scenario.to_entries()) scenario[key] = value;
  doc["metadata"] = {{"artifact_version", kArtifactVersion},
                     {"seed", series.scenario.seed},
                     {"scenario", scenario}};
  const auto header = csv_header(series);
  doc["columns"] = header;
  const std::size_t n_valid = series.estimator_columns.size() + 1;
  ordered_json records = ordered_json::array();
  for (const auto& rec : series.records) {
    const auto row = row_values(series, rec);
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i + n_valid >= row.size()) {
        obj[header[i]] = row[i] != 0.0 ? 1 : 0;
      } else if (std::isnan(row[i])) {
        obj[header[i]] = nullptr;
      } else {
        obj[header[i]] = row[i];
      }
    }
    records.push_back(std::move(obj));
  }
  doc["records"] = std::move(records);
  return doc.dump(2) + "\n";
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

void export_series(const TimeSeries& series, ExportFormat format, const fs::path& path) {
  write_file_atomic(path, format == ExportFormat::Csv ? to_csv(series) : to_json(series));
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (first) {
      table.header = std::move(fields);
      first = false;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw IoError("CSV line " + std::to_string(lineno) + " has " +
                    std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(table.header.size()));
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw IoError("CSV line " + std::to_string(lineno) + ": '" + f + "' is not a number");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::vector<fs::path> write_bundle(const Bundle& bundle, const fs::path& dir,
                                   ExportFormat format) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

  std::vector<fs::path> written;
  for (const auto& run : bundle.runs) {
    const fs::path p = dir / (run.scenario.name + extension(format));
    export_series(run, format, p);
    written.push_back(p);
  }

  std::string summary = "run,d,estimator,rate,intercept,points,t_end\n";
  for (const auto& f : bundle.fits) {
    summary += f.run + "," + std::to_string(f.d) + "," + f.estimator + "," +
               format_real(f.rate) + "," + format_real(f.intercept) + "," +
               std::to_string(f.points) + "," + format_real(f.t_end) + "\n";
  }
  const fs::path summary_path = dir / (bundle.name + "_summary.csv");
  write_file_atomic(summary_path, summary);
  written.push_back(summary_path);

  if (bundle.name == "fig2") {
    std::string overlay = "run,nbar,max_excess,rows,invalid_rows\n";
    for (const auto& c : compare_fig2(bundle)) {
      overlay += c.run + "," + format_real(c.nbar) + "," + format_real(c.max_excess) + "," +
                 std::to_string(c.rows) + "," + std::to_string(c.invalid_rows) + "\n";
    }
    const fs::path overlay_path = dir / "fig2_overlay.csv";
    write_file_atomic(overlay_path, overlay);
    written.push_back(overlay_path);

    std::string boundary = "run,max_boundary_pop,flagged_rows,rows\n";
    for (const auto& run : bundle.runs) {
      double worst = 0.0;
      int flagged = 0;
      for (const auto& rec : run.records) {
        worst = std::max(worst, rec.boundary_pop);
        if (!rec.boundary_ok) ++flagged;
      }
      boundary += run.scenario.name + "," + format_real(worst) + "," + std::to_string(flagged) +
                  "," + std::to_string(run.records.size()) + "\n";
    }
    const fs::path boundary_path = dir / "fig2_boundary.csv";
    write_file_atomic(boundary_path, boundary);
    written.push_back(boundary_path);
  }
  return written;
}

}  // namespace qent

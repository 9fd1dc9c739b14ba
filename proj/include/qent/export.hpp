#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qent/scenario.hpp"

namespace qent {

enum class ExportFormat { Csv, Json };

ExportFormat parse_format(const std::string& name);
std::string extension(ExportFormat format);

/// t, c_<estimator>..., mu_1..mu_r, boundary_pop, valid_<estimator>...,
/// valid_boundary.
std::vector<std::string> csv_header(const TimeSeries& series);

/// 17 significant digits, so parsing returns the identical double.
std::string format_real(double v);

std::string to_csv(const TimeSeries& series);
/// Same columns as the CSV, plus a metadata block with the scenario echo,
/// artifact version and seed. NaN values become null.
std::string to_json(const TimeSeries& series);

/// Writes to a temporary sibling and renames it over `path`. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

void export_series(const TimeSeries& series, ExportFormat format,
                   const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// One file per run named after the run, plus `<bundle>_summary.csv` with the
/// exponent fits. The fig2 bundle also gets `fig2_overlay.csv` (qudit vs qubit
/// comparison) and `fig2_boundary.csv` (boundary-population gate per run).
/// Returns the paths written.
std::vector<std::filesystem::path> write_bundle(const Bundle& bundle,
                                                const std::filesystem::path& dir,
                                                ExportFormat format = ExportFormat::Csv);

}  // namespace qent

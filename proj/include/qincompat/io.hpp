#ifndef QINCOMPAT_IO_HPP
#define QINCOMPAT_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "qincompat/analysis.hpp"
#include "qincompat/estimation.hpp"

namespace qincompat {

using Json = nlohmann::json;

/// Doubles are printed with 17 significant digits so CSV/JSON round-trips
/// are bit-exact.
std::string format_double(double v);
double parse_double(const std::string& s);

// Complex matrices as row-major nested arrays of [re, im] pairs; real
// matrices as row-major nested arrays of numbers. See docs/formats.md.
Json cmatrix_to_json(const CMatrix& m);
CMatrix cmatrix_from_json(const Json& j);
Json rmatrix_to_json(const RMatrix& m);
RMatrix rmatrix_from_json(const Json& j);

Json estimation_to_json(const EstimationResult& res);
Json scaling_fit_to_json(const ScalingFit& fit);

/// Flat CSV row of an estimation result (labelled columns R, J_<a>_<b>, ...).
std::pair<std::vector<std::string>, std::vector<std::string>> estimation_to_csv_row(
    const EstimationResult& res);

/// Minimal CSV container: '#' comment lines, one header row, string cells.
/// Comma separated, '.' decimal, LF line endings.
struct CsvTable {
    std::vector<std::string> comments; // without the leading '#'
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const; // -1 when absent
    std::vector<double> numeric_column(const std::string& name) const;
};

std::string csv_to_string(const CsvTable& table);
void write_csv(const CsvTable& table, const std::string& path);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

/// Sweep result as a CSV table (schema "qincompat-sweep v1").
CsvTable sweep_to_csv(const std::vector<SweepRow>& rows, ParamSet selector);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace qincompat

#endif

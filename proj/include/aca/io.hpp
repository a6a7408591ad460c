#pragma once

// CSV tables and the JSON model file.
//
// CSV is locale-independent: ',' separates fields, '.' is the decimal point,
// lines end with '\n'. An optional header row is detected by the presence of
// a non-numeric field in the first line.

#include "aca/aca.hpp"
#include "aca/types.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aca::io {

/// Malformed input file.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Table {
  MatrixXd data;
  /// Column names from the header row; empty when the file had none.
  std::vector<std::string> names;
};

Table read_csv(std::istream& in, std::string_view source = "<input>");
Table read_csv_file(const std::filesystem::path& path);

/// One comma-separated numeric row, e.g. a command-line point.
VectorXd parse_numeric_row(std::string_view line);

/// Shortest-width rendering with 17 significant digits (exact round trip).
std::string format_number(double value);

void write_csv(std::ostream& out, const MatrixXd& data, const std::vector<std::string>& header);
void write_csv_file(const std::filesystem::path& path, const MatrixXd& data, const std::vector<std::string>& header);

/// Names V1..Vd unless `names` already has d entries.
std::vector<std::string> variable_names(const std::vector<std::string>& names, Index d);

inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const AcaModel<double>& model);

/// Strict inverse of model_to_json: unknown or missing keys are rejected and
/// component orthonormality is re-verified.
AcaModel<double> model_from_json(const nlohmann::json& j);

std::string dump_model(const AcaModel<double>& model);
AcaModel<double> load_model_file(const std::filesystem::path& path);
void save_model_file(const std::filesystem::path& path, const AcaModel<double>& model);

std::string to_string(Optimizer algorithm);
Optimizer optimizer_from_string(std::string_view name);

}  // namespace aca::io

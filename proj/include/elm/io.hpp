#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "elm/session.hpp"

namespace elm {

// Reads a numeric CSV whose rows are samples and returns it transposed, one
// column per sample (features x K). Rejects ragged rows and non-numeric cells.
Matrix load_csv_columns(const std::filesystem::path& path, bool skip_header);
Matrix parse_csv_columns(std::string_view text, bool skip_header, std::string_view source = "csv");

// Writes one sample per row from a features x K matrix.
void save_csv_columns(const std::filesystem::path& path, const Matrix& columns);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// On-disk model:
//
//   ELMV1
//   activation <name>
//   l <count> / N <count> / M <count>
//   k0sq <value>
//   variant q|ldl
//   state full|light
//   [x_path <path>] [y_path <path>] [header 0|1]
//
// then one section per matrix, each introduced by "<name> <rows> <cols>" and
// followed by its rows as space-separated values: A, d, W, then Q (variant q)
// or L and D (variant ldl) unless light, then xmin and xmax when the model
// scales its inputs. Sections are separated by blank lines.
struct ModelFile {
  ElmModel model;
  double k0sq = 1.0;
  Variant variant = Variant::ldl;
  std::optional<EngineFactors> factors;  // empty for a light file

  // Training data the model was fitted on, so later commands can find it.
  std::optional<std::string> x_path;
  std::optional<std::string> y_path;
  bool header = false;
};

ModelFile model_file_from_session(const Session& s);

std::string serialize_model(const ModelFile& file, bool light = false);
ModelFile parse_model(std::string_view text);

void save_model(const std::filesystem::path& path, const ModelFile& file, bool light = false);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace elm

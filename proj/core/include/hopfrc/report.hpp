#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hopfrc/features.hpp"
#include "hopfrc/model.hpp"
#include "hopfrc/train.hpp"

namespace hopfrc::harness {

struct Table {
  std::string name;  // written as <name>.csv
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Result of one experiment. Everything except `wall_clock_s` is a pure
/// function of the config and seed.
struct Report {
  using Value = std::variant<double, std::string, std::vector<double>>;

  std::string kind;
  std::string config_hash;
  std::string config_json;
  std::uint64_t seed = 0;

  std::vector<std::pair<std::string, Value>> metrics;  // insertion order is output order
  std::vector<std::string> warnings;
  std::vector<Table> tables;
  std::optional<readout::ConfusionMatrix> confusion;
  std::vector<std::string> class_names;
  std::vector<double> loss_history;
  std::vector<features::FeatureMap> maps;  // exported as maps/<source_id>.pgm
  std::optional<readout::ReadoutModel> model;
  double wall_clock_s = 0.0;

  void set(const std::string& key, Value v);
  /// Throws kContract if absent or not a scalar.
  double number(const std::string& key) const;
  const std::vector<double>& array(const std::string& key) const;
  bool has(const std::string& key) const;
};

/// "key = value" lines; arrays as "[a, b]"; numbers with %.10g.
std::string format_metrics(const Report& r);
std::string format_csv(const Table& t);
/// Rows = true class, columns = predicted class, with a header row.
std::string confusion_csv(const readout::ConfusionMatrix& m, const std::vector<std::string>& class_names);
/// Per-class precision and recall.
Table class_metrics_table(const readout::ConfusionMatrix& m, const std::vector<std::string>& class_names);

/// "<id>.pgm" with every character outside [A-Za-z0-9._-] replaced by '_'.
std::string map_file_name(const std::string& id);

/// Writes metrics.txt, config.json, every table as CSV, confusion.csv,
/// loss_history.csv, maps/*.pgm, model.ckpt and timing.txt (the only file
/// that varies between identical runs). Creates `outdir`; throws kIo when it
/// cannot be written.
void report_emit(const Report& r, const std::filesystem::path& outdir);

}  // namespace hopfrc::harness

#include "hopfrc/report.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

#include "hopfrc/checkpoint.hpp"
#include "hopfrc/error.hpp"

namespace hopfrc::harness {
namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, text.data(), text.size());
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    fail(ErrorKind::kIo, "cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
}

}  // namespace

std::string map_file_name(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return (out.empty() ? "map" : out) + ".pgm";
}

void Report::set(const std::string& key, Value v) {
  for (auto& [k, old] : metrics) {
    if (k == key) {
      old = std::move(v);
      return;
    }
  }
  metrics.emplace_back(key, std::move(v));
}

bool Report::has(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) return true;
  }
  return false;
}

double Report::number(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) {
      if (const auto* d = std::get_if<double>(&v)) return *d;
      fail(ErrorKind::kContract, "report metric '" + key + "' is not a number");
    }
  }
  fail(ErrorKind::kContract, "report has no metric '" + key + "'");
}

const std::vector<double>& Report::array(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) {
      if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
      fail(ErrorKind::kContract, "report metric '" + key + "' is not an array");
    }
  }
  fail(ErrorKind::kContract, "report has no metric '" + key + "'");
}

std::string format_metrics(const Report& r) {
  std::string out;
  out += "kind = " + r.kind + "\n";
  out += "config_hash = " + r.config_hash + "\n";
  out += "seed = " + std::to_string(r.seed) + "\n";
  for (const auto& [key, value] : r.metrics) {
    out += key + " = ";
    if (const auto* d = std::get_if<double>(&value)) {
      out += num(*d);
    } else if (const auto* s = std::get_if<std::string>(&value)) {
      out += *s;
    } else {
      const auto& a = std::get<std::vector<double>>(value);
      out += "[";
      for (std::size_t i = 0; i < a.size(); ++i) out += (i ? ", " : "") + num(a[i]);
      out += "]";
    }
    out += "\n";
  }
  for (const auto& w : r.warnings) out += "warning = " + w + "\n";
  return out;
}

std::string format_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_field(cells[i]);
    out += "\n";
  };
  line(t.header);
  for (const auto& row : t.rows) line(row);
  return out;
}

std::string confusion_csv(const readout::ConfusionMatrix& m, const std::vector<std::string>& class_names) {
  Table t;
  t.header.push_back("true\\predicted");
  for (std::size_t c = 0; c < m.n_classes(); ++c) t.header.push_back(c < class_names.size() ? class_names[c] : std::to_string(c));
  for (std::size_t r = 0; r < m.n_classes(); ++r) {
    std::vector<std::string> row{t.header[r + 1]};
    for (std::size_t c = 0; c < m.n_classes(); ++c) row.push_back(std::to_string(m.at(r, c)));
    t.rows.push_back(std::move(row));
  }
  return format_csv(t);
}

Table class_metrics_table(const readout::ConfusionMatrix& m, const std::vector<std::string>& class_names) {
  Table t{"class_metrics", {"class", "support", "precision", "recall"}, {}};
  for (std::size_t c = 0; c < m.n_classes(); ++c) {
    t.rows.push_back({c < class_names.size() ? class_names[c] : std::to_string(c), std::to_string(m.row_sum(c)),
                      num(m.precision(c)), num(m.recall(c))});
  }
  return t;
}

void report_emit(const Report& r, const std::filesystem::path& outdir) {
  make_dir(outdir);
  write_text(outdir / "metrics.txt", format_metrics(r));
  write_text(outdir / "config.json", r.config_json + "\n");
  for (const auto& t : r.tables) write_text(outdir / (t.name + ".csv"), format_csv(t));
  if (r.confusion) {
    write_text(outdir / "confusion.csv", confusion_csv(*r.confusion, r.class_names));
    write_text(outdir / "class_metrics.csv", format_csv(class_metrics_table(*r.confusion, r.class_names)));
  }
  if (!r.loss_history.empty()) write_text(outdir / "loss_history.csv", readout::loss_history_csv(r.loss_history));
  if (!r.maps.empty()) {
    make_dir(outdir / "maps");
    for (const auto& m : r.maps) {
      const auto pgm = features::export_pgm(m);
      write_file(outdir / "maps" / map_file_name(m.source_id), pgm.data(), pgm.size());
    }
  }
  if (r.model) readout::save_checkpoint(*r.model, outdir / "model.ckpt");
  write_text(outdir / "timing.txt", "wall_clock_s = " + num(r.wall_clock_s) + "\n");
}

}  // namespace hopfrc::harness

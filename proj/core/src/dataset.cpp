#include "hopfrc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "hopfrc/error.hpp"
#include "hopfrc/wav.hpp"

namespace hopfrc::audio {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kUnassigned: return "unassigned";
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
  }
  return "unassigned";
}

void DatasetManifest::validate() const {
  for (const auto& e : entries) {
    require(e.label >= 0 && static_cast<std::size_t>(e.label) < class_names.size(),
            "DatasetManifest: label " + std::to_string(e.label) + " out of range for entry '" + e.id + "'");
  }
}

std::vector<std::size_t> DatasetManifest::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (const auto& e : entries) ++counts[static_cast<std::size_t>(e.label)];
  return counts;
}

DatasetManifest split_dataset(const DatasetManifest& manifest, double train_fraction,
                              std::uint64_t seed, std::size_t min_per_class) {
  manifest.validate();
  require(train_fraction >= 0.0 && train_fraction <= 1.0, "split_dataset: train_fraction must be in [0, 1]");
  DatasetManifest out = manifest;
  out.seed = seed;

  std::vector<std::vector<std::size_t>> by_class(manifest.class_names.size());
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    by_class[static_cast<std::size_t>(manifest.entries[i].label)].push_back(i);
  }
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    if (idx.empty()) continue;
    require(idx.size() >= min_per_class, "split_dataset: class '" + manifest.class_names[c] + "' has " +
                                             std::to_string(idx.size()) + " entries, need at least " +
                                             std::to_string(min_per_class));
    // Fisher-Yates with an explicit uniform draw so the permutation does not
    // depend on the standard library's shuffle implementation.
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(idx[i], idx[j]);
    }
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out.entries[idx[k]].split = k < n_train ? Split::kTrain : Split::kTest;
    }
  }
  return out;
}

DatasetManifest read_manifest(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) fail(ErrorKind::kIo, "read_manifest: cannot open " + csv_path.string());
  const auto base = csv_path.parent_path();

  DatasetManifest m;
  bool declared_classes = false;
  bool header_seen = false;
  std::string line;
  std::size_t line_no = 0;
  auto class_index = [&](const std::string& name) -> int {
    auto it = std::find(m.class_names.begin(), m.class_names.end(), name);
    if (it != m.class_names.end()) return static_cast<int>(it - m.class_names.begin());
    if (declared_classes) {
      throw ParseError("read_manifest: undeclared class '" + name + "' on line " + std::to_string(line_no), line_no);
    }
    m.class_names.push_back(name);
    return static_cast<int>(m.class_names.size() - 1);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto colon = t.find(':');
      if (colon != std::string::npos && trim(std::string_view(t).substr(1, colon - 1)) == "classes") {
        for (auto& name : split_commas(std::string_view(t).substr(colon + 1))) {
          if (!name.empty()) m.class_names.push_back(name);
        }
        declared_classes = !m.class_names.empty();
      }
      continue;
    }
    const auto fields = split_commas(t);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() >= 2 && fields[0] == "path" && fields[1] == "label") continue;
    }
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("read_manifest: expected 'path,label' on line " + std::to_string(line_no), line_no);
    }
    DatasetEntry e;
    std::filesystem::path p = fields[0];
    e.source = p.is_relative() ? base / p : p;
    e.id = fields[0];
    e.label = class_index(fields[1]);
    if (fields.size() >= 3 && !fields[2].empty()) {
      if (fields[2] == "train") e.split = Split::kTrain;
      else if (fields[2] == "test") e.split = Split::kTest;
      else if (fields[2] == "unassigned") e.split = Split::kUnassigned;
      else throw ParseError("read_manifest: bad split tag '" + fields[2] + "' on line " + std::to_string(line_no), line_no);
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

std::string format_manifest(const DatasetManifest& manifest) {
  std::ostringstream out;
  out << "# classes:";
  for (std::size_t i = 0; i < manifest.class_names.size(); ++i) {
    out << (i ? "," : " ") << manifest.class_names[i];
  }
  out << "\npath,label,split\n";
  for (const auto& e : manifest.entries) {
    out << e.id << ',' << manifest.class_names[static_cast<std::size_t>(e.label)] << ','
        << to_string(e.split) << '\n';
  }
  return out.str();
}

AudioClip load_entry(const DatasetEntry& entry, int synth_rate) {
  if (const auto* path = std::get_if<std::filesystem::path>(&entry.source)) {
    return read_wav_file(*path);
  }
  return synthesize(std::get<SynthSpec>(entry.source), synth_rate);
}

std::vector<AudioClip> segment(const AudioClip& clip, double window_s) {
  require(window_s > 0.0, "segment: window must be > 0");
  const auto len = static_cast<std::size_t>(std::llround(window_s * clip.rate));
  require(len > 0, "segment: window shorter than one sample");
  std::vector<AudioClip> out;
  for (std::size_t start = 0; start + len <= clip.samples.size(); start += len) {
    AudioClip w;
    w.rate = clip.rate;
    w.normalized = clip.normalized;
    w.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(start),
                     clip.samples.begin() + static_cast<std::ptrdiff_t>(start + len));
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace hopfrc::audio

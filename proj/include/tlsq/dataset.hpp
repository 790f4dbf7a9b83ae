#pragma once

// Measured (or simulated) Q versus accelerating-field data.

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tlsq/csv.hpp"
#include "tlsq/error.hpp"

namespace tlsq {

struct QPoint {
  double e_acc;  // V/m
  double q;
};

// Points above this accelerating field are excluded from fits by default,
// where an additional non-TLS loss mechanism takes over.
inline constexpr double kDefaultEaccMax = 1e6;

inline constexpr std::size_t kMinFitPoints = 6;

struct Dataset {
  std::vector<QPoint> points;
  double temperature = 1.5;  // K
  double frequency = 1.3e9;  // Hz
  double e_acc_max_included = kDefaultEaccMax;
  std::string label;
  // Other '#' lines (free text or unrecognised key=value), verbatim without
  // the '#', in file order. Written back unchanged.
  std::vector<std::string> comments;

  std::vector<QPoint> included() const {
    std::vector<QPoint> out;
    for (const auto& p : points)
      if (p.e_acc <= e_acc_max_included) out.push_back(p);
    return out;
  }

  void validate() const {
    if (!(temperature > 0.0)) throw InvariantError("dataset: temperature must be positive");
    if (!(frequency > 0.0)) throw InvariantError("dataset: frequency must be positive");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!(points[i].e_acc >= 0.0))
        throw InvariantError("dataset: e_acc must be >= 0 (point " + std::to_string(i) + ")");
      if (!(points[i].q > 0.0))
        throw InvariantError("dataset: q must be > 0 (point " + std::to_string(i) + ")");
      if (i > 0 && points[i].e_acc < points[i - 1].e_acc)
        throw InvariantError("dataset: points must be sorted by ascending e_acc");
    }
  }
};

// Schema: `# temperature_K=`, `# frequency_Hz=`, `# label=` headers and rows
// e_acc_V_per_m,q. Numbers are written in shortest round-trip form.
inline void write_dataset(std::ostream& out, const Dataset& data) {
  for (const auto& line : data.comments) out << '#' << line << '\n';
  out << fmt::format("# temperature_K={}\n# frequency_Hz={}\n# label={}\n", data.temperature,
                     data.frequency, data.label);
  out << "e_acc_V_per_m,q\n";
  for (const auto& p : data.points) out << fmt::format("{},{}\n", p.e_acc, p.q);
}

inline Dataset read_dataset(std::istream& in) {
  const csv::Document doc = csv::parse(in, 2);
  Dataset data;
  data.temperature = csv::header_double(doc, "temperature_K");
  data.frequency = csv::header_double(doc, "frequency_Hz");
  if (const std::string* label = doc.find("label")) data.label = *label;
  for (std::size_t i = 0; i < doc.preamble.size(); ++i) {
    const auto& key = doc.preamble_keys[i];
    if (key != "temperature_K" && key != "frequency_Hz" && key != "label")
      data.comments.push_back(doc.preamble[i]);
  }
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const QPoint p{doc.rows[i][0], doc.rows[i][1]};
    if (!(p.e_acc >= 0.0)) throw ParseError("e_acc must be non-negative", doc.row_lines[i], 1);
    if (!(p.q > 0.0)) throw ParseError("q must be positive", doc.row_lines[i], 2);
    if (!data.points.empty() && p.e_acc < data.points.back().e_acc)
      throw ParseError("rows must be sorted by ascending e_acc", doc.row_lines[i], 1);
    data.points.push_back(p);
  }
  data.validate();
  return data;
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset '" + path + "'", 0, 0);
  return read_dataset(in);
}

}  // namespace tlsq

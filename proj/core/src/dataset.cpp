#include "qfl/dataset.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qfl {

void Dataset::append(std::span<const double> row, int label) {
  if (static_cast<int>(row.size()) != dim) {
    throw std::invalid_argument("Dataset::append: row dimension mismatch");
  }
  if (label != 0 && label != 1) {
    throw std::invalid_argument("Dataset::append: label must be 0 or 1");
  }
  features.insert(features.end(), row.begin(), row.end());
  labels.push_back(label);
}

Dataset load_feature_csv(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_feature_csv: cannot open " + path);
  }
  Dataset data;
  data.dim = dim;
  std::string line;
  bool first_line = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first_line) {
      first_line = false;
      // Header detection: a line whose first field does not parse as a number.
      char* end = nullptr;
      std::strtod(line.c_str(), &end);
      if (end == line.c_str()) continue;
    }
    std::vector<double> row;
    row.reserve(dim);
    const char* p = line.c_str();
    char* end = nullptr;
    for (int i = 0; i < dim; ++i) {
      const double v = std::strtod(p, &end);
      if (end == p) {
        throw std::runtime_error("load_feature_csv: malformed row in " + path);
      }
      row.push_back(v);
      p = end;
      if (*p == ',') ++p;
    }
    const long label = std::strtol(p, &end, 10);
    if (end == p || (label != 0 && label != 1)) {
      throw std::runtime_error("load_feature_csv: bad label in " + path);
    }
    data.append(row, static_cast<int>(label));
  }
  return data;
}

void save_feature_csv(const Dataset& data, const std::string& path, bool header) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_feature_csv: cannot open " + path);
  }
  if (header) {
    for (int i = 0; i < data.dim; ++i) {
      out << 'f' << i << ',';
    }
    out << "label\n";
  }
  char buf[32];
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto row = data.row(s);
    for (int i = 0; i < data.dim; ++i) {
      std::snprintf(buf, sizeof buf, "%.9g", row[i]);
      out << buf << ',';
    }
    out << data.labels[s] << '\n';
  }
  if (!out) {
    throw std::runtime_error("save_feature_csv: write failed for " + path);
  }
}

Dataset subset(const Dataset& data, std::span<const std::size_t> indices) {
  Dataset out;
  out.dim = data.dim;
  out.features.reserve(indices.size() * data.dim);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    out.append(data.row(i), data.labels[i]);
  }
  return out;
}

}  // namespace qfl

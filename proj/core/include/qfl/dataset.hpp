#pragma once

#include <span>
#include <string>
#include <vector>

#include "qfl/model.hpp"

namespace qfl {

// Feature rows with binary labels. Features are stored row-major.
struct Dataset {
  int dim = kFeatureDim;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dim, dim);
  }
  void append(std::span<const double> row, int label);
};

// Feature file format: one row per sample, dim comma-separated decimal floats
// followed by an integer label in {0,1}. An optional header line is skipped.
Dataset load_feature_csv(const std::string& path, int dim = kFeatureDim);
void save_feature_csv(const Dataset& data, const std::string& path, bool header = true);

Dataset subset(const Dataset& data, std::span<const std::size_t> indices);

}  // namespace qfl

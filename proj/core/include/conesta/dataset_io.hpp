#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>

#include "conesta/simulation.hpp"

namespace conesta {

inline constexpr int kDatasetFormatVersion = 1;

// Writes X.csv, y.csv, beta_star.csv, e.csv, certificate.csv and meta.json.
// Numbers use 17 significant digits; no timestamps are written.
void write_dataset(const std::filesystem::path& dir, const LabeledDataset& dataset);

// Data read back from a directory. Only X.csv and y.csv are mandatory.
struct LoadedData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::optional<Eigen::VectorXd> beta_star;
  std::optional<Eigen::VectorXd> e;
  std::optional<Eigen::VectorXd> certificate;
  std::optional<double> f_star;
  std::optional<PenaltyWeights> weights;
  std::optional<SimulationDesign> design;
};

LoadedData read_dataset(const std::filesystem::path& dir);

// Reads back a full simulated dataset (all files present) over the 1D chain.
LabeledDataset load_labeled_dataset(const std::filesystem::path& dir);

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& v);

}  // namespace conesta

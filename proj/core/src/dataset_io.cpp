#include "conesta/dataset_io.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conesta/errors.hpp"
#include "conesta/trace_io.hpp"

namespace conesta {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

std::vector<std::vector<double>> read_rows(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                              field + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) +
                            ": inconsistent number of columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw InvalidArgument(path.string() + ": empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Eigen::VectorXd read_vector_csv(const fs::path& path) {
  const auto rows = read_rows(path);
  // One value per line, or a single comma-separated line.
  if (rows.size() == 1) return Eigen::Map<const Eigen::VectorXd>(rows[0].data(), static_cast<Eigen::Index>(rows[0].size()));
  Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 1) throw InvalidArgument(path.string() + ": expected one value per line");
    v[static_cast<Eigen::Index>(i)] = rows[i][0];
  }
  return v;
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m) {
  auto out = open_for_write(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_vector_csv(const fs::path& path, const Eigen::VectorXd& v) {
  auto out = open_for_write(path);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

namespace {

json weights_json(const PenaltyWeights& w) {
  return json{{"l1", w.l1}, {"l2", w.l2}, {"tv", w.tv}};
}

PenaltyWeights weights_from_json(const json& j) {
  PenaltyWeights w;
  w.l1 = j.at("l1").get<double>();
  w.l2 = j.at("l2").get<double>();
  w.tv = j.at("tv").get<double>();
  return w;
}

}  // namespace

void write_dataset(const fs::path& dir, const LabeledDataset& dataset) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidArgument("cannot create directory " + dir.string() + ": " + ec.message());

  write_matrix_csv(dir / "X.csv", dataset.X);
  write_vector_csv(dir / "y.csv", dataset.y);
  write_vector_csv(dir / "beta_star.csv", dataset.beta_star);
  write_vector_csv(dir / "e.csv", dataset.e);
  write_vector_csv(dir / "certificate.csv", dataset.certificate);

  const auto& d = dataset.design;
  json meta;
  meta["format_version"] = kDatasetFormatVersion;
  meta["design"] = json{{"n", d.n},
                        {"p", d.p},
                        {"shape", json::array({d.p, 1, 1})},
                        {"correlation", to_string(d.correlation)},
                        {"dispersion", correlation_dispersion(d.correlation)},
                        {"sparsity", d.sparsity},
                        {"snr", d.snr},
                        {"seed", d.seed},
                        {"flat_group_subgradient", to_string(d.flat_groups)}};
  meta["weights"] = weights_json(d.weights);
  meta["rho"] = format_double(dataset.rho);
  meta["f_star"] = format_double(dataset.f_star);
  meta["kkt_residual"] = format_double(dataset.kkt_residual);
  meta["snr_definition"] = "residual scaled to ||e||_2 = 1/snr";
  meta["structure"] = "tv_chain";

  auto out = open_for_write(dir / "meta.json");
  out << meta.dump(2) << '\n';
}

LoadedData read_dataset(const fs::path& dir) {
  LoadedData data;
  data.X = read_matrix_csv(dir / "X.csv");
  data.y = read_vector_csv(dir / "y.csv");
  if (data.y.size() != data.X.rows()) {
    throw InvalidArgument("dataset: y has " + std::to_string(data.y.size()) + " entries, X has " +
                          std::to_string(data.X.rows()) + " rows");
  }
  const auto optional_vector = [&](const char* name, Eigen::Index expected)
      -> std::optional<Eigen::VectorXd> {
    const auto path = dir / name;
    if (!fs::exists(path)) return std::nullopt;
    Eigen::VectorXd v = read_vector_csv(path);
    if (expected >= 0 && v.size() != expected) {
      throw InvalidArgument("dataset: " + std::string(name) + " has the wrong length");
    }
    return v;
  };
  data.beta_star = optional_vector("beta_star.csv", data.X.cols());
  data.e = optional_vector("e.csv", data.X.rows());
  data.certificate = optional_vector("certificate.csv", -1);

  const auto meta_path = dir / "meta.json";
  if (fs::exists(meta_path)) {
    std::ifstream in(meta_path);
    json meta;
    try {
      in >> meta;
      if (meta.contains("weights")) data.weights = weights_from_json(meta.at("weights"));
      if (meta.contains("f_star")) data.f_star = std::stod(meta.at("f_star").get<std::string>());
      if (meta.contains("design")) {
        const auto& jd = meta.at("design");
        SimulationDesign design;
        design.n = jd.at("n").get<std::size_t>();
        design.p = jd.at("p").get<std::size_t>();
        design.correlation = parse_correlation(jd.at("correlation").get<std::string>());
        design.sparsity = jd.at("sparsity").get<double>();
        design.snr = jd.at("snr").get<double>();
        design.seed = jd.at("seed").get<std::uint64_t>();
        design.flat_groups =
            parse_flat_group_subgradient(jd.value("flat_group_subgradient", std::string("zero")));
        if (data.weights) design.weights = *data.weights;
        data.design = design;
      }
    } catch (const json::exception& e) {
      throw InvalidArgument("dataset: malformed meta.json: " + std::string(e.what()));
    }
  }
  return data;
}

LabeledDataset load_labeled_dataset(const fs::path& dir) {
  LoadedData data = read_dataset(dir);
  if (!data.beta_star || !data.e || !data.certificate || !data.design || !data.f_star) {
    throw InvalidArgument("dataset: " + dir.string() + " is not a complete simulated dataset");
  }
  LabeledDataset d;
  d.X = std::move(data.X);
  d.y = std::move(data.y);
  d.beta_star = std::move(*data.beta_star);
  d.e = std::move(*data.e);
  d.certificate = std::move(*data.certificate);
  d.design = *data.design;
  d.f_star = *data.f_star;
  d.op = std::make_shared<const StructureOperator>(
      build_tv_operator(GridMask::chain(static_cast<std::size_t>(d.X.cols()))));
  if (d.certificate.size() != static_cast<Eigen::Index>(d.op->n_rows())) {
    throw InvalidArgument("dataset: certificate length does not match the operator");
  }
  d.kkt_residual = verify_kkt(d);
  return d;
}

}  // namespace conesta

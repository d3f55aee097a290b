#include "hke/io.h"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hke {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw StageError("report", "cannot write " + path);
  out << content;
}

void write_matrix_csv(const std::string& path, const Mat& m) {
  std::ostringstream ss;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) ss << ',';
      ss << format_double(m(i, j));
    }
    ss << '\n';
  }
  write_text(path, ss.str());
}

Mat read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("ingest", "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (!rows.empty() && vals.size() != rows.front().size())
      throw InputError("ingest", "ragged CSV " + path);
    rows.push_back(std::move(vals));
  }
  Mat m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_spectrum(const std::string& csv_path, const std::string& json_path,
                    const Spectrum& spec) {
  Mat table(spec.size(), 1 + spec.fields.rows());
  table.col(0) = spec.eigenvalues;
  table.rightCols(spec.fields.rows()) = spec.fields.transpose();
  write_matrix_csv(csv_path, table);

  json hdr;
  hdr["N"] = spec.num_vertices;
  hdr["n"] = spec.n;
  hdr["m"] = spec.size();
  hdr["bandwidth"] = spec.bandwidth;
  hdr["calibration"] = spec.calibration;
  write_text(json_path, hdr.dump(2) + "\n");
}

Spectrum read_spectrum(const std::string& csv_path, const std::string& json_path) {
  std::ifstream jin(json_path);
  if (!jin) throw InputError("ingest", "cannot open " + json_path);
  json hdr = json::parse(jin);

  Spectrum spec;
  spec.num_vertices = hdr.at("N").get<int>();
  spec.n = hdr.at("n").get<int>();
  spec.bandwidth = hdr.at("bandwidth").get<double>();
  spec.calibration = hdr.at("calibration").get<double>();

  Mat table = read_matrix_csv(csv_path);
  const int m = static_cast<int>(table.rows());
  if (table.cols() != 1 + spec.num_vertices * spec.n)
    throw InputError("ingest", "spectrum CSV does not match its header");
  spec.eigenvalues = table.col(0);
  spec.fields = table.rightCols(table.cols() - 1).transpose();
  spec.residuals = Vec::Zero(m);
  spec.mass = Vec::Ones(spec.num_vertices); // not persisted; callers re-derive
  return spec;
}

void write_hs_field_csv(const std::string& path, const Vec& field) {
  std::ostringstream ss;
  for (int i = 0; i < field.size(); ++i)
    ss << i << ',' << format_double(field(i)) << '\n';
  write_text(path, ss.str());
}

void write_net_json(const std::string& path, const DeltaNet& net, const Partition& part) {
  json j;
  j["delta"] = net.delta;
  j["covering_radius"] = net.covering_radius;
  j["centers"] = net.centers;
  j["assignment"] = part.assignment;
  j["masses"] = std::vector<double>(part.masses.data(), part.masses.data() + part.masses.size());
  write_text(path, j.dump(2) + "\n");
}

void write_embedding(const std::string& csv_path, const std::string& sidecar_path,
                     const EmbeddedCloud& cloud) {
  write_matrix_csv(csv_path, cloud.coords);
  json j;
  j["t"] = cloud.config.t;
  j["m"] = cloud.truncation;
  j["delta"] = cloud.config.delta;
  j["variant"] = cloud.config.variant;
  j["A"] = cloud.config.A;
  j["Ve"] = cloud.Ve;
  j["prefactor"] = cloud.prefactor;
  j["N0"] = static_cast<int>(cloud.coords.cols());
  j["column_center"] = cloud.column_center;
  j["column_weights"] = std::vector<double>(cloud.column_weights.data(),
                                            cloud.column_weights.data() +
                                                cloud.column_weights.size());
  write_text(sidecar_path, j.dump(2) + "\n");
}

} // namespace hke

#pragma once

#include "hke/embedding.h"
#include "hke/eigensolver.h"
#include "hke/net_partition.h"

#include <string>

namespace hke {

// All numeric output uses %.17g so reruns are byte-identical.
void write_matrix_csv(const std::string& path, const Mat& m);
Mat read_matrix_csv(const std::string& path);

// spectrum.csv: one eigenpair per row (eigenvalue, then N*n coefficients),
// plus a JSON header with {N, n, m, bandwidth, calibration}.
void write_spectrum(const std::string& csv_path, const std::string& json_path,
                    const Spectrum& spec);
Spectrum read_spectrum(const std::string& csv_path, const std::string& json_path);

void write_hs_field_csv(const std::string& path, const Vec& field);

void write_net_json(const std::string& path, const DeltaNet& net, const Partition& part);

// embedding.csv: one row per vertex, N0 columns; sidecar carries the scaling.
void write_embedding(const std::string& csv_path, const std::string& sidecar_path,
                     const EmbeddedCloud& cloud);

void write_text(const std::string& path, const std::string& content);

std::string format_double(double v);

} // namespace hke

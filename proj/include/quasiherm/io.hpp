#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "quasiherm/dynamics.hpp"
#include "quasiherm/flow.hpp"
#include "quasiherm/matrixkit.hpp"
#include "quasiherm/metric.hpp"
#include "quasiherm/models.hpp"

namespace quasiherm::io {

using Json = nlohmann::json;

/// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

// {"rows": n, "cols": m, "re": [...], "im": [...]}, row-major.
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

// {"re": [...], "im": [...]}
Json vector_to_json(const CVector& v);
CVector vector_from_json(const Json& j);

Json complex_to_json(Complex z);  // {"re": x, "im": y}
Complex complex_from_json(const Json& j);

// {"kind": "bang"|"cyclic"|"crunchbang", "n": N}
Json model_to_json(const ModelSpec& spec);
ModelSpec model_from_json(const Json& j);

Json metric_to_json(const MetricResult& mr);
MetricResult metric_from_json(const Json& j);
Json dyson_to_json(const DysonMap& dm);
DysonMap dyson_from_json(const Json& j);
Json jordan_to_json(const JordanProfile& jp);

/// Header: t, re_1..re_N, im_1..im_N, real_1..real_N; one row per grid point.
std::string flow_to_csv(const FlowTrace& trace);
/// Inverse of flow_to_csv (markers are not part of the CSV).
FlowTrace flow_from_csv(const std::string& text);

/// Sidecar for a flow CSV: markers and skipped grid points.
Json markers_to_json(const FlowTrace& trace);

/// Matrix trajectory: header t, re_1_1.., im_1_1.. (row-major flattening).
std::string matrix_trajectory_csv(const std::vector<double>& times,
                                  const std::vector<CMatrix>& states);
/// State-pair trajectory: t, ket re/im, ketket re/im, overlap re/im.
std::string state_trajectory_csv(const std::vector<double>& times,
                                 const std::vector<StatePair>& states);

/// A family given by samples (t_k, Q_k), linearly interpolated in t.
struct MatrixSamples {
    std::vector<double> times;
    std::vector<CMatrix> matrices;

    CMatrix operator()(double t) const;
    double t_min() const { return times.front(); }
    double t_max() const { return times.back(); }
};

/// [{"t": t, "matrix": {...}}, ...] with strictly increasing t.
MatrixSamples samples_from_json(const Json& j);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace quasiherm::io

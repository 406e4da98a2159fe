#include "quasiherm/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace quasiherm::io {

std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

double parse_number(const std::string& s) {
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw InputError("csv: cannot parse number '" + s + "'");
    }
    return x;
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw InputError(std::string("json: missing field '") + key + "'");
    }
    return j.at(key);
}

std::vector<double> number_array(const Json& j, const char* key) {
    const Json& a = field(j, key);
    if (!a.is_array()) throw InputError(std::string("json: field '") + key + "' must be an array");
    std::vector<double> out;
    out.reserve(a.size());
    for (const auto& x : a) {
        if (!x.is_number()) {
            throw InputError(std::string("json: field '") + key + "' must hold numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace

Json matrix_to_json(const CMatrix& m) {
    Json re = Json::array(), im = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            re.push_back(m(i, j).real());
            im.push_back(m(i, j).imag());
        }
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

CMatrix matrix_from_json(const Json& j) {
    const Json& rows_j = field(j, "rows");
    const Json& cols_j = field(j, "cols");
    if (!rows_j.is_number_integer() || !cols_j.is_number_integer()) {
        throw InputError("matrix json: rows and cols must be integers");
    }
    const auto rows = rows_j.get<long long>();
    const auto cols = cols_j.get<long long>();
    if (rows <= 0 || cols <= 0) throw InputError("matrix json: rows and cols must be positive");
    const auto re = number_array(j, "re");
    // "im" may be omitted for real matrices.
    const auto im = j.contains("im") ? number_array(j, "im") : std::vector<double>(re.size(), 0.0);
    const auto count = static_cast<std::size_t>(rows * cols);
    if (re.size() != count || im.size() != count) {
        throw InputError("matrix json: expected " + std::to_string(count) + " entries in re/im");
    }
    CMatrix m(rows, cols);
    for (long long i = 0; i < rows; ++i)
        for (long long k = 0; k < cols; ++k) m(i, k) = Complex(re[i * cols + k], im[i * cols + k]);
    require_finite(m, "matrix json");
    return m;
}

Json vector_to_json(const CVector& v) {
    Json re = Json::array(), im = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        re.push_back(v(i).real());
        im.push_back(v(i).imag());
    }
    return Json{{"re", re}, {"im", im}};
}

CVector vector_from_json(const Json& j) {
    const auto re = number_array(j, "re");
    const auto im = j.contains("im") ? number_array(j, "im") : std::vector<double>(re.size(), 0.0);
    if (re.empty() || re.size() != im.size()) {
        throw InputError("vector json: re and im must be non-empty and of equal length");
    }
    CVector v(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) v(i) = Complex(re[i], im[i]);
    if (!v.allFinite()) throw InputError("vector json: non-finite entries");
    return v;
}

Json complex_to_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Complex complex_from_json(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    const Json& re = field(j, "re");
    const double im = j.contains("im") ? j.at("im").get<double>() : 0.0;
    return {re.get<double>(), im};
}

Json model_to_json(const ModelSpec& spec) {
    return Json{{"kind", std::string(kind_name(spec.kind))}, {"n", spec.dim}};
}

ModelSpec model_from_json(const Json& j) {
    const Json& kind = field(j, "kind");
    if (!kind.is_string()) throw InputError("model json: kind must be a string");
    const ModelKind k = parse_model_kind(kind.get<std::string>());
    int n = kCrunchBangDim;
    if (j.contains("n")) {
        if (!j.at("n").is_number_integer()) throw InputError("model json: n must be an integer");
        n = j.at("n").get<int>();
    } else if (k != ModelKind::CrunchBang) {
        throw InputError("model json: missing field 'n'");
    }
    return make_model(k, n);
}

Json metric_to_json(const MetricResult& mr) {
    return Json{{"theta", matrix_to_json(mr.theta)},
                {"kappa", mr.kappa},
                {"residual", mr.residual},
                {"min_eig", mr.min_eig},
                {"max_eig", mr.max_eig},
                {"positive", mr.positive},
                {"condition", mr.condition},
                {"degraded", mr.degraded}};
}

MetricResult metric_from_json(const Json& j) {
    MetricResult mr;
    mr.theta = matrix_from_json(field(j, "theta"));
    mr.kappa = number_array(j, "kappa");
    mr.residual = field(j, "residual").get<double>();
    mr.min_eig = field(j, "min_eig").get<double>();
    mr.max_eig = field(j, "max_eig").get<double>();
    mr.positive = field(j, "positive").get<bool>();
    mr.condition = field(j, "condition").get<double>();
    mr.degraded = field(j, "degraded").get<bool>();
    return mr;
}

Json dyson_to_json(const DysonMap& dm) {
    return Json{{"omega", matrix_to_json(dm.omega)},
                {"omega_inv", matrix_to_json(dm.omega_inv)},
                {"cond", dm.cond}};
}

DysonMap dyson_from_json(const Json& j) {
    return DysonMap{matrix_from_json(field(j, "omega")), matrix_from_json(field(j, "omega_inv")),
                    field(j, "cond").get<double>()};
}

Json jordan_to_json(const JordanProfile& jp) {
    return Json{{"eigenvalue", complex_to_json(jp.eigenvalue)},
                {"block_sizes", jp.block_sizes},
                {"rank_sequence", jp.rank_sequence},
                {"algebraic_multiplicity", jp.algebraic_multiplicity()}};
}

std::string flow_to_csv(const FlowTrace& trace) {
    const std::size_t n = trace.branches();
    std::ostringstream out;
    out << "t";
    for (std::size_t i = 1; i <= n; ++i) out << ",re_" << i;
    for (std::size_t i = 1; i <= n; ++i) out << ",im_" << i;
    for (std::size_t i = 1; i <= n; ++i) out << ",real_" << i;
    out << "\n";
    for (std::size_t k = 0; k < trace.steps(); ++k) {
        out << format_number(trace.times[k]);
        for (std::size_t i = 0; i < n; ++i) out << ',' << format_number(trace.curves[i][k].real());
        for (std::size_t i = 0; i < n; ++i) out << ',' << format_number(trace.curves[i][k].imag());
        for (std::size_t i = 0; i < n; ++i) out << ',' << (trace.reality[i][k] ? '1' : '0');
        out << "\n";
    }
    return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

FlowTrace flow_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InputError("flow csv: empty input");
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "t" || (header.size() - 1) % 3 != 0) {
        throw InputError("flow csv: malformed header");
    }
    const std::size_t n = (header.size() - 1) / 3;
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = std::to_string(i + 1);
        if (header[1 + i] != "re_" + idx || header[1 + n + i] != "im_" + idx ||
            header[1 + 2 * n + i] != "real_" + idx) {
            throw InputError("flow csv: unexpected column names in header");
        }
    }
    FlowTrace trace;
    trace.curves.assign(n, {});
    trace.reality.assign(n, {});
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw InputError("flow csv: row " + std::to_string(row) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
        }
        trace.times.push_back(parse_number(cells[0]));
        for (std::size_t i = 0; i < n; ++i) {
            trace.curves[i].emplace_back(parse_number(cells[1 + i]), parse_number(cells[1 + n + i]));
            const auto& flag = cells[1 + 2 * n + i];
            if (flag != "0" && flag != "1") throw InputError("flow csv: reality flag must be 0/1");
            trace.reality[i].push_back(flag == "1");
        }
    }
    return trace;
}

namespace {

const char* marker_kind_name(MarkerKind kind) {
    switch (kind) {
        case MarkerKind::Cluster: return "cluster";
        case MarkerKind::Discontinuity: return "discontinuity";
        case MarkerKind::SolverFailure: return "solver_failure";
    }
    return "unknown";
}

}  // namespace

Json markers_to_json(const FlowTrace& trace) {
    Json markers = Json::array();
    for (const auto& m : trace.markers) {
        markers.push_back(
            Json{{"time", m.time}, {"multiplicity", m.multiplicity}, {"kind", marker_kind_name(m.kind)}});
    }
    return Json{{"markers", markers}, {"skipped_times", trace.skipped_times}};
}

std::string matrix_trajectory_csv(const std::vector<double>& times,
                                  const std::vector<CMatrix>& states) {
    if (times.size() != states.size() || states.empty()) {
        throw InputError("trajectory csv: times and states must be non-empty and aligned");
    }
    const auto rows = states.front().rows();
    const auto cols = states.front().cols();
    std::ostringstream out;
    out << "t";
    for (const char* part : {"re", "im"})
        for (Eigen::Index i = 1; i <= rows; ++i)
            for (Eigen::Index j = 1; j <= cols; ++j) out << ',' << part << '_' << i << '_' << j;
    out << "\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << format_number(times[k]);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) out << ',' << format_number(states[k](i, j).real());
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) out << ',' << format_number(states[k](i, j).imag());
        out << "\n";
    }
    return out.str();
}

std::string state_trajectory_csv(const std::vector<double>& times,
                                 const std::vector<StatePair>& states) {
    if (times.size() != states.size() || states.empty()) {
        throw InputError("trajectory csv: times and states must be non-empty and aligned");
    }
    const auto n = states.front().ket.size();
    std::ostringstream out;
    out << "t";
    for (const char* vec : {"ket", "ketket"})
        for (const char* part : {"re", "im"})
            for (Eigen::Index i = 1; i <= n; ++i) out << ',' << vec << '_' << part << '_' << i;
    out << ",overlap_re,overlap_im\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << format_number(times[k]);
        for (const CVector* v : {&states[k].ket, &states[k].ketket}) {
            for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_number((*v)(i).real());
            for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_number((*v)(i).imag());
        }
        const Complex ov = states[k].overlap();
        out << ',' << format_number(ov.real()) << ',' << format_number(ov.imag()) << "\n";
    }
    return out.str();
}

CMatrix MatrixSamples::operator()(double t) const {
    if (!(t >= times.front() && t <= times.back())) {
        throw DomainError("matrix samples: t = " + format_number(t) + " outside [" +
                          format_number(times.front()) + ", " + format_number(times.back()) + "]");
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.end()) return matrices.back();
    const auto hi = static_cast<std::size_t>(it - times.begin());
    const auto lo = hi - 1;
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    return (1.0 - w) * matrices[lo] + w * matrices[hi];
}

MatrixSamples samples_from_json(const Json& j) {
    if (!j.is_array() || j.size() < 2) {
        throw InputError("matrix samples: expected an array of at least two {t, matrix} objects");
    }
    MatrixSamples s;
    for (const auto& item : j) {
        const double t = field(item, "t").get<double>();
        CMatrix m = matrix_from_json(field(item, "matrix"));
        require_square(m, "matrix samples");
        if (!s.times.empty()) {
            if (!(t > s.times.back())) {
                throw InputError("matrix samples: times must be strictly increasing");
            }
            require_same_shape(s.matrices.front(), m, "matrix samples");
        }
        s.times.push_back(t);
        s.matrices.push_back(std::move(m));
    }
    return s;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw InputError("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw InputError("cannot move output into place at '" + path.string() + "': " +
                         ec.message());
    }
}

}  // namespace quasiherm::io

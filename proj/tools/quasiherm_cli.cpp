// quasiherm command-line front end.
//
// Exit status: 0 success, 1 domain error (broken phase, no EP, ...),
// 2 input error (bad flags, unreadable files, malformed JSON).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <boost/version.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include "quasiherm/dynamics.hpp"
#include "quasiherm/flow.hpp"
#include "quasiherm/io.hpp"
#include "quasiherm/metric.hpp"
#include "quasiherm/models.hpp"

#ifndef QUASIHERM_VERSION
#define QUASIHERM_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace quasiherm;
using io::Json;

namespace {

struct Options {
    std::string command;
    // source
    std::string model;
    int n = 0;
    std::string matrix_file;
    // parameters
    double t = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    int steps = 0;
    std::vector<double> kappa;
    double lambda_re = 0.0;
    double lambda_im = 0.0;
    bool diagonal = false;
    std::string mode = "heisenberg";
    std::string observable_file;
    std::string ket_file;
    // tolerances
    double tol = kDefaultTol;
    double eig_tol = kDefaultTol;
    double reality_tol = kDefaultTol;
    double degeneracy_tol = 1e-3;
    double continuity_factor = 5.0;
    double ep_tol = 1e-8;
    double jordan_tol = kJordanTol;
    double fd_step = 0.0;
    // outputs
    std::string out;
    std::string manifest;
};

// Everything that decides a matrix Q(t): a model or interpolated samples.
class Source {
public:
    static Source from(const Options& o) {
        Source s;
        if (!o.matrix_file.empty()) {
            if (!o.model.empty()) throw InputError("give either --model or --matrix-file, not both");
            s.samples_ = io::samples_from_json(parse_json(o.matrix_file));
            return s;
        }
        if (o.model.empty()) throw InputError("one of --model or --matrix-file is required");
        const ModelKind kind = parse_model_kind(o.model);
        int n = o.n;
        if (n == 0) {
            if (kind != ModelKind::CrunchBang) throw InputError("--n is required for this model");
            n = kCrunchBangDim;
        }
        s.spec_ = make_model(kind, n);
        return s;
    }

    bool is_model() const { return spec_.has_value(); }
    const ModelSpec& spec() const { return *spec_; }
    int dim() const {
        return is_model() ? spec_->dim : static_cast<int>(samples_.matrices.front().rows());
    }

    CMatrix q(double t) const { return is_model() ? build_q(*spec_, t) : samples_(t); }
    MatrixProvider provider() const {
        return [*this](double t) { return q(t); };
    }

    std::vector<Complex> spectrum(double t) const {
        return is_model() ? model_spectrum(*spec_, t) : eigenvalues(samples_(t));
    }

    PhysicalPicture picture(double t, const std::vector<double>& kappa, double tol) const {
        const std::vector<double> k = kappa.empty() ? std::vector<double>(dim(), 1.0) : kappa;
        if (is_model()) return model_physical_picture(*spec_, t, k, tol);
        PhysicalPicture pic;
        const CMatrix m = samples_(t);
        pic.metric = metric_family(m, k, tol);
        pic.dyson = dyson_from_metric(pic.metric, tol);
        pic.hermitian = hermitize(m, pic.dyson, tol);
        return pic;
    }

    Json describe() const {
        if (is_model()) return io::model_to_json(*spec_);
        return Json{{"samples", samples_.times.size()},
                    {"t_min", samples_.t_min()},
                    {"t_max", samples_.t_max()}};
    }

    static Json parse_json(const std::string& path) {
        const std::string text = io::read_file(path);
        try {
            return Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw InputError("'" + path + "' is not valid JSON: " + e.what());
        }
    }

private:
    std::optional<ModelSpec> spec_;
    io::MatrixSamples samples_;
};

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw InputError(std::string(name) + " must be positive");
}

void check_tolerances(const Options& o) {
    require_positive(o.tol, "--tol");
    require_positive(o.eig_tol, "--eig-tol");
    require_positive(o.reality_tol, "--reality-tol");
    require_positive(o.degeneracy_tol, "--degeneracy-tol");
    require_positive(o.continuity_factor, "--continuity-factor");
    require_positive(o.ep_tol, "--ep-tol");
    require_positive(o.jordan_tol, "--jordan-tol");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

class Run {
public:
    explicit Run(const Options& o) : o_(o) {}

    std::vector<std::string> outputs;

    void emit(const std::string& text, const std::string& path) {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        io::write_file_atomic(path, text);
        outputs.push_back(path);
    }

    void scan() {
        if (o_.out.empty()) throw InputError("scan: --out is required (CSV plus markers sidecar)");
        const Source src = Source::from(o_);
        SweepOptions so;
        so.eig_tol = o_.eig_tol;
        so.reality_tol = o_.reality_tol;
        so.degeneracy_tol = o_.degeneracy_tol;
        so.continuity_factor = o_.continuity_factor;
        const FlowTrace tr =
            src.is_model() ? sweep_spectrum(src.spec(), o_.t_min, o_.t_max, o_.steps, so)
                           : sweep_family(src.provider(), o_.t_min, o_.t_max, o_.steps, so);
        emit(io::flow_to_csv(tr), o_.out);
        emit(dump(io::markers_to_json(tr)), markers_path(o_.out));
    }

    void metric() {
        const Source src = Source::from(o_);
        Json result;
        if (o_.diagonal) {
            const auto mr = diagonal_metric(src.q(o_.t), o_.tol);
            if (!mr) {
                throw DomainError("no positive diagonal metric: some link ratio is not positive");
            }
            result = io::metric_to_json(*mr);
        } else {
            result = io::metric_to_json(src.picture(o_.t, o_.kappa, o_.tol).metric);
        }
        result["t"] = o_.t;
        emit(dump(result), o_.out);
    }

    void dyson() {
        const Source src = Source::from(o_);
        const auto pic = src.picture(o_.t, o_.kappa, o_.tol);
        Json result{{"t", o_.t},
                    {"metric", io::metric_to_json(pic.metric)},
                    {"dyson", io::dyson_to_json(pic.dyson)},
                    {"hermitian", io::matrix_to_json(pic.hermitian)},
                    {"hermiticity_defect", hermiticity_defect(pic.hermitian)}};
        emit(dump(result), o_.out);
    }

    void evolve() {
        const Source src = Source::from(o_);
        const std::vector<double> kappa = o_.kappa;
        const double tol = o_.tol;
        MatrixProvider omega = [src, kappa, tol](double t) {
            return src.picture(t, kappa, tol).dyson.omega;
        };
        const MatrixProvider sigma = coriolis_provider(omega);
        const double h = o_.fd_step;
        const MatrixProvider sigma_fd =
            h > 0.0 ? MatrixProvider([omega, h](double t) { return coriolis(omega, t, h); })
                    : sigma;

        std::vector<double> times;
        if (o_.mode == "heisenberg") {
            const CMatrix a0 =
                o_.observable_file.empty()
                    ? src.q(o_.t0)
                    : io::matrix_from_json(Source::parse_json(o_.observable_file));
            std::vector<CMatrix> states;
            heisenberg_evolve(a0, EvolutionGenerator::heisenberg(sigma_fd), o_.t0, o_.t1, o_.steps,
                              [&](double t, const CMatrix& a) {
                                  times.push_back(t);
                                  states.push_back(a);
                              });
            emit(io::matrix_trajectory_csv(times, states), o_.out);
        } else if (o_.mode == "cauchy") {
            std::vector<CMatrix> states;
            omega_cauchy_evolve(omega(o_.t0), sigma_fd, o_.t0, o_.t1, o_.steps,
                                [&](double t, const CMatrix& m) {
                                    times.push_back(t);
                                    states.push_back(m);
                                });
            emit(io::matrix_trajectory_csv(times, states), o_.out);
        } else if (o_.mode == "schrodinger") {
            // H(t) = Q(t) unless an observable file supplies a constant H.
            MatrixProvider ham = src.provider();
            if (!o_.observable_file.empty()) {
                const CMatrix hm = io::matrix_from_json(Source::parse_json(o_.observable_file));
                ham = [hm](double) { return hm; };
            }
            const CVector ket = initial_ket(src.dim());
            const auto pic = src.picture(o_.t0, kappa, tol);
            const StatePair s0{ket, pic.metric.theta * ket};
            std::vector<StatePair> states;
            state_pair_evolve(s0, EvolutionGenerator::schrodinger(ham, sigma_fd), o_.t0, o_.t1,
                              o_.steps, [&](double t, const StatePair& p) {
                                  times.push_back(t);
                                  states.push_back(p);
                              });
            emit(io::state_trajectory_csv(times, states), o_.out);
        } else {
            throw InputError("--mode must be heisenberg, cauchy or schrodinger");
        }
    }

    void ep() {
        const Source src = Source::from(o_);
        const auto t = src.is_model() ? locate_ep(src.spec(), o_.t_min, o_.t_max, o_.ep_tol)
                                      : locate_ep(src.provider(), o_.t_min, o_.t_max, o_.ep_tol);
        Json result{{"t_min", o_.t_min}, {"t_max", o_.t_max}, {"found", t.has_value()}};
        if (t) {
            result["t"] = *t;
            result["gap"] = src.is_model() ? model_gap_extended(src.spec(), *t)
                                           : min_pairwise_gap(src.spectrum(*t));
        }
        emit(dump(result), o_.out);
        if (!t) throw DomainError("no exceptional point found in the bracket");
    }

    void jordan() {
        const Source src = Source::from(o_);
        const auto jp = jordan_profile(src.q(o_.t), Complex(o_.lambda_re, o_.lambda_im),
                                       o_.jordan_tol);
        Json result = io::jordan_to_json(jp);
        result["t"] = o_.t;
        emit(dump(result), o_.out);
    }

    void expect() {
        const Source src = Source::from(o_);
        const auto pic = src.picture(o_.t, o_.kappa, o_.tol);
        const CMatrix a = o_.observable_file.empty()
                              ? src.q(o_.t)
                              : io::matrix_from_json(Source::parse_json(o_.observable_file));
        const CVector ket = initial_ket(src.dim());
        const StatePair s{ket, pic.metric.theta * ket};
        const Complex v = expectation(s, a);
        const Complex norm2 = s.overlap();
        Json result{{"t", o_.t},
                    {"value", io::complex_to_json(v)},
                    {"norm", io::complex_to_json(norm2)},
                    {"normalized", io::complex_to_json(v / norm2)}};
        emit(dump(result), o_.out);
    }

private:
    CVector initial_ket(int dim) const {
        if (o_.ket_file.empty()) return CVector::Unit(dim, 0);
        CVector ket = io::vector_from_json(Source::parse_json(o_.ket_file));
        if (ket.size() != dim) throw InputError("--ket length does not match the matrix dimension");
        return ket;
    }

    static std::string markers_path(const std::string& out) {
        fs::path p(out);
        p.replace_extension(".markers.json");
        return p.string();
    }

    const Options& o_;
};

std::string manifest_path(const Options& o) {
    if (!o.manifest.empty()) return o.manifest;
    if (!o.out.empty()) {
        fs::path p(o.out);
        p.replace_extension(".manifest.json");
        return p.string();
    }
    return (o.command.empty() ? "quasiherm" : o.command) + ".manifest.json";
}

Json options_json(const Options& o) {
    Json inputs{{"model", o.model},       {"n", o.n},          {"matrix_file", o.matrix_file},
                {"t", o.t},               {"t_min", o.t_min},  {"t_max", o.t_max},
                {"t0", o.t0},             {"t1", o.t1},        {"steps", o.steps},
                {"kappa", o.kappa},       {"lambda", o.lambda_re},
                {"lambda_im", o.lambda_im}, {"diagonal", o.diagonal}, {"mode", o.mode},
                {"observable", o.observable_file}, {"ket", o.ket_file}, {"out", o.out}};
    return inputs;
}

Json tolerances_json(const Options& o) {
    return Json{{"tol", o.tol},
                {"eig_tol", o.eig_tol},
                {"reality_tol", o.reality_tol},
                {"degeneracy_tol", o.degeneracy_tol},
                {"continuity_factor", o.continuity_factor},
                {"ep_tol", o.ep_tol},
                {"jordan_tol", o.jordan_tol},
                {"fd_step", o.fd_step}};
}

// Config file values become leading flags so that explicit flags win.
std::vector<std::string> config_args(const std::string& path, std::string& command) {
    const Json j = Source::parse_json(path);
    if (!j.is_object()) throw InputError("--config must hold a JSON object");
    std::vector<std::string> args;
    for (const auto& [key, value] : j.items()) {
        if (key == "command") {
            if (command.empty()) command = value.get<std::string>();
            continue;
        }
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else if (value.is_array()) {
            for (const auto& v : value) {
                args.push_back(flag);
                args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
            }
        } else {
            args.push_back(flag);
            args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
        }
    }
    return args;
}

void add_options(CLI::App& app, Options& o) {
    app.add_option("--model", o.model, "bang | cyclic | crunchbang");
    app.add_option("--n", o.n, "matrix dimension (crunchbang: 8)");
    app.add_option("--matrix-file", o.matrix_file, "JSON list of {t, matrix} samples");
    app.add_option("--t", o.t, "time");
    app.add_option("--t-min", o.t_min, "left end of the time range");
    app.add_option("--t-max", o.t_max, "right end of the time range");
    app.add_option("--t0", o.t0, "initial time");
    app.add_option("--t1", o.t1, "final time");
    app.add_option("--steps", o.steps, "grid points (scan) or integration steps (evolve)");
    app.add_option("--kappa", o.kappa, "metric weights kappa_n (default all 1)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->delimiter(',');
    app.add_option("--lambda", o.lambda_re, "eigenvalue (real part) for jordan");
    app.add_option("--lambda-im", o.lambda_im, "eigenvalue (imaginary part) for jordan");
    app.add_flag("--diagonal", o.diagonal, "metric: diagonal metric instead of the family");
    app.add_option("--mode", o.mode, "evolve: heisenberg | cauchy | schrodinger");
    app.add_option("--observable", o.observable_file, "matrix JSON file");
    app.add_option("--ket", o.ket_file, "vector JSON file");
    app.add_option("--tol", o.tol, "metric / Dyson tolerance");
    app.add_option("--eig-tol", o.eig_tol, "eigensolver tolerance");
    app.add_option("--reality-tol", o.reality_tol, "reality classification tolerance");
    app.add_option("--degeneracy-tol", o.degeneracy_tol, "cluster marker threshold (relative)");
    app.add_option("--continuity-factor", o.continuity_factor, "branch continuity factor");
    app.add_option("--ep-tol", o.ep_tol, "exceptional-point bracket width");
    app.add_option("--jordan-tol", o.jordan_tol, "Jordan rank tolerance");
    app.add_option("--fd-step", o.fd_step, "finite-difference step for Sigma (0: default)");
    app.add_option("--out", o.out, "output file (default: stdout)");
    app.add_option("--manifest", o.manifest, "run manifest path");
    for (auto* opt : app.get_options()) {
        if (opt->get_name() != "--kappa" && opt->get_name() != "--help") {
            opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        }
    }
}

void require_range(const Options& o, bool steps_needed) {
    if (!(o.t_min < o.t_max)) throw InputError("--t-min must be smaller than --t-max");
    if (steps_needed && o.steps < 2) throw InputError("--steps must be at least 2");
}

}  // namespace

int main(int argc, char** argv) {
    const auto start = std::chrono::steady_clock::now();
    Options o;
    std::vector<std::string> raw(argv + 1, argv + argc);

    int status = 0;
    std::string message;
    std::vector<std::string> outputs;
    try {
        // Pull out the command and an optional --config before parsing.
        std::string config;
        std::vector<std::string> rest;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == "--config" && i + 1 < raw.size()) {
                config = raw[++i];
            } else if (raw[i].rfind("--config=", 0) == 0) {
                config = raw[i].substr(9);
            } else if (i == 0 && !raw[i].empty() && raw[i][0] != '-') {
                o.command = raw[i];
            } else {
                rest.push_back(raw[i]);
            }
        }
        std::vector<std::string> args;
        if (!config.empty()) args = config_args(config, o.command);
        args.insert(args.end(), rest.begin(), rest.end());

        CLI::App app{"quasiherm: quasi-Hermitian spectral flows, metrics and dynamics"};
        app.allow_extras(false);
        add_options(app, o);
        if (o.command.empty() || o.command == "help") {
            std::cout << app.help() << "\ncommands: scan metric dyson evolve ep jordan expect\n";
            return o.command.empty() ? 2 : 0;
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::CallForHelp&) {
            std::cout << app.help() << "\ncommands: scan metric dyson evolve ep jordan expect\n";
            return 0;
        } catch (const CLI::ParseError& e) {
            throw InputError(std::string("invalid arguments: ") + e.what());
        }
        check_tolerances(o);

        Run run(o);
        if (o.command == "scan") {
            require_range(o, true);
            run.scan();
        } else if (o.command == "metric") {
            run.metric();
        } else if (o.command == "dyson") {
            run.dyson();
        } else if (o.command == "evolve") {
            if (o.steps < 1) throw InputError("--steps must be at least 1");
            run.evolve();
        } else if (o.command == "ep") {
            require_range(o, false);
            run.ep();
        } else if (o.command == "jordan") {
            run.jordan();
        } else if (o.command == "expect") {
            run.expect();
        } else {
            throw InputError("unknown command '" + o.command +
                             "' (expected scan, metric, dyson, evolve, ep, jordan or expect)");
        }
        outputs = run.outputs;
    } catch (const InputError& e) {
        status = 2;
        message = e.what();
    } catch (const DomainError& e) {
        status = 1;
        message = e.what();
    } catch (const std::exception& e) {
        status = 1;
        message = e.what();
    }
    if (status != 0) std::cerr << "quasiherm " << o.command << ": " << message << "\n";

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json manifest{{"command", o.command},
                  {"argv", raw},
                  {"inputs", options_json(o)},
                  {"tolerances", tolerances_json(o)},
                  {"versions",
                   {{"quasiherm", QUASIHERM_VERSION},
                    {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                  std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
                    {"boost", BOOST_LIB_VERSION},
                    {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                    {"compiler", __VERSION__}}},
                  {"outputs", outputs},
                  {"exit_status", status},
                  {"message", message},
                  {"wall_time_s", wall}};
    try {
        io::write_file_atomic(manifest_path(o), dump(manifest));
    } catch (const std::exception& e) {
        std::cerr << "quasiherm: could not write manifest: " << e.what() << "\n";
        if (status == 0) status = 2;
    }
    return status;
}

#include "doctest.h"

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "quasiherm/io.hpp"

using namespace quasiherm;
namespace fs = std::filesystem;

TEST_CASE("format_number round-trips") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng) * std::pow(10.0, i % 13 - 6);
        CHECK(std::stod(io::format_number(x)) == x);
    }
    CHECK(io::format_number(0.25) == "0.25");
    CHECK(io::format_number(-3.0) == "-3");
}

TEST_CASE("matrix json") {
    std::mt19937_64 rng(2);
    const CMatrix m = oracle::random_matrix(rng, 3);
    const auto j = io::matrix_to_json(m);
    CHECK(j["rows"] == 3);
    CHECK(j["re"].size() == 9);
    // row-major
    CHECK(j["re"][1].get<double>() == m(0, 1).real());
    CHECK(io::matrix_from_json(io::Json::parse(j.dump())) == m);

    const auto real_only = io::Json::parse(R"({"rows": 1, "cols": 2, "re": [1, 2]})");
    CHECK(io::matrix_from_json(real_only)(0, 1) == Complex(2.0));
    CHECK_THROWS_AS(io::matrix_from_json(io::Json::parse(R"({"rows": 2, "cols": 2, "re": [1]})")),
                    InputError);
    CHECK_THROWS_AS(io::matrix_from_json(io::Json::parse(R"({"cols": 2, "re": [1, 2]})")),
                    InputError);
}

TEST_CASE("model, metric, dyson, jordan json") {
    const auto spec = make_model(ModelKind::Cyclic, 5);
    CHECK(io::model_from_json(io::model_to_json(spec)).kind == ModelKind::Cyclic);
    CHECK(io::model_from_json(io::model_to_json(spec)).dim == 5);
    CHECK_THROWS_AS(io::model_from_json(io::Json::parse(R"({"kind": "bang"})")), InputError);

    const auto mr = metric_family(build_q(spec, 0.5));
    const auto back = io::metric_from_json(io::Json::parse(io::metric_to_json(mr).dump()));
    CHECK(back.theta == mr.theta);
    CHECK(back.kappa == mr.kappa);
    CHECK(back.positive == mr.positive);
    CHECK(back.residual == mr.residual);

    const auto dm = dyson_from_metric(mr);
    const auto dback = io::dyson_from_json(io::Json::parse(io::dyson_to_json(dm).dump()));
    CHECK(dback.omega == dm.omega);
    CHECK(dback.cond == dm.cond);

    const auto jp = jordan_profile(build_q(make_model(ModelKind::CrunchBang, 8), 0.0), 0.0);
    const auto jj = io::jordan_to_json(jp);
    CHECK(jj["block_sizes"] == io::Json::array({8}));
}

TEST_CASE("flow csv round-trip and sidecar") {
    const auto tr = sweep_spectrum(make_model(ModelKind::Bang, 3), -0.5, 1.0, 16);
    const std::string csv = io::flow_to_csv(tr);
    const auto first_line = csv.substr(0, csv.find('\n'));
    CHECK(first_line == "t,re_1,re_2,re_3,im_1,im_2,im_3,real_1,real_2,real_3");
    const auto back = io::flow_from_csv(csv);
    CHECK(back.times == tr.times);
    CHECK(back.curves == tr.curves);
    CHECK(back.reality == tr.reality);
    CHECK(io::flow_to_csv(back) == csv);

    const auto side = io::markers_to_json(tr);
    REQUIRE(side.contains("markers"));
    REQUIRE(side.contains("skipped_times"));
    for (const auto& m : side["markers"]) {
        CHECK(m.contains("time"));
        CHECK(m.contains("multiplicity"));
        const auto kind = m["kind"].get<std::string>();
        CHECK((kind == "cluster" || kind == "discontinuity" || kind == "solver_failure"));
    }

    CHECK_THROWS_AS(io::flow_from_csv(""), InputError);
    CHECK_THROWS_AS(io::flow_from_csv("t,re_1,im_1,real_1\n0,1,0,2\n"), InputError);
    CHECK_THROWS_AS(io::flow_from_csv("t,re_1,im_1,real_1\n0,1,0\n"), InputError);
}

TEST_CASE("trajectory csv") {
    const std::vector<double> t = {0.0, 0.5};
    const std::vector<CMatrix> m = {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2) * Complex(0, 1)};
    const auto csv = io::matrix_trajectory_csv(t, m);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "t,re_1_1,re_1_2,re_2_1,re_2_2,im_1_1,im_1_2,im_2_1,im_2_2");
    CHECK(csv.find("0.5,0,0,0,0,1,0,0,1\n") != std::string::npos);

    const std::vector<StatePair> s = {{CVector::Ones(2), CVector::Ones(2)}};
    const auto scsv = io::state_trajectory_csv({0.0}, s);
    CHECK(scsv.find("overlap_re") != std::string::npos);
    CHECK_THROWS_AS(io::matrix_trajectory_csv({0.0}, {}), InputError);
}

TEST_CASE("matrix samples") {
    const auto j = io::Json::parse(R"([
        {"t": 0, "matrix": {"rows": 1, "cols": 1, "re": [1], "im": [0]}},
        {"t": 2, "matrix": {"rows": 1, "cols": 1, "re": [3], "im": [4]}}
    ])");
    const auto s = io::samples_from_json(j);
    CHECK(s(1.0)(0, 0) == Complex(2.0, 2.0));
    CHECK(s(2.0)(0, 0) == Complex(3.0, 4.0));
    CHECK_THROWS_AS(s(2.5), DomainError);
    const auto bad = io::Json::parse(R"([
        {"t": 1, "matrix": {"rows": 1, "cols": 1, "re": [1]}},
        {"t": 1, "matrix": {"rows": 1, "cols": 1, "re": [3]}}
    ])");
    CHECK_THROWS_AS(io::samples_from_json(bad), InputError);
}

TEST_CASE("atomic write") {
    const fs::path dir = fs::temp_directory_path() / "quasiherm_io_test";
    fs::create_directories(dir);
    const fs::path target = dir / "out.txt";
    io::write_file_atomic(target, "first");
    io::write_file_atomic(target, "second");
    CHECK(io::read_file(target) == "second");
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().filename() == "out.txt");
    CHECK_THROWS_AS(io::write_file_atomic(dir / "missing" / "x.txt", "x"), InputError);
    CHECK_THROWS_AS(io::read_file(dir / "nope.txt"), InputError);
    fs::remove_all(dir);
}

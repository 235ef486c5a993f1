#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gmvalloc/serialization.hpp"

using namespace gmv;
using namespace gmv::io;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("parse errors carry position information") {
    try {
        parse_json_text("{\n  \"a\": 1,\n  \"b\": oops\n}", "test input");
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        CHECK(contains(e.what(), "test input"));
        CHECK(contains(e.what(), "line 3"));
        CHECK(contains(e.what(), "column"));
    }
}

TEST_CASE("return model round-trips bit for bit") {
    ReturnModel model;
    model.family = Family::Ald;
    model.mu0 = Eigen::Vector2d(0.08123456789012345, -0.01);
    model.sigma = (Eigen::Matrix2d() << 0.0225, 0.003, 0.003, 0.04).finished();
    model.sigma0 = 0.1 * model.sigma;
    model.mu_a = Eigen::Vector2d(-0.02, 0.015);
    model.r0 = 0.02;
    model.assets = {"eq", "rates"};

    const Json j = to_json(model);
    const ReturnModel back = return_model_from_json(j);
    CHECK(back.family == Family::Ald);
    CHECK(back.mu0 == model.mu0);
    CHECK(back.sigma == model.sigma);
    CHECK(back.sigma0 == model.sigma0);
    CHECK(back.mu_a == model.mu_a);
    CHECK(back.r0 == model.r0);
    CHECK(back.assets == model.assets);

    // Serialize -> parse -> serialize is byte-stable.
    const std::string text = j.dump(2);
    const Json again = parse_json_text(text, "round trip");
    CHECK(to_json(return_model_from_json(again)).dump(2) == text);
}

TEST_CASE("readers are fail-closed on unknown fields") {
    Json j = to_json(ReturnModel{});
    j["mu0"] = Json::array({0.08});
    j["sigma"] = Json::array({Json::array({0.0225})});
    j["sigam0"] = Json::array({Json::array({0.001})});  // typo must not pass
    CHECK_THROWS_WITH_AS(return_model_from_json(j),
                         "return model: unknown field 'sigam0'", std::invalid_argument);

    Json belief;
    belief["mu_pd"] = 0.08;
    belief["sigma_pd2"] = 0.0025;
    belief["sigmamu2"] = 0.01;
    CHECK_THROWS_AS(belief_from_json(belief), std::invalid_argument);

    Json bet;
    bet["p"] = 0.6;
    bet["b"] = 1.0;
    bet["a_loss"] = 1.0;
    bet["odds"] = 2.0;
    CHECK_THROWS_AS(binary_bet_from_json(bet), std::invalid_argument);
}

TEST_CASE("schema version is enforced") {
    Json j;
    j["schema_version"] = 1;
    CHECK_NOTHROW(check_schema_version(j, "cfg"));
    j["schema_version"] = 2;
    CHECK_THROWS_AS(check_schema_version(j, "cfg"), std::invalid_argument);
    j["schema_version"] = 1.5;
    CHECK_THROWS_AS(check_schema_version(j, "cfg"), std::invalid_argument);
    CHECK_THROWS_AS(check_schema_version(Json::object(), "cfg"), std::invalid_argument);
}

TEST_CASE("vector and matrix parsing reject malformed shapes") {
    CHECK_THROWS_AS(vector_from_json(parse_json_text("[1, \"x\"]", "v"), "v"),
                    std::invalid_argument);
    CHECK_THROWS_AS(vector_from_json(parse_json_text("{}", "v"), "v"),
                    std::invalid_argument);
    CHECK_THROWS_AS(matrix_from_json(parse_json_text("[[1,2],[3]]", "m"), "m"),
                    std::invalid_argument);
    CHECK_THROWS_AS(matrix_from_json(parse_json_text("[]", "m"), "m"),
                    std::invalid_argument);
    CHECK_THROWS_AS(matrix_from_json(parse_json_text("[1,2]", "m"), "m"),
                    std::invalid_argument);
    const Eigen::MatrixXd m = matrix_from_json(parse_json_text("[[1,2],[3,4]]", "m"), "m");
    CHECK(m(1, 0) == 3.0);

    // Deserialized models still pass through validation.
    Json j;
    j["family"] = "gaussian";
    j["mu0"] = Json::array({0.08, 0.02});
    j["sigma"] = Json::array({Json::array({0.0225})});
    CHECK_THROWS_AS(return_model_from_json(j), std::invalid_argument);
}

TEST_CASE("17 significant digits round-trip any double") {
    for (double x : {0.1, 1.0 / 3.0, 0.78431372549019607, 6.02e23, -1.25e-17, 0.0}) {
        const std::string s = format_full(x);
        CHECK(std::stod(s) == x);
    }
}

TEST_CASE("csv output is rfc 4180") {
    const std::string csv = to_csv({"f", "growth,rate", "note\"d"},
                                   {{1.0, 0.5, -2.0}, {4.0 / 3.0, 0.0425, 1e-17}});
    // CRLF endings, quoted header cells, full-precision numbers.
    CHECK(contains(csv, "\r\n"));
    CHECK(contains(csv, "f,\"growth,rate\",\"note\"\"d\"\r\n"));
    CHECK(contains(csv, format_full(4.0 / 3.0)));
    CHECK(csv.substr(csv.size() - 2) == "\r\n");
    CHECK(!contains(csv, "\n\n"));
    CHECK_THROWS_AS(to_csv({"a", "b"}, {{1.0}}), std::invalid_argument);
}

TEST_CASE("atomic writes land complete or not at all") {
    const std::string path = "serialization_atomic_test.json";
    write_file_atomic(path, "{\"k\": 1}");
    CHECK(slurp(path) == "{\"k\": 1}");
    write_file_atomic(path, "{\"k\": 2}");
    CHECK(slurp(path) == "{\"k\": 2}");
    // No temp file left behind.
    std::ifstream tmp(path + ".tmp");
    CHECK(!tmp);
    std::remove(path.c_str());

    CHECK_THROWS_AS(write_file_atomic("no_such_dir/x.json", "y"), std::runtime_error);
    CHECK_THROWS_AS(read_json_file("no_such_file.json"), std::invalid_argument);
}

TEST_CASE("leverage results omit diagnostics that do not apply") {
    LeverageResult res;
    res.f_star = 1.25;
    res.method = "closed";
    const Json j = to_json(res);
    CHECK(!j.contains("f_kelly"));
    CHECK(!j.contains("delta"));
    CHECK(!j.contains("flag"));

    res.f_kelly = 0.2;
    res.delta = 0.5;
    res.f_linearized = 0.1;
    res.flag = "unfavorable game";
    const Json full = to_json(res);
    CHECK(full["f_kelly"] == 0.2);
    CHECK(full["delta"] == 0.5);
    CHECK(full["flag"] == "unfavorable game");
}

TEST_CASE("optional scalar and integer readers enforce types") {
    const Json j = parse_json_text(
        "{\"x\": 1.5, \"n\": 7, \"s\": \"hi\", \"flag\": true}", "cfg");
    CHECK(get_number(j, "x", "cfg") == 1.5);
    CHECK(get_number_or(j, "missing", 2.5, "cfg") == 2.5);
    CHECK(get_integer(j, "n", "cfg") == 7);
    CHECK(get_integer_or(j, "missing", 9, "cfg") == 9);
    CHECK(get_bool_or(j, "flag", false, "cfg"));
    CHECK(get_string(j, "s", "cfg") == "hi");
    CHECK_THROWS_AS(get_number(j, "s", "cfg"), std::invalid_argument);
    CHECK_THROWS_AS(get_integer(j, "x", "cfg"), std::invalid_argument);
    CHECK_THROWS_AS(get_string(j, "n", "cfg"), std::invalid_argument);
    CHECK_THROWS_AS(get_number(j, "absent", "cfg"), std::invalid_argument);

    mc::SimConfig cfg = sim_config_from_json(
        parse_json_text("{\"n_paths\": 5000, \"seed\": 42, \"antithetic\": true}", "sim"));
    CHECK(cfg.n_paths == 5000);
    CHECK(cfg.seed == 42);
    CHECK(cfg.antithetic);
    CHECK_THROWS_AS(sim_config_from_json(parse_json_text("{\"seed\": -1}", "sim")),
                    std::invalid_argument);
}

TEST_CASE("infinity conventions survive the wire") {
    // Absent alpha means no variance mixing; it must come back absent.
    ReturnModel model;
    model.mu0 = Eigen::VectorXd::Constant(1, 0.08);
    model.sigma = Eigen::MatrixXd::Constant(1, 1, 0.0225);
    const Json j = to_json(model);
    CHECK(!j.contains("alpha"));
    CHECK(!j.contains("sigma0"));
    CHECK(!j.contains("mu_a"));
    const ReturnModel back = return_model_from_json(j);
    CHECK(!std::isfinite(back.alpha));
    CHECK(back.sigma0.size() == 0);

    LeverageInputs in = leverage_inputs_from_json(
        parse_json_text("{\"mu_r\": 0.08, \"sigma_r2\": 0.0225}", "lev"));
    CHECK(!std::isfinite(in.alpha));
    CHECK(in.T == 1.0);
    CHECK(in.lambda == 1.0);
}

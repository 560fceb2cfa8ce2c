#include <doctest.h>

#include <sstream>

#include "wold2d/run.hpp"

using namespace wold2d;

namespace {

Json field_config(const std::string& cov, const std::string& past, int R) {
    return Json::parse(R"({"command":"field","parameters":{"cov":)" + cov + R"(,"past":)" + past + R"(,"R":)" +
                       std::to_string(R) + "}}");
}

std::string render(const Report& r, Format f) {
    std::ostringstream os;
    emit(r, os, f);
    return os.str();
}

std::string config_error_pointer(const Json& cfg) {
    try {
        run(cfg);
    } catch (const ConfigError& e) {
        return e.pointer;
    }
    return "<none>";
}

}  // namespace

TEST_CASE("canonical dump") {
    const Json j = Json::parse(R"({"b":[1,2.5,-0.0],"a":{"y":true,"x":"s"},"c":0.1})");
    const std::string s = canonical_dump(j);
    CHECK(s == "{\n  \"a\": {\n    \"x\": \"s\",\n    \"y\": true\n  },\n  \"b\": [1, 2.5, 0],\n  \"c\": 0.1\n}\n");
    CHECK(canonical_dump(Json::parse(s)) == s);
    CHECK(canonical_dump(Json(1.0 / 3.0)) == "0.333333333333\n");
}

TEST_CASE("complex text form") {
    for (cd z : {cd(1, -2), cd(-1e-3, 4), cd(0.1, 0), cd(-0.0, -7.25e10)}) CHECK(parse_complex(format_complex(z)) == z);
    CHECK(parse_complex("1-2i") == cd(1, -2));
    CHECK(parse_complex("3") == cd(3, 0));
    CHECK_THROWS(parse_complex("1+2j"));
}

TEST_CASE("readers") {
    CHECK(read_complex(Json::parse("[1,-2]"), "") == cd(1, -2));
    CHECK(read_complex(Json::parse(R"({"re":0.5,"im":1})"), "") == cd(0.5, 1));
    CHECK(read_complex(Json(2), "") == cd(2, 0));
    CHECK(read_halfplane(Json("L"), "") == HalfPlane::L());
    CHECK(read_halfplane(Json::parse(R"({"vector":[-2,-3],"variant":"SvHat"})"), "") == HalfPlane::sv_hat(-2, -3));
    const HalfPlane irr = read_halfplane(
        Json::parse(R"({"vector":{"mode":"IrrationalApprox","v1":-1,"v2":"-14142/10000","window_bound":40}})"), "");
    CHECK_FALSE(irr.vector.is_rational());

    const Diagram d = read_diagram(Json::parse(R"({"column_range":[0,2],"boundary":[{"i":0,"b":"+inf"},{"i":1,"b":3},{"i":2,"b":"-inf"}]})"), "");
    CHECK(d.b(0).is_pos_inf());
    CHECK(d.b(1) == ExtInt::finite(3));
    const Json back = to_json(d);
    CHECK(read_diagram(back, "") == d);

    try {
        read_halfplane(Json::parse(R"({"vector":[0,0]})"), "/p");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(e.pointer.rfind("/p", 0) == 0);
    }
    CHECK_THROWS_AS(read_covariance(Json::parse(R"({"kind":"Nope"})"), ""), ConfigError);
    const CovarianceModel m = read_covariance(
        Json::parse(R"({"kind":"MovingAverage","coeffs":[{"point":[0,0],"value":1},{"point":[-1,0],"value":[0.5,0]}],"noise_variance":1})"), "");
    CHECK(m.gamma({1, 0}).real() == doctest::Approx(0.5));
}

TEST_CASE("CSV grid round trip") {
    const SampleGrid g = simulate_ma({{{0, 0}, 1.0}, {{-1, -1}, cd(0.2, 0.1)}}, 1.0, HalfPlane::sv(-1, -1), 4, 9);
    std::stringstream ss;
    write_grid_csv(ss, g);
    const SampleGrid back = read_grid_csv(ss);
    CHECK(back.width == g.width);
    CHECK(back.height == g.height);
    CHECK(back.values == g.values);
}

TEST_CASE("psi run") {
    const Report r = run(Json::parse(R"({"command":"psi","parameters":{"k":-2,"l":-3}})"));
    CHECK(r.failed() == 0);
    CHECK(r.passed() == 5);
    CHECK(r.results["p"] == 2);
    CHECK(r.results["q"] == -1);
    CHECK(r.exit_code() == 0);
}

TEST_CASE("field runs") {
    const Report a = run(field_config(R"({"kind":"LineField","c":1,"d":1,"variance":1})", R"({"vector":[-1,-1]})", 12));
    CHECK(a.results["label"] == "Evanescent");
    CHECK(a.exit_code() == 0);

    Json cfg = field_config(R"({"kind":"WhiteNoise","variance":1})", R"("L")", 6);
    cfg["parameters"]["expect_label"] = "Deterministic";
    CHECK(run(cfg).exit_code() == 1);

    const Report bad = run(field_config(
        R"({"kind":"MovingAverage","coeffs":[{"point":[0,0],"value":1},{"point":[1,0],"value":1}],"noise_variance":1})",
        R"("L")", 4));
    CHECK(bad.exit_code() == 1);
    CHECK_FALSE(bad.error.empty());
}

TEST_CASE("configuration errors carry a pointer") {
    CHECK(config_error_pointer(Json::parse(R"({"command":"nope"})")) == "/command");
    CHECK(config_error_pointer(Json::parse(R"({"parameters":{}})")) == "/command");
    CHECK(config_error_pointer(field_config(R"({"kind":"WhiteNoise","variance":1})", R"("L")", 65)) == "/parameters/R");
    CHECK(config_error_pointer(Json::parse(R"({"command":"psi","parameters":{"k":-2,"l":-4}})")).rfind("/parameters", 0) == 0);
    CHECK(config_error_pointer(Json::parse(R"({"command":"field","parameters":{"cov":{"kind":"WhiteNoise","variance":1},"action":"x"}})")) ==
          "/parameters/action");
    CHECK(config_error_pointer(Json::parse("[1]")) == "");
}

TEST_CASE("operator run reports split failures") {
    const Report r = run(Json::parse(R"({"command":"operator","parameters":{"model":"bcl","permutation":[1,2,0],"P_diag":[1,0,0],"depth":4,"radius":2}})"));
    CHECK(r.exit_code() == 1);
    CHECK(r.results["split"].contains("error"));
    const Report ok = run(Json::parse(R"({"command":"operator","parameters":{"model":"bcl","permutation":[1,2,3,0],"P_diag":[1,0,0,0],"depth":3}})"));
    CHECK(ok.failed() == 0);
    CHECK(ok.results["split"]["Ht_dim"] == 8);
}

TEST_CASE("reports are deterministic and formats differ") {
    const Json cfg = Json::parse(
        R"({"command":"field","parameters":{"action":"simulate","coeffs":[{"point":[0,0],"value":1}],"size":16}})");
    const Report a = run(cfg, 3), b = run(cfg, 3), c = run(cfg, 4);
    CHECK(render(a, Format::Json) == render(b, Format::Json));
    CHECK(render(a, Format::Json) != render(c, Format::Json));
    CHECK(render(a, Format::Json).find("wall_time") == std::string::npos);
    const std::string csv = render(a, Format::Csv);
    std::istringstream is(csv);
    CHECK(read_grid_csv(is).values == a.grid->values);

    const Report cl = run(field_config(R"({"kind":"WhiteNoise","variance":1})", R"("L")", 6));
    const std::string text = render(cl, Format::Text);
    CHECK(text.find("total ma det evan\n") != std::string::npos);
    CHECK(text.find("PurelyNondeterministic") != std::string::npos);
    CHECK(parse_format("text") == Format::Text);
    CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("verify suite scopes") {
    CHECK(suite_scopes().size() == 5u);
    const Report lat = verify_suite("lattice_halfplane");
    CHECK(lat.failed() == 0);
    CHECK(lat.passed() > 50);
    CHECK_THROWS_AS(verify_suite("bogus"), ConfigError);
}

TEST_CASE("the psi battery catches a perturbed rotation") {
    SuiteOptions opt;
    opt.psi = [](std::int64_t k, std::int64_t l) {
        PsiMap m = psi_coefficients(k, l);
        m.q += 1;
        return m;
    };
    const Report r = verify_suite("lattice_halfplane", opt);
    CHECK(r.failed() > 0);
    bool bezout_flagged = false;
    for (const CheckReport& c : r.checks)
        if (!c.pass && c.check.find("bezout") != std::string::npos) bezout_flagged = true;
    CHECK(bezout_flagged);
}

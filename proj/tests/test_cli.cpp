#include <doctest.h>

#include "pvad/cli.hpp"
#include "pvad/dirac.hpp"
#include "pvad/model.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

using namespace pvad;

namespace {
Command make(const std::string& name, const std::string& file = "sl3min") {
    Command c;
    c.name = name;
    c.file = file;
    return c;
}

int count_lines(const Report& r, const std::string& prefix, const std::string& suffix) {
    int n = 0;
    for (const auto& s : r.sections)
        for (const auto& c : s.checks)
            if (c.text.rfind(prefix, 0) == 0 && c.text.find(suffix) != std::string::npos) ++n;
    return n;
}

std::string temp_model(const std::string& text) {
    std::string path = "pvad_test_model.txt";
    std::ofstream(path) << text;
    return path;
}
} // namespace

TEST_CASE("check command on the sl3 model") {
    RunConfig cfg;
    auto c = make("check");
    c.structure = "H1";
    auto r = run_command(c, cfg);
    CHECK(r.exit_code == 0);
    CHECK(count_lines(r, "JACOBI (", ": PASS") == 64);
    CHECK(count_lines(r, "SKEWADJOINT H1", "PASS") == 1);

    auto all = run_command(make("check"), cfg);
    CHECK(all.exit_code == 0);
    CHECK(count_lines(all, "COMPATIBLE H0 H1", "PASS") == 1);
}

TEST_CASE("exit codes") {
    RunConfig cfg;
    auto d = make("dirac");
    d.structure = "H0";
    d.constraints = "phi";
    auto r = run_command(d, cfg);
    CHECK(r.exit_code == 3);
    CHECK(r.error.find("NotInvertible") != std::string::npos);

    d.structure = "H7";
    CHECK(run_command(d, cfg).exit_code == 2);
    CHECK(run_command(make("check", "no/such/file"), cfg).exit_code == 2);

    auto h = make("hierarchy");
    h.h0 = "H0";
    h.h1 = "H1";
    h.seed = "L - 1/12*phi^";
    CHECK(run_command(h, cfg).exit_code == 2);
    h.seed = "L - 1/12*phi^2";
    h.steps = 1;
    CHECK(run_command(h, cfg).exit_code == 0);

    // skewadjoint but not Poisson
    std::string path = temp_model("[algebra]\ngenerators = u\n\n[structure K]\nH[1][1] = (u'')*dinv*(u'')\n");
    auto bad = run_command(make("check", path), cfg);
    CHECK(bad.exit_code == 1);
    CHECK(count_lines(bad, "JACOBI (1,1,1)", "FAIL") == 1);

    // not skewadjoint
    std::ofstream(path) << "[algebra]\ngenerators = u\n\n[structure K]\nH[1][1] = d^2\n";
    auto ns = run_command(make("check", path), cfg);
    CHECK(ns.exit_code == 2);
    CHECK(ns.error.find("NotSkewadjoint") != std::string::npos);
    std::remove(path.c_str());

    CHECK(exit_code_for(ErrorKind::NoWitness) == 3);
    CHECK(exit_code_for(ErrorKind::DenominatorVanishes) == 3);
    CHECK(exit_code_for(ErrorKind::Mismatch) == 1);
    CHECK(exit_code_for(ErrorKind::SyntaxError) == 2);
}

TEST_CASE("bracket command") {
    RunConfig cfg;
    auto b = make("bracket");
    b.structure = "H1";
    b.left = "L";
    b.right = "psip";
    auto r = run_command(b, cfg);
    CHECK(r.exit_code == 0);
    REQUIRE(!r.sections.empty());
    REQUIRE(!r.sections[0].lines.empty());
    CHECK(r.sections[0].lines[0] == "{L_lambda psip} = (3/2*psip)*lambda^1 + (psip')");
}

TEST_CASE("reports are deterministic") {
    RunConfig cfg;
    auto d = make("dirac");
    d.structure = "H1";
    d.constraints = "phi";
    d.reduce = true;
    auto a = run_command(d, cfg), b = run_command(d, cfg);
    CHECK(a.exit_code == 0);
    CHECK(a.text() == b.text());
    CHECK(a.json() == b.json());
    CHECK(a.json().find("\"exit\": 0") != std::string::npos);
}

TEST_CASE("emitted reduced model re-parses to the same operator") {
    RunConfig cfg;
    auto d = make("dirac");
    d.structure = "H1";
    d.constraints = "phi";
    d.reduce = true;
    auto r = run_command(d, cfg);
    auto it = std::find_if(r.sections.begin(), r.sections.end(), [](const auto& s) { return s.title == "MODEL"; });
    REQUIRE(it != r.sections.end());
    std::string text;
    for (const auto& l : it->lines) text += l + "\n";
    auto back = parse_model(text, 8);

    auto mf = load_model("sl3min", 8);
    auto res = dirac_reduce(mf.structure("H1"), mf.constraint("phi"), 8);
    REQUIRE(res.HD_form);
    CHECK(back.structure("H1D").H.agrees(res.HD_form->normal(8), 8));
}

TEST_CASE("environment depth override") {
    setenv("PVADIRAC_DEPTH", "10", 1);
    auto cfg = config_from_env();
    CHECK(cfg.depth_d == 10);
    CHECK(cfg.depth_lambda == 10);
    CHECK(cfg.depth_mu == 10);
    setenv("PVADIRAC_DEPTH", "1", 1);
    CHECK_THROWS_AS(config_from_env(), Error);
    unsetenv("PVADIRAC_DEPTH");
    CHECK(config_from_env().depth_d == 8);
}

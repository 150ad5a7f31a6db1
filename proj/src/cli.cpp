#include "pvad/cli.hpp"
#include "pvad/diffring.hpp"
#include "pvad/expr.hpp"
#include "pvad/hierarchy.hpp"
#include "pvad/model.hpp"

#include <json.hpp>

#include <cstdlib>
#include <random>
#include <sstream>

namespace pvad {

namespace {

CheckLine check(const std::string& what, bool ok) { return {what + ": " + (ok ? "PASS" : "FAIL"), ok}; }

std::string entry_text(const PVAStructure& s, int i, int j, int k) {
    if (s.form) return emit_entry(*s.form, i, j, *s.alg);
    return s.normal(k)(i, j).str(*s.alg);
}

std::vector<std::string> matrix_lines(const PVAStructure& s, int k) {
    std::vector<std::string> out;
    for (int i = 0; i < s.size(); ++i)
        for (int j = 0; j < s.size(); ++j)
            out.push_back("H[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "] = " + entry_text(s, i, j, k));
    return out;
}

// small random differential polynomials for the skewsymmetry samples
DiffFrac random_element(std::mt19937& rng, int ngen) {
    std::uniform_int_distribution<int> gen(0, ngen - 1), ord(0, 2), coef(-3, 3), len(1, 3), deg(1, 2);
    DiffPoly p;
    int terms = len(rng);
    for (int t = 0; t < terms; ++t) {
        DiffPoly m(1);
        int d = deg(rng);
        for (int f = 0; f < d; ++f) m = m * DiffPoly::jet(gen(rng), ord(rng));
        int c = coef(rng);
        p += m * Rational(c == 0 ? 1 : c);
    }
    return DiffFrac(p);
}

void structure_checks(ReportSection& sec, const PVAStructure& s, const RunConfig& cfg) {
    int k = cfg.depth_d;
    sec.checks.push_back(check("SKEWADJOINT " + s.name, is_skewadjoint(s.normal(k + 2), k)));
    std::mt19937 rng(cfg.seed);
    std::vector<std::pair<DiffFrac, DiffFrac>> samples;
    for (int n = 0; n < 3; ++n) samples.emplace_back(random_element(rng, s.alg->ngen()), random_element(rng, s.alg->ngen()));
    auto skew = check_skewsymmetry(s, samples, k);
    sec.checks.push_back(check("SKEWSYMMETRY " + s.name + " on " + std::to_string(samples.size()) + " samples", skew.pass));
    auto jac = check_jacobi(s, cfg.depth_lambda, cfg.depth_mu);
    auto lines = jac.lines();
    if (!jac.supported) {
        sec.checks.push_back({lines.empty() ? "JACOBI: UNSUPPORTED" : lines.front(), false});
        return;
    }
    for (std::size_t t = 0; t < jac.triples.size(); ++t) sec.checks.push_back({lines[t], jac.triples[t].pass});
}

PVAStructure load_structure(const ModelFile& mf, const std::string& name) {
    if (name.empty()) fail(ErrorKind::UnknownSymbol, "a structure name is required");
    return mf.structure(name);
}

Report cmd_check(const Command& c, const RunConfig& cfg) {
    Report r;
    auto mf = load_model(c.file, cfg.depth_d);
    std::vector<std::string> names = c.structure.empty() ? mf.order : std::vector<std::string>{c.structure};
    for (const auto& n : names) {
        ReportSection sec{"STRUCTURE " + n, {}, {}};
        structure_checks(sec, load_structure(mf, n), cfg);
        r.sections.push_back(std::move(sec));
    }
    if (c.structure.empty() && names.size() > 1) {
        ReportSection sec{"COMPATIBILITY", {}, {}};
        for (std::size_t a = 0; a < names.size(); ++a)
            for (std::size_t b = a + 1; b < names.size(); ++b) {
                const auto& x = mf.structure(names[a]);
                const auto& y = mf.structure(names[b]);
                if (x.alg != y.alg || x.size() != y.size()) continue;
                auto cr = check_compatibility(x, y, cfg.depth_lambda, cfg.depth_mu);
                sec.checks.push_back(check("COMPATIBLE " + names[a] + " " + names[b], cr.pass));
            }
        r.sections.push_back(std::move(sec));
    }
    return r;
}

Report cmd_bracket(const Command& c, const RunConfig& cfg) {
    Report r;
    auto mf = load_model(c.file, cfg.depth_d);
    auto s = load_structure(mf, c.structure);
    const auto& alg = *s.alg;
    DiffFrac f = parse_function(c.left, alg), g = parse_function(c.right, alg);
    LambdaSeries b = c.dirac.empty() ? master_bracket(s, f, g, cfg.depth_d)
                                     : dirac_bracket(s, mf.constraint(c.dirac), f, g, cfg.depth_d);
    std::string tag = c.dirac.empty() ? "" : "^D";
    r.sections.push_back({"BRACKET", {"{" + c.left + "_lambda " + c.right + "}" + tag + " = " + b.str(alg)}, {}});
    return r;
}

Report cmd_dirac(const Command& c, const RunConfig& cfg) {
    Report r;
    int k = cfg.depth_d;
    auto mf = load_model(c.file, k);
    auto s = load_structure(mf, c.structure);
    const auto& th = mf.constraint(c.constraints);
    MatrixOp cm = constraint_matrix(s, th, k);
    ReportSection csec{"CONSTRAINT MATRIX", {}, {}};
    for (int i = 0; i < cm.rows(); ++i)
        for (int j = 0; j < cm.cols(); ++j)
            csec.lines.push_back("C[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "] = " + cm(i, j).str(*s.alg));
    r.sections.push_back(csec);
    DiracResult d = c.reduce ? dirac_reduce(s, th, k) : dirac_modify(s, th, k);
    auto t = tilde_structure(d, s, k);
    r.sections.push_back({"MODIFIED " + t.name, matrix_lines(t, k), d.checks});
    if (c.reduce) {
        auto red = reduced_structure(d, s.name + "D", k);
        r.sections.push_back({"REDUCED " + red.name, matrix_lines(red, k), {}});
        std::string text = red.form ? emit_model(red.name, *red.form, *red.alg) : emit_model(red.name, red.H, *red.alg);
        ReportSection m{"MODEL", {}, {}};
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);) m.lines.push_back(line);
        r.sections.push_back(std::move(m));
    }
    return r;
}

Report cmd_hierarchy(const Command& c, const RunConfig& cfg) {
    Report r;
    auto mf = load_model(c.file, cfg.depth_d);
    auto s0 = load_structure(mf, c.h0);
    auto s1 = load_structure(mf, c.h1);
    if (c.seed.empty()) fail(ErrorKind::SyntaxError, "a seed density is required");
    if (c.steps < 0) fail(ErrorKind::IndexOutOfRange, "steps must be non-negative");
    const auto& alg = *s1.alg;
    auto st = run_hierarchy(s0, s1, parse_poly(c.seed, alg), c.steps);
    ReportSection sec{"HIERARCHY", hierarchy_report(st, alg), {}};
    sec.checks.push_back(check("HIERARCHY " + c.h0 + " " + c.h1, st.pass()));
    r.sections.push_back(std::move(sec));
    ReportSection lead{"LEADING SYMBOLS", {}, {}};
    for (std::size_t n = 0; n < st.steps.size(); ++n)
        for (std::size_t i = 0; i < st.steps[n].P.size(); ++i) {
            if (st.steps[n].P[i].is_zero()) continue;
            auto ls = leading_symbol(st.steps[n].P, static_cast<int>(i));
            lead.lines.push_back("P_" + std::to_string(n) + "[" + alg.names[i] + "]: order=" + std::to_string(ls.order) +
                                 " coeff=" + to_string(ls.coeff));
        }
    r.sections.push_back(std::move(lead));
    return r;
}

// ---------------------------------------------------------------- sl3

bool same_vec(const FracVec& a, const std::vector<std::string>& expect, const AlgebraDescriptor& alg) {
    if (a.size() != expect.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != parse_function(expect[i], alg)) return false;
    return true;
}

bool matrix_matches(const MatrixOp& m, const std::vector<std::vector<std::string>>& expect, const AlgebraDescriptor& alg,
                    int k) {
    for (std::size_t i = 0; i < expect.size(); ++i)
        for (std::size_t j = 0; j < expect[i].size(); ++j)
            if (!m(static_cast<int>(i), static_cast<int>(j)).agrees(parse_operator(expect[i][j], alg, k + 4).normal, k))
                return false;
    return true;
}

std::vector<std::string> vec_lines(const std::string& label, const FracVec& v, const AlgebraDescriptor& alg) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(label + "[" + alg.names[i] + "] = " + v[i].str(alg));
    return out;
}

Report cmd_sl3(const RunConfig& cfg) {
    Report r;
    int k = cfg.depth_d, kl = cfg.depth_lambda, km = cfg.depth_mu;
    auto mf = load_model("sl3min", k);
    const auto& h0 = mf.structure("H0");
    const auto& h1 = mf.structure("H1");
    const auto& phi = mf.constraint("phi");
    const auto& a = *h1.alg;

    ReportSection s1{"POISSON STRUCTURES", {}, {}};
    for (const auto* s : {&h0, &h1}) {
        s1.checks.push_back(check("SKEWADJOINT " + s->name, is_skewadjoint(s->H, k)));
        auto j = check_jacobi(*s, kl, km);
        s1.checks.push_back(check("JACOBI " + s->name + " " + std::to_string(j.triples.size()) + " triples", j.pass));
    }
    s1.checks.push_back(check("COMPATIBLE H0 H1", check_compatibility(h0, h1, kl, km).pass));
    r.sections.push_back(std::move(s1));

    ReportSection s2{"CONSTRAINT phi", {}, {}};
    MatrixOp c1 = constraint_matrix(h1, phi, k);
    s2.lines.push_back("C(H1) = " + c1(0, 0).str(a));
    s2.checks.push_back(check("C(H1) = 6*d", c1(0, 0) == parse_operator("6*d", a).normal));
    s2.checks.push_back(check("C(H0) = 0", constraint_matrix(h0, phi, k).is_zero()));
    bool degenerate = false;
    try {
        dirac_modify(h0, phi, k);
    } catch (const Error& e) {
        degenerate = e.kind() == ErrorKind::NotInvertible;
    }
    s2.checks.push_back(check("MODIFY H0 is NotInvertible", degenerate));
    r.sections.push_back(std::move(s2));

    DiracResult d = dirac_reduce(h1, phi, k);
    r.sections.push_back({"DIRAC MODIFICATION H1", {}, d.checks});

    const auto& q = *d.quotient_alg;
    auto h0c = make_structure("H0C", d.quotient_alg, *central_reduce_form(h0, phi), k);
    auto h1d = reduced_structure(d, "H1D", k);
    ReportSection s3{"REDUCED STRUCTURES", {}, {}};
    for (const auto& l : matrix_lines(h0c, k)) s3.lines.push_back("H0C " + l);
    for (const auto& l : matrix_lines(h1d, k)) s3.lines.push_back("H1D " + l);
    s3.checks.push_back(check("H0C entries", h0c.H == parse_model("[algebra]\ngenerators = L, psip, psim\n[structure X]\n"
                                                                  "H[1][1] = -2*d\nH[2][3] = -1\n",
                                                                  k)
                                                      .structure("X")
                                                      .H));
    s3.checks.push_back(check(
        "H1D entries", matrix_matches(h1d.normal(k + 4),
                                      {{"d*L + L*d - 1/2*d^3", "1/2*d*psip + psip*d", "1/2*d*psim + psim*d"},
                                       {"d*psip + 1/2*psip*d", "3/2*psip*dinv*psip", "L - d^2 - 3/2*psip*dinv*psim"},
                                       {"d*psim + 1/2*psim*d", "-L + d^2 - 3/2*psim*dinv*psip", "3/2*psim*dinv*psim"}},
                                      q, k)));
    r.sections.push_back(std::move(s3));

    ReportSection s4{"FRACTIONAL DECOMPOSITIONS", {}, {}};
    const auto& mn = mf.fraction("MN").pair;
    FractionPair bar{quotient_project(mn.A, *d.tilde_alg), quotient_project(mn.B, *d.tilde_alg)};
    s4.checks.push_back(check("A1D = A1 + M N^-1", verify_fractional(mn, *d.A_D, k).ok));
    s4.checks.push_back(check("H1D = A1bar + Mbar Nbar^-1", verify_fractional(bar, *d.H_D, k).ok));
    r.sections.push_back(std::move(s4));

    ReportSection s5{"REDUCED POISSON STRUCTURES", {}, {}};
    for (const auto* s : {&h0c, &h1d}) {
        auto j = check_jacobi(*s, kl, km);
        s5.checks.push_back(check("JACOBI " + s->name + " " + std::to_string(j.triples.size()) + " triples", j.pass));
    }
    s5.checks.push_back(check("COMPATIBLE H0C H1D", check_compatibility(h0c, h1d, kl, km).pass));
    r.sections.push_back(std::move(s5));

    ReportSection s6{"HIERARCHY", {}, {}};
    auto st = run_hierarchy(h0, h1, parse_poly("L - 1/12*phi^2", a), 2);
    s6.lines.push_back("g_0 = " + st.densities[0].str(a));
    s6.lines.push_back("g_1 = " + st.densities[1].str(a));
    for (int n = 0; n < 2; ++n)
        for (const auto& l : vec_lines("P_" + std::to_string(n), st.steps[n].P, a)) s6.lines.push_back(l);
    s6.checks.push_back(check("LENARD-MAGRI relations and involution", st.pass()));
    s6.checks.push_back(check("g_1", equal_mod_derivatives(st.densities[1],
                                                          parse_poly("1/2*(psip*psim' - psim*psip' - phi*psip*psim)"
                                                                     " - 1/4*(L - 1/12*phi^2)^2",
                                                                     a),
                                                          4)));
    s6.checks.push_back(check("P_0", same_vec(st.steps[0].P,
                                              {"L' - 1/6*phi*phi'", "psip' + 1/2*phi*psip", "psim' - 1/2*phi*psim", "0"},
                                              a)));
    {
        // t_1 flow with Lt = L - phi^2/12 written out
        std::string Lt = "(L - 1/12*phi^2)", dLt = "(L' - 1/6*phi*phi')";
        std::string d3Lt = "(L''' - 1/2*phi'*phi'' - 1/6*phi*phi''')";
        std::string pL = "1/4*" + d3Lt + " - 3/2*" + Lt + "*" + dLt + " + 3/2*(psip*psim'' - psim*psip'')" +
                         " - 3/2*(phi'*psip*psim + phi*psip'*psim + phi*psip*psim')";
        auto psi = [&](const std::string& p, const std::string& s) {
            return p + "''' " + s + " 3/2*phi*" + p + "'' " + s + " 1/2*" + p + "*phi'' " + s + " 3/2*phi'*" + p +
                   "' - 3/2*" + Lt + "*" + p + "' - 3/4*" + p + "*" + dLt + " " + (s == "+" ? "-" : "+") +
                   " 3/4*phi*" + p + "*" + Lt + " + 3/4*phi^2*" + p + "' + 3/4*" + p + "*phi*phi' " + s + " 3/2*" + p +
                   "*psip*psim " + s + " 1/8*phi^3*" + p;
        };
        s6.checks.push_back(check("P_1", same_vec(st.steps[1].P, {pL, psi("psip", "+"), psi("psim", "-"), "0"}, a)));
    }
    bool phi_zero = true;
    for (const auto& s : st.steps) phi_zero = phi_zero && s.P[3].is_zero();
    s6.checks.push_back(check("phi-component of every flow is 0", phi_zero));
    r.sections.push_back(std::move(s6));

    ReportSection s7{"REDUCED HIERARCHY", {}, {}};
    auto h1f = h1d;
    h1f.frac = bar;
    auto rs = run_hierarchy(h0c, h1f, parse_poly("L", q), 3);
    s7.lines.push_back("g_0 = " + rs.densities[0].str(q));
    s7.lines.push_back("g_1 = " + rs.densities[1].str(q));
    for (int n = 0; n < 2; ++n)
        for (const auto& l : vec_lines("P_" + std::to_string(n), rs.steps[n].P, q)) s7.lines.push_back(l);
    s7.checks.push_back(check("LENARD-MAGRI relations and involution", rs.pass()));
    s7.checks.push_back(check("P_0", same_vec(rs.steps[0].P, {"L'", "psip'", "psim'"}, q)));
    s7.checks.push_back(check("P_1", same_vec(rs.steps[1].P,
                                              {"1/4*L''' - 3/2*L*L' + 3/2*(psip*psim'' - psim*psip'')",
                                               "psip''' - 3/2*L*psip' - 3/4*psip*L' + 3/2*psip^2*psim",
                                               "psim''' - 3/2*L*psim' - 3/4*psim*L' - 3/2*psip*psim^2"},
                                              q)));
    bool coherent = true;
    auto amb = run_hierarchy(h0, h1, parse_poly("L - 1/12*phi^2", a), 3);
    for (int n = 0; n < 3; ++n)
        for (int i = 0; i < 3; ++i)
            coherent = coherent && quotient_project(amb.steps[n].P[i], *d.tilde_alg) == rs.steps[n].P[i];
    s7.checks.push_back(check("projected ambient flows equal reduced flows", coherent));
    r.sections.push_back(std::move(s7));

    ReportSection s8{"LEADING SYMBOLS", {}, {}};
    bool orders = true, mags = true;
    for (int n = 0; n < 3; ++n)
        for (int i = 0; i < 3; ++i) {
            auto ls = leading_symbol(rs.steps[n].P, i);
            s8.lines.push_back("P_" + std::to_string(n) + "[" + q.names[i] + "]: order=" + std::to_string(ls.order) +
                               " coeff=" + to_string(ls.coeff));
            orders = orders && ls.order == 2 * n + 1;
            Rational expect = i == 0 ? Rational(1, 1 << (2 * n)) : Rational(1);
            mags = mags && abs(ls.coeff) == expect;
        }
    s8.checks.push_back(check("orders 2n+1", orders));
    s8.checks.push_back(check("coefficient magnitudes 4^-n on L, 1 on psi", mags));
    r.sections.push_back(std::move(s8));
    return r;
}

} // namespace

bool Report::pass() const {
    for (const auto& s : sections)
        for (const auto& c : s.checks)
            if (!c.pass) return false;
    return error.empty();
}

std::string Report::text() const {
    std::ostringstream os;
    for (const auto& s : sections) {
        os << "== " << s.title << " ==\n";
        for (const auto& l : s.lines) os << l << "\n";
        for (const auto& c : s.checks) os << c.text << "\n";
    }
    if (!error.empty()) os << "ERROR " << error << "\n";
    os << "RESULT: " << (exit_code == 0 ? "PASS" : "FAIL") << " (exit " << exit_code << ")\n";
    return os.str();
}

std::string Report::json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["sections"] = nlohmann::ordered_json::array();
    for (const auto& s : sections) {
        nlohmann::ordered_json js;
        js["title"] = s.title;
        js["lines"] = s.lines;
        js["checks"] = nlohmann::ordered_json::array();
        for (const auto& c : s.checks) js["checks"].push_back({{"text", c.text}, {"pass", c.pass}});
        j["sections"].push_back(std::move(js));
    }
    if (!error.empty()) j["error"] = error;
    j["pass"] = pass();
    j["exit"] = exit_code;
    return j.dump(2) + "\n";
}

RunConfig config_from_env() {
    RunConfig cfg;
    if (const char* e = std::getenv("PVADIRAC_DEPTH")) {
        char* end = nullptr;
        long v = std::strtol(e, &end, 10);
        if (end == e || *end != '\0' || v < 2 || v > 64)
            fail(ErrorKind::SyntaxError, std::string("PVADIRAC_DEPTH must be an integer in [2, 64], got '") + e + "'");
        cfg.depth_d = cfg.depth_lambda = cfg.depth_mu = static_cast<int>(v);
    }
    return cfg;
}

int exit_code_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::NotInvertible:
    case ErrorKind::NoWitness:
    case ErrorKind::DenominatorVanishes:
    case ErrorKind::Degenerate: return 3;
    case ErrorKind::Mismatch:
    case ErrorKind::HelmholtzViolation:
    case ErrorKind::NotCentral: return 1;
    default: return 2;
    }
}

Report run_command(const Command& cmd, const RunConfig& cfg) {
    Report r;
    int saved = default_depth();
    set_default_depth(cfg.depth_d);
    try {
        if (cmd.name == "check") r = cmd_check(cmd, cfg);
        else if (cmd.name == "bracket") r = cmd_bracket(cmd, cfg);
        else if (cmd.name == "dirac") r = cmd_dirac(cmd, cfg);
        else if (cmd.name == "hierarchy") r = cmd_hierarchy(cmd, cfg);
        else if (cmd.name == "sl3") r = cmd_sl3(cfg);
        else fail(ErrorKind::SyntaxError, "unknown command " + cmd.name);
        r.exit_code = r.pass() ? 0 : 1;
    } catch (const Error& e) {
        r.error = e.what();
        r.exit_code = exit_code_for(e.kind());
    }
    set_default_depth(saved);
    r.command = cmd.name;
    return r;
}

} // namespace pvad

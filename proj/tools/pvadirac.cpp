#include "pvad/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    pvad::RunConfig cfg;
    try {
        cfg = pvad::config_from_env();
    } catch (const pvad::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    pvad::Command cmd;
    std::string emit = "text";

    CLI::App app{"Dirac reduction and Lenard-Magri hierarchies for Poisson vertex algebras"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--depth", cfg.depth_d, "truncation depth for dinv")->check(CLI::Range(2, 64));
    app.add_option("--klambda", cfg.depth_lambda, "lambda depth for Jacobi checks")->check(CLI::Range(2, 64));
    app.add_option("--kmu", cfg.depth_mu, "mu depth for Jacobi checks")->check(CLI::Range(2, 64));
    app.add_option("--sample-seed", cfg.seed, "seed for random sample suites");
    app.add_option("--emit", emit, "report format")->check(CLI::IsMember({"text", "json"}));

    auto* check = app.add_subcommand("check", "skewsymmetry, Jacobi and compatibility");
    check->add_option("file", cmd.file, "model file or built-in model name")->required();
    check->add_option("--structure", cmd.structure);

    auto* bracket = app.add_subcommand("bracket", "lambda-bracket of two elements");
    bracket->add_option("file", cmd.file)->required();
    bracket->add_option("--structure", cmd.structure)->required();
    bracket->add_option("--left", cmd.left)->required();
    bracket->add_option("--right", cmd.right)->required();
    bracket->add_option("--dirac", cmd.dirac, "constraint set for the Dirac bracket");

    auto* dirac = app.add_subcommand("dirac", "Dirac modification and reduction");
    dirac->add_option("file", cmd.file)->required();
    dirac->add_option("--structure", cmd.structure)->required();
    dirac->add_option("--constraints", cmd.constraints)->required();
    dirac->add_flag("--reduce", cmd.reduce);

    auto* hier = app.add_subcommand("hierarchy", "Lenard-Magri recursion");
    hier->add_option("file", cmd.file)->required();
    hier->add_option("--h0", cmd.h0)->required();
    hier->add_option("--h1", cmd.h1)->required();
    hier->add_option("--seed", cmd.seed, "seed density g_0")->required();
    hier->add_option("--steps", cmd.steps)->check(CLI::Range(0, 20));

    auto* sl3 = app.add_subcommand("sl3", "reproduce the sl3 minimal nilpotent example");
    sl3->add_option("--emit", emit)->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    cmd.name = app.get_subcommands().front()->get_name();
    cfg.json = emit == "json";
    pvad::Report r = pvad::run_command(cmd, cfg);
    std::cout << (cfg.json ? r.json() : r.text());
    if (!r.error.empty() && !cfg.json) std::cerr << r.error << "\n";
    return r.exit_code;
}

#pragma once

#include "error.hpp"
#include "pva.hpp"

#include <string>
#include <vector>

namespace pvad {

struct RunConfig {
    int depth_d = 8;
    int depth_lambda = 6;
    int depth_mu = 6;
    unsigned seed = 0;
    bool json = false;
};

// defaults, with PVADIRAC_DEPTH overriding all three depths when set
RunConfig config_from_env();

struct Command {
    std::string name; // check | bracket | dirac | hierarchy | sl3
    std::string file;
    std::string structure, constraints;
    std::string left, right, dirac;
    std::string h0, h1, seed;
    int steps = 2;
    bool reduce = false;
};

struct ReportSection {
    std::string title;
    std::vector<std::string> lines;
    std::vector<CheckLine> checks;
};

struct Report {
    std::string command;
    std::vector<ReportSection> sections;
    int exit_code = 0;
    std::string error;

    bool pass() const;
    std::string text() const;
    std::string json() const;
};

// 0 all checks pass, 1 a check failed, 2 bad input, 3 degenerate
int exit_code_for(ErrorKind k);
Report run_command(const Command& cmd, const RunConfig& cfg);

} // namespace pvad

#include "tancone/script.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace tancone;

int main(int argc, char** argv) {
    CLI::App app{"tangent cone engines and stratification checks"};

    std::string script_path, json_path, eps_schedule, repro;
    uint64_t seed = 0;
    int trunc = 16, grid = 8;
    bool strict = false;
    std::vector<std::string> engines;

    app.add_option("--script", script_path, "script file to run");
    app.add_option("--repro-example", repro, "run a canned example: cusp | surface3d");
    app.add_option("--json", json_path, "write the JSON report here");
    app.add_option("--seed", seed, "seed for the numeric engines");
    app.add_option("--eps-schedule", eps_schedule, "comma-separated epsilon schedule");
    app.add_option("--trunc", trunc, "truncation order for printed witness series");
    app.add_option("--grid", grid, "default direction-grid resolution");
    app.add_option("--engines", engines, "default engines for cone-scan")->delimiter(',');
    app.add_flag("--strict", strict, "stop at the first failing command");

    CLI11_PARSE(app, argc, argv);

    if (script_path.empty() == repro.empty()) {
        std::cerr << "exactly one of --script or --repro-example is required\n";
        return 1;
    }

    ScriptOptions opts;
    opts.cfg.seed = seed;
    opts.trunc = trunc;
    opts.grid = grid;
    opts.strict = strict;
    if (!engines.empty()) opts.engines = engines;
    if (!eps_schedule.empty()) {
        opts.cfg.schedule.clear();
        std::istringstream is(eps_schedule);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            try {
                opts.cfg.schedule.push_back(std::stod(tok));
            } catch (const std::exception&) {
                std::cerr << "bad epsilon '" << tok << "' in --eps-schedule\n";
                return 1;
            }
        }
    }

    Report rep;
    try {
        if (!repro.empty()) {
            rep = repro_example(repro, opts);
        } else {
            std::ifstream in(script_path);
            if (!in) {
                std::cerr << "cannot read script: " << script_path << "\n";
                return 1;
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            rep = run_script(buf.str(), opts);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }

    std::cout << report_text(rep);
    if (!json_path.empty()) {
        try {
            emit_json(rep, json_path);
        } catch (const std::exception& ex) {
            std::cerr << "error: " << ex.what() << "\n";
            return 1;
        }
    }
    return rep.exit_code();
}

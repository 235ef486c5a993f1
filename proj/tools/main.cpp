#include <CLI11.hpp>

#include <iostream>

#include "gmvalloc/cli_run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Portfolio diversification and leverage under compound return models"};
    app.require_subcommand(1);

    gmv::cli::RunSpec spec;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-i,--input", spec.input_path, "JSON input file")->required();
        cmd->add_option("-o,--output", spec.output_path,
                        "Output file (default: stdout, written atomically)");
        cmd->add_option("-f,--format", spec.format, "Output format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--lambda", spec.lambda,
                        "Override the variance penalty from the input file");
        cmd->add_option("--risk-aversion", spec.risk_aversion,
                        "Override the risk aversion from the input file");
        cmd->add_option("--horizon", spec.horizon,
                        "Override the horizon T from the input file");
        cmd->add_option("--seed", spec.seed, "Override the simulation seed");
    };

    for (const char* name : {"calibrate", "allocate", "leverage", "bet", "simulate",
                             "pipeline"}) {
        CLI::App* cmd = app.add_subcommand(name);
        add_common(cmd);
        cmd->callback([&spec, name] { spec.command = name; });
    }

    CLI11_PARSE(app, argc, argv);
    return gmv::cli::run(spec, std::cout, std::cerr);
}

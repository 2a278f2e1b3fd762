#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "revhilbert/cli.hpp"

namespace rc = revhilbert::cli;

int main(int argc, char** argv) {
    CLI::App app{"Reverse Hilbert-type inequality toolkit"};
    app.require_subcommand(1);

    rc::RunConfig config;
    std::string format = "json";
    std::string input;
    std::string output;

    // "--h" is the step list, so help is long-form only.
    app.set_help_flag("--help", "Print this help message and exit");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--output", output, "Write the report to FILE instead of stdout");
    };

    auto* check = app.add_subcommand("check", "Evaluate T, S1, S2, S3 and the inequality on vector pairs");
    check->add_option("--input", input, "CSV file with header a,b; pairs separated by blank lines")->required();
    check->add_option("--lambda", config.lambda, "Constant in front of sqrt(S1 S3)");
    add_common(check);

    auto* approx = app.add_subcommand("approx", "Exponential-sum approximation of 1/(1+t)^2");
    approx->add_option("--h", config.h_list, "Comma-separated steps h")->delimiter(',');
    approx->add_option("--t-max", config.t_max, "Right end of the t window");
    approx->add_option("--grid", config.grid_points, "Number of log-spaced t points");
    add_common(approx);

    auto* sweep = app.add_subcommand("sweep", "Certificates g(delta(h)) <= lambda_emp(h) <= 2 sqrt 2");
    sweep->add_option("--h", config.h_list, "Comma-separated, strictly decreasing steps h")->delimiter(',');
    add_common(sweep);

    auto* lemmas = app.add_subcommand("lemmas", "Verify the cosh majorant and Fourier transform identities");
    lemmas->add_option("--lambda-scale", config.lambda_scale, "Check the majorant at this multiple of lambda0");
    add_common(lemmas);

    CLI11_PARSE(app, argc, argv);

    if (check->parsed()) config.command = rc::Command::check;
    if (approx->parsed()) config.command = rc::Command::approx;
    if (sweep->parsed()) config.command = rc::Command::sweep;
    if (lemmas->parsed()) config.command = rc::Command::lemmas;
    config.format = format == "csv" ? rc::Format::csv : rc::Format::json;

    std::ifstream in;
    if (!input.empty()) {
        config.input_path = input;
        in.open(input);
        if (!in) {
            std::cerr << "revhilbert: cannot open " << input << '\n';
            return rc::kExitError;
        }
    }

    if (output.empty()) {
        return rc::run(config, in.is_open() ? &in : nullptr, std::cout, std::cerr);
    }
    config.output_path = output;
    std::ofstream out(output);
    if (!out) {
        std::cerr << "revhilbert: cannot write " << output << '\n';
        return rc::kExitError;
    }
    return rc::run(config, in.is_open() ? &in : nullptr, out, std::cerr);
}

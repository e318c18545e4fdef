// tachyquench <experiment> --config <path> [--paper-scale] [--out <path>] [--format csv|json]
//
// Exit codes: 0 success, 1 tolerance failure, 2 config error, 3 numeric range error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tachyquench.hpp"

namespace tq = tachyquench;

namespace {

nlohmann::json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw tq::ConfigError("config", "cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw tq::ConfigError("config", e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Post-quench dynamics of a free lattice scalar with a tachyonic final mass"};
    std::string experiment, config_path, out_path, format;
    bool paper_scale = false;
    app.add_option("experiment", experiment, "lightcone | ee-growth | mi-contour | mi-cuts | lr-check | mode-report")
        ->required();
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_flag("--paper-scale", paper_scale, "use figure-scale parameters (N = 40001, m0 = 1000)");
    app.add_option("--out", out_path, "output table path (default: stdout); the summary goes to <out>.summary.txt");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto exp = tq::parse_experiment(experiment);
        auto config = tq::parse_config(exp, read_config(config_path), paper_scale);
        if (!out_path.empty())
            config.output = out_path;
        if (!format.empty())
            config.format = tq::parse_format(format);

        const tq::ExperimentResult result = tq::run(config);

        std::ostringstream table;
        if (config.format == tq::OutputFormat::csv)
            tq::write_csv(table, result);
        else
            tq::write_json(table, result);
        std::ostringstream summary;
        tq::write_summary(summary, result);

        if (config.output.empty()) {
            std::cout << table.str();
        } else {
            std::ofstream f(config.output, std::ios::binary);
            std::ofstream s(config.output + ".summary.txt", std::ios::binary);
            if (!f || !s)
                throw tq::ConfigError("output", "cannot write '" + config.output + "'");
            f << table.str();
            s << summary.str();
        }
        std::cerr << summary.str();
        return result.all_passed() ? 0 : 1;
    } catch (const tq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const tq::NumericRangeError& e) {
        std::cerr << "numeric range error at t = " << tq::format_number(e.time()) << ": " << e.what() << '\n';
        return 3;
    } catch (const tq::NonPhysicalState& e) {
        std::cerr << "numeric range error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

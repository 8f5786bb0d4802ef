#include "mgafem/config.hpp"
#include "mgafem/report.hpp"
#include "mgafem/run_table.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace mgafem;

namespace {

int cmd_run(const std::string& config_path, const std::optional<long>& max_ndof, const std::optional<std::string>& out)
{
    const ExperimentConfig config = load_config(config_path);
    for (const std::string& w : validate_params(config.adapt).warnings)
        std::cerr << "warning: " << w << "\n";
    const RunArtifacts result = run_experiment(config, RunOverrides{max_ndof, out});
    const LevelRecord& last = result.history.levels.back();
    std::cout << "levels " << result.history.levels.size() << ", final ndof " << last.ndof << ", delta "
              << format_double(last.delta) << "\n"
              << "csv    " << result.csv_path << "\n"
              << "report " << result.report_path << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& paths, const std::string& window, const std::string& axis,
               const std::optional<int>& degree)
{
    ReportOptions options;
    options.window = Window::parse(window);
    if (axis == "cumndof")
        options.axis = XAxis::cumndof;
    else if (axis != "ndof")
        throw InputError("unknown x axis '" + axis + "' (expected ndof or cumndof)");
    options.degree = degree;
    std::vector<NamedTable> tables;
    for (const std::string& path : paths)
        tables.push_back({std::filesystem::path(path).stem().string(), load_csv(path)});
    std::cout << rate_report(tables, options);
    return 0;
}

int cmd_validate(const std::string& config_path)
{
    const ExperimentConfig config = load_config(config_path);
    const ParameterCheck check = validate_params(config.adapt);
    const Mesh mesh = make_initial_mesh(config.domain, config.regions);
    config.problem.validate(mesh);
    std::cout << config_path << ": ok (" << mesh.num_elements() << " initial elements, " << config.adapt.num_goals
              << " goals, q_est = " << format_double(check.q_est) << ")\n";
    for (const std::string& w : check.warnings)
        std::cout << "warning: " << w << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multigoal adaptive finite elements for second-order elliptic problems"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<long> max_ndof;
    std::optional<std::string> out_dir;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment and write its CSV and rate report");
    run_cmd->add_option("config", config_path, "Experiment config file")->required();
    run_cmd->add_option("--max-ndof", max_ndof, "Override the max_ndof stop criterion");
    run_cmd->add_option("--out", out_dir, "Directory for the CSV and report");

    std::vector<std::string> csv_paths;
    std::string window = "decade";
    std::string axis = "ndof";
    std::optional<int> degree;
    auto* report_cmd = app.add_subcommand("report", "Fit convergence rates from run CSVs");
    report_cmd->add_option("csv", csv_paths, "Run CSV files")->required();
    report_cmd->add_option("--window", window, "decade or last:k")->capture_default_str();
    report_cmd->add_option("--x", axis, "ndof or cumndof")->capture_default_str();
    report_cmd->add_option("--degree", degree, "Polynomial degree (inferred when omitted)");

    auto* validate_cmd = app.add_subcommand("validate", "Check a config without running it");
    validate_cmd->add_option("config", config_path, "Experiment config file")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run_cmd)
            return cmd_run(config_path, max_ndof, out_dir);
        if (*report_cmd)
            return cmd_report(csv_paths, window, axis, degree);
        return cmd_validate(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

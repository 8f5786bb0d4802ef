#include "mgafem/config.hpp"
#include "mgafem/report.hpp"
#include "mgafem/run_table.hpp"

#include <filesystem>
#include <fstream>

namespace mgafem {

namespace {

std::string place(const std::string& path, const std::optional<std::string>& out_dir)
{
    if (!out_dir)
        return path;
    return (std::filesystem::path(*out_dir) / std::filesystem::path(path).filename()).string();
}

void write_file(const std::string& path, const std::string& contents)
{
    const std::filesystem::path p(path);
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path + "'");
    out << contents;
}

}  // namespace

RunArtifacts run_experiment(const ExperimentConfig& config, const RunOverrides& overrides)
{
    AdaptiveConfig adapt = config.adapt;
    if (overrides.max_ndof)
        adapt.stop.max_ndof = *overrides.max_ndof;
    const Mesh mesh = make_initial_mesh(config.domain, config.regions);

    RunArtifacts artifacts;
    artifacts.history = run(adapt, config.problem, mesh);
    artifacts.csv_path = place(config.output.csv_path, overrides.out_dir);
    artifacts.report_path = place(config.output.report_path, overrides.out_dir);

    const std::string csv = to_csv(artifacts.history.levels, adapt.num_goals);
    write_file(artifacts.csv_path, csv);

    NamedTable table{std::filesystem::path(artifacts.csv_path).stem().string(),
                     RunTable{adapt.num_goals, artifacts.history.levels}};
    ReportOptions options;
    options.degree = adapt.degree;
    std::string report;
    try {
        report = rate_report(std::span<const NamedTable>(&table, 1), options);
    } catch (const InputError& e) {
        report = std::string("rate report unavailable: ") + e.what() + "\n";
    }
    write_file(artifacts.report_path, report);
    return artifacts;
}

}  // namespace mgafem

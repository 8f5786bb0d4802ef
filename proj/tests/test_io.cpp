#include "mgafem/config.hpp"
#include "mgafem/report.hpp"
#include "mgafem/run_table.hpp"
#include "mgafem/toml_lite.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mgafem;

namespace {

const std::string kConfigs = std::string(MGAFEM_SOURCE_DIR) + "/configs/";

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string error_of(const std::string& text)
{
    try {
        parse_config(text, "test.toml");
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

const std::string kMinimal = R"(
[problem]
domain = { shape = "unit_square", cells = 4 }
f = 1.0

[[problem.goals]]
g = 1.0

[adapt]
theta = 0.5
c_mark = 2.0
n_goals = 1
degree = 1

[stop]
max_levels = 3
)";

std::string with(std::string text, const std::string& from, const std::string& to)
{
    text.replace(text.find(from), from.size(), to);
    return text;
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "mgafem_test_io";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("toml subset")
{
    const toml::Table t = toml::parse(R"(
# comment
title = "a \"quoted\" name"
n = 1_000
x = -2.5e-3
flag = true
list = [1, 2.0,
        3]  # trailing
[section]
inline = { a = 1, b = [[1, 2], [3, 4]] }
[[items]]
k = 1
[[items]]
k = 2
)");
    CHECK(t.find("title")->as_string() == "a \"quoted\" name");
    CHECK(t.find("n")->as_number() == 1000.0);
    CHECK(t.find("x")->as_number() == -2.5e-3);
    CHECK(std::get<bool>(t.find("flag")->data));
    CHECK(t.find("list")->as_array().size() == 3);
    const toml::Table& section = t.find("section")->as_table();
    CHECK(section.find("inline")->as_table().find("b")->as_array().size() == 2);
    CHECK(t.find("items")->as_array().size() == 2);

    CHECK_THROWS_AS(toml::parse("a = 1\na = 2\n"), toml::ParseError);
    CHECK_THROWS_AS(toml::parse("[s]\n[s]\n"), toml::ParseError);
    CHECK_THROWS_AS(toml::parse("a = [1, 2\n"), toml::ParseError);
    CHECK_THROWS_AS(toml::parse("a = \"open\n"), toml::ParseError);
    try {
        toml::parse("a = 1\nb = ?\n", "x.toml");
        FAIL("no error");
    } catch (const toml::ParseError& e) {
        CHECK(std::string(e.what()).find("x.toml:2") != std::string::npos);
    }
}

TEST_CASE("minimal config")
{
    const ExperimentConfig cfg = parse_config(kMinimal, "minimal.toml");
    CHECK(cfg.adapt.num_goals == 1);
    CHECK(*cfg.adapt.stop.max_levels == 3);
    CHECK(cfg.output.csv_path == "minimal.csv");
    CHECK(cfg.problem.load[0].scalar == 1.0);
    CHECK(cfg.problem.diffusion[0] == Mat2::Identity());
}

TEST_CASE("config errors name the offending line")
{
    CHECK(error_of(with(kMinimal, "theta = 0.5", "theta = 0")).find("test.toml:10") != std::string::npos);
    CHECK(error_of(with(kMinimal, "theta = 0.5", "theta = 0")).find("theta") != std::string::npos);
    CHECK(error_of(with(kMinimal, "degree = 1", "degree = 1\nsmoothing = 2")).find("test.toml:14") !=
          std::string::npos);
    CHECK(error_of(with(kMinimal, "degree = 1", "degree = 1\nsmoothing = 2")).find("unknown key 'smoothing'") !=
          std::string::npos);
    CHECK(error_of(with(kMinimal, "n_goals = 1", "n_goals = 2\nrho_irr = 0.5")).find("goals are defined") !=
          std::string::npos);
    CHECK(error_of(with(kMinimal, "max_levels = 3", "")).find("[stop] needs") != std::string::npos);
    CHECK(error_of(with(kMinimal, "f = 1.0", "f = [{ region = 3, value = 1.0 }]")).find("region 3") !=
          std::string::npos);
    CHECK(error_of(with(kMinimal, "c_mark = 2.0", "c_mark = \"two\"")).find("number") != std::string::npos);
    CHECK_FALSE(error_of(with(kMinimal, "[stop]", "[ablation]\nmode = \"restrict_goals(2)\"\n[stop]")).empty());
}

TEST_CASE("bundled configs")
{
    const ExperimentConfig square = load_config(kConfigs + "square_three_goals_p1.toml");
    CHECK(square.adapt.num_goals == 3);
    CHECK(square.adapt.theta == 0.5);
    CHECK(square.adapt.rho_irr == 0.25);
    CHECK(square.problem.load[1].vector == Vec2(-1.0, 0.0));
    CHECK(square.problem.goals[2][4].vector == Vec2(0.0, 1.5));
    CHECK(load_config(kConfigs + "square_three_goals_p2_afem_only.toml").adapt.ablation.mode ==
          Ablation::Mode::afem_only);

    for (const char* variant : {"cap_largest_sorted", "cap_largest_unsorted", "empty_sorted", "empty_unsorted"}) {
        const ExperimentConfig z = load_config(kConfigs + "zshape_eight_goals_" + variant + ".toml");
        CHECK(z.adapt.num_goals == 8);
        CHECK(z.adapt.theta == 0.3);
        CHECK(z.adapt.rho_irr == 0.1);
        CHECK(z.adapt.degree == 2);
        CHECK(z.problem.load[1].vector == Vec2(-10.0, 0.0));
        for (int i = 1; i <= 8; ++i) {
            const Vec2 expected = i % 3 == 0 ? Vec2(-10.0, 0.0) : i % 3 == 1 ? Vec2(1.0, 0.0) : Vec2(0.0, 100.0);
            CHECK(z.problem.goals[i - 1][i].vector == expected);
        }
        const Mesh mesh = make_initial_mesh(z.domain, z.regions);
        CHECK_NOTHROW(z.problem.validate(mesh));
    }
}

TEST_CASE("csv round trip")
{
    std::vector<LevelRecord> levels(3);
    for (int l = 0; l < 3; ++l) {
        LevelRecord& r = levels[l];
        r.level = l;
        r.active_goal = l % 2 + 1;
        r.n_elements = 10 + l;
        r.ndof = 5 + l;
        r.cumndof = 5 * (l + 1);
        r.eta = 0.1 / (l + 1);
        r.zeta = {1.0 / 3.0, l == 0 ? std::nan("") : 2e-17};
        r.delta = 0.3;
        r.marking = l == 0 ? "initial" : "irregular";
        r.n_mark = l;
        r.solves_primal = 1;
        r.solves_dual = 1;
        r.goal_values = {-0.1, 1e300};
    }
    const std::string text = to_csv(levels, 2);
    CHECK(text.starts_with(csv_header(2) + "\n"));
    CHECK(csv_header(2) ==
          "level,active_goal,n_elements,ndof,cumndof,eta,zeta_1,zeta_2,delta,marking,n_mark_u,n_mark_z,n_mark_uz,"
          "n_mark,solves_primal,solves_dual,goal_1,goal_2");
    CHECK(text.find(",nan,") != std::string::npos);
    std::istringstream in(text);
    const RunTable table = read_csv(in);
    CHECK(table.num_goals == 2);
    REQUIRE(table.levels.size() == 3);
    CHECK(table.levels[1].zeta[0] == 1.0 / 3.0);
    CHECK(table.levels[2].zeta[1] == 2e-17);
    CHECK(std::isnan(table.levels[0].zeta[1]));
    CHECK(table.levels[1].zeta_fresh == std::vector<bool>{false, true});
    CHECK(to_csv(table.levels, 2) == text);

    std::istringstream broken(csv_header(1) + "\n0,1,2,3,3,0.1,0.2,0.3,sometimes,1,1,1,1,1,1,0\n");
    CHECK_THROWS_WITH_AS(read_csv(broken, "b.csv"), doctest::Contains("b.csv:2"), InputError);
    std::istringstream wrong_header("level,eta\n");
    CHECK_THROWS_AS(read_csv(wrong_header), InputError);
}

TEST_CASE("run, csv and report are deterministic")
{
    ExperimentConfig cfg = load_config(kConfigs + "square_three_goals_p1.toml");
    const auto dir = scratch("determinism");
    RunOverrides overrides{30000L, dir.string()};
    const RunArtifacts first = run_experiment(cfg, overrides);
    const std::string csv1 = read_file(first.csv_path);
    const std::string report1 = read_file(first.report_path);
    const RunArtifacts second = run_experiment(cfg, overrides);
    CHECK(read_file(second.csv_path) == csv1);
    CHECK(read_file(second.report_path) == report1);
    CHECK(first.history.levels.size() >= 20);
    CHECK(csv1.substr(0, csv1.find('\n')) == csv_header(3));

    const RunTable table = load_csv(first.csv_path);
    const NamedTable a{"a", table}, b{"b", table};
    ReportOptions options;
    const RunReport ra = analyze_run(a, options);
    CHECK(ra.degree == 1);
    CHECK(ra.degree_inferred);
    REQUIRE(ra.checks.size() == 5);
    CHECK(ra.checks[0].quantity == "delta");
    CHECK(ra.checks[0].pass);
    CHECK(ra.checks[0].fit->slope >= -1.15);
    CHECK(ra.checks[0].fit->slope <= -0.85);
    const std::vector<NamedTable> same{a, a};
    const std::string r1 = rate_report(same, options);
    CHECK(rate_report(same, options) == r1);
    CHECK(r1.find("comparison") != std::string::npos);
    const std::vector<NamedTable> two{a, b};
    CHECK(rate_report(two, options).find("PASS") != std::string::npos);

    NamedTable one{"one", table};
    one.table.levels.resize(1);
    CHECK_THROWS_WITH_AS(rate_report(std::span(&one, 1), options), doctest::Contains("window too small"), InputError);
}

TEST_CASE("expected slope bands")
{
    CHECK(expected_band(Quantity::parse("delta"), 1) == std::pair(-1.15, -0.85));
    const auto [lo, hi] = expected_band(Quantity::parse("delta"), 2);
    CHECK(lo == doctest::Approx(-2.3));
    CHECK(hi == doctest::Approx(-1.7));
    CHECK(expected_band(Quantity::parse("zeta_2"), 1) == std::pair(-0.65, -0.35));
    LevelRecord r;
    r.n_elements = 1000;
    r.ndof = 2000;
    CHECK(infer_degree(r) == 2);
    r.ndof = 480;
    CHECK(infer_degree(r) == 1);
}

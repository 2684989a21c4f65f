#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gmech/scenario.hpp"
#include "json.hpp"

using namespace gmech;
namespace fs = std::filesystem;

namespace {

fs::path make_scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "gmech_scenario_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream out(p);
    out << j.dump(2) << '\n';
    return p;
}

nlohmann::json rigid_body_config() {
    return {{"system", "rigid_body3"},
            {"parameters", {{"I1", 1.0}, {"I2", 2.0}, {"I3", 3.0}}},
            {"initial_state", {1.0, 0.01, 0.0}},
            {"integrator", {{"step", 1e-3}, {"t_end", 0.5}, {"record_every", 50}}},
            {"outputs",
             {{"trajectory_path", "out/traj.csv"}, {"report_path", "out/report.json"}}}};
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) fields.push_back(cur);
    return fields;
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("run_scenario writes a trajectory and an invariant report", "[scenario]") {
    const fs::path dir = make_scratch("basic");
    const fs::path cfg = write_config(dir, rigid_body_config());

    std::ostringstream err;
    REQUIRE(run_scenario(cfg.string(), dir.string(), err) == 0);
    INFO(err.str());

    const auto lines = read_lines(dir / "out" / "traj.csv");
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0] == "t,Pi1,Pi2,Pi3");
    CHECK(lines[1] == "0,1,0.01,0");

    // every field prints in shortest round-trip form
    for (const std::string& field : split_csv(lines.back())) {
        const double v = std::stod(field);
        CHECK(format_g17(v) == field);
    }

    const auto rep = nlohmann::json::parse(read_all(dir / "out" / "report.json"));
    CHECK(rep["system"] == "rigid_body3");
    REQUIRE(rep["invariants"].size() == 2);
    CHECK(rep["invariants"][0]["name"] == "energy");
    CHECK(rep["invariants"][1]["name"] == "casimir_pi_sq");
    for (const auto& inv : rep["invariants"]) {
        CHECK(inv["max_rel_drift"].get<double>() <= 1e-10);
        CHECK(inv.contains("initial"));
        CHECK(inv.contains("max_abs_drift"));
    }
    CHECK(rep.contains("wall_time_seconds"));
}

TEST_CASE("config problems exit with code 2 and no outputs", "[scenario]") {
    const auto expect_config_error = [](const std::string& label, const fs::path& cfg,
                                        const fs::path& dir) {
        std::ostringstream err;
        INFO(label);
        CHECK(run_scenario(cfg.string(), dir.string(), err) == 2);
        CHECK(err.str().find("config error:") != std::string::npos);
        CHECK_FALSE(fs::exists(dir / "out"));
    };

    {
        const fs::path dir = make_scratch("missing");
        expect_config_error("missing file", dir / "nope.json", dir);
    }
    {
        const fs::path dir = make_scratch("malformed");
        const fs::path p = dir / "config.json";
        std::ofstream(p) << "{ this is not json";
        expect_config_error("malformed json", p, dir);
    }
    {
        const fs::path dir = make_scratch("unknown_system");
        auto j = rigid_body_config();
        j["system"] = "perpetual_motion";
        expect_config_error("unknown system", write_config(dir, j), dir);
    }
    {
        const fs::path dir = make_scratch("bad_step");
        auto j = rigid_body_config();
        j["integrator"]["step"] = 2.0; // exceeds t_end = 0.5
        expect_config_error("step > t_end", write_config(dir, j), dir);
    }
    {
        const fs::path dir = make_scratch("bad_record");
        auto j = rigid_body_config();
        j["integrator"]["record_every"] = 0;
        expect_config_error("record_every < 1", write_config(dir, j), dir);
    }
    {
        const fs::path dir = make_scratch("bad_state");
        auto j = rigid_body_config();
        j["initial_state"] = {1.0, 0.0};
        expect_config_error("wrong state size", write_config(dir, j), dir);
    }
    {
        const fs::path dir = make_scratch("grazing");
        nlohmann::json j = {
            {"system", "ray4d"},
            {"parameters", {{"lam", 0.9}, {"mu", 1.0}, {"nu", 0.1}}},
            {"initial_state", {1.0, 0.0, 2.0, 0.0}}, // |p|^2 > n^2(|q|^2)
            {"integrator", {{"step", 1e-3}, {"t_end", 1.0}}},
            {"outputs",
             {{"trajectory_path", "out/r.csv"}, {"report_path", "out/r.json"}}}};
        expect_config_error("inadmissible ray", write_config(dir, j), dir);
    }
}

TEST_CASE("runtime blowup exits with code 3", "[scenario]") {
    const fs::path dir = make_scratch("blowup");
    auto j = rigid_body_config();
    j["initial_state"] = {1e200, 1e200, 0.0}; // Pi x Omega overflows immediately
    const fs::path cfg = write_config(dir, j);

    std::ostringstream err;
    CHECK(run_scenario(cfg.string(), dir.string(), err) == 3);
    CHECK(err.str().find("runtime error:") != std::string::npos);
}

TEST_CASE("ray trajectories are parameterized by z", "[scenario]") {
    const fs::path dir = make_scratch("rays");
    nlohmann::json j = {
        {"system", "ray4d"},
        {"parameters", {{"lam", 0.9}, {"mu", 1.0}, {"nu", 0.1}}},
        {"initial_state", {0.5, 0.0, 0.05, 0.2}},
        {"integrator", {{"step", 1e-3}, {"t_end", 1.0}, {"record_every", 100}}},
        {"outputs", {{"trajectory_path", "out/r.csv"}, {"report_path", "out/r.json"}}}};
    std::ostringstream err;
    REQUIRE(run_scenario(write_config(dir, j).string(), dir.string(), err) == 0);
    CHECK(read_lines(dir / "out" / "r.csv")[0] == "z,q1,q2,p1,p2");

    nlohmann::json jr = {
        {"system", "ray_reduced"},
        {"parameters", {{"lam", 0.9}, {"mu", 1.0}, {"nu", 0.1}}},
        {"initial_state", {0.25, 0.0425, 0.025}},
        {"integrator", {{"step", 1e-3}, {"t_end", 1.0}, {"record_every", 100}}},
        {"outputs", {{"trajectory_path", "out/rr.csv"}, {"report_path", "out/rr.json"}}}};
    const fs::path dir2 = make_scratch("rays_reduced");
    REQUIRE(run_scenario(write_config(dir2, jr).string(), dir2.string(), err) == 0);
    CHECK(read_lines(dir2 / "out" / "rr.csv")[0] == "z,X,Y,Z");
}

TEST_CASE("two-pulson runs report the collision exchange", "[scenario]") {
    nlohmann::json j = {
        {"system", "pulsons"},
        {"parameters", {{"kernel", "peakon"}, {"alpha", 1.0}}},
        {"initial_state", {-5.0, 0.0, 2.0, 1.0}},
        {"integrator", {{"step", 1e-3}, {"t_end", 2.0}, {"record_every", 100}}},
        {"outputs", {{"trajectory_path", "out/p.csv"}, {"report_path", "out/p.json"}}}};
    const fs::path dir = make_scratch("pulsons2");
    std::ostringstream err;
    REQUIRE(run_scenario(write_config(dir, j).string(), dir.string(), err) == 0);
    const auto rep = nlohmann::json::parse(read_all(dir / "out" / "p.json"));
    REQUIRE(rep.contains("collision"));
    CHECK(rep["collision"]["p_in"][0] == 2.0);
    CHECK(rep["collision"]["p_in"][1] == 1.0);
    CHECK(rep["collision"]["p_out"].size() == 2);
    CHECK(rep["collision"]["min_separation"].get<double>() > 0.0);

    // a single pulson has nothing to collide with
    nlohmann::json j1 = j;
    j1["initial_state"] = {0.0, 1.0};
    const fs::path dir1 = make_scratch("pulsons1");
    REQUIRE(run_scenario(write_config(dir1, j1).string(), dir1.string(), err) == 0);
    const auto rep1 = nlohmann::json::parse(read_all(dir1 / "out" / "p.json"));
    CHECK_FALSE(rep1.contains("collision"));
}

TEST_CASE("repeated runs are byte-identical", "[scenario]") {
    const fs::path dirA = make_scratch("det_a");
    const fs::path dirB = make_scratch("det_b");
    nlohmann::json j = {
        {"system", "heavy_top"},
        {"parameters",
         {{"I1", 1.0}, {"I2", 2.0}, {"I3", 3.0}, {"m", 1.0}, {"g", 1.0},
          {"chi", {0.0, 0.0, 1.0}}}},
        {"initial_state", {0.2, 0.3, 1.0, 0.6, 0.0, 0.8}},
        {"integrator", {{"step", 1e-3}, {"t_end", 1.0}, {"record_every", 10}}},
        {"outputs", {{"trajectory_path", "out/ht.csv"}, {"report_path", "out/ht.json"}}}};

    std::ostringstream err;
    REQUIRE(run_scenario(write_config(dirA, j).string(), dirA.string(), err) == 0);
    REQUIRE(run_scenario(write_config(dirB, j).string(), dirB.string(), err) == 0);

    CHECK(read_all(dirA / "out" / "ht.csv") == read_all(dirB / "out" / "ht.csv"));

    auto repA = nlohmann::json::parse(read_all(dirA / "out" / "ht.json"));
    auto repB = nlohmann::json::parse(read_all(dirB / "out" / "ht.json"));
    repA.erase("wall_time_seconds");
    repB.erase("wall_time_seconds");
    CHECK(repA.dump() == repB.dump());
}

TEST_CASE("the registry lists every runnable system with its invariants", "[scenario]") {
    const std::string text = list_systems();
    for (const std::string name :
         {"rigid_body3", "rigid_body_son", "manakov", "symmetric_rb", "heavy_top",
          "heavy_top_kk", "pulsons", "epdiff_pde", "particle_vs_pde", "ray4d",
          "ray_reduced", "geodesic", "lorentz", "kk_charged", "free_ellipsoid"}) {
        INFO(name);
        CHECK(text.find(name + std::string("\n")) != std::string::npos);
    }
    CHECK(text.find("energy, gamma_sq, pi_dot_gamma") != std::string::npos);

    CHECK(find_system("rigid_body3") != nullptr);
    CHECK(find_system("flux_capacitor") == nullptr);
}

TEST_CASE("parse_scenario_config validates the document shape", "[scenario]") {
    const nlohmann::json good = rigid_body_config();
    const ScenarioConfig cfg = parse_scenario_config(good);
    CHECK(cfg.system == "rigid_body3");
    CHECK(cfg.integrator.step == 1e-3);
    CHECK(cfg.integrator.t_end == 0.5);
    CHECK(cfg.integrator.record_every == 50);
    CHECK(cfg.trajectory_path == "out/traj.csv");
    REQUIRE(cfg.initial_state.size() == 3);

    auto no_outputs = good;
    no_outputs.erase("outputs");
    CHECK_THROWS_AS(parse_scenario_config(no_outputs), ValidationError);

    auto no_integrator = good;
    no_integrator.erase("integrator");
    CHECK_THROWS_AS(parse_scenario_config(no_integrator), ValidationError);

    auto bad_state = good;
    bad_state["initial_state"] = {"one", 2.0};
    CHECK_THROWS_AS(parse_scenario_config(bad_state), ValidationError);

    auto neg_step = good;
    neg_step["integrator"]["step"] = -1.0;
    CHECK_THROWS_AS(parse_scenario_config(neg_step), ValidationError);
}

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string binary_path() {
    const char* env = std::getenv("ENTRYSIM_BIN");
    REQUIRE_MESSAGE(env != nullptr, "ENTRYSIM_BIN must point at the CLI binary");
    return env;
}

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() /
                         ("entrysim_cli_" + tag + "_" + std::to_string(::getpid()) + "_" +
                          std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CommandResult run_command(const std::string& args) {
    const fs::path dir = fresh_dir("io");
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = "'" + binary_path() + "' " + args + " > '" + out.string() +
                            "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    CommandResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("cli requires a subcommand") {
    CHECK(run_command("").exit_code == 2);
    CHECK(run_command("frobnicate").exit_code == 2);
}

TEST_CASE("schema subcommand prints valid JSON with the known sections") {
    const auto r = run_command("schema");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);
    for (const char* section : {"entry", "vehicle", "guidance", "simulation", "dispersion"}) {
        CHECK(doc.contains(section));
    }
    CHECK(doc.at("simulation").at("dt_s").at("default") == 0.01);
}

TEST_CASE("atmosphere subcommand dumps a CSV table") {
    const auto r = run_command("atmosphere 0 1000 1000");
    REQUIRE(r.exit_code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] ==
          "altitude_m,temperature_k,pressure_pa,density_kg_m3,speed_of_sound_m_s");
    CHECK(lines[1].rfind("0,288.15,101325,", 0) == 0);

    // density column is monotone non-increasing over a broad sweep
    const auto sweep = run_command("atmosphere 0 86000 1000");
    REQUIRE(sweep.exit_code == 0);
    const auto rows = lines_of(sweep.out);
    REQUIRE(rows.size() == 88);
    double prev = 1e9;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::istringstream row(rows[i]);
        std::string field;
        for (int f = 0; f < 4; ++f) std::getline(row, field, ',');
        const double rho = std::stod(field);
        CHECK(rho <= prev);
        prev = rho;
    }
}

TEST_CASE("atmosphere subcommand rejects a bad range") {
    CHECK(run_command("atmosphere 10 5 1").exit_code == 2);
    CHECK(run_command("atmosphere 0 1000 0").exit_code == 2);
}

TEST_CASE("run subcommand writes trajectory.csv and report.json") {
    const fs::path dir = fresh_dir("run");
    const auto r = run_command("run -o '" + dir.string() +
                               "' --override max_time=1 --override dt=0.01");
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(r.out.find("outcome=timeout") != std::string::npos);

    const auto csv = lines_of(slurp(dir / "trajectory.csv"));
    REQUIRE(csv.size() >= 2);
    CHECK(csv[0] == "t_s,x_m,y_m,z_m,v_m_s,theta_rad,psi_rad,phase,u_cmd,u_applied,mach,q_pa");
    CHECK(csv[1].rfind("0,0,100000,0,7600,", 0) == 0);
    CHECK(csv.size() == 102);  // header + one row per step + final state

    const json report = json::parse(slurp(dir / "report.json"));
    CHECK(report.at("outcome") == "timeout");
    for (const char* key :
         {"miss_distance_m", "impact_time_s", "impact_x_m", "impact_z_m", "downrange_m",
          "peak_applied_load_g", "peak_dynamic_pressure_pa", "saturation_fraction",
          "phase_entry_times_s"}) {
        CHECK(report.contains(key));
    }
    CHECK(report.at("phase_entry_times_s").contains("gravitational_descent"));
}

TEST_CASE("run subcommand accepts a config file and reports config errors") {
    const fs::path dir = fresh_dir("runcfg");
    const fs::path cfg = dir / "config.json";
    write_file(cfg, R"({"simulation": {"dt_s": 0.02, "max_time_s": 2}})");
    const auto ok = run_command("run -c '" + cfg.string() + "' -o '" + dir.string() + "'");
    CHECK(ok.exit_code == 0);

    const auto bad_value = run_command("run -o '" + dir.string() + "' --override dt=-1");
    CHECK(bad_value.exit_code == 2);
    CHECK(bad_value.err.find("dt") != std::string::npos);

    write_file(cfg, R"({"simulation": {"bogus_key": 1}})");
    const auto bad_key = run_command("run -c '" + cfg.string() + "' -o '" + dir.string() + "'");
    CHECK(bad_key.exit_code == 2);
    CHECK(bad_key.err.find("bogus_key") != std::string::npos);

    const auto missing = run_command("run -c /nonexistent.json -o '" + dir.string() + "'");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("montecarlo subcommand requires a dispersion section") {
    const fs::path dir = fresh_dir("mcfail");
    const auto r = run_command("montecarlo -o '" + dir.string() + "'");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("dispersion") != std::string::npos);

    const fs::path cfg = dir / "config.json";
    write_file(cfg, R"({"dispersion": {"n_runs": 0}})");
    CHECK(run_command("montecarlo -c '" + cfg.string() + "' -o '" + dir.string() + "'")
              .exit_code == 2);
}

TEST_CASE("montecarlo subcommand is byte-for-byte reproducible") {
    const fs::path dir = fresh_dir("mc");
    const fs::path cfg = dir / "config.json";
    write_file(cfg, R"({
        "simulation": {"dt_s": 0.05},
        "dispersion": {"n_runs": 4}
    })");
    const fs::path out_a = dir / "a";
    const fs::path out_b = dir / "b";
    const auto a =
        run_command("montecarlo -c '" + cfg.string() + "' -o '" + out_a.string() + "'");
    REQUIRE_MESSAGE(a.exit_code == 0, a.err);
    const auto b =
        run_command("montecarlo -c '" + cfg.string() + "' -o '" + out_b.string() + "'");
    REQUIRE_MESSAGE(b.exit_code == 0, b.err);

    const std::string ensemble_a = slurp(out_a / "ensemble.json");
    const std::string ensemble_b = slurp(out_b / "ensemble.json");
    REQUIRE(ensemble_a.size() > 0);
    CHECK(ensemble_a == ensemble_b);
    CHECK(slurp(out_a / "runs.csv") == slurp(out_b / "runs.csv"));

    const json stats = json::parse(ensemble_a);
    CHECK(stats.at("n") == 4);
    CHECK(stats.at("outcome_counts").at("impact") == 4);
    const auto runs = lines_of(slurp(out_a / "runs.csv"));
    REQUIRE(runs.size() == 5);
    CHECK(runs[0] ==
          "run_index,seed,mass_kg,gamma_deg,entry_altitude_m,density_multiplier,"
          "miss_m,impact_time_s,downrange_m,outcome");
}

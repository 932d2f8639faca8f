// End-to-end checks of the gasfc binary: exit codes, output files, and
// determinism of repeated invocations. GASFC_BIN is injected by CMake.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "FAIL: " << what << "\n";
    }
}

int run(const std::string& args) {
    const std::string cmd = std::string(GASFC_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

}  // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / "gasfc_cli_tests";
    fs::remove_all(dir);
    fs::create_directories(dir);

    // --version exits 0.
    expect(run("--version") == 0, "--version exits 0");

    // synth with a preset: file exists, identical on the second run.
    const fs::path igd = dir / "igd.csv";
    expect(run("synth --preset IGD --out " + igd.string() +
               " --from 2007-01-01 --to 2009-12-31") == 0,
           "synth preset exits 0");
    expect(fs::exists(igd), "synth wrote the CSV");
    const std::string first = slurp(igd);
    run("synth --preset IGD --out " + igd.string() + " --from 2007-01-01 --to 2009-12-31");
    expect(slurp(igd) == first, "synth output is byte-identical on rerun");

    // synth with an explicit spec file.
    const fs::path spec = dir / "spec.json";
    write(spec, R"({"kind":"TGD","base_level":90,"weekly_amplitudes":[1,1,1,1,1,0.9,0.85],
                   "yearly_amplitude":0.1,"weather_gain":2,"holiday_multiplier":0.7,
                   "noise_std":2,"seed":4})");
    expect(run("synth --spec " + spec.string() + " --out " + (dir / "tgd.csv").string()) == 0,
           "synth spec file exits 0");

    // Missing seed field: exit 2.
    write(spec, R"({"kind":"TGD","base_level":90,"weekly_amplitudes":[1,1,1,1,1,0.9,0.85],
                   "yearly_amplitude":0.1,"weather_gain":2,"holiday_multiplier":0.7,
                   "noise_std":2})");
    expect(run("synth --spec " + spec.string() + " --out " + (dir / "x.csv").string()) == 2,
           "synth without seed exits 2");

    // Usage errors exit 2.
    expect(run("synth --out " + (dir / "y.csv").string()) == 2,
           "synth without spec or preset exits 2");
    expect(run("bogus-subcommand") == 2, "unknown subcommand exits 2");

    // features dump.
    expect(run("features --series " + igd.string() + " --kind IGD --out " +
               (dir / "matrix.csv").string()) == 0,
           "features exits 0");
    {
        std::ifstream in(dir / "matrix.csv");
        std::string header;
        std::getline(in, header);
        expect(header.rfind("date,demand_lag1", 0) == 0, "matrix header starts as documented");
    }

    // backtest: build a tiny but complete config. Four calendar years keep a
    // non-empty training block after the 371-day history consumption.
    for (const char* kind : {"RGD", "IGD", "TGD"})
        run(std::string("synth --preset ") + kind + " --out " +
            (dir / (std::string(kind) + ".csv")).string() + " --from 2007-01-01 --to 2010-12-31");
    const fs::path cfg = dir / "config.json";
    write(cfg, std::string(R"({"series_paths":{"RGD":")") + (dir / "RGD.csv").string() +
                   R"(","IGD":")" + (dir / "IGD.csv").string() + R"(","TGD":")" +
                   (dir / "TGD.csv").string() +
                   R"("},"test_years":[2010],"models":["ridge"],
                        "grids":{"ridge":[{"model":"ridge","lambda":1.0}]},"seed":3})");
    const fs::path out1 = dir / "run1";
    const fs::path out2 = dir / "run2";
    expect(run("backtest --config " + cfg.string() + " --out " + out1.string() +
               " --jobs 1") == 0,
           "backtest exits 0");
    expect(fs::exists(out1 / "report.csv"), "backtest wrote report.csv");
    expect(run("backtest --config " + cfg.string() + " --out " + out2.string() +
               " --jobs 3") == 0,
           "backtest with different --jobs exits 0");
    expect(slurp(out1 / "report.csv") == slurp(out2 / "report.csv"),
           "report.csv is byte-identical across --jobs");

    // backtest with a test year before the data: exit 1.
    write(cfg, std::string(R"({"series_paths":{"RGD":")") + (dir / "RGD.csv").string() +
                   R"(","IGD":")" + (dir / "IGD.csv").string() + R"(","TGD":")" +
                   (dir / "TGD.csv").string() +
                   R"("},"test_years":[2007],"models":["ridge"],"seed":3})");
    expect(run("backtest --config " + cfg.string()) == 1,
           "backtest with too-early test year exits 1");

    // forecast: day-ahead numbers for a covered date; identical on rerun.
    write(cfg, std::string(R"({"series_paths":{"RGD":")") + (dir / "RGD.csv").string() +
                   R"(","IGD":")" + (dir / "IGD.csv").string() + R"(","TGD":")" +
                   (dir / "TGD.csv").string() +
                   R"("},"test_years":[2010],"models":["ridge"],
                        "grids":{"ridge":[{"model":"ridge","lambda":1.0}]},"seed":3})");
    const std::string fc_cmd = "forecast --config " + cfg.string() + " --date 2009-06-15";
    const std::string capture = std::string(GASFC_BIN) + " " + fc_cmd + " 2>/dev/null";
    auto capture_stdout = [&]() {
        std::string output;
        FILE* pipe = popen(capture.c_str(), "r");
        if (pipe) {
            char buf[256];
            while (fgets(buf, sizeof(buf), pipe)) output += buf;
            pclose(pipe);
        }
        return output;
    };
    const std::string fc1 = capture_stdout();
    expect(fc1.find("RGD ") != std::string::npos && fc1.find("GD ") != std::string::npos,
           "forecast prints the four series lines");
    expect(capture_stdout() == fc1, "forecast output is identical across invocations");

    // GD equals the sum of the three components (parse and add).
    {
        std::istringstream in(fc1);
        std::string name;
        double value = 0.0, sum = 0.0, gd = 0.0;
        while (in >> name >> value) {
            if (name == "GD")
                gd = value;
            else
                sum += value;
        }
        expect(std::abs(gd - sum) < 1e-9, "GD equals the component sum");
    }

    // forecast with no t-7 history: exit 1.
    expect(run("forecast --config " + cfg.string() + " --date 2007-01-03") == 1,
           "forecast without lag history exits 1");

    if (failures == 0) std::cout << "cli_tests: all checks passed\n";
    return failures == 0 ? 0 : 1;
}

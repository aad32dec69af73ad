#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "holopt/angular_spectrum.hpp"
#include "holopt/bench.hpp"
#include "holopt/io.hpp"
#include "holopt/rng.hpp"

using namespace holopt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(HOLOPT_BIN) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::string out;
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    const int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("help and usage errors") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("optimize-pat --help").code == 0);
    CHECK(run_cli("no-such-command").code == 2);
    CHECK(run_cli("optimize-pat --no-such-flag 1").code == 2);
    CHECK(run_cli("").code == 2);  // a subcommand is required
}

TEST_CASE("optimize-pat writes a reproducible run") {
    const auto dir = fresh_dir("holopt_cli_pat");
    const std::string pts = (dir / "pts.json").string();
    {
        ControlPointSet set;
        set.points.push_back({{0.0, 0.01, 0.1}, 1500.0});
        write_control_points(pts, set);
    }

    const std::string out1 = (dir / "run1").string(), out2 = (dir / "run2").string();
    const auto r1 = run_cli("optimize-pat --array single-sided-14 --points " + pts +
                            " --iters 20 --seed 3 --out " + out1);
    CHECK(r1.code == 0);
    for (const char* f : {"/phases.json", "/record.json", "/resolved_config.json",
                          "/field_z0.1.bin", "/field_z0.1.json"})
        CHECK(fs::exists(out1 + f));

    const auto r2 = run_cli("optimize-pat --array single-sided-14 --points " + pts +
                            " --iters 20 --seed 3 --out " + out2);
    CHECK(r2.code == 0);
    CHECK(slurp(out1 + "/phases.json") == slurp(out2 + "/phases.json"));
    CHECK(slurp(out1 + "/field_z0.1.bin") == slurp(out2 + "/field_z0.1.bin"));

    const auto rec1 = json::parse(slurp(out1 + "/record.json"));
    const auto rec2 = json::parse(slurp(out2 + "/record.json"));
    CHECK(rec1.at("loss_history") == rec2.at("loss_history"));
    CHECK(rec1.at("loss_history").size() == 21);

    const auto snap = json::parse(slurp(out1 + "/resolved_config.json"));
    CHECK(snap.at("iters") == 20);
    CHECK(snap.at("seed") == 3);
    CHECK(snap.at("array") == "single-sided-14");
}

TEST_CASE("optimize-pat validates inputs before touching the output directory") {
    const auto dir = fresh_dir("holopt_cli_pat_bad");
    const std::string out = (dir / "never").string();

    auto r = run_cli("optimize-pat --array single-sided-14 --points " +
                     (dir / "missing.json").string() + " --out " + out);
    CHECK(r.code == 2);
    CHECK(!fs::exists(out));

    r = run_cli("optimize-pat --array hex-7 --points x.json --out " + out);
    CHECK(r.code == 2);
    CHECK(!fs::exists(out));

    // both --array and --array-file is ambiguous
    r = run_cli("optimize-pat --array single-sided-14 --array-file f.json --points x --out " +
                out);
    CHECK(r.code == 2);
}

TEST_CASE("optimize-pat accepts a layout file") {
    const auto dir = fresh_dir("holopt_cli_layfile");
    const std::string lay = (dir / "lay.json").string();
    write_layout(lay, make_named_layout("single-sided-14"));
    const std::string pts = (dir / "pts.json").string();
    {
        ControlPointSet set;
        set.points.push_back({{0.0, 0.0, 0.1}, 1000.0});
        write_control_points(pts, set);
    }
    const auto r = run_cli("optimize-pat --array-file " + lay + " --points " + pts +
                           " --iters 5 --seed 0 --out " + (dir / "out").string());
    CHECK(r.code == 0);
}

TEST_CASE("config file seeds flags and explicit flags win") {
    const auto dir = fresh_dir("holopt_cli_cfg");
    const std::string pts = (dir / "pts.json").string();
    {
        ControlPointSet set;
        set.points.push_back({{0.0, 0.0, 0.1}, 1000.0});
        write_control_points(pts, set);
    }
    const std::string cfg = (dir / "cfg.json").string();
    std::ofstream(cfg) << R"({"iters": 5, "seed": 11})";

    const std::string out1 = (dir / "o1").string();
    auto r = run_cli("optimize-pat --array single-sided-14 --points " + pts + " --config " +
                     cfg + " --out " + out1);
    CHECK(r.code == 0);
    auto snap = json::parse(slurp(out1 + "/resolved_config.json"));
    CHECK(snap.at("iters") == 5);
    CHECK(snap.at("seed") == 11);

    const std::string out2 = (dir / "o2").string();
    r = run_cli("optimize-pat --array single-sided-14 --points " + pts + " --config " + cfg +
                " --iters 7 --out " + out2);
    CHECK(r.code == 0);
    snap = json::parse(slurp(out2 + "/resolved_config.json"));
    CHECK(snap.at("iters") == 7);  // flag beats file
    CHECK(snap.at("seed") == 11);

    // Unknown keys are typos, not silently ignored.
    const std::string badcfg = (dir / "bad.json").string();
    std::ofstream(badcfg) << R"({"itters": 5})";
    r = run_cli("optimize-pat --array single-sided-14 --points " + pts + " --config " + badcfg +
                " --out " + (dir / "o3").string());
    CHECK(r.code == 2);
}

TEST_CASE("optimize-plate runs both solvers and rejects empty targets") {
    const auto dir = fresh_dir("holopt_cli_plate");
    const std::string chart = std::string(HOLOPT_DATA_DIR) + "/usaf_64.pgm";

    const std::string dp = (dir / "dp").string(), ia = (dir / "ia").string();
    auto r = run_cli("optimize-plate --target " + chart + " --solver diffpat --iters 30 --out " + dp);
    CHECK(r.code == 0);
    r = run_cli("optimize-plate --target " + chart + " --solver iasa --iters 30 --out " + ia);
    CHECK(r.code == 0);

    for (const std::string& d : {dp, ia}) {
        for (const char* f : {"/phase_plane.bin", "/recon_amplitude.bin",
                              "/target_amplitude.bin", "/report.json", "/resolved_config.json"})
            CHECK(fs::exists(d + f));
    }
    const double psnr_dp = json::parse(slurp(dp + "/report.json")).at("psnr_db").get<double>();
    const double psnr_ia = json::parse(slurp(ia + "/report.json")).at("psnr_db").get<double>();
    CHECK(psnr_dp > psnr_ia);  // gradient solver beats the baseline here

    // All-black targets have no attainable image.
    const std::string black = (dir / "black.pgm").string();
    {
        PgmImage img;
        img.nx = img.ny = 16;
        img.pixels.assign(256, 0);
        write_pgm(black, img);
    }
    const std::string never = (dir / "never").string();
    r = run_cli("optimize-plate --target " + black + " --out " + never);
    CHECK(r.code == 2);
    CHECK(!fs::exists(never));

    // Bad solver or scale: usage errors.
    CHECK(run_cli("optimize-plate --target " + chart + " --solver newton --out " + never).code == 2);
    CHECK(run_cli("optimize-plate --target " + chart + " --target-scale potato --out " + never)
              .code == 2);
}

TEST_CASE("propagate applies the transfer function through files") {
    const auto dir = fresh_dir("holopt_cli_prop");
    Rng rng(12);
    ComplexPlane in;
    in.nx = in.ny = 16;
    in.dx = 150e-6;
    for (int i = 0; i < 256; ++i)
        in.values.push_back({uniform_range(rng, -1, 1), uniform_range(rng, -1, 1)});
    const std::string stem = (dir / "in").string();
    write_complex_grid(stem, in);

    // Zero distance with decaying evanescent waves: identity.
    const std::string out = (dir / "out").string();
    auto r = run_cli("propagate --in " + stem + " --out " + out + " --distance 0");
    CHECK(r.code == 0);
    const auto back = read_complex_grid(out);
    double worst = 0.0;
    for (int i = 0; i < 256; ++i) worst = std::max(worst, std::abs(back.values[i] - in.values[i]));
    CHECK(worst < 1e-12);
    CHECK(fs::exists(out + ".config.json"));

    // Accepts .bin paths too.
    r = run_cli("propagate --in " + stem + ".bin --out " + (dir / "out2").string() +
                " --distance 0.001");
    CHECK(r.code == 0);

    // Forward then adjoint in cutoff mode restores the band-limited part;
    // do one hop through the CLI each way and check energies are sane.
    const std::string fwd = (dir / "fwd").string(), rt = (dir / "rt").string();
    r = run_cli("propagate --in " + stem + " --out " + fwd +
                " --distance 0.02 --evanescent zero --pad 1");
    CHECK(r.code == 0);
    r = run_cli("propagate --in " + fwd + " --out " + rt +
                " --distance 0.02 --evanescent zero --pad 1 --adjoint");
    CHECK(r.code == 0);
    const auto fwd_plane = read_complex_grid(fwd);
    const auto rt_plane = read_complex_grid(rt);
    double e_fwd = 0.0, e_rt = 0.0;
    for (int i = 0; i < 256; ++i) {
        e_fwd += std::norm(fwd_plane.values[i]);
        e_rt += std::norm(rt_plane.values[i]);
    }
    CHECK(e_rt == doctest::Approx(e_fwd).epsilon(1e-10));  // adjoint keeps propagating energy

    CHECK(run_cli("propagate --in " + stem + " --out " + out + " --distance 0 --pad 3").code == 2);
    CHECK(run_cli("propagate --in " + (dir / "nope").string() + " --out " + out +
                  " --distance 0").code == 2);
}

TEST_CASE("bench writes complete, replayable output trees") {
    const auto a = fresh_dir("holopt_cli_bench_a");
    const auto b = fresh_dir("holopt_cli_bench_b");
    const std::string common =
        "bench --cells N=2:M=196 --geometries 3 --iters 25 --seed 6 --checkpoints 0,25 --out ";

    auto r = run_cli(common + a.string());
    CHECK(r.code == 0);
    for (const char* f : {"results.csv", "summary.csv", "timing.csv", "convergence.csv",
                          "resolved_config.json", "dataset_single-sided-14_N2.jsonl"})
        CHECK(fs::exists(a / f));

    // 3 geometries x 2 points x 2 solvers + header.
    std::istringstream rows(slurp((a / "results.csv").string()));
    int n_rows = 0;
    std::string line;
    while (std::getline(rows, line)) ++n_rows;
    CHECK(n_rows == 1 + 12);

    r = run_cli(common + b.string());
    CHECK(r.code == 0);
    for (const char* f : {"results.csv", "summary.csv", "convergence.csv",
                          "dataset_single-sided-14_N2.jsonl"})
        CHECK(slurp((a / f).string()) == slurp((b / f).string()));

    CHECK(run_cli("bench --cells N=0:M=196 --out " + a.string()).code == 2);
    CHECK(run_cli("bench --cells N=2:M=300 --out " + a.string()).code == 2);
    CHECK(run_cli("bench --cells banana --out " + a.string()).code == 2);
}

TEST_CASE("make-chart reproduces the committed fixture") {
    const auto dir = fresh_dir("holopt_cli_chart");
    const std::string out = (dir / "c64.pgm").string();
    const auto r = run_cli("make-chart --size 64 --out " + out);
    CHECK(r.code == 0);
    CHECK(slurp(out) == slurp(std::string(HOLOPT_DATA_DIR) + "/usaf_64.pgm"));
    CHECK(run_cli("make-chart --size 4 --out " + out).code == 2);
}

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "plumesr/container.hpp"
#include "plumesr/dataset.hpp"
#include "plumesr/raster_io.hpp"
#include "test_support.hpp"

using namespace plumesr;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args, const testing::TempDir& scratch) {
  const fs::path out = scratch / "stdout.txt";
  const fs::path err = scratch / "stderr.txt";
  const std::string cmd = std::string("\"") + PLUMESR_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// A layout small enough that bank builds take well under a second.
fs::path write_small_config(const testing::TempDir& dir) {
  const json cfg = {{"layout",
                     {{"lr_width", 24},
                      {"lr_height", 16},
                      {"run_snapshots", 16},
                      {"n_phases", 2},
                      {"source_duration", 40.0}}},
                    {"wind", {{"period", 40.0}, {"n_terms", 2}, {"seed", 5}}},
                    {"dataset", {{"n_samples", 6}, {"n_sources", 3}, {"split", {0.5, 0.0, 0.5}}}}};
  const fs::path p = dir / "config.json";
  std::ofstream(p) << cfg.dump(2);
  return p;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("--help-all matches the golden listing") {
  testing::TempDir dir("cli_help");
  const CliResult r = run_cli("--help-all", dir);
  CHECK(r.status == 0);
  const std::string golden = slurp(fs::path(PLUMESR_TEST_DATA_DIR) / "golden" / "help_all.txt");
  REQUIRE_FALSE(golden.empty());
  CHECK(r.out == golden);
}

TEST_CASE("exit codes separate usage and runtime errors") {
  testing::TempDir dir("cli_exit");
  CHECK(run_cli("", dir).status == 2);
  CHECK(run_cli("frobnicate", dir).status == 2);
  CHECK(run_cli("psnr-delta", dir).status == 2);
  CHECK(run_cli("drop --root " + q(dir.path()) + " --rate 1.5 --out x", dir).status == 2);
  const CliResult usage = run_cli("eval --truth /nonexistent --pred /nonexistent --rate 0 --out r.json", dir);
  CHECK(usage.status == 2);
  CHECK(usage.err.find("error:") != std::string::npos);

  // Well-formed flags, but the directory holds no manifest.
  const CliResult runtime = run_cli("drop --root " + q(dir.path()) + " --rate 0.2 --out " + q(dir / "v"), dir);
  CHECK(runtime.status == 1);
  CHECK(runtime.err.find("error:") != std::string::npos);
}

TEST_CASE("psnr-delta prints the RMS reduction") {
  testing::TempDir dir("cli_delta");
  const CliResult r = run_cli("psnr-delta --db 0.93", dir);
  CHECK(r.status == 0);
  CHECK(r.out == "0.101537\n");
  CHECK(run_cli("psnr-delta --db 20", dir).out == "0.900000\n");
}

TEST_CASE("pipeline commands on a small configuration") {
  testing::TempDir dir("cli_pipe");
  const fs::path cfg = write_small_config(dir);

  SUBCASE("bank file and on-the-fly bank give identical corpora") {
    REQUIRE(run_cli("bank --config " + q(cfg) + " --out " + q(dir / "bank.plm"), dir).status == 0);
    REQUIRE(run_cli("dataset --config " + q(cfg) + " --seed 3 --root " + q(dir / "a") + " --bank " +
                        q(dir / "bank.plm"),
                    dir)
                .status == 0);
    REQUIRE(run_cli("dataset --config " + q(cfg) + " --seed 3 --root " + q(dir / "b"), dir).status == 0);
    for (const auto& e : read_manifest(dir / "a")) {
      CHECK(testing::read_bytes(dir / "a" / e.path) == testing::read_bytes(dir / "b" / e.path));
    }
    CHECK(testing::read_bytes(dir / "a" / "manifest.jsonl") == testing::read_bytes(dir / "b" / "manifest.jsonl"));

    // A bank built for another layout is refused.
    const json other = {{"layout", {{"lr_width", 32}, {"lr_height", 16}, {"run_snapshots", 16}, {"n_phases", 2},
                                    {"source_duration", 40.0}}},
                        {"wind", {{"period", 40.0}, {"n_terms", 2}, {"seed", 5}}}};
    std::ofstream(dir / "other.json") << other.dump();
    CHECK(run_cli("dataset --config " + q(dir / "other.json") + " --root " + q(dir / "c") + " --bank " +
                      q(dir / "bank.plm"),
                  dir)
              .status == 1);
  }

  SUBCASE("baseline, eval and residual terms") {
    REQUIRE(run_cli("dataset --config " + q(cfg) + " --root " + q(dir / "ds"), dir).status == 0);

    const CliResult base = run_cli("baseline --root " + q(dir / "ds") + " --rate 0.2 --out " + q(dir / "bic"), dir);
    REQUIRE(base.status == 0);
    CHECK(base.out.find("bicubic") != std::string::npos);
    const json rep = json::parse(slurp(dir / "bic" / "report.json"));
    REQUIRE(rep.at("rows").size() == 1);
    CHECK(rep.at("rows")[0].at("model") == "bicubic");
    CHECK(rep.at("rows")[0].at("psnr_db").get<double>() > 20.0);

    // Re-scoring the baseline's own predictions reproduces its report.
    REQUIRE(run_cli("eval --pred " + q(dir / "bic") + " --truth " + q(dir / "ds") +
                        " --rate 0.2 --model bicubic --out " + q(dir / "re.json"),
                    dir)
                .status == 0);
    const json re = json::parse(slurp(dir / "re.json"));
    CHECK(re.at("rows")[0].at("psnr_db") == rep.at("rows")[0].at("psnr_db"));
    CHECK(re.at("rows")[0].at("l_phys") == rep.at("rows")[0].at("l_phys"));

    // The truth corpus scored against itself: infinite PSNR, zero 1-SSIM, zero L_phys.
    const CliResult same = run_cli("eval --pred " + q(dir / "ds") + " --truth " + q(dir / "ds") +
                                       " --rate 0 --model hr --out " + q(dir / "same.json"),
                                   dir);
    REQUIRE(same.status == 0);
    CHECK(same.out.find("inf") != std::string::npos);
    const json row = json::parse(slurp(dir / "same.json")).at("rows")[0];
    CHECK(row.at("psnr_db") == "inf");
    CHECK(row.at("one_minus_ssim") == 0.0);
    CHECK(row.at("l_phys") == 0.0);

    const auto manifest = read_manifest(dir / "ds");
    const fs::path sample = dir / "ds" / manifest.front().path;
    const CliResult terms = run_cli("residual-terms --sample " + q(sample) + " --out " + q(dir / "terms"), dir);
    REQUIRE(terms.status == 0);
    auto raster = [&](const std::string& name) {
      return array_to_field(read_container(dir / "terms" / (name + ".plm")).array("raster"), 1.0);
    };
    const Field dcdt = raster("dcdt");
    const Field sum = raster("advection") + raster("diffusion") + raster("source");
    CHECK(testing::max_abs_diff(dcdt, sum) <= 1e-12 * std::max(1.0, dcdt.max()));
    CHECK(raster("residual").width() == 96);
    CHECK(raster("source").max() > 0.0);

    REQUIRE(run_cli("drop --root " + q(dir / "ds") + " --rate 0.6 --out " + q(dir / "v60"), dir).status == 0);
    CHECK(read_manifest(dir / "v60").size() == 6);
    REQUIRE(run_cli("dwn-hr --root " + q(dir / "ds") + " --out " + q(dir / "dwn"), dir).status == 0);
    CHECK(read_manifest(dir / "dwn").size() == 24);
  }

  SUBCASE("simulate writes every snapshot") {
    REQUIRE(run_cli("simulate --config " + q(cfg) + " --resolution hr --seed 4 --out " + q(dir / "sim.plm"), dir)
                .status == 0);
    const Container c = read_container(dir / "sim.plm");
    CHECK(c.metadata.at("resolution") == "hr");
    const NamedArray& a = c.array("snapshots");
    REQUIRE(a.shape.size() == 3);
    CHECK(a.shape[0] == 17);
    CHECK(a.shape[1] == 64);
    CHECK(a.shape[2] == 96);
  }
}

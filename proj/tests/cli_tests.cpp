// CLI behavior checks: exit codes, file outputs, flag plumbing. argv[1] is
// the CLI binary path.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "rngccs/generator.hpp"
#include "rngccs/instance_io.hpp"
#include "rngccs/util.hpp"

namespace fs = std::filesystem;
using namespace rngccs;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
  if (!ok) ++g_failures;
}

int run(const std::string& cmd) {
  int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_tests <path-to-cli> [committed-demo-dir]\n");
    return 2;
  }
  std::string cli = argv[1];
  fs::path work = fs::temp_directory_path() / "rngccs_cli_tests";
  fs::remove_all(work);
  fs::create_directories(work);
  fs::path demo = work / "demo";
  write_instance(demo_instance(), demo);

  if (argc > 2) {
    // The checked-in demo bundle must stay in lockstep with the generator.
    fs::path committed = argv[2];
    bool same = true;
    for (const auto* f :
         {"sources.csv", "facilities.csv", "sinks.csv", "feedstock_types.csv",
          "dist_sf.csv", "dist_fk.csv", "params.txt"})
      same = same && slurp(demo / f) == slurp(committed / f);
    check(same, "committed demo bundle matches the generator output");
  }

  check(run(cli + " generate --seed 3 --sources 6 --facilities 4 --sinks 2 --out " +
            (work / "gen").string()) == 0,
        "generate exits 0 and writes a loadable bundle");
  bool loadable = true;
  try {
    load_instance(work / "gen");
  } catch (...) {
    loadable = false;
  }
  check(loadable, "generated bundle loads");

  check(run(cli + " validate --instance " + demo.string()) == 0,
        "validate accepts the demo bundle");
  check(run(cli + " validate --instance /nonexistent/path") == 1,
        "validate exits 1 for a missing bundle");

  check(run(cli + " solve --instance " + demo.string() +
            " --scenario baseline --gap 0 --outdir " + (work / "solve").string()) == 0,
        "solve exits 0 at gap zero");
  for (const auto* name : {"solution.csv", "ledger.csv", "network.geojson",
                           "map.svg", "bars.svg", "provenance.json"})
    check(fs::exists(work / "solve" / name), std::string("solve wrote ") + name);

  check(run(cli + " solve --instance " + demo.string() + " --scenario nonexistent") == 1,
        "unknown scenario exits 1");
  check(run(cli + " solve --instance " + demo.string() + " --bogus-flag") == 1,
        "unknown flag exits 1");

  // A node limit of 1 cannot prove a zero gap on the demo.
  check(run(cli + " solve --instance " + demo.string() +
            " --scenario low_policy --gap 0 --node-limit 1 --outdir " +
            (work / "limited").string()) == 2,
        "hitting the node limit before the gap target exits 2");

  check(run(cli + " solve --instance " + demo.string() +
            " --scenario baseline --gap 0 --strict-mass-balance --outdir " +
            (work / "strict").string()) == 0,
        "strict mass balance solve exits 0");

  check(run(cli + " scenarios --instance " + demo.string() + " --gap 0 --outdir " +
            (work / "scen").string()) == 0,
        "scenarios exits 0");
  {
    auto table = read_csv(work / "scen" / "scenarios.csv",
                          {"scenario", "param_value", "lcfs_price", "rin_price",
                           "q45_price", "q45_threshold", "rng_pj", "co2_mt",
                           "n_facilities", "n_sinks", "profit_per_gj", "gap",
                           "wall_s"});
    check(table.rows.size() == 5, "scenarios.csv has five rows");
  }

  check(run(cli + " sweep --instance " + demo.string() +
            " --scenario baseline --param rin_price --values 0,0.25,1.5 --gap 0"
            " --outdir " + (work / "sweep").string()) == 0,
        "sweep exits 0");
  check(run(cli + " sweep --instance " + demo.string() +
            " --scenario baseline --param warp --values 1 --outdir " +
            (work / "sweepbad").string()) == 1,
        "unknown sweep parameter exits 1");

  check(run(cli + " dump-model --instance " + demo.string() +
            " --scenario baseline --out " + (work / "model.lp").string()) == 0,
        "dump-model exits 0");
  check(run(cli + " solve --instance " + demo.string() +
            " --scenario baseline --gap 0 --dump-model --outdir " +
            (work / "solve_dump").string()) == 0 &&
            fs::exists(work / "solve_dump" / "model.lp"),
        "solve --dump-model writes model.lp alongside reports");
  {
    std::ifstream lp(work / "model.lp");
    std::string first;
    std::getline(lp, first);
    check(first == "Maximize", "LP dump starts with the objective sense");
  }

  if (g_failures == 0) {
    std::printf("all cli checks passed\n");
    return 0;
  }
  std::printf("%d cli checks FAILED\n", g_failures);
  return 1;
}

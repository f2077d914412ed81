#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "arc_cli/commands.hpp"
#include "arc_cli/config.hpp"
#include "arc_cli/metrics_io.hpp"
#include "arc_cli/simulate.hpp"
#include "helpers.hpp"

using namespace arc;
using namespace arc::cli;

namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code = 0;
  std::string out, err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "arc-robust");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("arc_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const char* kSmallConfig = R"(# tiny run
n = 5
f = 1
steps = 3
batch_size = 4
aggregator = "cwtm+nnm"
attacks = "FOE"
data.classes = 3
data.dim = 4
data.per_class = 8
data.test_per_class = 4
)";

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(kSmallConfig);
  CHECK(c.training.n == 5);
  CHECK(c.training.steps == 3);
  CHECK(c.attacks == std::vector<AttackKind>{AttackKind::FallOfEmpires});
  CHECK(c.training.aggregator == AggregatorSpec::parse("cwtm+nnm"));
  CHECK(parse_config("attacks = \"all\"\n").attacks.size() == 5);
  CHECK(parse_config("attacks = \"none\"\n").attacks.empty());
  CHECK(parse_config("seeds = [3, 4]\n").seeds == std::vector<std::uint64_t>{3, 4});
}

TEST_CASE("config errors name the line") {
  for (const char* bad : {"n = 5\nbogus = 1\n", "n = 5\nn = 6\n", "n = \"five\"\n", "n = 5\nsteps 3\n",
                          "aggregator = \"nope\"\n", "n = 4\nf = 2\n", "seeds = [1,\n"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
  }
  try {
    parse_config("n = 5\n\n# c\nwho = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    CHECK(std::string(e.what()).find("who") != std::string::npos);
  }
}

TEST_CASE("metrics CSV round trip") {
  const auto dir = scratch("roundtrip");
  auto cfg = parse_config(kSmallConfig);
  cfg.training.aggregator = AggregatorSpec::parse("cwtm+nnm+arc");
  cfg.training.steps = 7;
  cfg.output_dir = dir;
  const auto results = simulate_all(cfg);
  REQUIRE(results.size() == 1);
  const auto& log = results[0].log;
  write_metrics(log, dir / "m.csv");
  const auto back = read_metrics(dir / "m.csv");
  CHECK(back.records == log.records);
  CHECK(back.attack == log.attack);
  CHECK(back.aggregator == log.aggregator);
  CHECK(back.seed == log.seed);
  CHECK(slurp(dir / "m.csv").rfind(std::string(kMetricsHeader) + "\n", 0) == 0);
  CHECK(format_double(0.1) == "0.10000000000000001");
  fs::remove_all(dir);
}

TEST_CASE("simulate writes one CSV per run and a merged summary") {
  const auto dir = scratch("simulate");
  std::ofstream(dir / "run.cfg") << kSmallConfig << "seeds = [1, 2]\n";
  const auto r = invoke({"simulate", "--config", (dir / "run.cfg").string(), "--out", (dir / "out").string()});
  REQUIRE(r.code == kExitOk);
  const auto csv1 = slurp(dir / "out" / "FOE_cwtm-nnm_seed1.csv");
  const auto csv2 = slurp(dir / "out" / "FOE_cwtm-nnm_seed2.csv");
  CHECK(count_lines(csv1) == 4);
  CHECK(count_lines(csv2) == 4);
  CHECK(csv1 != csv2);
  // No ARC stage: the threshold column stays empty.
  std::istringstream rows(csv1);
  std::string line;
  std::getline(rows, line);
  while (std::getline(rows, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    REQUIRE(cells.size() == 11);
    CHECK(cells[7].empty());
  }
  CHECK(fs::exists(dir / "out" / "summary.json"));
  CHECK(slurp(dir / "out" / "summary.json").find("worst_case_max_accuracy") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("malformed config exits with code 2") {
  const auto dir = scratch("badcfg");
  std::ofstream(dir / "bad.cfg") << "n = 5\nstepz = 3\n";
  const auto r = invoke({"simulate", "--config", (dir / "bad.cfg").string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(invoke({}).code != kExitOk);
  CHECK(invoke({"certify", "--agg", "cwtm+nnm+arc", "--n", "4", "--f", "2"}).code == kExitConfig);
  fs::remove_all(dir);
}

TEST_CASE("theory and certify subcommands") {
  const auto t = invoke({"theory", "--B", "0"});
  CHECK(t.code == kExitOk);
  CHECK(t.out.find("\"breakdown_point\": 0.5") != std::string::npos);
  const auto c = invoke({"certify", "--agg", "cwtm+nnm+arc", "--n", "5", "--f", "1", "--dim", "4", "--trials",
                         "200", "--seed", "1"});
  CHECK(c.code == kExitOk);
  CHECK(c.out.find("\"violations\": 0") != std::string::npos);
}

TEST_CASE("installed binary runs") {
  const auto dir = scratch("bin");
  const std::string cmd = std::string("\"") + ARC_ROBUST_BIN + "\" theory --B 0 > \"" + (dir / "o.json").string() + "\"";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(slurp(dir / "o.json").find("breakdown_point") != std::string::npos);
  fs::remove_all(dir);
}

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

// End-to-end checks of the installed command-line tool: each test drives the
// real binary through std::system and inspects exit codes and artifacts.

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
#ifdef RADAR_CLI_PATH
  return RADAR_CLI_PATH;
#else
  const char* p = std::getenv("RADAR_CLI_PATH");
  REQUIRE(p != nullptr);
  return p;
#endif
}

struct WorkDir {
  fs::path dir;
  WorkDir() {
    dir = fs::temp_directory_path() / ("radar_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~WorkDir() { fs::remove_all(dir); }

  // Runs the tool with this directory as cwd and returns its exit status.
  int run(const std::string& args) const {
    const std::string cmd = "cd '" + dir.string() + "' && '" + cli_path() + "' " + args +
                            " > cli_stdout.txt 2> cli_stderr.txt";
    const int raw = std::system(cmd.c_str());
    REQUIRE(raw != -1);
    return WEXITSTATUS(raw);
  }

  bool exists(const std::string& name) const { return fs::exists(dir / name); }

  std::string first_line(const std::string& name) const {
    std::ifstream in(dir / name);
    std::string line;
    std::getline(in, line);
    return line;
  }
};

}  // namespace

TEST_CASE("full pipeline: data, train, protect, attack, detect, recover") {
  WorkDir wd;

  REQUIRE(wd.run("gen-data --features 16 --classes 3 --train-samples 256 "
                 "--test-samples 128 --separation 8 --seed 7") == 0);
  REQUIRE(wd.exists("train.csv"));
  REQUIRE(wd.exists("test.csv"));

  REQUIRE(wd.run("train --train train.csv --test test.csv --hidden 8 "
                 "--epochs 4 --seed 7 --out model.json") == 0);
  REQUIRE(wd.exists("model.json"));

  REQUIRE(wd.run("protect --model model.json --group-size 8 --out store.json") == 0);
  REQUIRE(wd.exists("store.json"));

  // The untouched model must verify clean.
  REQUIRE(wd.run("detect --model model.json --store store.json") == 0);

  REQUIRE(wd.run("attack --model model.json --kind random --n-bf 12 --seed 3 "
                 "--out-model attacked.json --out-profile profile.json") == 0);
  REQUIRE(wd.exists("attacked.json"));
  REQUIRE(wd.exists("profile.json"));

  // A flipped model must exit with the detection code and write a report.
  REQUIRE(wd.run("detect --model attacked.json --store store.json "
                 "--profile profile.json --out report.json") == 3);
  REQUIRE(wd.exists("report.json"));

  REQUIRE(wd.run("recover --model attacked.json --store store.json "
                 "--test test.csv --out recovered.json") == 0);
  REQUIRE(wd.exists("recovered.json"));
}

TEST_CASE("usage errors exit 2, runtime errors exit 1") {
  WorkDir wd;
  REQUIRE(wd.run("no-such-subcommand") == 2);
  REQUIRE(wd.run("protect") == 2);  // missing required --model
  REQUIRE(wd.run("protect --model does_not_exist.json") == 1);
  REQUIRE(wd.run("attack --model does_not_exist.json --kind pbfa --test also_missing.csv") == 1);
}

TEST_CASE("miss-rate experiment writes a schema-tagged csv") {
  WorkDir wd;
  REQUIRE(wd.run("experiment miss-rate --rounds 2000 --g-values 16 --seed 2 "
                 "--out miss.csv") == 0);
  REQUIRE(wd.exists("miss.csv"));
  REQUIRE(wd.first_line("miss.csv") == "# schema: radar.miss-rate.v1");
}

TEST_CASE("overhead experiment runs from built-in architecture tables") {
  WorkDir wd;
  REQUIRE(wd.run("experiment overhead --arch resnet20 --g-values 8,512 --out oh.csv") == 0);
  REQUIRE(wd.first_line("oh.csv") == "# schema: radar.overhead.v1");
}

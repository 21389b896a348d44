#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(CONVMP_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string data(const char* name) { return std::string(CONVMP_DATA) + "/" + name; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("exit codes") {
    CHECK(cli("solve " + data("three_lines.json")) == 0);
    CHECK(cli("solve --exact " + data("three_lines.json")) == 0);
    CHECK(cli("solve " + data("drifting.json")) == 2);
    CHECK(cli("demo cycle") == 0);
    CHECK(cli("solve /nonexistent.json") == 1);
    CHECK(cli("solve") == 1);
    CHECK(cli("solve --max-sweeps 1 --eps 0 " + data("three_lines.json")) == 3);
  }

  TEST_CASE("generate then solve") {
    const auto dir = std::filesystem::temp_directory_path() / "convmp_cli_test";
    std::filesystem::create_directories(dir);
    const std::string inst = (dir / "g.json").string();
    const std::string grid = (dir / "g.mrf").string();
    CHECK(cli("gen maxaff --rows 12 --cols 4 --seed 3 -o " + inst) == 0);
    CHECK(cli("solve --check-oracle " + inst) == 0);
    CHECK(cli("gen grid --rows 3 --cols 3 --labels 2 --seed 3 -o " + grid) == 0);
    CHECK(cli("diffusion --check-oracle " + grid) == 0);
    CHECK(cli("mma --check-oracle --dump " + (dir / "d.json").string() + " " + grid) == 0);
    CHECK(std::filesystem::exists(dir / "d.json"));
    std::filesystem::remove_all(dir);
  }
}

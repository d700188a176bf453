#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cli_args.hpp"
#include "tvprox/error.hpp"

using namespace tvprox;
namespace fs = std::filesystem;

namespace {

std::string write_file(const std::string& name, const std::string& text) {
  const auto p = (fs::temp_directory_path() / name).string();
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("config files become leading flags") {
  const auto path = write_file("tvprox_cfg_test.cfg", "# comment\n\nlambda = 0.5,1\n--size=24\npaper-scale=true\n");
  const auto toks = cli::config_tokens(path);
  CHECK(toks == std::vector<std::string>{"--lambda=0.5,1", "--size=24", "--paper-scale=true"});

  const auto args = cli::expand_config({"tvprox", "denoise", "--size", "32", "--config", path});
  CHECK(args == std::vector<std::string>{"tvprox", "denoise", "--lambda=0.5,1", "--size=24",
                                         "--paper-scale=true", "--size", "32"});
  const auto args2 = cli::expand_config({"tvprox", "--config=" + path, "ct"});
  CHECK(args2.size() == 5);
  CHECK(args2[1] == "ct");
  fs::remove(path);
}

TEST_CASE("malformed config files") {
  const auto path = write_file("tvprox_cfg_bad.cfg", "lambda 0.5\n");
  CHECK_THROWS_AS(cli::config_tokens(path), ConfigError);
  fs::remove(path);
  CHECK_THROWS_AS(cli::config_tokens("/nonexistent/file.cfg"), ConfigError);
  CHECK_THROWS_AS(cli::expand_config({"tvprox", "denoise", "--config"}), ConfigError);
}

TEST_CASE("number lists") {
  CHECK(cli::parse_list("0.5", "x") == std::vector<double>{0.5});
  CHECK(cli::parse_list("1e-1, 1e-2,1e-3", "x") == std::vector<double>{1e-1, 1e-2, 1e-3});
  CHECK_THROWS_AS(cli::parse_list("", "x"), ConfigError);
  CHECK_THROWS_AS(cli::parse_list("1,,2", "x"), ConfigError);
  CHECK_THROWS_AS(cli::parse_list("1,abc", "x"), ConfigError);
}

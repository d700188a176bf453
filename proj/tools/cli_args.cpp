#include "cli_args.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tvprox/error.hpp"

namespace tvprox::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  for (int lineno = 1; std::getline(is, line); ++lineno) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    key.erase(0, key.find_first_not_of('-'));
    if (key.empty() || key == "config")
      throw ConfigError(path + ":" + std::to_string(lineno) + ": invalid key");
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> from_files;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
      const auto t = config_tokens(args[++i]);
      from_files.insert(from_files.end(), t.begin(), t.end());
    } else if (a.rfind("--config=", 0) == 0) {
      const auto t = config_tokens(a.substr(9));
      from_files.insert(from_files.end(), t.begin(), t.end());
    } else {
      rest.push_back(a);
    }
  }
  if (from_files.empty() || rest.size() < 2) return rest;
  std::vector<std::string> out(rest.begin(), rest.begin() + 2);
  out.insert(out.end(), from_files.begin(), from_files.end());
  out.insert(out.end(), rest.begin() + 2, rest.end());
  return out;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
      throw ConfigError(std::string(what) + ": cannot parse '" + item + "' as a number");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

}  // namespace tvprox::cli

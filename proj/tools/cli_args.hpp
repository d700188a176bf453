#pragma once

#include <string>
#include <vector>

namespace tvprox::cli {

/// Reads a flat key=value file into "--key=value" tokens. Blank lines and
/// lines starting with '#' are skipped; keys may be written with or without
/// leading dashes. Throws ConfigError on unreadable files or lines without '='.
std::vector<std::string> config_tokens(const std::string& path);

/// Expands every "--config FILE" / "--config=FILE" in args by splicing the
/// file's tokens in right after the subcommand (args[0] is the program name,
/// args[1] the subcommand). Because the file tokens come first and options
/// keep their last value, flags on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

/// Splits "0.5,1,2" into numbers. Throws ConfigError on malformed entries.
std::vector<double> parse_list(const std::string& text, const char* what);

}  // namespace tvprox::cli

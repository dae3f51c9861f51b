#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kbeta/harness.hpp"

namespace kbeta {

/// Runs one command line (program name excluded) and returns the exit status:
/// 0 success / all pass, 1 some theorem failed, 2 usage, configuration or
/// evaluation error. Diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

/// Newline-delimited JSON: one object per case, then an aggregate object.
void write_report_json(const SuiteReport& report, std::ostream& out);
/// Human-readable rendering of the same report.
void write_report_table(const SuiteReport& report, std::ostream& out);

/// Comma-separated list of numbers, parsed independently of the C locale.
/// Throws ConfigError on malformed input.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace kbeta

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsfem/study.hpp"

namespace nsfem {

/// Front-end configuration. An empty out_path means stdout.
struct StudyConfig {
  StudyParams study;
  std::string out_path;
  std::string format = "csv";
  bool full_tables = false;
  bool verbose = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseOutcome {
  StudyConfig config;
  bool help = false;
};

/// Parses command-line arguments (program name excluded) plus an optional
/// --config file of key = value lines. Flags override file values; unknown
/// file keys are rejected. Throws UsageError on invalid usage after writing
/// the diagnostic to err; help requests write the help text to out and set
/// the help flag instead of returning a runnable config.
ParseOutcome parse_config(std::vector<std::string> args, std::ostream& out,
                          std::ostream& err);

/// Full driver behind main. Exit codes: 0 success, 1 solver failure (failing
/// level reported on err), 2 usage error, 3 output I/O failure.
int run_cli(std::vector<std::string> args, std::ostream& out,
            std::ostream& err);

}  // namespace nsfem

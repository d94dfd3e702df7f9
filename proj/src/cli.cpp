#include "nsfem/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

namespace nsfem {

namespace {

const std::map<std::string, ElementPairTag> kElements{
    {"br1", ElementPairTag::BR1P0},
    {"p2p0", ElementPairTag::P2P0},
    {"ccr", ElementPairTag::CCRP1dg}};

const std::map<std::string, ConvectiveMode> kModes{
    {"reconstruction", ConvectiveMode::Reconstruction},
    {"temam", ConvectiveMode::Temam},
    {"none", ConvectiveMode::None}};

const CLI::Validator kAboveOne(
    [](std::string& s) -> std::string {
      double v = 0.0;
      try {
        v = std::stod(s);
      } catch (const std::exception&) {
        return "value " + s + " is not a real number";
      }
      if (!(v > 1.0)) return "the flow exponent must exceed 1, got " + s;
      return {};
    },
    "REAL>1");

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double file_real(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != value.size())
    throw UsageError("configuration key " + key +
                     " needs a real number, got '" + value + "'");
  return v;
}

int file_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(value, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != value.size())
    throw UsageError("configuration key " + key + " needs an integer, got '" +
                     value + "'");
  return v;
}

bool file_bool(const std::string& key, const std::string& value) {
  std::string low = value;
  std::transform(low.begin(), low.end(), low.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (low == "true" || low == "yes" || low == "1") return true;
  if (low == "false" || low == "no" || low == "0") return false;
  throw UsageError("configuration key " + key + " needs a boolean, got '" +
                   value + "'");
}

// Applies one key = value line onto the config unless the matching flag was
// given on the command line.
struct FileMerger {
  StudyConfig* cfg;
  const CLI::App* run;
  bool p_from_file = false;

  bool flag_given(const std::string& flag) const {
    return run->count(flag) > 0;
  }

  void apply(const std::string& key, const std::string& value) {
    if (key == "p") {
      if (flag_given("--p")) return;
      const double v = file_real(key, value);
      if (!(v > 1.0))
        throw UsageError("the flow exponent must exceed 1, got " + value);
      cfg->study.p = v;
      p_from_file = true;
    } else if (key == "delta") {
      if (flag_given("--delta")) return;
      const double v = file_real(key, value);
      if (v < 0.0)
        throw UsageError("configuration key delta must be nonnegative");
      cfg->study.delta = v;
    } else if (key == "nu0") {
      if (flag_given("--nu0")) return;
      const double v = file_real(key, value);
      if (!(v > 0.0))
        throw UsageError("configuration key nu0 must be positive");
      cfg->study.nu0 = v;
    } else if (key == "beta") {
      if (!flag_given("--beta")) cfg->study.beta = file_real(key, value);
    } else if (key == "element") {
      if (flag_given("--element")) return;
      const auto it = kElements.find(value);
      if (it == kElements.end())
        throw UsageError("unknown element '" + value + "'");
      cfg->study.pair = it->second;
    } else if (key == "convective") {
      if (flag_given("--convective")) return;
      const auto it = kModes.find(value);
      if (it == kModes.end())
        throw UsageError("unknown convective treatment '" + value + "'");
      cfg->study.mode = it->second;
    } else if (key == "levels") {
      if (flag_given("--levels")) return;
      const int v = file_int(key, value);
      if (v < 1) throw UsageError("configuration key levels must be >= 1");
      cfg->study.levels = v;
    } else if (key == "out") {
      if (!flag_given("--out")) cfg->out_path = value;
    } else if (key == "format") {
      if (flag_given("--format")) return;
      if (value != "csv" && value != "md")
        throw UsageError("format must be csv or md, got '" + value + "'");
      cfg->format = value;
    } else if (key == "full-tables") {
      if (!flag_given("--full-tables")) cfg->full_tables = file_bool(key, value);
    } else if (key == "verbose") {
      if (!flag_given("--verbose")) cfg->verbose = file_bool(key, value);
    } else if (key == "newton-tol") {
      if (flag_given("--newton-tol")) return;
      const double v = file_real(key, value);
      if (!(v > 0.0))
        throw UsageError("configuration key newton-tol must be positive");
      cfg->study.newton.abs_tol = v;
    } else if (key == "newton-max-iters") {
      if (flag_given("--newton-max-iters")) return;
      const int v = file_int(key, value);
      if (v < 1)
        throw UsageError("configuration key newton-max-iters must be >= 1");
      cfg->study.newton.max_iters = v;
    } else {
      throw UsageError("unknown configuration key '" + key + "'");
    }
  }

  void merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read configuration file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string stripped = trim(line);
      if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';')
        continue;
      const auto eq = stripped.find('=');
      if (eq == std::string::npos)
        throw UsageError(path + ":" + std::to_string(lineno) +
                         ": expected key = value");
      apply(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
  }
};

ParseOutcome parse_args(std::vector<std::string> args, std::ostream& out,
                        std::ostream& err) {
  ParseOutcome res;
  StudyConfig& cfg = res.config;
  std::string config_path;

  CLI::App app("Refinement studies for the shear-dependent flow solver",
               "nsfem");
  app.require_subcommand(1);
  CLI::App* run =
      app.add_subcommand("run", "Run one refinement study and emit its table");

  run->add_option("--p", cfg.study.p, "Flow behavior exponent")
      ->check(kAboveOne);
  run->add_option("--delta", cfg.study.delta, "Regularization shift")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  run->add_option("--nu0", cfg.study.nu0, "Viscosity scale")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run->add_option("--beta", cfg.study.beta,
                  "Radial exponent of the manufactured velocity")
      ->capture_default_str();
  run->add_option("--element", cfg.study.pair, "Velocity/pressure pair")
      ->transform(CLI::CheckedTransformer(kElements, CLI::ignore_case))
      ->default_str("ccr");
  run->add_option("--convective", cfg.study.mode, "Convective term treatment")
      ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case))
      ->default_str("reconstruction");
  run->add_option("--levels", cfg.study.levels, "Number of mesh levels")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run->add_option("--out", cfg.out_path, "Output path (default stdout)");
  run->add_option("--format", cfg.format, "Table format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "md"}));
  run->add_flag("--full-tables", cfg.full_tables,
                "Deep-table protocol with 8 mesh levels, overrides --levels");
  run->add_flag("--verbose", cfg.verbose,
                "Per-iteration solver diagnostics on stderr");
  run->add_option("--newton-tol", cfg.study.newton.abs_tol,
                  "Solver residual target")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run->add_option("--newton-max-iters", cfg.study.newton.max_iters,
                  "Solver iteration cap per continuation step")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run->add_option("--config", config_path,
                  "Configuration file of key = value lines; flags win");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    if (app.exit(e, out, err) == 0) {
      res.help = true;
      return res;
    }
    throw UsageError(e.what());
  }

  FileMerger merger{&cfg, run};
  if (!config_path.empty()) merger.merge_file(config_path);
  if (run->count("--p") == 0 && !merger.p_from_file)
    throw UsageError("--p is required");

  if (cfg.full_tables) cfg.study.levels = 8;
  return res;
}

}  // namespace

ParseOutcome parse_config(std::vector<std::string> args, std::ostream& out,
                          std::ostream& err) {
  try {
    return parse_args(std::move(args), out, err);
  } catch (const UsageError& e) {
    err << "nsfem: " << e.what() << "\n";
    throw;
  }
}

int run_cli(std::vector<std::string> args, std::ostream& out,
            std::ostream& err) {
  ParseOutcome outcome;
  try {
    outcome = parse_config(std::move(args), out, err);
  } catch (const UsageError&) {
    return 2;
  }
  if (outcome.help) return 0;
  StudyConfig cfg = outcome.config;

  if (cfg.study.mode == ConvectiveMode::Temam && cfg.study.p < 4.0 / 3.0)
    err << "warning: the skew-symmetrized convective form assumes"
           " p >= 2d/(d+1) = 4/3 in two dimensions; p = "
        << cfg.study.p << " is outside that range\n";

  if (const char* env = std::getenv("NSFEM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1)
      Eigen::setNbThreads(static_cast<int>(n));
    else
      err << "warning: ignoring NSFEM_THREADS value '" << env << "'\n";
  }

  if (cfg.verbose) cfg.study.newton.verbose = &err;

  StudyReport report;
  try {
    report = run_study(cfg.study);
  } catch (const StudyFailure& failure) {
    err << "solver failure at level " << failure.level << ": "
        << failure.what() << "\n";
    return 1;
  }

  std::ostringstream table;
  if (cfg.format == "md")
    write_markdown(report, table);
  else
    write_csv(report, table);

  if (cfg.out_path.empty()) {
    out << table.str();
    out.flush();
    return 0;
  }

  const std::filesystem::path target(cfg.out_path);
  const std::filesystem::path tmp(cfg.out_path + ".tmp");
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "cannot open " << tmp.string() << " for writing\n";
      return 3;
    }
    file << table.str();
    file.flush();
    if (!file) {
      err << "write failed for " << tmp.string() << "\n";
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      return 3;
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    err << "cannot move the finished table to " << target.string() << ": "
        << ec.message() << "\n";
    std::error_code ec2;
    std::filesystem::remove(tmp, ec2);
    return 3;
  }
  return 0;
}

}  // namespace nsfem

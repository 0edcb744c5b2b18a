#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace toa::cli {

/// "lo:hi:step" (inclusive) or a comma-separated list.
std::vector<double> parse_values(const std::string& text);
/// "f_l:f_h".
std::pair<double, double> parse_band(const std::string& text);

struct CurvesArgs {
  std::string preset = "baseband";
  std::optional<std::string> presets_file;
  std::string snr_db = "-20:60:1";
  bool monte_carlo = false;
  std::size_t mc_trials = 10000;
  std::uint64_t seed = 1;
};

struct ThresholdsArgs {
  std::string sweep = "lambda";
  std::string values;  // default depends on the sweep
  std::string snr_db = "-10:45:1";
  bool bounds = true;
  std::uint64_t seed = 1;
};

struct DesignArgs {
  std::string rho0_db;
  std::string band = "3.1:10.6";
  std::optional<double> bandwidth_ghz;
  bool exhaustive = false;
  std::uint64_t seed = 1;
};

/// CSV snr_db,sqrt_mse_ps,label.
void run_curves(const CurvesArgs& args, std::ostream& out);
void run_thresholds(const ThresholdsArgs& args, std::ostream& out);
/// JSON object, or an array when rho0_db names several values.
void run_design(const DesignArgs& args, std::ostream& out);

/// Full command line. Returns the process exit code; diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace toa::cli

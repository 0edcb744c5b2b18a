#include "toa/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "toa/lower_bounds.hpp"
#include "toa/mc_oracle.hpp"
#include "toa/mse_models.hpp"
#include "toa/pulse_design.hpp"
#include "toa/sweeps.hpp"
#include "toa/units.hpp"

namespace toa::cli {

namespace {

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  while (first < last && *first == ' ') ++first;
  if (first < last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

void emit(std::ostream& out, const MseCurve& curve) {
  for (std::size_t k = 0; k < curve.snr.size(); ++k) {
    out << format_number(linear_to_db(curve.snr[k])) << ',' << format_number(std::sqrt(curve.mse[k]) * 1e12)
        << ',' << to_string(curve.label) << '\n';
  }
}

template <class F>
MseCurve tabulate(CurveLabel label, const std::vector<double>& snr_db, F&& fn) {
  MseCurve c;
  c.label = label;
  for (double db : snr_db) {
    const double rho = db_to_linear(db);
    c.snr.push_back(rho);
    c.mse.push_back(fn(rho));
  }
  return c;
}

}  // namespace

std::vector<double> parse_values(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("range must be lo:hi:step, got '" + text + "'");
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("range needs lo <= hi and step > 0");
    return db_grid(lo, hi, step);
  }
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_number(p));
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

std::pair<double, double> parse_band(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw std::invalid_argument("band must be f_l:f_h in GHz, got '" + text + "'");
  return {parse_number(parts[0]), parse_number(parts[1])};
}

void run_curves(const CurvesArgs& args, std::ostream& out) {
  const auto presets = args.presets_file ? load_presets_file(*args.presets_file) : builtin_presets();
  const PulsePreset p = find_preset(presets, args.preset);
  const AcrModel acr = AcrModel::from_pulse(p.pulse);
  const auto grid = parse_values(args.snr_db);
  const IntervalSet iv =
      partition_domain(acr, p.setup, acr.oscillating() ? PartitionOptions{} : lobe_partition(acr));

  std::vector<MseCurve> curves;
  curves.push_back(tabulate(CurveLabel::crlb, grid, [&](double r) { return crlb(acr, r); }));
  curves.push_back(tabulate(CurveLabel::ecrlb, grid, [&](double r) { return ecrlb(acr, r); }));
  curves.push_back(tabulate(CurveLabel::e_u, grid, [&](double) { return max_mse(p.setup); }));
  curves.push_back(mse_num_curve(acr, p.setup, iv, grid, {}, args.seed));
  curves.push_back(tabulate(CurveLabel::e_ana, grid, [&](double r) { return mse_ana(acr, r); }));
  if (acr.oscillating()) {
    curves.push_back(tabulate(CurveLabel::e_ana_env, grid, [&](double r) { return mse_ana_env(acr, r); }));
  }
  curves.push_back(tabulate(CurveLabel::z1, grid, [&](double r) { return alb_z(acr, p.setup, r); }));
  curves.push_back(tabulate(CurveLabel::b1, grid, [&](double r) { return alb_b(acr, p.setup, r); }));
  if (args.monte_carlo) {
    McConfig cfg;
    cfg.trials = args.mc_trials;
    cfg.seed = args.seed;
    const MleSimulator sim(acr, p.setup, cfg);
    curves.push_back(tabulate(CurveLabel::monte_carlo, grid, [&](double r) { return sim.run(r).mse; }));
  }
  out << "snr_db,sqrt_mse_ps,label\n";
  for (const auto& c : curves) emit(out, c);
}

void run_thresholds(const ThresholdsArgs& args, std::ostream& out) {
  SweepOptions so;
  so.snr_db = parse_values(args.snr_db);
  so.bounds = args.bounds;
  so.seed = args.seed;
  std::vector<SweepRow> rows;
  if (args.sweep == "gamma") {
    // Values are ATBWs gamma = T B on the fixed 4 ns domain.
    const auto gammas = parse_values(args.values.empty() ? "1.75,3.5,7,14,28" : args.values);
    std::vector<double> widths;
    for (double g : gammas) {
      if (!(g > 0.0)) throw std::invalid_argument("gamma must be positive");
      widths.push_back(gaussian_width(g / 4e-9));
    }
    rows = gamma_sweep(widths, so);
  } else if (args.sweep == "lambda") {
    const auto lambdas = parse_values(args.values.empty() ? "1:10:1" : args.values);
    for (double l : lambdas) {
      if (!(l > 0.0)) throw std::invalid_argument("lambda must be positive");
    }
    rows = lambda_sweep(lambdas, so);
  } else {
    throw std::invalid_argument("sweep must be gamma or lambda");
  }
  write_threshold_csv(out, rows);
}

void run_design(const DesignArgs& args, std::ostream& out) {
  const auto [fl, fh] = parse_band(args.band);
  const auto rho0s = parse_values(args.rho0_db);
  nlohmann::json all = nlohmann::json::array();
  for (double db : rho0s) {
    DesignConstraints c;
    c.f_low_hz = fl * 1e9;
    c.f_high_hz = fh * 1e9;
    if (args.bandwidth_ghz) c.fixed_bandwidth_hz = *args.bandwidth_ghz * 1e9;
    c.rho0 = db_to_linear(db);
    c.validate();
    nlohmann::json j = to_json(design_pulse(c));
    j["rho0_db"] = db;
    if (c.fixed_bandwidth_hz) j["max_rmse_gain"] = fixed_bandwidth_rmse_gain(c);
    if (args.exhaustive) {
      SearchOptions so;
      so.seed = args.seed;
      const SearchResult r = exhaustive_search_reference(c, so);
      j["reference"] = {{"B1_GHz", r.b1_hz * 1e-9},
                        {"fc1_GHz", r.fc1_hz * 1e-9},
                        {"lambda1", r.lambda1},
                        {"mse_ps2", r.mse * 1e24},
                        {"evaluated", r.evaluated}};
    }
    all.push_back(std::move(j));
  }
  out << (all.size() == 1 ? all[0] : all).dump(2) << '\n';
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Threshold and pulse design tools for time-of-arrival estimation"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Seed for every stochastic component")->capture_default_str();

  CurvesArgs ca;
  auto* curves = app.add_subcommand("curves", "MSE curves versus SNR as CSV");
  curves->add_option("--preset", ca.preset, "Preset name")->capture_default_str();
  curves->add_option("--presets-file", ca.presets_file, "JSON file with extra presets");
  curves->add_option("--snr-db", ca.snr_db, "SNR grid lo:hi:step or list, dB")->capture_default_str();
  curves->add_flag("--mc", ca.monte_carlo, "Add the Monte Carlo MLE curve");
  curves->add_option("--mc-trials", ca.mc_trials, "Monte Carlo trials per SNR")->capture_default_str();

  ThresholdsArgs ta;
  auto* thresholds = app.add_subcommand("thresholds", "Threshold sweep as CSV");
  thresholds->add_option("--sweep", ta.sweep, "gamma or lambda")
      ->check(CLI::IsMember({"gamma", "lambda"}))
      ->capture_default_str();
  thresholds->add_option("--values", ta.values, "Sweep values lo:hi:step or list");
  thresholds->add_option("--snr-db", ta.snr_db, "SNR search grid, dB")->capture_default_str();
  thresholds->add_flag("!--no-bounds", ta.bounds, "Skip the z1/b1 thresholds");

  DesignArgs da;
  auto* design = app.add_subcommand("design", "Optimal bandwidth and carrier as JSON");
  design->add_option("--rho0-db", da.rho0_db, "Available SNR, dB (value, list or range)")->required();
  design->add_option("--band", da.band, "Band f_l:f_h, GHz")->capture_default_str();
  design->add_option("--bandwidth", da.bandwidth_ghz, "Fixed bandwidth, GHz");
  design->add_flag("--exhaustive", da.exhaustive, "Add the grid-search reference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e_out;
    const int code = app.exit(e, o, e_out);
    out << o.str();
    err << e_out.str();
    return code;
  }
  try {
    if (curves->parsed()) {
      ca.seed = seed;
      run_curves(ca, out);
    } else if (thresholds->parsed()) {
      ta.seed = seed;
      run_thresholds(ta, out);
    } else if (design->parsed()) {
      da.seed = seed;
      run_design(da, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace toa::cli

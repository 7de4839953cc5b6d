// percwalk: command-line driver for quantum walks on percolation lattices.
//
//   percwalk single   --steps N --p P --regime R --input single:phi+ --averages A
//   percwalk two      --steps N --p P --regime R --input phi_plus --averages A [--differences]
//   percwalk sweep    --quantity D|M|C|V --p-grid lo:hi:count --input ... --averages A
//   percwalk estimate --steps N --p-grid lo:hi:count --input ... --epsilon E --fit-degree d
//   percwalk verify   [--inject-fault]
//
// Exit codes: 0 success, 2 configuration error, 3 verification failure.

#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "percwalk/io.hpp"
#include "percwalk/percwalk.hpp"
#include "percwalk/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace percwalk;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;
constexpr std::uint64_t kDefaultSeed = 1;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  int steps = 0;  // 0: subcommand default
  double p = 1.0;
  std::string p_grid = "0:1:41";
  std::string regime;  // empty: subcommand default
  std::vector<std::string> inputs;
  std::size_t averages = 1000;
  std::optional<std::uint64_t> seed;
  double epsilon = 0.01;
  int fit_degree = 5;
  std::string quantity = "M";
  std::string out;
  std::string format = "csv";
  unsigned workers = 0;
  bool differences = false;
  bool inject_fault = false;
  int sequences = 20;

  std::uint64_t resolved_seed = kDefaultSeed;
  std::string seed_source = "default";
};

json to_json(const RunConfig& c) {
  json j{{"command", c.command},       {"steps", c.steps},        {"regime", c.regime},
         {"inputs", c.inputs},         {"averages", c.averages},  {"master_seed", c.resolved_seed},
         {"seed_source", c.seed_source}, {"format", c.format},    {"workers", c.workers}};
  if (c.command == "single" || c.command == "two") j["p"] = c.p;
  if (c.command == "sweep" || c.command == "estimate") j["p_grid"] = c.p_grid;
  if (c.command == "sweep") j["quantity"] = c.quantity;
  if (c.command == "estimate") {
    j["epsilon"] = c.epsilon;
    j["fit_degree"] = c.fit_degree;
  }
  if (c.command == "two") j["differences"] = c.differences;
  if (c.command == "verify") {
    j["sequences"] = c.sequences;
    j["inject_fault"] = c.inject_fault;
  }
  return j;
}

std::uint64_t parse_seed(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used, 0);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("invalid seed in ") + what + ": '" + s + "'");
  }
}

void resolve_seed(RunConfig& c) {
  if (c.seed) {
    c.resolved_seed = *c.seed;
    c.seed_source = "--seed";
  } else if (const char* env = std::getenv("PERCWALK_SEED"); env && *env) {
    c.resolved_seed = parse_seed(env, "PERCWALK_SEED");
    c.seed_source = "PERCWALK_SEED";
  }
}

std::vector<double> parse_grid(const std::string& spec) {
  const auto parts = percwalk::detail::split(spec, ':');
  if (parts.size() != 3) throw ConfigError("--p-grid must look like lo:hi:count, got '" + spec + "'");
  double lo = 0, hi = 0;
  long count = 0;
  try {
    lo = percwalk::detail::parse_real(parts[0]);
    hi = percwalk::detail::parse_real(parts[1]);
    count = std::stol(std::string(parts[2]));
  } catch (const std::exception&) {
    throw ConfigError("--p-grid must look like lo:hi:count, got '" + spec + "'");
  }
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw ConfigError("--p-grid bounds must satisfy 0 <= lo <= hi <= 1");
  if (count < 1) throw ConfigError("--p-grid needs at least one point");
  return linear_grid(lo, hi, static_cast<std::size_t>(count));
}

void validate_common(const RunConfig& c) {
  if (c.steps < 1) throw ConfigError("--steps must be at least 1");
  if (!(c.p >= 0.0 && c.p <= 1.0)) throw ConfigError("--p must lie in [0, 1]");
  if (c.averages < 1) throw ConfigError("--averages must be at least 1");
  if (c.format != "csv" && c.format != "json") throw ConfigError("--format must be csv or json");
  if (c.format == "csv" && fs::path(c.out).extension() == ".json") {
    throw ConfigError("--out ending in .json would collide with the metadata sidecar; use --format json");
  }
}

// Several CSV files cannot share stdout.
void require_out_for_many(const RunConfig& c, std::size_t files) {
  if (files > 1 && c.format == "csv" && c.out.empty()) throw ConfigError("--out is required when writing several CSV files");
}

Regime regime_of(const RunConfig& c) {
  try {
    return parse_regime(c.regime);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

InputSpec input_of(const std::string& text) {
  try {
    auto in = parse_input(text);
    if (!in.is_single()) (void)in.pair_state(1);  // rejects degenerate fermion pairs up front
    return in;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

// "out.csv" + "psi_s" -> "out_psi_s.csv"
fs::path with_suffix(const fs::path& base, const std::string& label) {
  std::string tag;
  for (char ch : label) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') tag += ch;
    else if (ch == '+') tag += "p";
    else if (ch == '-') tag += "m";
    else tag += '_';
  }
  fs::path p = base;
  p.replace_filename(base.stem().string() + "_" + tag + base.extension().string());
  return p;
}

class Run {
 public:
  explicit Run(RunConfig& c) : cfg_(c), t0_(std::chrono::steady_clock::now()) {}

  double wall_seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

  json metadata(json data_files) const {
    return {{"tool", "percwalk"}, {"config", to_json(cfg_)}, {"master_seed", cfg_.resolved_seed},
            {"wall_time_seconds", wall_seconds()}, {"files", std::move(data_files)}};
  }

  // CSV data files plus one JSON sidecar, or a single JSON document.
  void emit(const std::vector<std::pair<fs::path, std::string>>& csvs, json payload) const {
    if (cfg_.out.empty()) {
      if (cfg_.format == "json") {
        json doc = metadata(json::array());
        doc["data"] = std::move(payload);
        std::cout << doc.dump(2) << '\n';
      } else {
        for (const auto& [path, text] : csvs) std::cout << text;
      }
      return;
    }
    const fs::path out = cfg_.out;
    if (cfg_.format == "json") {
      json doc = metadata(json::array({out.filename().string()}));
      doc["data"] = std::move(payload);
      io::write_text(out, doc.dump(2) + "\n");
      std::cerr << "wrote " << out.string() << '\n';
      return;
    }
    json names = json::array();
    for (const auto& [path, text] : csvs) {
      io::write_text(path, text);
      names.push_back(path.filename().string());
      std::cerr << "wrote " << path.string() << '\n';
    }
    json meta = metadata(std::move(names));
    if (cfg_.command == "estimate") meta["results"] = std::move(payload);
    const auto sidecar = io::metadata_path(out);
    io::write_text(sidecar, meta.dump(2) + "\n");
    std::cerr << "wrote " << sidecar.string() << '\n';
  }

 private:
  RunConfig& cfg_;
  std::chrono::steady_clock::time_point t0_;
};

json distribution_json(const PositionDistribution& d) {
  return {{"window_radius", d.window_radius}, {"probabilities", d.probs}};
}

json joint_json(const JointDistribution& d) {
  return {{"window_radius", d.window_radius}, {"probabilities_row_major", d.probs}};
}

JointDistribution subtract(const JointDistribution& a, const JointDistribution& b) {
  JointDistribution d(a.window_radius);
  for (std::size_t k = 0; k < d.probs.size(); ++k) d.probs[k] = a.probs[k] - b.probs[k];
  return d;
}

int cmd_single(RunConfig& c) {
  validate_common(c);
  resolve_seed(c);
  if (c.inputs.empty()) c.inputs = {"single:phi+"};
  if (c.inputs.size() != 1) throw ConfigError("single takes exactly one --input");
  const auto input = input_of(c.inputs[0]);
  if (!input.is_single()) throw ConfigError("single needs a single-walker input (single:... or custom:single:...)");

  Run run(c);
  EnsembleSpec spec{c.averages, c.steps, regime_of(c), c.p, input, c.resolved_seed, 0};
  const auto d = run_single_ensemble(spec, c.workers);
  run.emit({{c.out, io::distribution_csv(d)}}, distribution_json(d));
  return 0;
}

int cmd_two(RunConfig& c) {
  validate_common(c);
  resolve_seed(c);
  if (c.inputs.empty()) c.inputs = {"phi_plus"};
  if (c.inputs.size() != 1) throw ConfigError("two takes exactly one --input");
  const auto input = input_of(c.inputs[0]);
  if (input.is_single()) throw ConfigError("two needs a two-walker input");
  require_out_for_many(c, c.differences ? 2 : 1);

  Run run(c);
  EnsembleSpec spec{c.averages, c.steps, regime_of(c), c.p, input, c.resolved_seed, 0};
  const auto avg = run_ensemble(spec, {c.workers, false});
  std::vector<std::pair<fs::path, std::string>> csvs{{c.out, io::joint_csv(avg.mean)}};
  json payload{{"joint", joint_json(avg.mean)}};

  if (c.differences) {
    // Same coins and lattice realizations under each exchange symmetry.
    auto as = [&](PairKind k, const char* label) {
      auto s = spec;
      s.input = InputSpec::two(k, input.coin1, input.coin2, label);
      return run_ensemble(s, {c.workers, true});
    };
    const auto cl = as(PairKind::ClassicalSeparable, "classical");
    const auto bos = as(PairKind::BosonSym, "boson");
    std::vector<std::pair<std::string, JointDistribution>> grids{{"boson_minus_classical", subtract(bos.mean, cl.mean)}};
    const double ov = std::norm(inner_product(input.coin1, input.coin2));
    if (1.0 - ov > kDegenerateTol) {
      grids.emplace_back("fermion_minus_classical", subtract(as(PairKind::FermionSym, "fermion").mean, cl.mean));
    } else {
      std::cerr << "warning: identical coins, fermion grid skipped\n";
    }
    grids.emplace_back("classical_minus_product_of_means",
                       subtract(cl.mean, classical_joint(cl.mean_marginal1, cl.mean_marginal2)));
    for (const auto& [name, g] : grids) {
      csvs.emplace_back(with_suffix(c.out, name), io::joint_csv(g));
      payload[name] = joint_json(g);
    }
  }
  run.emit(csvs, payload);
  return 0;
}

int cmd_sweep(RunConfig& c) {
  validate_common(c);
  resolve_seed(c);
  if (c.averages < 2) throw ConfigError("sweep needs --averages >= 2 for a standard error");
  if (c.inputs.empty()) c.inputs = {"phi_plus", "psi_minus", "psi_s"};
  Quantity q;
  try {
    q = parse_quantity(c.quantity);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto grid = parse_grid(c.p_grid);
  require_out_for_many(c, c.inputs.size());
  std::vector<InputSpec> inputs;
  for (const auto& s : c.inputs) {
    inputs.push_back(input_of(s));
    if (inputs.back().is_single() && q != Quantity::V2 && q != Quantity::V1) {
      throw ConfigError("quantity " + c.quantity + " needs a two-walker input, got '" + s + "'");
    }
    if (!inputs.back().is_single() && q == Quantity::V1) throw ConfigError("V1 needs a single-walker input");
  }

  Run run(c);
  std::vector<std::pair<fs::path, std::string>> csvs;
  json payload = json::array();
  for (const auto& in : inputs) {
    const auto curve = sweep(q, in, regime_of(c), grid, c.steps, c.averages, c.resolved_seed, c.workers);
    csvs.emplace_back(inputs.size() == 1 ? fs::path(c.out) : with_suffix(c.out, in.label), io::curve_csv(curve));
    payload.push_back({{"input", in.label},
                       {"quantity", std::string(to_string(curve.quantity))},
                       {"p", curve.p_grid},
                       {"mean", curve.means},
                       {"stderr", curve.stderrs}});
  }
  run.emit(csvs, payload);
  return 0;
}

int cmd_estimate(RunConfig& c) {
  validate_common(c);
  resolve_seed(c);
  if (c.averages < 2) throw ConfigError("estimate needs --averages >= 2");
  if (!(c.epsilon > 0.0)) throw ConfigError("--epsilon must be positive");
  if (c.fit_degree < 0) throw ConfigError("--fit-degree must be non-negative");
  if (c.inputs.empty()) c.inputs = {"psi_minus", "phi_plus", "psi_s", "single:phi+"};
  const auto grid = parse_grid(c.p_grid);
  if (grid.size() <= static_cast<std::size_t>(c.fit_degree)) {
    throw ConfigError("--p-grid needs more points than --fit-degree");
  }
  const auto regime = regime_of(c);
  require_out_for_many(c, c.inputs.size());
  if (c.steps % 2 == 0) {
    std::cerr << "warning: even --steps " << c.steps
              << ": origin events vanish only for odd N, so the curves may not be monotone\n";
  }

  Run run(c);
  std::vector<EstimationReport> reports;
  std::vector<std::pair<fs::path, std::string>> csvs;
  for (const auto& s : c.inputs) {
    const auto in = input_of(s);
    reports.push_back(estimate(origin_event(in, c.steps, regime), grid, c.averages, c.resolved_seed, c.epsilon,
                               c.fit_degree, c.workers));
    csvs.emplace_back(c.inputs.size() == 1 ? fs::path(c.out) : with_suffix(c.out, in.label),
                      io::estimation_csv(reports.back()));
  }
  const auto opt = optimality_windows(reports);
  json payload{{"reports", json::array()}, {"optimality", io::to_json(opt)}};
  for (const auto& r : reports) payload["reports"].push_back(io::to_json(r));

  std::cerr << "optimal input by smallest n_min (eps=" << c.epsilon << "):\n";
  for (const auto& w : opt.windows) std::cerr << "  " << w.label << "  p in [" << w.p_lo << ", " << w.p_hi << "]\n";
  run.emit(csvs, payload);
  return 0;
}

int cmd_verify(RunConfig& c) {
  resolve_seed(c);
  if (c.sequences < 1) throw ConfigError("--sequences must be at least 1");
  verify::VerifyOptions opt;
  if (c.seed_source != "default") opt.seed = c.resolved_seed;
  opt.sequences = c.sequences;
  opt.inject_fault = c.inject_fault;
  bool ok = true;
  for (const auto& r : verify::run_all(opt)) {
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  max deviation " << io::format_double(r.max_deviation)
              << " (tol " << r.tolerance << ")\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : kExitVerify;
}

void add_run_options(CLI::App* sub, RunConfig& c, bool grid) {
  sub->add_option("--steps", c.steps, "number of walk steps N (default 15, 7 for estimate)");
  if (grid) {
    sub->add_option("--p-grid", c.p_grid, "percolation grid lo:hi:count")->capture_default_str();
  } else {
    sub->add_option("--p", c.p, "bond presence probability")->capture_default_str();
  }
  sub->add_option("--regime", c.regime, "perfect|static|dynamic (default dynamic, static for estimate)");
  sub->add_option("--input", c.inputs, "input state (repeatable for sweep/estimate)");
  sub->add_option("--averages", c.averages, "lattice realizations A")->capture_default_str();
  sub->add_option("--seed", c.seed, "master seed (falls back to PERCWALK_SEED)");
  sub->add_option("--out", c.out, "output path; stdout when omitted");
  sub->add_option("--format", c.format, "csv|json")->capture_default_str();
  sub->add_option("--workers", c.workers, "worker threads, 0 = all cores")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum walks of one and two particles on percolation lattices"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* single = app.add_subcommand("single", "averaged single-walker position distribution");
  add_run_options(single, cfg, false);

  auto* two = app.add_subcommand("two", "averaged two-walker joint distribution");
  add_run_options(two, cfg, false);
  two->add_flag("--differences", cfg.differences,
                "also write boson-classical, fermion-classical and classical-product-of-means grids");

  auto* sw = app.add_subcommand("sweep", "observable D, M, C or V against p");
  add_run_options(sw, cfg, true);
  sw->add_option("--quantity", cfg.quantity, "D|M|C|V")->capture_default_str();

  auto* est = app.add_subcommand("estimate", "n_min bound for estimating p from origin events");
  add_run_options(est, cfg, true);
  est->add_option("--epsilon", cfg.epsilon, "target uncertainty on p")->capture_default_str();
  est->add_option("--fit-degree", cfg.fit_degree, "polynomial fit degree")->capture_default_str();

  auto* ver = app.add_subcommand("verify", "oracle and identity self-checks");
  ver->add_option("--seed", cfg.seed, "seed for the random test cases");
  ver->add_option("--sequences", cfg.sequences, "random lattice sequences per check")->capture_default_str();
  ver->add_flag("--inject-fault", cfg.inject_fault, "corrupt one bond on the oracle side (must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const bool is_estimate = est->parsed();
  if (cfg.steps == 0) cfg.steps = is_estimate ? 7 : 15;
  if (cfg.regime.empty()) cfg.regime = is_estimate ? "static" : "dynamic";

  try {
    if (single->parsed()) {
      cfg.command = "single";
      return cmd_single(cfg);
    }
    if (two->parsed()) {
      cfg.command = "two";
      return cmd_two(cfg);
    }
    if (sw->parsed()) {
      cfg.command = "sweep";
      return cmd_sweep(cfg);
    }
    if (is_estimate) {
      cfg.command = "estimate";
      return cmd_estimate(cfg);
    }
    if (ver->parsed()) {
      cfg.command = "verify";
      return cmd_verify(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitConfig;
}

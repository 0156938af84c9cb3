// slbkit: rate-distortion lower-bound toolkit.
//
// Subcommands evaluate one module each against a JSON problem description
// and emit one table (CSV by default, JSON lines with --format json).  Every
// row carries a semantic `ref` naming the bound it instantiates and a
// `certified` flag; the process exits 0 only when every emitted row is
// certified and no trial failed.  Campaign subcommands keep going after a
// failed trial and write the reasons to `<out>.failures`.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slb/bounds.hpp"
#include "slb/config.hpp"
#include "slb/errors.hpp"
#include "slb/kraft.hpp"
#include "slb/lz.hpp"
#include "slb/parallel.hpp"
#include "slb/phi.hpp"
#include "slb/report.hpp"
#include "slb/saddle.hpp"
#include "slb/spectral.hpp"

namespace {

using nlohmann::json;
using slb::Cell;
using slb::ConfigError;
using slb::Table;

struct Options {
  std::string config;
  std::string out;  // empty: stdout
  std::string format = "csv";
  std::uint64_t seed = 1;
  int jobs = 1;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "JSON problem description")
      ->required();
  cmd->add_option("--out", opt.out, "output path (default: stdout)");
  cmd->add_option("--format", opt.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  opt.seed_opt = cmd->add_option("--seed", opt.seed, "seed for randomized runs");
  cmd->add_option("--jobs", opt.jobs, "worker threads")
      ->check(CLI::PositiveNumber);
}

// The --seed flag beats a seed in the config; the config beats the default.
std::uint64_t pick_seed(const Options& opt, const json& cfg,
                        const std::string& where) {
  if (opt.seed_opt && opt.seed_opt->count() > 0) return opt.seed;
  if (cfg.contains("seed")) {
    const std::int64_t s = slb::get_int(cfg, "seed", where);
    if (s < 0) throw ConfigError("config: " + where + ".seed must be >= 0");
    return static_cast<std::uint64_t>(s);
  }
  return opt.seed;
}

void emit(const Table& table, const Options& opt) {
  std::ostringstream buf;
  if (opt.format == "json")
    slb::write_jsonl(table, buf);
  else
    slb::write_csv(table, buf);
  if (opt.out.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream f(opt.out, std::ios::binary);
    if (!f) throw ConfigError("cannot open output path '" + opt.out + "'");
    f << buf.str();
  }
}

// Failed-trial manifest; rows that completed still go to the main output.
void emit_failures(const std::vector<std::string>& failures,
                   const Options& opt) {
  if (failures.empty()) return;
  std::ostringstream buf;
  for (const auto& line : failures) buf << line << '\n';
  if (opt.out.empty()) {
    std::cerr << buf.str();
  } else {
    std::ofstream f(opt.out + ".failures", std::ios::binary);
    if (!f)
      throw ConfigError("cannot open output path '" + opt.out + ".failures'");
    f << buf.str();
  }
}

std::string join_values(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += slb::format_cell(Cell(v[i]));
  }
  return out;
}

std::vector<int> parse_n_grid(const json& cfg, const std::string& where) {
  std::vector<int> ns;
  const bool single = cfg.contains("n");
  const bool grid = cfg.contains("n_grid");
  if (single == grid)
    throw ConfigError("config: " + where +
                      " needs exactly one of 'n' or 'n_grid'");
  if (single) {
    ns.push_back(static_cast<int>(slb::get_int(cfg, "n", where)));
  } else {
    const json& node = cfg.at("n_grid");
    if (!node.is_array() || node.empty())
      throw ConfigError("config: " + where + ".n_grid must be a nonempty array");
    for (const json& e : node) {
      if (!e.is_number_integer())
        throw ConfigError("config: " + where + ".n_grid entries must be integers");
      ns.push_back(e.get<int>());
    }
  }
  for (int n : ns)
    if (n < 1) throw ConfigError("config: " + where + ": block length must be >= 1");
  return ns;
}

int finish(const Table& table, const Options& opt, bool all_certified,
           const std::vector<std::string>& failures = {}) {
  emit(table, opt);
  emit_failures(failures, opt);
  return (all_certified && failures.empty()) ? 0 : 1;
}

// --- phi ------------------------------------------------------------------

int cmd_phi(const Options& opt) {
  const json cfg = slb::load_config_file(opt.config);
  slb::check_keys(cfg, {"alphabet", "functions", "d_grid"}, {}, "phi");
  const slb::Alphabet alphabet = slb::parse_alphabet(cfg.at("alphabet"));

  const json& fns = cfg.at("functions");
  if (!fns.is_array() || fns.empty())
    throw ConfigError("config: phi.functions must be a nonempty array");
  std::vector<slb::WindowFunction> functions;
  for (const json& f : fns)
    functions.push_back(slb::parse_window_function(f));
  const std::size_t k = functions.size();

  const json& grid = cfg.at("d_grid");
  if (!grid.is_array() || grid.empty())
    throw ConfigError("config: phi.d_grid must be a nonempty array");
  std::vector<std::vector<double>> d_rows;
  for (const json& e : grid) {
    if (e.is_number())
      d_rows.push_back({e.get<double>()});
    else
      d_rows.push_back(slb::get_double_array(e, "phi.d_grid entry"));
    if (d_rows.back().size() != k)
      throw ConfigError(
          "config: phi.d_grid entries must match functions in length");
  }
  const slb::DistortionSpec spec = slb::make_spec(functions, d_rows.front());

  std::vector<std::string> cols;
  for (std::size_t j = 0; j < k; ++j) cols.push_back("d" + std::to_string(j + 1));
  cols.push_back("phi_bits");
  for (std::size_t j = 0; j < k; ++j)
    cols.push_back("beta" + std::to_string(j + 1) + "_bits");
  for (const char* c : {"active_mask", "degenerate", "at_floor", "dependent",
                        "converged", "iterations", "maxent_residual_bits",
                        "ref", "certified"})
    cols.push_back(c);
  Table table(cols);

  bool all_ok = true;
  for (const auto& d : d_rows) {
    const slb::PhiResult pr = slb::phi(alphabet, spec, d);
    const slb::MaxEntCheck mc = slb::maxent_check(pr, alphabet, spec, d);
    double residual = 0.0;
    if (mc.applicable) {
      residual = std::abs(mc.entropy_gap_bits);
      for (double g : mc.moment_gaps) residual = std::max(residual, std::abs(g));
    }
    std::string mask;
    for (bool a : pr.active_mask) mask += a ? '1' : '0';
    const bool certified =
        pr.converged && (!mc.applicable || residual <= 1e-6);
    all_ok = all_ok && certified;

    std::vector<Cell> row;
    for (double v : d) row.emplace_back(v);
    row.emplace_back(pr.phi);
    for (double b : pr.beta_star) row.emplace_back(b);
    row.emplace_back(mask);
    row.emplace_back(pr.degenerate);
    row.emplace_back(pr.at_floor);
    row.emplace_back(pr.dependent_constraints);
    row.emplace_back(pr.converged);
    row.emplace_back(static_cast<std::int64_t>(pr.iterations));
    if (mc.applicable)
      row.emplace_back(residual);
    else
      row.emplace_back(std::monostate{});
    row.emplace_back(std::string("phi"));
    row.emplace_back(certified);
    table.add_row(std::move(row));
  }
  return finish(table, opt, all_ok);
}

// --- volume ----------------------------------------------------------------

int cmd_volume(const Options& opt) {
  const json cfg = slb::load_config_file(opt.config);
  slb::check_keys(cfg, {"alphabet", "distortion"},
                  {"n", "n_grid", "methods", "samples", "seed"}, "volume");
  const slb::Alphabet alphabet = slb::parse_alphabet(cfg.at("alphabet"));
  const slb::DistortionSpec spec = slb::parse_distortion(cfg.at("distortion"));
  const std::vector<int> ns = parse_n_grid(cfg, "volume");
  const std::uint64_t seed = pick_seed(opt, cfg, "volume");

  std::vector<std::string> methods = {"saddlepoint", "chernoff"};
  if (cfg.contains("methods")) {
    methods.clear();
    const json& node = cfg.at("methods");
    if (!node.is_array() || node.empty())
      throw ConfigError("config: volume.methods must be a nonempty array");
    for (const json& e : node) {
      if (!e.is_string())
        throw ConfigError("config: volume.methods entries must be strings");
      const std::string name = e.get<std::string>();
      if (name != "saddlepoint" && name != "chernoff" && name != "exact" &&
          name != "monte-carlo")
        throw ConfigError("config: unknown volume method '" + name + "'");
      methods.push_back(name);
    }
  }
  std::int64_t samples = 100000;
  if (cfg.contains("samples")) samples = slb::get_int(cfg, "samples", "volume");
  if (samples < 1) throw ConfigError("config: volume.samples must be >= 1");

  // Shared per-method state, computed once.
  std::optional<slb::SaddleResult> saddle;
  std::optional<slb::PhiResult> phi_result;
  for (const auto& m : methods) {
    if (m == "saddlepoint" && !saddle)
      saddle = slb::find_saddle(alphabet, spec, spec.levels);
    if (m == "chernoff" && !phi_result)
      phi_result = slb::phi(alphabet, spec, spec.levels);
  }

  Table table({"n", "method", "log_volume_bits", "per_symbol_bits",
               "prefactor_bits", "ci95_bits", "zero_hits", "ref",
               "certified"});
  bool all_ok = true;
  for (int n : ns) {
    for (const auto& m : methods) {
      slb::VolumeEstimate est;
      Cell prefactor = std::monostate{};
      if (m == "saddlepoint") {
        slb::SaddleResult sr = *saddle;
        est = slb::log_volume_saddle(n, sr, alphabet);
        prefactor = sr.prefactor_bits;
      } else if (m == "chernoff") {
        est = slb::chernoff_log_volume(n, *phi_result);
      } else if (m == "exact") {
        if (spec.k() != 1)
          throw ConfigError(
              "config: the exact method needs a single-constraint spec");
        est = slb::exact_volume(n, alphabet, spec, spec.levels[0]);
      } else {
        est = slb::monte_carlo_volume(n, alphabet, spec, spec.levels, samples,
                                      seed, opt.jobs);
      }
      const bool certified = std::isfinite(est.log_volume_bits) && !est.zero_hits;
      all_ok = all_ok && certified;
      std::vector<Cell> row;
      row.emplace_back(static_cast<std::int64_t>(n));
      row.emplace_back(std::string(slb::method_name(est.method)));
      row.emplace_back(est.log_volume_bits);
      row.emplace_back(est.log_volume_bits / n);
      row.push_back(prefactor);
      if (est.ci95_bits)
        row.emplace_back(*est.ci95_bits);
      else
        row.emplace_back(std::monostate{});
      row.emplace_back(est.zero_hits);
      row.emplace_back(std::string("volume-") + slb::method_name(est.method));
      row.emplace_back(certified);
      table.add_row(std::move(row));
    }
  }
  return finish(table, opt, all_ok);
}

// --- kraft -----------------------------------------------------------------

int cmd_kraft(const Options& opt) {
  const json cfg = slb::load_config_file(opt.config);
  slb::check_keys(cfg, {"lemma", "trials"}, {"max_n", "max_ell", "seed"},
                  "kraft");
  slb::CampaignConfig cc;
  cc.lemma = static_cast<int>(slb::get_int(cfg, "lemma", "kraft"));
  cc.trials = static_cast<int>(slb::get_int(cfg, "trials", "kraft"));
  if (cfg.contains("max_n"))
    cc.max_n = static_cast<int>(slb::get_int(cfg, "max_n", "kraft"));
  if (cfg.contains("max_ell"))
    cc.max_ell = static_cast<int>(slb::get_int(cfg, "max_ell", "kraft"));
  cc.seed = pick_seed(opt, cfg, "kraft");
  cc.jobs = opt.jobs;
  if (cc.lemma < 1 || cc.lemma > 5)
    throw ConfigError("config: kraft.lemma must lie in [1, 5]");
  if (cc.trials < 1) throw ConfigError("config: kraft.trials must be >= 1");

  std::vector<std::optional<slb::KraftReport>> reports(cc.trials);
  std::vector<std::string> errors(cc.trials);
  slb::parallel_for(static_cast<std::size_t>(cc.trials), cc.jobs,
                    [&](std::size_t i) {
                      try {
                        reports[i] = slb::run_campaign_trial(cc, i);
                      } catch (const slb::Error& e) {
                        errors[i] = e.what();
                      }
                    });

  Table table({"trial", "lemma", "variant", "n", "states", "alpha",
               "beta_bits", "z_value", "bound", "slack", "level", "ref",
               "certified"});
  bool all_ok = true;
  std::vector<std::string> failures;
  for (int i = 0; i < cc.trials; ++i) {
    if (!reports[i]) {
      failures.push_back("trial " + std::to_string(i) + ": " + errors[i]);
      continue;
    }
    const slb::KraftReport& r = *reports[i];
    const bool certified = r.slack >= 0.0;
    all_ok = all_ok && certified;
    std::vector<Cell> row;
    row.emplace_back(static_cast<std::int64_t>(r.trial));
    row.emplace_back(static_cast<std::int64_t>(r.lemma));
    row.emplace_back(r.variant);
    row.emplace_back(static_cast<std::int64_t>(r.n));
    if (r.states > 0)
      row.emplace_back(static_cast<std::int64_t>(r.states));
    else
      row.emplace_back(std::monostate{});
    row.emplace_back(r.alpha);
    row.emplace_back(join_values(r.beta));
    row.emplace_back(r.z_value);
    row.emplace_back(r.bound);
    row.emplace_back(r.slack);
    if (r.level)
      row.emplace_back(*r.level);
    else
      row.emplace_back(std::monostate{});
    row.emplace_back("kraft-" + r.variant);
    row.emplace_back(certified);
    table.add_row(std::move(row));
  }
  return finish(table, opt, all_ok, failures);
}

// --- slb -------------------------------------------------------------------

int cmd_slb(const Options& opt) {
  const json cfg = slb::load_config_file(opt.config);
  slb::check_keys(cfg, {"alphabet", "distortion"},
                  {"h_rate_bits", "source", "n", "n_grid"}, "slb");
  slb::BoundInputs inputs;
  inputs.alphabet = slb::parse_alphabet(cfg.at("alphabet"));
  inputs.spec = slb::parse_distortion(cfg.at("distortion"));
  inputs.h_rate_bits = slb::parse_entropy_rate(cfg, "slb");
  const std::vector<int> ns = parse_n_grid(cfg, "slb");

  Table table({"n", "variant", "raw_bits", "value_bits", "clamped",
               "redundancy_bits", "violation", "ref", "certified"});
  bool all_ok = true;
  for (int n : ns) {
    inputs.n = n;
    const slb::BoundReport report = slb::ordering_check(inputs);
    all_ok = all_ok && report.ordering_certificate;
    for (const auto& entry : report.entries) {
      std::vector<Cell> row;
      row.emplace_back(static_cast<std::int64_t>(n));
      row.emplace_back(entry.variant);
      row.emplace_back(entry.raw_bits);
      row.emplace_back(entry.value_bits);
      row.emplace_back(entry.clamped);
      row.emplace_back(entry.redundancy_bits);
      if (report.violation.empty())
        row.emplace_back(std::monostate{});
      else
        row.emplace_back(report.violation);
      row.emplace_back(entry.ref);
      row.emplace_back(report.ordering_certificate);
      table.add_row(std::move(row));
    }
  }
  return finish(table, opt, all_ok);
}

// --- sliding -----------------------------------------------------------------

int cmd_sliding(const Options& opt) {
  const json cfg = slb::load_config_file(opt.config);
  if (cfg.is_object() && cfg.contains("gaussian_example")) {
    slb::check_keys(cfg, {"gaussian_example"}, {}, "sliding");
    const json& ex = cfg.at("gaussian_example");
    slb::check_keys(ex, {"d", "theta_grid"}, {}, "sliding.gaussian_example");
    const double d = slb::get_double(ex, "d", "sliding.gaussian_example");
    const auto thetas = slb::get_double_array(
        ex.at("theta_grid"), "sliding.gaussian_example.theta_grid");

    Table table({"theta", "d", "residual_bits", "memory_penalty_bits", "ref",
                 "certified"});
    bool all_ok = true;
    for (double theta : thetas) {
      const double residual = slb::gaussian_example_check(d, theta);
      const double penalty = 0.5 * std::log2(1.0 / (1.0 - theta * theta));
      const bool certified = residual <= 1e-2;
      all_ok = all_ok && certified;
      table.add_row({Cell(theta), Cell(d), Cell(residual), Cell(penalty),
                     Cell(std::string("sliding-gaussian")), Cell(certified)});
    }
    return finish(table, opt, all_ok);
  }

  slb::check_keys(cfg, {"alphabet", "distortion"}, {"h_rate_bits", "source"},
                  "sliding");
  const slb::Alphabet alphabet = slb::parse_alphabet(cfg.at("alphabet"));
  const slb::DistortionSpec spec = slb::parse_distortion(cfg.at("distortion"));
  const double h = slb::parse_entropy_rate(cfg, "sliding");
  const slb::SlidingBound bound = slb::sliding_slb(alphabet, spec, h, opt.jobs);
  const bool certified = !bound.under_resolved;

  Table table({"h_rate_bits", "value_bits", "objective_bits",
               "log_lambda_bits", "beta_bits", "grid_fallback",
               "under_resolved", "iterations", "ref", "certified"});
  table.add_row({Cell(h), Cell(bound.value_bits), Cell(bound.objective_bits),
                 Cell(bound.log_lambda_bits), Cell(join_values(bound.beta_star)),
                 Cell(bound.grid_fallback), Cell(bound.under_resolved),
                 Cell(static_cast<std::int64_t>(bound.iterations)),
                 Cell(std::string("slb-sliding")), Cell(certified)});
  return finish(table, opt, certified);
}

// --- indiv -------------------------------------------------------------------

std::vector<int> parse_symbol_string(const std::string& text, int symbols) {
  std::vector<int> u;
  u.reserve(text.size());
  for (char ch : text) {
    if (ch < '0' || ch > '9')
      throw ConfigError("config: indiv.sequence must be decimal digits");
    const int v = ch - '0';
    if (v >= symbols)
      throw ConfigError("config: indiv.sequence digit out of range");
    u.push_back(v);
  }
  if (u.empty()) throw ConfigError("config: indiv.sequence must be nonempty");
  return u;
}

int cmd_indiv(const Options& opt) {
  const json cfg = slb::load_config_file(opt.config);
  if (cfg.is_object() && cfg.contains("sequence")) {
    slb::check_keys(cfg, {"sequence"}, {"symbols"}, "indiv");
    int symbols = 2;
    if (cfg.contains("symbols"))
      symbols = static_cast<int>(slb::get_int(cfg, "symbols", "indiv"));
    if (symbols < 2 || symbols > 10)
      throw ConfigError("config: indiv.symbols must lie in [2, 10]");
    const std::vector<int> u =
        parse_symbol_string(slb::get_string(cfg, "sequence", "indiv"), symbols);
    const slb::LZParse parse = slb::lz78_parse(u, symbols);
    const slb::LZLength len = slb::lz78_length_bound(parse, symbols);

    std::vector<int> rebuilt;
    for (const auto& phrase : parse.phrases)
      rebuilt.insert(rebuilt.end(), phrase.begin(), phrase.end());
    const bool round_trip = rebuilt == u;

    Table table({"n", "c", "bound_bits", "normalized_bits", "degenerate",
                 "round_trip", "ref", "certified"});
    table.add_row({Cell(static_cast<std::int64_t>(parse.n)),
                   Cell(static_cast<std::int64_t>(parse.c)),
                   Cell(len.bound_bits), Cell(len.normalized_bits),
                   Cell(len.degenerate), Cell(round_trip),
                   Cell(std::string("lz78")), Cell(round_trip)});
    return finish(table, opt, round_trip);
  }

  slb::check_keys(cfg, {"harness"}, {"seed"}, "indiv");
  const json& h = cfg.at("harness");
  slb::check_keys(h, {}, {"trials", "n", "ell"}, "indiv.harness");
  slb::IndivHarnessConfig hc;
  if (h.contains("trials"))
    hc.trials = static_cast<int>(slb::get_int(h, "trials", "indiv.harness"));
  if (h.contains("n"))
    hc.n = static_cast<std::size_t>(slb::get_int(h, "n", "indiv.harness"));
  if (h.contains("ell"))
    hc.ell = static_cast<int>(slb::get_int(h, "ell", "indiv.harness"));
  hc.seed = pick_seed(opt, cfg, "indiv");
  hc.jobs = opt.jobs;

  const std::vector<slb::IndivTrial> trials = slb::run_indiv_harness(hc);
  Table table({"trial", "n", "c", "normalized_bits", "dbar", "bound_bits",
               "measured_bits", "margin_bits", "fs_rate_bits", "ref",
               "certified"});
  bool all_ok = true;
  for (const auto& t : trials) {
    const bool certified = t.margin_bits >= 0.0;
    all_ok = all_ok && certified;
    table.add_row({Cell(static_cast<std::int64_t>(t.trial)),
                   Cell(static_cast<std::int64_t>(t.n)),
                   Cell(static_cast<std::int64_t>(t.c)),
                   Cell(t.normalized_bits), Cell(t.dbar), Cell(t.bound_bits),
                   Cell(t.measured_bits), Cell(t.margin_bits),
                   Cell(t.fs_rate_bits), Cell(std::string("slb-individual")),
                   Cell(certified)});
  }
  return finish(table, opt, all_ok);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rate-distortion lower-bound toolkit"};
  app.require_subcommand(1);

  Options o_phi, o_volume, o_kraft, o_slb, o_sliding, o_indiv;
  int rc = 0;

  auto* c_phi = app.add_subcommand(
      "phi", "distortion-constrained maximum entropy over a level grid");
  add_common(c_phi, o_phi);
  c_phi->callback([&] { rc = cmd_phi(o_phi); });

  auto* c_volume = app.add_subcommand(
      "volume", "log distortion-ball volume estimates over block lengths");
  add_common(c_volume, o_volume);
  c_volume->callback([&] { rc = cmd_volume(o_volume); });

  auto* c_kraft = app.add_subcommand(
      "kraft", "randomized certification campaign for the length inequalities");
  add_common(c_kraft, o_kraft);
  c_kraft->callback([&] { rc = cmd_kraft(o_kraft); });

  auto* c_slb = app.add_subcommand(
      "slb", "per-symbol rate lower bounds with the ordering certificate");
  add_common(c_slb, o_slb);
  c_slb->callback([&] { rc = cmd_slb(o_slb); });

  auto* c_sliding = app.add_subcommand(
      "sliding", "sliding-window bound via the transfer-operator objective");
  add_common(c_sliding, o_sliding);
  c_sliding->callback([&] { rc = cmd_sliding(o_sliding); });

  auto* c_indiv = app.add_subcommand(
      "indiv", "individual-sequence parsing bound and soundness harness");
  add_common(c_indiv, o_indiv);
  c_indiv->callback([&] { rc = cmd_indiv(o_indiv); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const slb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return rc;
}

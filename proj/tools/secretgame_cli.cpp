#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "secretgame/bruteforce_oracle.hpp"
#include "secretgame/capped_solver.hpp"
#include "secretgame/cost_ingest.hpp"
#include "secretgame/costly_solver.hpp"
#include "secretgame/partition_model.hpp"

namespace {

using nlohmann::ordered_json;
using namespace secretgame;

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

unsigned worker_count() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("SECRETGAME_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < n)
      n = static_cast<unsigned>(cap);
  }
  return n;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PartitionProfile load_profile(const std::string& path) {
  try {
    return PartitionProfile::from_json_text(read_file(path));
  } catch (const model_error& e) {
    throw UsageError("invalid game file " + path + ": " + e.what());
  }
}

ordered_json size_json(count_t size) {
  if (size <= static_cast<count_t>(~std::uint64_t{0}))
    return static_cast<std::uint64_t>(size);
  return to_string(size);
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw UsageError("cannot write file: " + out_path);
  out << text;
}

ordered_json plan_json(const ExplorationPlan& plan) {
  ordered_json batches = ordered_json::array();
  for (const auto& b : plan.batches)
    batches.push_back({{"partition", b.group + 1}, {"count", size_json(b.count)}});
  return {{"quit", plan.is_quit()}, {"batches", std::move(batches)}};
}

std::string csv_num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

int run_solve_capped(const std::string& game, double lambda, double gamma,
                     std::uint64_t cap, const std::string& format,
                     const std::string& out_path) {
  const PartitionProfile profile = load_profile(game);
  const CappedParams params{lambda, gamma, cap};
  try {
    params.validate(profile);
  } catch (const model_error& e) {
    throw UsageError(e.what());
  }
  const SolveReport report = solve_ne(profile, params);
  const VerifyResult check =
      verify_ne(profile, params, report.picker_strategy,
                *report.guesser_marginals, 1e-9);
  if (!check.ok) {
    std::cerr << "solver self-check failed: " << check.certificate << "\n";
    return kExitSolverFailure;
  }

  if (format == "csv") {
    std::ostringstream csv;
    csv << "index,size,cost,picker_mass,rho,bias\n";
    for (std::size_t i = 0; i < profile.num_partitions(); ++i) {
      const double bias = i < report.diagnostics.bias.size()
                              ? report.diagnostics.bias[i]
                              : 0.0;
      csv << (i + 1) << ',' << to_string(profile.partition(i).size) << ','
          << csv_num(profile.partition(i).cost) << ','
          << csv_num(report.picker_strategy.mass(i)) << ','
          << csv_num(report.guesser_marginals->rho(i)) << ','
          << csv_num(bias) << '\n';
    }
    write_output(csv.str(), out_path);
    return kExitOk;
  }

  ordered_json doc;
  doc["classification"] = to_string(report.classification);
  doc["picker_utility"] = report.picker_utility;
  doc["guesser_utility"] = report.guesser_utility;
  doc["lambda"] = lambda;
  doc["gamma"] = gamma;
  doc["cap"] = cap;
  doc["L"] = *report.diagnostics.L;
  doc["J_set"] = report.diagnostics.J_set;
  if (report.diagnostics.J) doc["J"] = *report.diagnostics.J;
  doc["support_end"] = *report.diagnostics.support_end;
  doc["flags"] = report.diagnostics.flags;
  ordered_json parts = ordered_json::array();
  for (std::size_t i = 0; i < profile.num_partitions(); ++i) {
    ordered_json row;
    row["index"] = i + 1;
    row["size"] = size_json(profile.partition(i).size);
    row["cost"] = profile.partition(i).cost;
    row["picker_mass"] = report.picker_strategy.mass(i);
    row["rho"] = report.guesser_marginals->rho(i);
    if (i < report.diagnostics.bias.size())
      row["bias"] = report.diagnostics.bias[i];
    parts.push_back(std::move(row));
  }
  doc["partitions"] = std::move(parts);
  write_output(doc.dump(2) + "\n", out_path);
  return kExitOk;
}

int run_solve_costly(const std::string& game, double lambda, double gamma,
                     double sigma, const std::string& mode,
                     const std::string& format, const std::string& out_path) {
  const PartitionProfile profile = load_profile(game);
  const CostlyParams params{lambda, gamma, sigma};
  try {
    params.validate();
  } catch (const model_error& e) {
    throw UsageError(e.what());
  }

  ordered_json doc;
  doc["lambda"] = lambda;
  doc["gamma"] = gamma;
  doc["sigma"] = sigma;
  if (mode == "ne") {
    const CostlyRegime regime = classify_regime(profile, params);
    switch (regime.kind) {
      case CostlyKind::GuesserQuits:
        doc["regime"] = "guesser_quits";
        doc["picker_utility"] = regime.ne_picker_utility_or_bound;
        break;
      case CostlyKind::TotalDefeat:
        doc["regime"] = "total_defeat";
        doc["picker_utility"] = regime.ne_picker_utility_or_bound;
        break;
      case CostlyKind::BoundedNe:
        doc["regime"] = "bounded";
        doc["M"] = *regime.M;
        doc["utility_upper_bound"] = regime.ne_picker_utility_or_bound;
        break;
    }
    doc["boundary"] = regime.boundary;
  } else {
    const SolveReport report = solve_sse(profile, params);
    doc["classification"] = to_string(report.classification);
    doc["picker_utility"] = report.picker_utility;
    doc["guesser_utility"] = report.guesser_utility;
    doc["nu"] = report.picker_strategy.mass();
    ordered_json per_secret = ordered_json::array();
    for (std::size_t i = 0; i < profile.num_partitions(); ++i)
      per_secret.push_back(report.picker_strategy.per_secret(profile, i));
    doc["per_secret_delta"] = std::move(per_secret);
    if (report.diagnostics.deterrence_value)
      doc["deterrence_value"] = *report.diagnostics.deterrence_value;
    if (report.diagnostics.lp_status)
      doc["lp_status"] = *report.diagnostics.lp_status;
    if (report.guesser_plan) doc["guesser_plan"] = plan_json(*report.guesser_plan);
    doc["flags"] = report.diagnostics.flags;
  }

  if (format == "csv") {
    std::ostringstream csv;
    csv << "key,value\n";
    for (const auto& [key, value] : doc.items()) {
      if (value.is_structured())
        csv << key << ",\"" << value.dump() << "\"\n";
      else if (value.is_string())
        csv << key << ',' << value.get<std::string>() << '\n';
      else
        csv << key << ',' << value.dump() << '\n';
    }
    write_output(csv.str(), out_path);
  } else {
    write_output(doc.dump(2) + "\n", out_path);
  }
  return kExitOk;
}

int run_sweep(const std::string& game, const std::string& axis, double from,
              double to, std::uint64_t steps, double lambda, double gamma,
              double sigma, const std::string& out_path) {
  const PartitionProfile profile = load_profile(game);
  if (steps < 1) throw UsageError("steps must be at least 1");
  if (to < from) throw UsageError("empty sweep range");
  std::ostringstream csv;

  if (axis == "cap") {
    std::vector<std::uint64_t> caps;
    for (std::uint64_t s = 0; s < steps; ++s) {
      const double x =
          steps == 1 ? from
                     : from + (to - from) * static_cast<double>(s) /
                                  static_cast<double>(steps - 1);
      const std::uint64_t cap =
          static_cast<std::uint64_t>(x < 1.0 ? 1.0 : x + 0.5);
      if (caps.empty() || caps.back() != cap) caps.push_back(cap);
    }
    const auto rows = sweep_capped(profile, lambda, gamma, caps, worker_count());
    csv << "cap,picker_loss,support_size,find_probability,classification,error\n";
    for (const auto& row : rows) {
      if (!row.error.empty()) {
        csv << row.cap << ",,,,," << row.error << '\n';
        continue;
      }
      csv << row.cap << ',' << csv_num(row.picker_loss) << ','
          << csv_num(row.support_size) << ',' << csv_num(row.find_probability)
          << ',' << row.classification << ",\n";
    }
  } else if (axis == "gamma_sigma") {
    std::vector<std::pair<double, double>> grid;
    for (std::uint64_t s = 0; s < steps; ++s) {
      const double ratio =
          steps == 1 ? from
                     : from + (to - from) * static_cast<double>(s) /
                                  static_cast<double>(steps - 1);
      grid.push_back({ratio * sigma, sigma});
    }
    const auto rows = sweep_costly(profile, lambda, grid, worker_count());
    csv << "gamma_sigma,gamma,sigma,ne_regime,ne_loss,ne_loss_is_bound,"
           "sse_classification,sse_loss,error\n";
    for (const auto& row : rows) {
      csv << csv_num(row.gamma / row.sigma) << ',' << csv_num(row.gamma) << ','
          << csv_num(row.sigma) << ',';
      if (!row.error.empty()) {
        csv << ",,,,," << row.error << '\n';
        continue;
      }
      csv << row.ne_regime << ',' << csv_num(row.ne_loss) << ','
          << (row.ne_loss_is_bound ? "true" : "false") << ','
          << row.sse_classification << ',' << csv_num(row.sse_loss) << ",\n";
    }
  } else {
    throw UsageError("axis must be cap or gamma_sigma");
  }
  write_output(csv.str(), out_path);
  return kExitOk;
}

int run_ingest(const std::string& input, const std::string& mode,
               const std::string& freq_format, unsigned max_bits,
               const std::string& cost_shape, double prune_tol,
               const std::string& out_path) {
  std::optional<PartitionProfile> profile;
  try {
    if (mode == "freq") {
      FreqFormat format = FreqFormat::Auto;
      if (freq_format == "counts") format = FreqFormat::CountMultiplicity;
      else if (freq_format == "raw") format = FreqFormat::SecretCount;
      else if (freq_format != "auto")
        throw UsageError("freq-format must be auto, counts, or raw");
      profile = from_frequency_text(read_file(input), format);
    } else if (mode == "keys") {
      const KeyCostShape shape = cost_shape == "cubic" ? KeyCostShape::Cubic
                                                       : KeyCostShape::Linear;
      if (cost_shape != "linear" && cost_shape != "cubic")
        throw UsageError("cost shape must be linear or cubic");
      profile = synthetic_key_model(max_bits, shape);
    } else {
      throw UsageError("mode must be freq or keys");
    }
    if (prune_tol > 0.0) profile = prune(*profile, prune_tol);
  } catch (const model_error& e) {
    throw UsageError(e.what());
  }
  write_output(profile->to_json_text() + "\n", out_path);
  return kExitOk;
}

int run_verify(std::uint64_t seed, std::uint64_t instances,
               const std::string& out_path) {
  const auto suites = run_verification(seed, instances);
  ordered_json doc;
  doc["seed"] = seed;
  doc["instances"] = instances;
  bool ok = true;
  ordered_json rows = ordered_json::array();
  for (const auto& s : suites) {
    rows.push_back({{"name", s.name},
                    {"passed", s.passed},
                    {"failed", s.failed},
                    {"first_failure", s.first_failure}});
    if (s.failed > 0) ok = false;
  }
  doc["suites"] = std::move(rows);
  doc["ok"] = ok;
  write_output(doc.dump(2) + "\n", out_path);
  return ok ? kExitOk : kExitSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solvers for the capped and costly secret-guessing games"};
  app.require_subcommand(1);

  std::string game, format = "json", out_path;
  double lambda = 1.0, gamma = 1.0, sigma = 1.0;
  std::uint64_t cap = 1;

  auto* solve_capped =
      app.add_subcommand("solve-capped", "Equilibrium of the capped game");
  solve_capped->add_option("--game", game, "game profile JSON file")->required();
  solve_capped->add_option("--lambda", lambda, "picker loss on discovery");
  solve_capped->add_option("--gamma", gamma, "guesser gain on discovery");
  solve_capped->add_option("--cap", cap, "dictionary size K")->required();
  solve_capped->add_option("--format", format, "json or csv");
  solve_capped->add_option("--out", out_path, "output file (default stdout)");

  std::string mode = "ne";
  auto* solve_costly = app.add_subcommand(
      "solve-costly", "NE regime or Stackelberg commitment, costly game");
  solve_costly->add_option("--game", game, "game profile JSON file")->required();
  solve_costly->add_option("--lambda", lambda, "picker loss on discovery");
  solve_costly->add_option("--gamma", gamma, "guesser gain on discovery");
  solve_costly->add_option("--sigma", sigma, "cost per guess");
  solve_costly->add_option("--mode", mode, "ne or sse");
  solve_costly->add_option("--format", format, "json or csv");
  solve_costly->add_option("--out", out_path, "output file (default stdout)");

  std::string axis = "cap";
  double from = 1.0, to = 1.0;
  std::uint64_t steps = 1;
  auto* sweep = app.add_subcommand("sweep", "Solve over a parameter grid");
  sweep->add_option("--game", game, "game profile JSON file")->required();
  sweep->add_option("--axis", axis, "cap or gamma_sigma");
  sweep->add_option("--from", from, "grid start")->required();
  sweep->add_option("--to", to, "grid end")->required();
  sweep->add_option("--steps", steps, "number of grid points")->required();
  sweep->add_option("--lambda", lambda, "picker loss on discovery");
  sweep->add_option("--gamma", gamma, "guesser gain (cap axis)");
  sweep->add_option("--sigma", sigma, "cost per guess (gamma_sigma axis)");
  sweep->add_option("--out", out_path, "output file (default stdout)");

  std::string input, freq_format = "auto", cost_shape = "linear";
  unsigned max_bits = 16;
  double prune_tol = 0.0;
  auto* ingest =
      app.add_subcommand("ingest", "Build a game profile from input data");
  ingest->add_option("--input", input, "frequency TSV (freq mode)");
  ingest->add_option("--mode", mode, "freq or keys")->required();
  ingest->add_option("--freq-format", freq_format, "auto, counts, or raw");
  ingest->add_option("--max-bits", max_bits, "key model: largest key length");
  ingest->add_option("--cost", cost_shape, "key model: linear or cubic");
  ingest->add_option("--prune", prune_tol, "merge cost classes closer than this");
  ingest->add_option("--out", out_path, "output file (default stdout)");

  std::uint64_t seed = 1, instances = 100;
  auto* verify =
      app.add_subcommand("verify", "Cross-check solvers against the oracles");
  verify->add_option("--seed", seed, "base seed");
  verify->add_option("--instances", instances, "random instances per suite");
  verify->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve_capped->parsed())
      return run_solve_capped(game, lambda, gamma, cap, format, out_path);
    if (solve_costly->parsed()) {
      if (mode != "ne" && mode != "sse")
        throw UsageError("mode must be ne or sse");
      return run_solve_costly(game, lambda, gamma, sigma, mode, format,
                              out_path);
    }
    if (sweep->parsed())
      return run_sweep(game, axis, from, to, steps, lambda, gamma, sigma,
                       out_path);
    if (ingest->parsed()) {
      if (mode == "freq" && input.empty())
        throw UsageError("freq mode needs --input");
      return run_ingest(input, mode, freq_format, max_bits, cost_shape,
                        prune_tol, out_path);
    }
    if (verify->parsed()) {
      if (instances == 0) throw UsageError("instances must be positive");
      return run_verify(seed, instances, out_path);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  return kExitUsage;
}

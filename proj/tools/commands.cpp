#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "external_oracle.hpp"
#include "ttc/pricing.hpp"
#include "ttc/rng.hpp"
#include "ttc/tt_io.hpp"
#include "ttc/tt_ops.hpp"

namespace ttc::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json domain_to_json(const Domain& domain) {
  json out = json::array();
  for (const auto& iv : domain.intervals) out.push_back({iv[0], iv[1]});
  return out;
}

/// Rows of a headerless CSV batch: d comma-separated columns per row.
std::vector<std::vector<double>> read_batch_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open batch file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      row.push_back(std::stod(cell));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json storage_to_json(const TTTensor& x) {
  const auto storage = storage_bytes(x);
  return {{"tt_bytes", storage.tt_bytes},
          {"full_bytes", storage.full_bytes},
          {"full_bytes_approx", storage_full_bytes_approx(x.dims())}};
}

struct StudyCase {
  std::string label;
  Matrix surface;
};

void write_singular_value_study(const std::vector<StudyCase>& cases, double tolerance,
                                const std::string& out_prefix) {
  std::ofstream csv(out_prefix + "singular_values.csv", std::ios::trunc);
  if (!csv) {
    throw std::runtime_error("cannot write " + out_prefix + "singular_values.csv");
  }
  csv << "case,k,sigma\n";
  json summary = json::array();
  for (const auto& c : cases) {
    auto [sigma, rank] = singular_values_and_rank(c.surface, tolerance);
    for (Index k = 0; k < sigma.size(); ++k) {
      csv << c.label << "," << (k + 1) << "," << format_double(sigma(k)) << "\n";
    }
    summary.push_back({{"case", c.label}, {"numerical_rank", rank},
                       {"tolerance", tolerance}});
  }
  std::ofstream js(out_prefix + "rank_summary.json", std::ios::trunc);
  js << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";
}

}  // namespace

OfflineOutcome run_offline(const RunConfig& cfg) {
  cfg.grid.validate();
  CompletionConfig completion = cfg.completion;
  if (!cfg.completion_seed_explicit) {
    completion.rng_seed = derive_seed(cfg.seed, "completion");
  }

  json report;
  report["seed"] = cfg.seed;
  report["grid"] = {{"orders", cfg.grid.orders},
                    {"domain", domain_to_json(cfg.grid.domain)}};

  // Assemble the entry oracle. The basket pricer freezes one GBM sample
  // matrix up front so every grid entry is a deterministic function of the
  // node coordinates.
  std::unique_ptr<EntryOracle> oracle;
  GbmSampleMatrix gbm;
  switch (cfg.oracle.kind) {
    case OracleSpec::Kind::basket: {
      const std::uint64_t mc_seed =
          cfg.oracle.mc_seed ? *cfg.oracle.mc_seed : derive_seed(cfg.seed, "gbm");
      gbm = simulate_gbm_matrix(cfg.oracle.model, cfg.oracle.number_sim, mc_seed);
      if (cfg.gbm_cache) write_gbm_matrix(*cfg.gbm_cache, gbm);
      const BasketModel& model = cfg.oracle.model;
      const ChebyshevGrid& grid = cfg.grid;
      oracle = std::make_unique<FunctionOracle>([&model, &gbm, &grid](const MultiIndex& idx) {
        return basket_price_cv(model, gbm, grid_point(grid, idx));
      });
      report["oracle"] = {{"type", "basket"},
                          {"number_sim", cfg.oracle.number_sim},
                          {"mc_seed", mc_seed},
                          {"model_hash", basket_model_hash(cfg.oracle.model)}};
      break;
    }
    case OracleSpec::Kind::exp_norm: {
      const ChebyshevGrid& grid = cfg.grid;
      oracle = std::make_unique<FunctionOracle>([&grid](const MultiIndex& idx) {
        return test_oracle_exp_norm(grid_point(grid, idx));
      });
      report["oracle"] = {{"type", "exp_norm"}};
      break;
    }
    case OracleSpec::Kind::external: {
      oracle = std::make_unique<ExternalCommandOracle>(cfg.oracle.command, cfg.grid);
      report["oracle"] = {{"type", "external"}, {"command", cfg.oracle.command}};
      break;
    }
  }

  OfflineOutcome outcome;
  const auto t_total = Clock::now();
  auto t_phase = Clock::now();
  outcome.completion = adaptive_sampling(*oracle, cfg.grid.shape(), completion);
  const double sampling_seconds = seconds_since(t_phase);

  t_phase = Clock::now();
  outcome.interpolant = coeffs_from_values(outcome.completion.tensor, cfg.grid);
  const double transform_seconds = seconds_since(t_phase);

  t_phase = Clock::now();
  write_interpolant(cfg.out_interpolant, outcome.interpolant);
  const double write_seconds = seconds_since(t_phase);

  report["completion"] = json::parse(completion_report_json(outcome.completion));
  report["completion"]["config"] = {
      {"delta", completion.delta},
      {"rho", completion.rho},
      {"tol", completion.tol},
      {"tol_prime", completion.tol_prime},
      {"r_max", completion.r_max},
      {"max_sampling_fraction", completion.max_sampling_fraction},
      {"initial_train_size", completion.initial_train_size},
      {"test_set_size", completion.test_set_size},
      {"gamma_size", completion.gamma_size},
      {"strategy", completion.strategy},
      {"max_inner_iterations", completion.max_inner_iterations},
      {"rng_seed", completion.rng_seed}};
  report["storage"] = storage_to_json(outcome.interpolant.coeffs);
  report["interpolant"] = cfg.out_interpolant;
  report["timings"] = {{"sampling_seconds", sampling_seconds},
                       {"transform_seconds", transform_seconds},
                       {"write_seconds", write_seconds},
                       {"total_seconds", seconds_since(t_total)}};

  outcome.report_json = report.dump(2);
  std::ofstream rep(cfg.resolved_report_path(), std::ios::trunc);
  if (!rep) {
    throw std::runtime_error("cannot write report " + cfg.resolved_report_path());
  }
  rep << outcome.report_json << "\n";

  outcome.exit_code =
      outcome.completion.stop_reason == StopReason::sampling_budget_exhausted ? 2 : 0;
  return outcome;
}

int cmd_offline(const RunConfig& cfg) {
  try {
    OfflineOutcome outcome = run_offline(cfg);
    std::cout << "stop_reason: " << to_string(outcome.completion.stop_reason) << "\n"
              << "final |Omega|: " << outcome.completion.final_training_set.size()
              << "\n"
              << "final error: "
              << format_double(outcome.completion.error_history.back().second) << "\n"
              << "interpolant: " << cfg.out_interpolant << "\n"
              << "report: " << cfg.resolved_report_path() << "\n";
    if (outcome.exit_code != 0) {
      json err;
      err["error"] = "sampling budget exhausted before any stopping criterion";
      err["final_training_size"] = outcome.completion.final_training_set.size();
      std::cerr << err.dump() << "\n";
    }
    return outcome.exit_code;
  } catch (const OracleError& e) {
    json err;
    err["error"] = e.what();
    err["index"] = e.index;
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}

int cmd_price(const std::string& interpolant_path, const std::string& batch_path,
              const std::string& out_path, bool allow_extrapolation,
              bool report_timing) {
  try {
    const Interpolant interp = read_interpolant(interpolant_path);
    const auto rows = read_batch_csv(batch_path);
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + out_path);

    std::vector<double> eval_seconds;
    eval_seconds.reserve(rows.size());
    Index rejected = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<Index>(rows[r].size()) != interp.grid.dim()) {
        throw std::domain_error("row " + std::to_string(r + 1) + " has " +
                                std::to_string(rows[r].size()) +
                                " columns, interpolant expects " +
                                std::to_string(interp.grid.dim()));
      }
      try {
        const auto t0 = Clock::now();
        const double price = evaluate(interp, rows[r], allow_extrapolation);
        eval_seconds.push_back(seconds_since(t0));
        out << format_double(price) << "\n";
      } catch (const ExtrapolationError& e) {
        ++rejected;
        out << "nan\n";
        std::cerr << "row " << (r + 1) << ": " << e.what() << "\n";
      }
    }
    if (report_timing && !eval_seconds.empty()) {
      std::sort(eval_seconds.begin(), eval_seconds.end());
      nlohmann::json timing;
      timing["prices"] = eval_seconds.size();
      timing["median_eval_seconds"] = eval_seconds[eval_seconds.size() / 2];
      std::cout << timing.dump() << "\n";
    }
    return rejected == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_rank_analysis(const std::string& config_path, const std::string& out_prefix) {
  try {
    std::ifstream is(config_path);
    if (!is) throw std::runtime_error("cannot open config " + config_path);
    const json j = json::parse(is);
    const auto study = j.at("study").get<std::string>();
    const double tolerance = j.value("tolerance", 1e-10);

    std::vector<StudyCase> cases;
    if (study == "single-path") {
      const double strike = j.value("strike", 1.0);
      const double rate = j.value("rate", 0.0);
      const double maturity = j.value("maturity", 0.25);
      const Index resolution = j.value("resolution", Index{50});
      std::array<std::array<double, 2>, 2> rect = {{{1.0, 1.5}, {1.0, 1.5}}};
      if (j.contains("domain")) {
        for (int i = 0; i < 2; ++i) {
          rect[static_cast<std::size_t>(i)] = {
              j.at("domain")[static_cast<std::size_t>(i)][0].get<double>(),
              j.at("domain")[static_cast<std::size_t>(i)][1].get<double>()};
        }
      }
      for (const auto& pair : j.at("alphas")) {
        const std::array<double, 2> alphas = {pair[0].get<double>(),
                                              pair[1].get<double>()};
        auto analysis =
            single_path_surface(alphas, strike, rate, maturity, rect, resolution,
                                tolerance);
        cases.push_back({"alpha_" + format_double(alphas[0]) + "_" +
                             format_double(alphas[1]),
                         std::move(analysis.surface)});
      }
    } else if (study == "basket-mc") {
      BasketModel model;
      {
        // reuse the offline model schema; d is fixed to 2 for this study
        json model_json = j.at("model");
        RunConfig tmp;  // only for the parser's validation scope
        std::ostringstream cfg_text;
        cfg_text << "{\"grid\":{\"orders\":[1,1],\"domain\":[[0,1],[0,1]]},"
                 << "\"oracle\":{\"type\":\"basket\",\"model\":" << model_json.dump()
                 << "},\"completion\":{\"tol\":1,\"tol_prime\":1,\"r_max\":1,"
                 << "\"max_sampling_fraction\":1,\"initial_train_size\":1,"
                 << "\"test_set_size\":1}}";
        tmp = parse_run_config(cfg_text.str());
        model = tmp.oracle.model;
      }
      if (model.d != 2) throw std::domain_error("the basket-mc study needs d = 2");
      const Index number_sim = j.value("number_sim", Index{100000});
      const std::uint64_t mc_seed = j.value("mc_seed", std::uint64_t{0});
      const GbmSampleMatrix gbm = simulate_gbm_matrix(model, number_sim, mc_seed);

      for (const auto& dom : j.at("domains")) {
        ChebyshevGrid grid;
        grid.domain.intervals = {{dom[0][0].get<double>(), dom[0][1].get<double>()},
                                 {dom[1][0].get<double>(), dom[1][1].get<double>()}};
        for (const auto& order : j.at("orders")) {
          const Index n = order.get<Index>();
          grid.orders = {n, n};
          grid.validate();
          Matrix surface(n + 1, n + 1);
          for (Index k1 = 0; k1 <= n; ++k1) {
            for (Index k2 = 0; k2 <= n; ++k2) {
              surface(k1, k2) =
                  basket_price_cv(model, gbm, grid_point(grid, {k1 + 1, k2 + 1}));
            }
          }
          std::ostringstream label;
          label << "n" << n << "_dom[" << format_double(grid.domain.lower(1)) << ","
                << format_double(grid.domain.upper(1)) << "]";
          cases.push_back({label.str(), std::move(surface)});
        }
      }
    } else {
      throw std::domain_error("study must be single-path or basket-mc");
    }

    write_singular_value_study(cases, tolerance, out_prefix);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_inspect(const std::string& path) {
  try {
    const TTTensor x = read_ttc1_binary(path);
    json out;
    out["dims"] = x.dims();
    out["ranks"] = x.ranks();
    out["storage"] = storage_to_json(x);
    std::cout << out.dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ttc::cli

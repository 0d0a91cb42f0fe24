#include "run_config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ttc::cli {

namespace {

using nlohmann::json;

ChebyshevGrid parse_grid(const json& j) {
  ChebyshevGrid grid;
  grid.orders = j.at("orders").get<std::vector<Index>>();
  for (const auto& iv : j.at("domain")) {
    if (!iv.is_array() || iv.size() != 2) {
      throw std::domain_error("each domain entry must be [lower, upper]");
    }
    grid.domain.intervals.push_back({iv[0].get<double>(), iv[1].get<double>()});
  }
  grid.validate();
  return grid;
}

BasketModel parse_model(const json& j, Index d) {
  BasketModel m;
  m.d = d;
  m.rate = j.at("rate").get<double>();
  if (j.at("sigmas").is_number()) {
    m.sigmas.assign(static_cast<std::size_t>(d), j.at("sigmas").get<double>());
  } else {
    m.sigmas = j.at("sigmas").get<std::vector<double>>();
  }
  if (j.contains("correlation") && j.contains("correlation_seed")) {
    throw std::domain_error("give either correlation or correlation_seed, not both");
  }
  if (j.contains("correlation_seed")) {
    m.correlation =
        make_random_correlation(d, j.at("correlation_seed").get<std::uint64_t>());
  } else if (j.contains("correlation")) {
    const auto& c = j.at("correlation");
    if (c.is_string() && c.get<std::string>() == "identity") {
      m.correlation = Matrix::Identity(d, d);
    } else {
      m.correlation.resize(d, d);
      if (static_cast<Index>(c.size()) != d) {
        throw std::domain_error("correlation must be a d x d matrix");
      }
      for (Index i = 0; i < d; ++i) {
        const auto& row = c[static_cast<std::size_t>(i)];
        if (static_cast<Index>(row.size()) != d) {
          throw std::domain_error("correlation must be a d x d matrix");
        }
        for (Index k = 0; k < d; ++k) {
          m.correlation(i, k) = row[static_cast<std::size_t>(k)].get<double>();
        }
      }
    }
  } else {
    m.correlation = Matrix::Identity(d, d);
  }
  if (j.contains("weights") && j.at("weights").is_array()) {
    m.weights = j.at("weights").get<std::vector<double>>();
  } else {
    m.weights.assign(static_cast<std::size_t>(d), 1.0 / static_cast<double>(d));
  }
  m.strike = j.at("strike").get<double>();
  m.maturity = j.at("maturity").get<double>();
  m.validate();
  return m;
}

OracleSpec parse_oracle(const json& j, Index d) {
  OracleSpec spec;
  const auto type = j.at("type").get<std::string>();
  if (type == "basket") {
    spec.kind = OracleSpec::Kind::basket;
    spec.model = parse_model(j.at("model"), d);
    spec.number_sim = j.value("number_sim", Index{1000});
    if (j.contains("mc_seed")) spec.mc_seed = j.at("mc_seed").get<std::uint64_t>();
  } else if (type == "exp_norm") {
    spec.kind = OracleSpec::Kind::exp_norm;
  } else if (type == "external") {
    spec.kind = OracleSpec::Kind::external;
    spec.command = j.at("command").get<std::string>();
    if (spec.command.empty()) throw std::domain_error("external command is empty");
  } else {
    throw std::domain_error("oracle type must be basket, exp_norm or external");
  }
  return spec;
}

CompletionConfig parse_completion(const json& j, bool& seed_explicit) {
  CompletionConfig cfg;
  cfg.delta = j.value("delta", cfg.delta);
  cfg.rho = j.value("rho", cfg.rho);
  cfg.tol = j.at("tol").get<double>();
  cfg.tol_prime = j.at("tol_prime").get<double>();
  cfg.r_max = j.at("r_max").get<Index>();
  cfg.max_sampling_fraction = j.at("max_sampling_fraction").get<double>();
  cfg.initial_train_size = j.at("initial_train_size").get<Index>();
  cfg.test_set_size = j.at("test_set_size").get<Index>();
  cfg.gamma_size = j.value("gamma_size", Index{0});
  cfg.strategy = j.value("strategy", 1);
  cfg.max_inner_iterations = j.value("max_inner_iterations", Index{250});
  seed_explicit = j.contains("rng_seed");
  if (seed_explicit) cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  const json j = json::parse(json_text);
  RunConfig cfg;
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.grid = parse_grid(j.at("grid"));
  cfg.oracle = parse_oracle(j.at("oracle"), cfg.grid.dim());
  cfg.completion = parse_completion(j.at("completion"), cfg.completion_seed_explicit);
  if (j.contains("output")) {
    const auto& out = j.at("output");
    cfg.out_interpolant = out.value("interpolant", cfg.out_interpolant);
    cfg.report_path = out.value("report", std::string{});
    if (out.contains("gbm_cache")) {
      cfg.gbm_cache = out.at("gbm_cache").get<std::string>();
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

}  // namespace ttc::cli

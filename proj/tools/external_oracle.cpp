#include "external_oracle.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace ttc::cli {

namespace {

std::filesystem::path fresh_temp_path(const char* suffix) {
  static std::atomic<unsigned> counter{0};
  std::ostringstream name;
  name << "ttc_oracle_" << ::getpid() << "_" << counter++ << suffix;
  return std::filesystem::temp_directory_path() / name.str();
}

}  // namespace

ExternalCommandOracle::ExternalCommandOracle(std::string command, ChebyshevGrid grid)
    : command_(std::move(command)), grid_(std::move(grid)) {
  grid_.validate();
}

double ExternalCommandOracle::at(const MultiIndex& idx) const {
  return batch({idx}).front();
}

std::vector<double> ExternalCommandOracle::batch(
    const std::vector<MultiIndex>& indices) const {
  if (indices.empty()) return {};
  const auto in_path = fresh_temp_path(".in");
  const auto out_path = fresh_temp_path(".out");

  {
    std::ofstream in(in_path);
    if (!in) throw OracleError("cannot stage input for " + command_, indices.front());
    char buf[64];
    for (const auto& idx : indices) {
      const auto p = grid_point(grid_, idx);
      for (std::size_t i = 0; i < p.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", p[i]);
        in << (i ? " " : "") << buf;
      }
      in << "\n";
    }
  }

  const std::string shell_cmd =
      command_ + " < " + in_path.string() + " > " + out_path.string();
  const int status = std::system(shell_cmd.c_str());

  std::vector<double> values;
  std::string error;
  if (status != 0) {
    error = "external evaluator '" + command_ + "' exited with status " +
            std::to_string(status);
  } else {
    std::ifstream out(out_path);
    double v;
    while (out >> v) values.push_back(v);
    if (values.size() != indices.size()) {
      error = "external evaluator '" + command_ + "' returned " +
              std::to_string(values.size()) + " values for " +
              std::to_string(indices.size()) + " points";
    }
  }
  std::filesystem::remove(in_path);
  std::filesystem::remove(out_path);

  if (!error.empty()) throw OracleError(error, indices.front());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw OracleError("external evaluator returned a non-finite value", indices[i]);
    }
  }
  return values;
}

}  // namespace ttc::cli

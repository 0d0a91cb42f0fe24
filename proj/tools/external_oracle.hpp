#pragma once

#include <string>

#include "ttc/chebyshev.hpp"
#include "ttc/completion.hpp"

namespace ttc::cli {

/// Black-box price-at-point evaluator: the command receives one parameter
/// point per line on standard input (space-separated coordinates) and must
/// print one price per line on standard output, in order.
class ExternalCommandOracle final : public EntryOracle {
 public:
  ExternalCommandOracle(std::string command, ChebyshevGrid grid);

  double at(const MultiIndex& idx) const override;
  std::vector<double> batch(const std::vector<MultiIndex>& indices) const override;

 private:
  std::string command_;
  ChebyshevGrid grid_;
};

}  // namespace ttc::cli

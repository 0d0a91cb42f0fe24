#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "ttc/tt_tensor.hpp"

namespace ttc {

/// Writes the TTC1 binary format: magic "TTC1", then order d, dims and rank
/// chain as 64-bit little-endian integers, then the cores in order as 64-bit
/// IEEE-754 little-endian values, first index fastest.
void write_ttc1_binary(const std::string& path, const TTTensor& x);

TTTensor read_ttc1_binary(const std::string& path);

/// Binary file plus a JSON sidecar at <path>.json mirroring dims and ranks.
void write_ttc1(const std::string& path, const TTTensor& x);

namespace io {

void write_u64(std::ostream& os, std::uint64_t v);
std::uint64_t read_u64(std::istream& is);
void write_f64(std::ostream& os, double v);
double read_f64(std::istream& is);
void write_f64_array(std::ostream& os, const double* data, std::size_t n);
void read_f64_array(std::istream& is, double* data, std::size_t n);

}  // namespace io

}  // namespace ttc

#include "ttc/tt_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace ttc {

namespace io {

namespace {

constexpr bool kLittle = std::endian::native == std::endian::little;

std::uint64_t byteswap64(std::uint64_t v) {
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) {
    r = (r << 8) | (v & 0xff);
    v >>= 8;
  }
  return r;
}

}  // namespace

void write_u64(std::ostream& os, std::uint64_t v) {
  if (!kLittle) v = byteswap64(v);
  os.write(reinterpret_cast<const char*>(&v), 8);
}

std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  if (!is) throw std::runtime_error("unexpected end of file");
  if (!kLittle) v = byteswap64(v);
  return v;
}

void write_f64(std::ostream& os, double v) {
  write_u64(os, std::bit_cast<std::uint64_t>(v));
}

double read_f64(std::istream& is) { return std::bit_cast<double>(read_u64(is)); }

void write_f64_array(std::ostream& os, const double* data, std::size_t n) {
  if (kLittle) {
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(8 * n));
  } else {
    for (std::size_t i = 0; i < n; ++i) write_f64(os, data[i]);
  }
}

void read_f64_array(std::istream& is, double* data, std::size_t n) {
  if (kLittle) {
    is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(8 * n));
    if (!is) throw std::runtime_error("unexpected end of file");
  } else {
    for (std::size_t i = 0; i < n; ++i) data[i] = read_f64(is);
  }
}

}  // namespace io

namespace {
constexpr char kMagic[4] = {'T', 'T', 'C', '1'};
}

void write_ttc1_binary(const std::string& path, const TTTensor& x) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kMagic, 4);
  io::write_u64(os, static_cast<std::uint64_t>(x.order()));
  for (Index n : x.dims()) io::write_u64(os, static_cast<std::uint64_t>(n));
  for (Index r : x.ranks()) io::write_u64(os, static_cast<std::uint64_t>(r));
  for (Index mu = 1; mu <= x.order(); ++mu) {
    const auto& c = x.core(mu);
    io::write_f64_array(os, c.data(), c.size());
  }
  if (!os) throw std::runtime_error("write failed for " + path);
}

TTTensor read_ttc1_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error(path + " is not a TTC1 file");
  }
  const auto d = static_cast<Index>(io::read_u64(is));
  if (d < 1 || d > 1000) throw std::runtime_error("implausible tensor order in " + path);
  std::vector<Index> dims(static_cast<std::size_t>(d));
  for (auto& n : dims) n = static_cast<Index>(io::read_u64(is));
  std::vector<Index> ranks(static_cast<std::size_t>(d + 1));
  for (auto& r : ranks) r = static_cast<Index>(io::read_u64(is));
  std::vector<std::vector<double>> cores(static_cast<std::size_t>(d));
  for (Index mu = 0; mu < d; ++mu) {
    const auto m = static_cast<std::size_t>(mu);
    const auto size = static_cast<std::size_t>(ranks[m] * dims[m] * ranks[m + 1]);
    cores[m].resize(size);
    io::read_f64_array(is, cores[m].data(), size);
  }
  return TTTensor::from_cores(std::move(dims), std::move(ranks), std::move(cores));
}

void write_ttc1(const std::string& path, const TTTensor& x) {
  write_ttc1_binary(path, x);
  nlohmann::json sidecar;
  sidecar["format"] = "TTC1";
  sidecar["order"] = x.order();
  sidecar["dims"] = x.dims();
  sidecar["ranks"] = x.ranks();
  std::ofstream os(path + ".json", std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + ".json for writing");
  os << sidecar.dump(2) << "\n";
}

}  // namespace ttc

#include "tbt/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tbt {

std::vector<double> modulate(const BitVec& c) {
  std::vector<double> x(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) x[i] = c[i] ? -1.0 : 1.0;
  return x;
}

double noise_variance(double snr_db) {
  return 0.5 * std::pow(10.0, -snr_db / 10.0);
}

std::vector<double> add_awgn(std::span<const double> x, double snr_db,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise_variance(snr_db)));
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + gauss(rng);
  return r;
}

SoftInput branch_costs(const TailBitingTrellis& t, std::span<const double> r,
                       double snr_db) {
  if (static_cast<int>(r.size()) != t.total_symbols())
    throw std::invalid_argument("received vector length mismatch");
  SoftInput s;
  s.r.assign(r.begin(), r.end());
  s.snr_db = snr_db;
  s.costs.resize(t.n);
  int pos = 0;
  for (int sec = 0; sec < t.n; ++sec) {
    const int w = t.section_widths[sec];
    auto& table = s.costs[sec];
    table.resize(std::size_t{1} << w);
    for (std::uint32_t label = 0; label < table.size(); ++label) {
      double c = 0.0;
      for (int b = 0; b < w; ++b) {
        const double sym = ((label >> (w - 1 - b)) & 1u) ? -1.0 : 1.0;
        const double d = r[pos + b] - sym;
        c += d * d;
      }
      table[label] = c;
    }
    pos += w;
  }
  return s;
}

}  // namespace tbt

// Antipodal signaling over AWGN and per-section branch costs.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tbt/gf2.hpp"
#include "tbt/trellis.hpp"

namespace tbt {

// Received vector plus squared-Euclidean branch costs per (section, label).
// Path cost under these tables equals d_E^2 between the received vector and
// the path's signal, so minimizing it is the ML rule.
struct SoftInput {
  std::vector<double> r;
  double snr_db = 0.0;  // metadata only
  std::vector<std::vector<double>> costs;  // [section][label value]

  double edge_cost(int section, std::uint32_t label) const {
    return costs[section][label];
  }
};

// 0 -> +1, 1 -> -1 (unit signal energy).
std::vector<double> modulate(const BitVec& c);

double noise_variance(double snr_db);  // N_0/2 for E_s = 1

// r = x + n with n i.i.d. Gaussian of variance N_0/2; deterministic per seed.
std::vector<double> add_awgn(std::span<const double> x, double snr_db,
                             std::uint64_t seed);

SoftInput branch_costs(const TailBitingTrellis& t, std::span<const double> r,
                       double snr_db = 0.0);

}  // namespace tbt

// Independent ground truth: codeword enumeration, one constrained Viterbi
// per subtrellis, exhaustive path-label enumeration, and the post-mortem for
// frames where an approx mode returned a worse codeword than exact mode.
// None of this reuses the decoder's search path.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tbt/channel.hpp"
#include "tbt/decoder.hpp"
#include "tbt/gf2.hpp"
#include "tbt/trellis.hpp"

namespace tbt {

struct MlResult {
  BitVec codeword;
  double cost = 0.0;
};

// Exact argmin of squared Euclidean distance over all 2^k codewords.
// Ties resolve to the lexicographically smallest codeword. k <= 24.
MlResult brute_force_ml(const std::vector<BitVec>& generator,
                        std::span<const double> r);
MlResult brute_force_ml(const SpannedMatrix& gen, std::span<const double> r);

struct SubtrellisViterbiResult {
  BitVec codeword;
  double cost = 0.0;
  int subtrellis = -1;
  std::int64_t updates = 0;             // nodes touched, all subtrellises
  std::vector<double> best_cost;        // cheapest cycle cost per subtrellis
};

SubtrellisViterbiResult per_subtrellis_viterbi(const UnrolledTrellis& u,
                                               const SoftInput& s);

// Cheapest completion cost to the final node of one subtrellis, per global
// node id; +inf outside that subtrellis.
std::vector<double> completion_costs(const UnrolledTrellis& u, const SoftInput& s,
                                     int subtrellis);

struct PathLabel {
  int start = 0;
  int final = 0;
  BitVec label;

  auto operator<=>(const PathLabel&) const = default;
};

// Every (s_i, f_j) path label. Guarded to 2^20 paths.
std::vector<PathLabel> enumerate_path_labels(const UnrolledTrellis& u);

struct FrameRef {
  const UnrolledTrellis& u;
  const SoftInput& s;
  const SpannedMatrix* gen = nullptr;  // enables the generator decomposition
  std::uint64_t seed = 0;
  Mode approx_mode = Mode::approx1;
};

struct Discrepancy {
  std::uint64_t frame_seed = 0;
  double exact_cost = 0.0;
  double approx_cost = 0.0;
  std::string exact_codeword;
  std::string approx_codeword;
  int ml_trellis = -1;
  int thief_trellis = -1;     // subtrellis whose closure blocked the ML path
  bool attributed = false;
  std::string survivor_label;  // phase-1 survivor at the thief's final node
  std::string survivor_vs_ml;  // that survivor shifted by the ML codeword
  bool decomposed = false;
  bool uses_linear_row = false;  // split-generator expansion touches a
                                 // linear-span row
};

// Requires a true miss (exact.cost < approx.cost - eps) on a frame whose
// phase-1 result is supplied; re-runs the approx search with a closure trace
// to find the blocking subtrellis.
Discrepancy diagnose_discrepancy(const FrameRef& frame, const DecodeResult& exact,
                                 const DecodeResult& approx, const Phase1Result& p1);

std::string to_jsonl(const Discrepancy& d);

}  // namespace tbt

// Two-phase decoding: a Viterbi sweep over the unrolled tail-biting trellis
// followed by best-first search over per-subtrellis node copies. The search
// estimate for node v in subtrellis i is metric(T_i) - survivor_cost(v),
// which is admissible and consistent, so the exact mode returns the ML
// codeword. The approx modes cap how often a shared node may be closed.
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "tbt/channel.hpp"
#include "tbt/trellis.hpp"

namespace tbt {

// Absolute tolerance for all metric/cost comparisons.
inline constexpr double kCostEps = 1e-9;

enum class Mode { exact, approx1, approx2, phase1_only };
const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

struct Phase1Result {
  std::vector<double> cost1;          // survivor cost per unrolled node
  std::vector<std::int32_t> parent;   // survivor predecessor (global id)
  std::vector<std::uint32_t> parent_label;
  std::vector<std::int32_t> origin;   // start node the survivor left from
  std::vector<double> trellis_metric; // cost1 at each final node
  std::vector<std::uint8_t> codeword_survivor;
  double low = std::numeric_limits<double>::infinity();
  int low_trellis = -1;
  std::int64_t node_updates = 0;      // one per unrolled interior/final node
};

enum class WinnerSource { phase1, phase2 };

struct DecodeStats {
  std::int64_t node_computations = 0;  // phase-1 updates + phase-2 expansions
  std::int64_t phase2_expansions = 0;
  std::int64_t heap_inserts = 0;
  std::int64_t max_heap_size = 0;
  std::int64_t phase2_slots = 0;  // distinct (subtrellis, node) costs touched
  int residual_trellises = 0;
  WinnerSource winner_source = WinnerSource::phase1;
  double max_closed_metric = -std::numeric_limits<double>::infinity();
};

struct DecodeResult {
  BitVec codeword;
  double cost = 0.0;
  Mode mode = Mode::exact;
  int subtrellis = -1;  // subtrellis of the returned codeword path
  DecodeStats stats;
};

// Unit of best-first scheduling; ordered by (metric, trellis, node).
struct HeapEntry {
  double metric = 0.0;
  std::int32_t trellis = 0;
  std::int64_t node = 0;
};

// Called once per phase-2 closure, in closure order.
using ClosureTrace =
    std::function<void(int trellis, std::size_t node, int layer, double metric)>;

Phase1Result phase1(const UnrolledTrellis& u, const SoftInput& s);

double completion_estimate(const UnrolledTrellis& u, const Phase1Result& p1,
                           int trellis, std::size_t node);

DecodeResult phase2(const UnrolledTrellis& u, const SoftInput& s,
                    const Phase1Result& p1, Mode mode,
                    const ClosureTrace& trace = {});

DecodeResult decode(const UnrolledTrellis& u, const SoftInput& s, Mode mode,
                    const ClosureTrace& trace = {});

// Convenience entry point; builds branch costs internally. Unrolling is the
// expensive part, so batch callers should hold an UnrolledTrellis instead.
DecodeResult decode(const TailBitingTrellis& t, std::span<const double> r, Mode mode);

}  // namespace tbt

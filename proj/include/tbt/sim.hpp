// Monte-Carlo link simulation: SNR sweeps, mode comparison, CSV output and
// the structural self-test suite.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tbt/codebook.hpp"
#include "tbt/decoder.hpp"
#include "tbt/oracle.hpp"

namespace tbt {

struct SimConfig {
  std::string code = "hamming74";
  std::vector<Mode> modes = {Mode::exact};
  std::vector<double> snr_db = {0.0};
  std::int64_t frames = 1000;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string misses_path;              // compare: JSONL of true misses
  std::int64_t max_frames = 10000000;   // guard
  bool all_zero = false;
  bool reproducible = false;            // suppress the timestamp header line
  int threads = 0;                      // 0 = hardware concurrency
};

struct SweepRow {
  double snr_db = 0.0;
  std::string mode;
  std::int64_t frames = 0;
  std::int64_t bit_errors = 0;
  double ber = 0.0;
  std::int64_t frame_errors = 0;
  double avg_node_computations = 0.0;
  std::int64_t max_node_computations = 0;
  std::int64_t max_heap_size = 0;
  double avg_phase2_expansions = 0.0;
  std::int64_t disagreements_vs_exact = -1;  // -1 when exact was not co-run
};

// Runs every (snr, mode) pair on identical frames (common noise draws per
// frame index). Deterministic for a fixed seed, regardless of thread count.
std::vector<SweepRow> run_sweep(const SimConfig& cfg);

void write_csv(const std::vector<SweepRow>& rows, const SimConfig& cfg,
               std::ostream& out);

struct CompareDelta {
  double snr_db = 0.0;
  std::string mode;
  double ber_mode = 0.0;
  double ber_exact = 0.0;
  double ber_delta = 0.0;
  double two_binomial_se = 0.0;
  std::int64_t disagreements = 0;
  std::int64_t true_misses = 0;
  std::int64_t attributed = 0;
  std::int64_t uses_linear_row = 0;
};

struct CompareReport {
  std::vector<SweepRow> rows;
  std::vector<CompareDelta> deltas;
  std::vector<Discrepancy> misses;
};

// Co-runs exact with the other configured modes frame by frame and
// post-mortems every true miss.
CompareReport compare_modes(const SimConfig& cfg);

// Structural property checks (construction invariants, coset structure,
// interchange round trip, a small decode-vs-enumeration batch). Prints one
// line per check; true iff all pass.
bool selftest(std::ostream& out);

// Derivation of per-frame generator seeds, shared with the python bindings.
std::uint64_t frame_noise_seed(std::uint64_t base_seed, std::int64_t frame);
std::uint64_t frame_data_seed(std::uint64_t base_seed, std::int64_t frame);

}  // namespace tbt

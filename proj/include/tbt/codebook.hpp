// Built-in code constructors and file ingestion.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tbt/gf2.hpp"
#include "tbt/trellis.hpp"

namespace tbt {

// Rate-1/nu feedforward convolutional code closed into a circle of Lc
// information positions. Polynomials are the usual octal masks, most
// significant digit on the current input.
struct ConvCodeSpec {
  std::vector<std::uint32_t> taps;  // binary masks, bit (memory - j) = tap on D^j
  int memory = 0;
  int circle = 0;  // Lc

  int nu() const { return static_cast<int>(taps.size()); }
};

ConvCodeSpec conv_spec_from_octal(const std::vector<std::string>& octal,
                                  int memory, int circle);

// Unit-information-word rows with their natural spans; rows whose response
// wraps past the circle end carry circular spans.
SpannedMatrix conv_spanned(const ConvCodeSpec& spec);
TailBitingTrellis conv_tbt(const ConvCodeSpec& spec);
BitVec conv_encode(const ConvCodeSpec& spec, const BitVec& info);

// The (7,4) Hamming code with spans [1,6],[3,7] linear and [6,2],[7,4]
// circular (1-indexed print form), stored 0-indexed.
std::pair<SpannedMatrix, TailBitingTrellis> hamming74();

TailBitingTrellis load_trellis(const std::string& path);
void save_trellis_file(const TailBitingTrellis& t, const std::string& path);

// Maps codewords to information bits through the pivot columns of a fixed
// generator basis, and back.
class InfoMap {
public:
  explicit InfoMap(std::vector<BitVec> generator_rows);
  int k() const { return static_cast<int>(rows_.size()); }
  BitVec encode(const BitVec& info) const;
  BitVec info_bits(const BitVec& codeword) const;

private:
  std::vector<BitVec> rows_;
  std::vector<int> pivots_;
  std::vector<std::vector<std::uint8_t>> inv_;  // k x k inverse of G[:, pivots]
};

struct Code {
  std::string name;
  TailBitingTrellis trellis;
  std::vector<BitVec> generator;          // k rows of length total_symbols
  std::optional<SpannedMatrix> spanned;   // present for product-built codes
  std::optional<ConvCodeSpec> conv;       // present for convolutional codes
  InfoMap info_map;

  int n_symbols() const { return trellis.total_symbols(); }
  int k() const { return static_cast<int>(generator.size()); }
  double rate() const { return static_cast<double>(k()) / n_symbols(); }
};

// Registry names: hamming74, conv133_171_L48, conv35_31_L20, file:<path>,
// matrix:<path>.
Code make_code(const std::string& name);

}  // namespace tbt

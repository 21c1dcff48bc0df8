// Binary vectors with declared spans, and the derived matrices used by the
// trellis construction (head/tail split, row spaces, zero runs).
#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tbt {

class BitVec {
public:
  BitVec() = default;
  explicit BitVec(std::size_t n) : bits_(n, 0) {}
  static BitVec from_string(const std::string& s);

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, int v) { bits_[i] = static_cast<std::uint8_t>(v & 1); }
  int weight() const;
  bool is_zero() const { return weight() == 0; }
  std::string to_string() const;

  BitVec& operator^=(const BitVec& o);
  friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
  bool operator==(const BitVec&) const = default;
  auto operator<=>(const BitVec&) const = default;

private:
  std::vector<std::uint8_t> bits_;
};

enum class SpanKind { linear, circular };

// Symbol positions are 0-indexed throughout; parsers convert 1-indexed input.
struct Span {
  int lo = 0;
  int hi = 0;
  SpanKind kind = SpanKind::linear;

  bool operator==(const Span&) const = default;
};

// Circular interval {lo, lo+1, ..., hi} mod n; wraps when lo > hi.
// Cannot represent the empty set; use std::optional<Interval> for that.
struct Interval {
  int lo = 0;
  int hi = 0;

  bool contains(int t, int n) const;
  int length(int n) const;
  bool operator==(const Interval&) const = default;
};

class SpannedMatrix {
public:
  // Validates span/row consistency and GF(2) row independence; throws
  // std::invalid_argument on violation.
  SpannedMatrix(std::vector<BitVec> rows, std::vector<Span> spans, int n);

  int n() const { return n_; }
  int k() const { return static_cast<int>(rows_.size()); }
  int linear_count() const { return linear_count_; }
  int circular_count() const { return k() - linear_count_; }

  const std::vector<BitVec>& rows() const { return rows_; }
  const std::vector<Span>& spans() const { return spans_; }
  const BitVec& row(int i) const { return rows_[i]; }
  const Span& span(int i) const { return spans_[i]; }

  std::vector<int> linear_row_indices() const;
  std::vector<int> circular_row_indices() const;

private:
  std::vector<BitVec> rows_;
  std::vector<Span> spans_;
  int n_ = 0;
  int linear_count_ = 0;
};

// Throws std::invalid_argument unless: endpoints in range and nonzero in the
// row, lo<=hi for linear / lo>hi for circular, all support inside the span.
void validate_span(const BitVec& row, const Span& s, int n);

// Time indices where the vector's trellis path sits on a doubled state:
// lo+1 .. hi for a linear span, wrapping through 0 for a circular one.
// Empty (nullopt) for a linear span with lo == hi.
std::optional<Interval> doubled_interval(const Span& s, int n);

// The complement of the doubled interval, [hi+1 mod n, lo]; defined for
// circular spans only.
Interval zero_run(const BitVec& row, const Span& span, int n);

// [G_l; G_c'] where each circular row [h,0,t] contributes the head row
// [h,0...0] and the tail row [0...0,t]. Linear rows pass through unchanged,
// reordered to the front.
SpannedMatrix split_heads_tails(const SpannedMatrix& g);

// All 2^rank GF(2) combinations, sorted, deduplicated. Guarded to <= 24 rows.
std::vector<BitVec> row_space(const std::vector<BitVec>& rows);

struct IntersectionResult {
  bool holds = false;
  bool no_circular_rows = false;  // vacuous verdict
  // Maximal circular arcs of the common zero-run times, in ascending order
  // of arc start. A single arc in every case arising from valid matrices
  // seen so far, but the general intersection of circular intervals can
  // split in two.
  std::vector<Interval> arcs;
};

IntersectionResult intersection_property(const SpannedMatrix& g);

int gf2_rank(std::vector<BitVec> rows);

// Coordinate solver for a fixed row list: decompose(v) returns the
// combination of rows summing to v, or nullopt if v is outside the span.
class RowBasis {
public:
  explicit RowBasis(std::vector<BitVec> rows);
  int rank() const { return rank_; }
  std::optional<std::vector<std::uint8_t>> decompose(const BitVec& v) const;

private:
  std::vector<BitVec> rows_;
  std::vector<BitVec> reduced_;       // row-echelon basis
  std::vector<std::vector<std::uint8_t>> combo_;  // reduced_[i] = combo_[i] . rows_
  std::vector<int> pivot_;
  int rank_ = 0;
};

// Text format: header "n=<int> k=<int>" (optional "index_base=1"), then one
// row per line as "bits span_lo span_hi kind".
SpannedMatrix load_spanned_matrix(std::istream& in);
SpannedMatrix load_spanned_matrix_file(const std::string& path);
void save_spanned_matrix(const SpannedMatrix& g, std::ostream& out);

}  // namespace tbt

#include "tbt/gf2.hpp"

#include <random>
#include <set>
#include <sstream>

#include "doctest.h"

using namespace tbt;

namespace {

// The (7,4) Hamming generator used throughout: two linear-span rows, two
// circular-span rows (spans 0-indexed).
SpannedMatrix hamming_matrix() {
  std::vector<BitVec> rows = {
      BitVec::from_string("1000110"),
      BitVec::from_string("0010111"),
      BitVec::from_string("0100011"),
      BitVec::from_string("0111001"),
  };
  std::vector<Span> spans = {
      {0, 5, SpanKind::linear},
      {2, 6, SpanKind::linear},
      {5, 1, SpanKind::circular},
      {6, 3, SpanKind::circular},
  };
  return SpannedMatrix(std::move(rows), std::move(spans), 7);
}

SpannedMatrix random_spanned_matrix(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nd(4, 10);
  for (;;) {
    int n = nd(rng);
    int k = std::uniform_int_distribution<int>(1, n - 1)(rng);
    std::vector<BitVec> rows;
    std::vector<Span> spans;
    for (int i = 0; i < k; ++i) {
      Span s;
      s.lo = std::uniform_int_distribution<int>(0, n - 1)(rng);
      s.hi = std::uniform_int_distribution<int>(0, n - 1)(rng);
      if (s.lo == s.hi) s.kind = SpanKind::linear;
      else s.kind = s.lo < s.hi ? SpanKind::linear : SpanKind::circular;
      BitVec row(n);
      row.set(s.lo, 1);
      row.set(s.hi, 1);
      Interval cover{s.lo, s.hi};
      for (int p = 0; p < n; ++p)
        if (p != s.lo && p != s.hi && cover.contains(p, n))
          row.set(p, std::uniform_int_distribution<int>(0, 1)(rng));
      rows.push_back(row);
      spans.push_back(s);
    }
    if (gf2_rank(rows) != k) continue;
    return SpannedMatrix(std::move(rows), std::move(spans), n);
  }
}

}  // namespace

TEST_CASE("bitvec basics") {
  BitVec a = BitVec::from_string("0100011");
  CHECK(a.weight() == 3);
  CHECK(a.to_string() == "0100011");
  BitVec b = BitVec::from_string("1000110");
  CHECK((a ^ b).to_string() == "1100101");
  CHECK_THROWS(BitVec::from_string("01x"));
}

TEST_CASE("zero run of circular spans") {
  BitVec r1 = BitVec::from_string("0100011");
  CHECK(zero_run(r1, {5, 1, SpanKind::circular}, 7) == Interval{2, 5});

  BitVec r2 = BitVec::from_string("0111001");
  CHECK(zero_run(r2, {6, 3, SpanKind::circular}, 7) == Interval{4, 6});

  BitVec lin = BitVec::from_string("1000110");
  CHECK_THROWS_WITH(zero_run(lin, {0, 5, SpanKind::linear}, 7),
                    "zero run defined only for circular spans");
}

TEST_CASE("zero run and doubled span interval tile the time axis") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_spanned_matrix(rng);
    for (int i : g.circular_row_indices()) {
      Interval zr = zero_run(g.row(i), g.span(i), g.n());
      auto dbl = doubled_interval(g.span(i), g.n());
      REQUIRE(dbl.has_value());
      for (int t = 0; t < g.n(); ++t)
        CHECK(zr.contains(t, g.n()) != dbl->contains(t, g.n()));
    }
  }
}

TEST_CASE("head/tail split of the hamming generator") {
  auto gs = split_heads_tails(hamming_matrix());
  REQUIRE(gs.k() == 6);
  CHECK(gs.row(0).to_string() == "1000110");
  CHECK(gs.row(1).to_string() == "0010111");
  CHECK(gs.row(2).to_string() == "0100000");
  CHECK(gs.row(3).to_string() == "0000011");
  CHECK(gs.row(4).to_string() == "0111000");
  CHECK(gs.row(5).to_string() == "0000001");
  for (int i = 0; i < 6; ++i) CHECK(gs.span(i).kind == SpanKind::linear);
}

TEST_CASE("head/tail split leaves purely linear matrices unchanged") {
  std::vector<BitVec> rows = {BitVec::from_string("1100"), BitVec::from_string("0011")};
  std::vector<Span> spans = {{0, 1, SpanKind::linear}, {2, 3, SpanKind::linear}};
  SpannedMatrix g(rows, spans, 4);
  auto gs = split_heads_tails(g);
  CHECK(gs.rows() == rows);
  CHECK(gs.spans() == spans);
}

TEST_CASE("head/tail split row count is l + 2c") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 80 && checked < 30; ++trial) {
    auto g = random_spanned_matrix(rng);
    int expected = 0;
    for (int i = 0; i < g.k(); ++i)
      expected += g.span(i).kind == SpanKind::circular ? 2 : 1;
    try {
      auto gs = split_heads_tails(g);
      CHECK(gs.k() == expected);
      ++checked;
    } catch (const std::invalid_argument&) {
      // Random heads/tails may collide into a dependent set; such matrices
      // do not correspond to a valid trellis and are skipped.
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("row space of the split hamming generator") {
  auto gs = split_heads_tails(hamming_matrix());
  auto space = row_space(gs.rows());
  CHECK(space.size() == 64);

  BitVec semi = gs.row(0) ^ gs.row(2);
  CHECK(semi.to_string() == "1100110");
  CHECK(std::binary_search(space.begin(), space.end(), semi));

  // Closure under addition.
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, space.size() - 1);
  for (int i = 0; i < 200; ++i) {
    BitVec sum = space[pick(rng)] ^ space[pick(rng)];
    CHECK(std::binary_search(space.begin(), space.end(), sum));
  }
}

TEST_CASE("row space corner cases") {
  CHECK(row_space({}).size() == 1);
  CHECK(row_space({}).front() == BitVec(0));
  std::vector<BitVec> many(25, BitVec::from_string("1"));
  CHECK_THROWS_WITH(row_space(many), "enumeration limit");
}

TEST_CASE("intersection property") {
  auto res = intersection_property(hamming_matrix());
  CHECK(res.holds);
  CHECK(!res.no_circular_rows);
  REQUIRE(res.arcs.size() == 1);
  CHECK(res.arcs[0] == Interval{4, 5});

  SUBCASE("single circular row: witness is its zero run") {
    std::vector<BitVec> rows = {BitVec::from_string("1000100")};
    std::vector<Span> spans = {{4, 0, SpanKind::circular}};
    SpannedMatrix g(rows, spans, 7);
    auto one = intersection_property(g);
    CHECK(one.holds);
    REQUIRE(one.arcs.size() == 1);
    CHECK(one.arcs[0] == zero_run(rows[0], spans[0], 7));
  }

  SUBCASE("disjoint zero runs fail") {
    std::vector<BitVec> rows = {BitVec::from_string("11001000"),
                                BitVec::from_string("00000101")};
    std::vector<Span> spans = {{4, 1, SpanKind::circular}, {7, 5, SpanKind::circular}};
    SpannedMatrix g(rows, spans, 8);
    CHECK(zero_run(rows[0], spans[0], 8) == Interval{2, 4});
    CHECK(zero_run(rows[1], spans[1], 8) == Interval{6, 7});
    auto res2 = intersection_property(g);
    CHECK(!res2.holds);
    CHECK(res2.arcs.empty());
  }

  SUBCASE("no circular rows: vacuous verdict") {
    std::vector<BitVec> rows = {BitVec::from_string("1100")};
    std::vector<Span> spans = {{0, 1, SpanKind::linear}};
    SpannedMatrix g(rows, spans, 4);
    auto vac = intersection_property(g);
    CHECK(vac.holds);
    CHECK(vac.no_circular_rows);
    REQUIRE(vac.arcs.size() == 1);
    CHECK(vac.arcs[0].length(4) == 4);
  }
}

TEST_CASE("spanned matrix validation") {
  std::vector<BitVec> rows = {BitVec::from_string("1100"), BitVec::from_string("1100")};
  std::vector<Span> spans = {{0, 1, SpanKind::linear}, {0, 1, SpanKind::linear}};
  CHECK_THROWS_WITH(SpannedMatrix(rows, spans, 4),
                    "generator rows are linearly dependent");

  CHECK_THROWS(SpannedMatrix({BitVec::from_string("0110")},
                             {{0, 2, SpanKind::linear}}, 4));  // zero endpoint
  CHECK_THROWS(SpannedMatrix({BitVec::from_string("1101")},
                             {{0, 1, SpanKind::linear}}, 4));  // support outside
  CHECK_THROWS(SpannedMatrix({BitVec::from_string("1100")},
                             {{1, 0, SpanKind::linear}}, 4));  // lo > hi linear
}

TEST_CASE("row basis decomposition") {
  auto gs = split_heads_tails(hamming_matrix());
  RowBasis basis(gs.rows());
  CHECK(basis.rank() == 6);

  BitVec v = gs.row(1) ^ gs.row(4) ^ gs.row(5);
  auto coords = basis.decompose(v);
  REQUIRE(coords.has_value());
  std::vector<std::uint8_t> expect = {0, 1, 0, 0, 1, 1};
  CHECK(*coords == expect);

  BitVec outside = BitVec::from_string("1111111");
  BitVec probe = outside;
  bool inside = static_cast<bool>(basis.decompose(probe));
  auto space = row_space(gs.rows());
  CHECK(inside == std::binary_search(space.begin(), space.end(), probe));
}

TEST_CASE("spanned matrix text round trip and 1-indexed ingestion") {
  std::string one_indexed =
      "n=7 k=4 index_base=1\n"
      "1000110 1 6 linear\n"
      "0010111 3 7 linear\n"
      "0100011 6 2 circular\n"
      "0111001 7 4 circular\n";
  std::istringstream in(one_indexed);
  auto g = load_spanned_matrix(in);
  auto ref = hamming_matrix();
  CHECK(g.rows() == ref.rows());
  CHECK(g.spans() == ref.spans());

  std::ostringstream out;
  save_spanned_matrix(g, out);
  std::istringstream back(out.str());
  auto g2 = load_spanned_matrix(back);
  CHECK(g2.rows() == g.rows());
  CHECK(g2.spans() == g.spans());

  std::istringstream bad("n=4\n1100 0 1 linear\n");
  CHECK_THROWS(load_spanned_matrix(bad));
}

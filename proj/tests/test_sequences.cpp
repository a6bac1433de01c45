#include "esn/sequences.hpp"

#include <doctest.h>

#include <sstream>

using esn::InputSequence;

namespace {

// The grammar rule, checked independently: blocks are ABAD or ACAE, so
// offset 3 holds D iff offset 1 holds B, and E iff C.
bool block_is_grammatical(const InputSequence& seq, Eigen::Index block) {
  const auto at = [&](Eigen::Index off) {
    return seq.labels[static_cast<std::size_t>(4 * block + off)];
  };
  if (at(0) != 'A' || at(2) != 'A') return false;
  return (at(1) == 'B' && at(3) == 'D') || (at(1) == 'C' && at(3) == 'E');
}

}  // namespace

TEST_CASE("alternating sequence values and invariant") {
  const auto four = esn::alternating_sequence(4);
  CHECK(four.dim() == 1);
  CHECK(four.inputs(0, 0) == 1.0);
  CHECK(four.inputs(0, 1) == -1.0);
  CHECK(four.inputs(0, 2) == 1.0);
  CHECK(four.inputs(0, 3) == -1.0);
  CHECK_FALSE(four.has_labels());

  const auto one = esn::alternating_sequence(1);
  CHECK(one.inputs(0, 0) == 1.0);

  const auto long_seq = esn::alternating_sequence(101);
  for (Eigen::Index t = 0; t + 1 < long_seq.length(); ++t) {
    CHECK(long_seq.inputs(0, t) + long_seq.inputs(0, t + 1) == 0.0);
  }
  CHECK_THROWS_AS(esn::alternating_sequence(0), std::invalid_argument);
}

TEST_CASE("symbol encodings match the fixed table and round-trip") {
  CHECK(esn::encode_symbol('A') == Eigen::Vector2d(0, 0));
  CHECK(esn::encode_symbol('B') == Eigen::Vector2d(-1, 0));
  CHECK(esn::encode_symbol('C') == Eigen::Vector2d(1, 0));
  CHECK(esn::encode_symbol('D') == Eigen::Vector2d(0, -1));
  CHECK(esn::encode_symbol('E') == Eigen::Vector2d(0, 1));
  for (char s : {'A', 'B', 'C', 'D', 'E'}) {
    CHECK(esn::decode_symbol(esn::encode_symbol(s)) == s);
    CHECK(esn::GrammarToken::from_symbol(s).encoding() == esn::encode_symbol(s));
  }
  CHECK_THROWS_AS(esn::encode_symbol('F'), std::invalid_argument);
  CHECK_THROWS_AS(esn::decode_symbol(Eigen::Vector2d(2, 0)),
                  std::invalid_argument);
}

TEST_CASE("grammar sequences are blocks of ABAD or ACAE") {
  const auto seq = esn::grammar_sequence(1000, 7);
  CHECK(seq.length() == 4000);
  CHECK(seq.dim() == 2);
  REQUIRE(seq.has_labels());
  for (Eigen::Index b = 0; b < 1000; ++b) {
    CHECK(block_is_grammatical(seq, b));
  }
  // Encodings always match labels.
  for (Eigen::Index t = 0; t < seq.length(); ++t) {
    CHECK(seq.inputs.col(t) ==
          esn::encode_symbol(seq.labels[static_cast<std::size_t>(t)]));
  }
}

TEST_CASE("grammar sequences are deterministic per seed") {
  const auto a = esn::grammar_sequence(50, 123);
  const auto b = esn::grammar_sequence(50, 123);
  CHECK(a.labels == b.labels);
  CHECK(a.inputs == b.inputs);
  const auto c = esn::grammar_sequence(50, 124);
  CHECK(a.labels != c.labels);
}

TEST_CASE("grammar block choice is statistically balanced") {
  const auto seq = esn::grammar_sequence(10000, 2024);
  int abad = 0;
  for (Eigen::Index b = 0; b < 10000; ++b) {
    if (seq.labels[static_cast<std::size_t>(4 * b + 1)] == 'B') ++abad;
  }
  const double fraction = abad / 10000.0;
  CHECK(fraction > 0.48);
  CHECK(fraction < 0.52);
}

TEST_CASE("inject_violation flips exactly the block terminal") {
  const auto seq = esn::grammar_sequence(10, 5);
  const auto violated = esn::inject_violation(seq, 3);
  int diffs = 0;
  for (Eigen::Index t = 0; t < seq.length(); ++t) {
    if (seq.inputs.col(t) != violated.inputs.col(t)) ++diffs;
  }
  CHECK(diffs == 1);
  CHECK(seq.inputs.col(15) != violated.inputs.col(15));
  const char before = seq.labels[15];
  const char after = violated.labels[15];
  CHECK(((before == 'D' && after == 'E') || (before == 'E' && after == 'D')));
  CHECK_FALSE(block_is_grammatical(violated, 3));

  // Involution: re-injecting restores the original bitwise.
  const auto restored = esn::inject_violation(violated, 3);
  CHECK(restored.inputs == seq.inputs);
  CHECK(restored.labels == seq.labels);

  CHECK_THROWS_AS(esn::inject_violation(seq, 10), std::invalid_argument);
  CHECK_THROWS_AS(esn::inject_violation(seq, -1), std::invalid_argument);
}

TEST_CASE("swap_block exchanges ABAD and ACAE in place") {
  const auto seq = esn::grammar_sequence(10, 6);
  const auto swapped = esn::swap_block(seq, 2);
  std::vector<Eigen::Index> diff_positions;
  for (Eigen::Index t = 0; t < seq.length(); ++t) {
    if (seq.inputs.col(t) != swapped.inputs.col(t)) diff_positions.push_back(t);
  }
  REQUIRE(diff_positions.size() == 2);
  CHECK(diff_positions[0] == 4 * 2 + 1);
  CHECK(diff_positions[1] == 4 * 2 + 3);
  // Still grammatical everywhere.
  for (Eigen::Index b = 0; b < 10; ++b) {
    CHECK(block_is_grammatical(swapped, b));
  }
  // ABAD <-> ACAE.
  const std::string before = seq.labels.substr(8, 4);
  const std::string after = swapped.labels.substr(8, 4);
  if (before == "ABAD") CHECK(after == "ACAE");
  if (before == "ACAE") CHECK(after == "ABAD");
}

TEST_CASE("permanent_violation breaks the rule from a block onward") {
  const auto seq = esn::grammar_sequence(12, 9);
  const auto violated = esn::permanent_violation(seq, 5, 77);
  for (Eigen::Index b = 0; b < 5; ++b) {
    CHECK(block_is_grammatical(violated, b));
    CHECK(violated.labels.substr(static_cast<std::size_t>(4 * b), 4) ==
          seq.labels.substr(static_cast<std::size_t>(4 * b), 4));
  }
  for (Eigen::Index b = 5; b < 12; ++b) {
    CHECK_FALSE(block_is_grammatical(violated, b));
  }

  const auto all = esn::permanent_violation(seq, 0, 77);
  for (Eigen::Index b = 0; b < 12; ++b) {
    CHECK_FALSE(block_is_grammatical(all, b));
  }
  CHECK_THROWS_AS(esn::permanent_violation(seq, 12, 77), std::invalid_argument);
}

TEST_CASE("sequence CSV round-trips labelled and unlabelled data") {
  const auto grammar = esn::grammar_sequence(6, 11);
  std::stringstream ss;
  esn::write_sequence_csv(ss, grammar);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "t,label,u_0,u_1");
  ss.seekg(0);
  const auto back = esn::read_sequence_csv(ss, "test");
  CHECK(back.inputs == grammar.inputs);
  CHECK(back.labels == grammar.labels);

  const auto plain = esn::alternating_sequence(7);
  std::stringstream ss2;
  esn::write_sequence_csv(ss2, plain);
  const auto back2 = esn::read_sequence_csv(ss2, "test");
  CHECK(back2.inputs == plain.inputs);
  CHECK_FALSE(back2.has_labels());
}

TEST_CASE("sequence CSV reader rejects malformed input") {
  {
    std::stringstream ss("wrong,header\n");
    CHECK_THROWS_AS(esn::read_sequence_csv(ss, "test"), esn::ConfigError);
  }
  {
    std::stringstream ss("t,label,u_0\n0,A,0.5,9\n");
    CHECK_THROWS_AS(esn::read_sequence_csv(ss, "test"), esn::ConfigError);
  }
  {
    std::stringstream ss("t,label,u_0\n0,A,zz\n");
    CHECK_THROWS_AS(esn::read_sequence_csv(ss, "test"), esn::ConfigError);
  }
  {
    std::stringstream ss("t,label,u_0\n");
    CHECK_THROWS_AS(esn::read_sequence_csv(ss, "test"), esn::ConfigError);
  }
}

TEST_CASE("slice keeps labels aligned") {
  const auto seq = esn::grammar_sequence(4, 3);
  const auto mid = esn::slice(seq, 4, 8);
  CHECK(mid.length() == 8);
  CHECK(mid.labels == seq.labels.substr(4, 8));
  CHECK(mid.inputs == seq.inputs.middleCols(4, 8));
  CHECK_THROWS_AS(esn::slice(seq, 10, 10), std::invalid_argument);
}

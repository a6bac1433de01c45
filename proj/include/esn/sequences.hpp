#pragma once

#include "esn/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace esn {

/// One symbol of the two-block grammar with its fixed 2-d input encoding:
/// A -> (0,0), B -> (-1,0), C -> (1,0), D -> (0,-1), E -> (0,1).
struct GrammarToken {
  char symbol;  // one of 'A'..'E'

  Eigen::Vector2d encoding() const;
  static GrammarToken from_symbol(char symbol);
};

Eigen::Vector2d encode_symbol(char symbol);
char decode_symbol(const Eigen::Vector2d& v);

/// Ordered list of input vectors (one column per iteration), optionally
/// labelled with grammar symbols.
struct InputSequence {
  Matrix inputs;       // M x T
  std::string labels;  // empty, or one symbol per column

  Eigen::Index length() const { return inputs.cols(); }
  Eigen::Index dim() const { return inputs.rows(); }
  bool has_labels() const { return !labels.empty(); }
};

/// Columns [start, start + count) with matching labels.
InputSequence slice(const InputSequence& seq, Eigen::Index start,
                    Eigen::Index count);

/// 1-dimensional stimulus +1, -1, +1, -1, ...
InputSequence alternating_sequence(Eigen::Index length);

/// Concatenation of four-token blocks, each ABAD or ACAE with probability
/// 1/2, i.i.d. per block. Labels are populated; deterministic per seed.
/// The implied rule: D at offset 3 iff B at offset 1 of the same block
/// (and E iff C).
InputSequence grammar_sequence(Eigen::Index blocks, std::uint64_t seed);

/// Copy with the terminal token of the chosen block swapped D <-> E, which
/// breaks the grammar at exactly one iteration. An involution.
InputSequence inject_violation(const InputSequence& seq,
                               Eigen::Index block_index);

/// Copy with the chosen block replaced ABAD <-> ACAE. Both versions are
/// grammatical; exactly the block's offsets 1 and 3 change.
InputSequence swap_block(const InputSequence& seq, Eigen::Index block_index);

/// Copy where every block from from_index onward ends in the wrong terminal
/// (D where E belongs and vice versa). The flip is fully determined by the
/// source sequence; the seed is accepted for interface stability but unused.
InputSequence permanent_violation(const InputSequence& seq,
                                  Eigen::Index from_index, std::uint64_t seed);

/// CSV round-trip, header "t,label,u_0[,u_1...]". The label column is empty
/// for unlabelled sequences.
void write_sequence_csv(std::ostream& out, const InputSequence& seq);
InputSequence read_sequence_csv(std::istream& in, const std::string& context);

}  // namespace esn

#include "esn/sequences.hpp"

#include "esn/matrix_io.hpp"
#include "esn/rng.hpp"

#include <ostream>
#include <sstream>
#include <vector>

namespace esn {

Eigen::Vector2d encode_symbol(char symbol) {
  switch (symbol) {
    case 'A':
      return {0.0, 0.0};
    case 'B':
      return {-1.0, 0.0};
    case 'C':
      return {1.0, 0.0};
    case 'D':
      return {0.0, -1.0};
    case 'E':
      return {0.0, 1.0};
    default:
      throw std::invalid_argument(std::string("encode_symbol: unknown symbol '") +
                                  symbol + "' (expected A-E)");
  }
}

char decode_symbol(const Eigen::Vector2d& v) {
  for (char s : {'A', 'B', 'C', 'D', 'E'}) {
    if (v == encode_symbol(s)) return s;
  }
  throw std::invalid_argument("decode_symbol: vector (" + format_double(v(0)) +
                              ", " + format_double(v(1)) +
                              ") is not a grammar encoding");
}

Eigen::Vector2d GrammarToken::encoding() const { return encode_symbol(symbol); }

GrammarToken GrammarToken::from_symbol(char symbol) {
  encode_symbol(symbol);  // validates
  return GrammarToken{symbol};
}

InputSequence slice(const InputSequence& seq, Eigen::Index start,
                    Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > seq.length()) {
    throw std::invalid_argument(
        "slice: range [" + std::to_string(start) + ", " +
        std::to_string(start + count) + ") outside sequence of length " +
        std::to_string(seq.length()));
  }
  InputSequence out;
  out.inputs = seq.inputs.middleCols(start, count);
  if (seq.has_labels()) {
    out.labels = seq.labels.substr(static_cast<std::size_t>(start),
                                   static_cast<std::size_t>(count));
  }
  return out;
}

InputSequence alternating_sequence(Eigen::Index length) {
  if (length < 1) {
    throw std::invalid_argument("alternating_sequence: length must be >= 1");
  }
  InputSequence seq;
  seq.inputs.resize(1, length);
  for (Eigen::Index t = 0; t < length; ++t) {
    seq.inputs(0, t) = (t % 2 == 0) ? 1.0 : -1.0;
  }
  return seq;
}

namespace {

void encode_labels(InputSequence& seq) {
  seq.inputs.resize(2, static_cast<Eigen::Index>(seq.labels.size()));
  for (Eigen::Index t = 0; t < seq.length(); ++t) {
    seq.inputs.col(t) = encode_symbol(seq.labels[static_cast<std::size_t>(t)]);
  }
}

// Block grid sanity for the perturbation editors.
Eigen::Index checked_block_start(const InputSequence& seq,
                                 Eigen::Index block_index,
                                 const std::string& who) {
  if (!seq.has_labels()) {
    throw std::invalid_argument(who + ": sequence carries no grammar labels");
  }
  const Eigen::Index blocks = seq.length() / 4;
  if (block_index < 0 || block_index >= blocks) {
    throw std::invalid_argument(who + ": block " + std::to_string(block_index) +
                                " out of range (sequence has " +
                                std::to_string(blocks) + " complete blocks)");
  }
  return 4 * block_index;
}

char flipped_terminal(char symbol, const std::string& who) {
  if (symbol == 'D') return 'E';
  if (symbol == 'E') return 'D';
  throw std::invalid_argument(who + std::string(": expected terminal D or E, found '") +
                              symbol + "'");
}

void set_symbol(InputSequence& seq, Eigen::Index pos, char symbol) {
  seq.labels[static_cast<std::size_t>(pos)] = symbol;
  seq.inputs.col(pos) = encode_symbol(symbol);
}

}  // namespace

InputSequence grammar_sequence(Eigen::Index blocks, std::uint64_t seed) {
  if (blocks < 1) {
    throw std::invalid_argument("grammar_sequence: blocks must be >= 1");
  }
  Rng rng(seed);
  InputSequence seq;
  seq.labels.reserve(static_cast<std::size_t>(4 * blocks));
  for (Eigen::Index b = 0; b < blocks; ++b) {
    seq.labels += (rng.uniform01() < 0.5) ? "ABAD" : "ACAE";
  }
  encode_labels(seq);
  return seq;
}

InputSequence inject_violation(const InputSequence& seq,
                               Eigen::Index block_index) {
  const Eigen::Index start =
      checked_block_start(seq, block_index, "inject_violation");
  InputSequence out = seq;
  const Eigen::Index pos = start + 3;
  set_symbol(out, pos,
             flipped_terminal(out.labels[static_cast<std::size_t>(pos)],
                              "inject_violation"));
  return out;
}

InputSequence swap_block(const InputSequence& seq, Eigen::Index block_index) {
  const Eigen::Index start = checked_block_start(seq, block_index, "swap_block");
  InputSequence out = seq;
  const char second = out.labels[static_cast<std::size_t>(start + 1)];
  char swapped;
  if (second == 'B') {
    swapped = 'C';
  } else if (second == 'C') {
    swapped = 'B';
  } else {
    throw std::invalid_argument(
        std::string("swap_block: expected B or C at block offset 1, found '") +
        second + "'");
  }
  set_symbol(out, start + 1, swapped);
  set_symbol(out, start + 3,
             flipped_terminal(out.labels[static_cast<std::size_t>(start + 3)],
                              "swap_block"));
  return out;
}

InputSequence permanent_violation(const InputSequence& seq,
                                  Eigen::Index from_index, std::uint64_t seed) {
  (void)seed;  // the D<->E flip leaves nothing to randomize
  checked_block_start(seq, from_index, "permanent_violation");
  InputSequence out = seq;
  const Eigen::Index blocks = seq.length() / 4;
  for (Eigen::Index b = from_index; b < blocks; ++b) {
    const Eigen::Index pos = 4 * b + 3;
    set_symbol(out, pos,
               flipped_terminal(out.labels[static_cast<std::size_t>(pos)],
                                "permanent_violation"));
  }
  return out;
}

void write_sequence_csv(std::ostream& out, const InputSequence& seq) {
  out << "t,label";
  for (Eigen::Index i = 0; i < seq.dim(); ++i) out << ",u_" << i;
  out << '\n';
  for (Eigen::Index t = 0; t < seq.length(); ++t) {
    out << t << ',';
    if (seq.has_labels()) out << seq.labels[static_cast<std::size_t>(t)];
    for (Eigen::Index i = 0; i < seq.dim(); ++i) {
      out << ',' << format_double(seq.inputs(i, t));
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

InputSequence read_sequence_csv(std::istream& in, const std::string& context) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError(context + ": empty sequence file");
  }
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "t" || header[1] != "label") {
    throw ConfigError(context + ": expected header 't,label,u_0[,u_1...]'");
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(header.size()) - 2;
  std::vector<Vector> cols;
  std::string labels;
  bool any_label = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != dim + 2) {
      throw ConfigError(context + ": line " + std::to_string(line_no) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(dim + 2));
    }
    if (fields[1].size() > 1) {
      throw ConfigError(context + ": line " + std::to_string(line_no) +
                        ": label must be a single symbol");
    }
    if (!fields[1].empty()) {
      any_label = true;
      labels += fields[1][0];
    } else {
      labels += ' ';
    }
    Vector u(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      u(i) = parse_double(fields[static_cast<std::size_t>(i) + 2],
                          context + ": line " + std::to_string(line_no));
    }
    cols.push_back(std::move(u));
  }
  if (cols.empty()) {
    throw ConfigError(context + ": sequence file has no data rows");
  }
  if (any_label && labels.find(' ') != std::string::npos) {
    throw ConfigError(context + ": mixed labelled and unlabelled rows");
  }
  InputSequence seq;
  seq.inputs.resize(dim, static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index t = 0; t < seq.length(); ++t) {
    seq.inputs.col(t) = cols[static_cast<std::size_t>(t)];
  }
  if (any_label) seq.labels = labels;
  return seq;
}

}  // namespace esn

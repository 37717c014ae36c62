// Copyright 2026 The tokbudget Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tokbudget/seqmask.h"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "tokbudget/errors.h"
#include "tokbudget/text.h"

namespace tokbudget {

Vocab::Vocab(int n_visual, CandidateLevels levels)
    : n_visual_(n_visual), levels_(std::move(levels)) {
  if (n_visual < 1) throw ValidationError("vocab needs at least one visual id");
}

TokenId Vocab::special(int level_index) const {
  if (level_index < 0 || level_index >= levels_.size()) {
    throw RangeError("level index " + std::to_string(level_index) + " out of range");
  }
  return static_cast<TokenId>(n_visual_ + level_index);
}

int Vocab::level_index_of(TokenId id) const {
  if (!is_special(id)) throw RangeError("id " + std::to_string(id) + " is not a length token");
  return static_cast<int>(id) - n_visual_;
}

TokenSequence encode_sequence(const Assignment& a, const BlockTokens& visual_tokens,
                              const Vocab& vocab) {
  const CandidateLevels& levels = vocab.levels();
  if (a.blocks() != levels.blocks()) {
    throw ValidationError("assignment has " + std::to_string(a.blocks()) + " blocks, expected " +
                          std::to_string(levels.blocks()));
  }
  if (static_cast<int>(visual_tokens.size()) != a.blocks()) {
    throw ValidationError("expected visual tokens for " + std::to_string(a.blocks()) + " blocks");
  }
  TokenSequence seq;
  seq.ids.reserve(a.blocks() + total_length(a));
  for (int t = 0; t < a.blocks(); ++t) {
    const auto j = levels.index_of(a[t]);
    if (!j) throw ValidationError("count " + std::to_string(a[t]) + " is not a level");
    if (static_cast<int>(visual_tokens[t].size()) != a[t]) {
      throw ValidationError("block " + std::to_string(t) + " supplies " +
                            std::to_string(visual_tokens[t].size()) + " ids, expected " +
                            std::to_string(a[t]));
    }
    seq.ids.push_back(vocab.special(*j));
    for (TokenId id : visual_tokens[t]) {
      if (!vocab.is_visual(id)) {
        throw ValidationError("id " + std::to_string(id) + " is not a visual id");
      }
      seq.ids.push_back(id);
    }
  }
  return seq;
}

std::string_view to_string(DecodeErrorKind kind) {
  switch (kind) {
    case DecodeErrorKind::kUnexpectedSpecial: return "unexpected_special";
    case DecodeErrorKind::kUnexpectedVisual: return "unexpected_visual";
    case DecodeErrorKind::kTruncated: return "truncated";
    case DecodeErrorKind::kTrailingTokens: return "trailing_tokens";
    case DecodeErrorKind::kOutOfRange: return "out_of_range";
  }
  return "unknown";
}

std::variant<DecodedSequence, DecodeError> decode_sequence(const TokenSequence& seq,
                                                           const Vocab& vocab) {
  const CandidateLevels& levels = vocab.levels();
  const int blocks = levels.blocks();
  std::vector<int> counts;
  BlockTokens tokens;
  std::size_t pos = 0;
  for (int t = 0; t < blocks; ++t) {
    if (pos >= seq.ids.size()) return DecodeError{DecodeErrorKind::kTruncated, pos};
    const TokenId head = seq.ids[pos];
    if (vocab.is_visual(head)) return DecodeError{DecodeErrorKind::kUnexpectedVisual, pos};
    if (!vocab.is_special(head)) return DecodeError{DecodeErrorKind::kOutOfRange, pos};
    const int k = levels[vocab.level_index_of(head)];
    ++pos;
    std::vector<TokenId> group;
    group.reserve(k);
    for (int r = 0; r < k; ++r, ++pos) {
      if (pos >= seq.ids.size()) return DecodeError{DecodeErrorKind::kTruncated, pos};
      const TokenId id = seq.ids[pos];
      if (vocab.is_special(id)) return DecodeError{DecodeErrorKind::kUnexpectedSpecial, pos};
      if (!vocab.is_visual(id)) return DecodeError{DecodeErrorKind::kOutOfRange, pos};
      group.push_back(id);
    }
    counts.push_back(k);
    tokens.push_back(std::move(group));
  }
  if (pos != seq.ids.size()) return DecodeError{DecodeErrorKind::kTrailingTokens, pos};
  return DecodedSequence{Assignment(std::move(counts)), std::move(tokens)};
}

TokenMask next_mask(const DecoderState& state, const Vocab& vocab) {
  TokenMask mask = TokenMask::Constant(vocab.size(), false);
  switch (state.phase()) {
    case DecoderState::Phase::kExpectLength:
      mask.tail(vocab.n_special()).setConstant(true);
      break;
    case DecoderState::Phase::kExpectVisual:
      mask.head(vocab.n_visual()).setConstant(true);
      break;
    case DecoderState::Phase::kDone:
      throw TerminalStateError("decoder is done; no further tokens are allowed");
  }
  return mask;
}

DecoderState advance(const DecoderState& state, TokenId id, const Vocab& vocab) {
  DecoderState next = state;
  switch (state.phase_) {
    case DecoderState::Phase::kExpectLength: {
      if (!vocab.is_special(id)) {
        throw ProtocolError("block " + std::to_string(state.block_) +
                            " expects a length token, got id " + std::to_string(id));
      }
      const int k = vocab.levels()[vocab.level_index_of(id)];
      next.prefix_.push_back(k);
      next.phase_ = DecoderState::Phase::kExpectVisual;
      next.remaining_ = k;
      return next;
    }
    case DecoderState::Phase::kExpectVisual:
      if (!vocab.is_visual(id)) {
        throw ProtocolError("block " + std::to_string(state.block_) +
                            " expects a visual token, got id " + std::to_string(id));
      }
      if (--next.remaining_ == 0) {
        if (state.block_ + 1 == vocab.levels().blocks()) {
          next.phase_ = DecoderState::Phase::kDone;
        } else {
          next.phase_ = DecoderState::Phase::kExpectLength;
          ++next.block_;
        }
      }
      return next;
    case DecoderState::Phase::kDone:
      break;
  }
  throw TerminalStateError("decoder is done; no further tokens are allowed");
}

Eigen::VectorXd apply_logit_mask(const Eigen::VectorXd& logits, const TokenMask& mask) {
  if (logits.size() != mask.size()) throw ValidationError("logits and mask differ in size");
  return mask.select(logits.array(), -std::numeric_limits<double>::infinity()).matrix();
}

TokenId sample_masked(const Eigen::VectorXd& logits, const TokenMask& mask, Rng& rng) {
  const Eigen::VectorXd masked = apply_logit_mask(logits, mask);
  const double top = masked.maxCoeff();
  if (!std::isfinite(top)) throw ValidationError("mask allows no finite logit");
  const Eigen::ArrayXd weights = (masked.array() - top).exp();
  const double u = rng.uniform() * weights.sum();
  double acc = 0;
  Eigen::Index last = -1;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!mask(i)) continue;
    last = i;
    acc += weights(i);
    if (u < acc) return static_cast<TokenId>(i);
  }
  return static_cast<TokenId>(last);
}

TokenSequence sample_sequence(const Vocab& vocab, Rng& rng,
                              const std::optional<Assignment>& forced) {
  if (forced) index_from_assignment(*forced, vocab.levels());
  TokenSequence seq;
  DecoderState state = DecoderState::initial();
  Eigen::VectorXd logits(vocab.size());
  while (!state.done()) {
    TokenMask mask = next_mask(state, vocab);
    if (forced && state.phase() == DecoderState::Phase::kExpectLength) {
      mask.setConstant(false);
      mask(vocab.special(*vocab.levels().index_of((*forced)[state.block()]))) = true;
    }
    for (Eigen::Index i = 0; i < logits.size(); ++i) logits(i) = rng.uniform(-1.0, 1.0);
    const TokenId id = sample_masked(logits, mask, rng);
    seq.ids.push_back(id);
    state = advance(state, id, vocab);
  }
  return seq;
}

std::vector<int> query_blocks(const Assignment& a) {
  std::vector<int> out;
  out.reserve(total_length(a));
  for (int t = 0; t < a.blocks(); ++t) out.insert(out.end(), a[t], t);
  return out;
}

std::vector<int> reference_blocks(int blocks, int refs_per_block) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(blocks) * refs_per_block);
  for (int t = 0; t < blocks; ++t) out.insert(out.end(), refs_per_block, t);
  return out;
}

namespace {

BoolMatrix causal(const std::vector<int>& rows, const std::vector<int>& cols) {
  BoolMatrix m(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) m(i, j) = cols[j] <= rows[i];
  }
  return m;
}

}  // namespace

MaskSet build_masks(const Assignment& a, int refs_per_block) {
  if (refs_per_block < 1) throw ValidationError("refs_per_block must be >= 1");
  if (a.blocks() < 1) throw ValidationError("assignment has no blocks");
  for (int t = 0; t < a.blocks(); ++t) {
    if (a[t] < 1) throw ValidationError("block counts must be >= 1");
  }
  const auto q = query_blocks(a);
  const auto r = reference_blocks(a.blocks(), refs_per_block);
  return {causal(q, q), causal(q, r), causal(r, r), causal(r, q)};
}

std::string debug_string(const TokenSequence& seq, const Vocab& vocab) {
  std::string out;
  for (std::size_t i = 0; i < seq.ids.size(); ++i) {
    if (i) out += ' ';
    const TokenId id = seq.ids[i];
    out += vocab.is_special(id) ? "S" + std::to_string(vocab.level_index_of(id))
                                : std::to_string(id);
  }
  return out;
}

TokenSequence parse_debug_string(std::string_view text, const Vocab& vocab) {
  TokenSequence seq;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    if (word[0] == 'S') {
      const auto j = parse_int64(std::string_view(word).substr(1), "length token");
      if (j < 0 || j >= vocab.n_special()) {
        throw ValidationError("length token '" + word + "' out of range");
      }
      seq.ids.push_back(vocab.special(static_cast<int>(j)));
    } else {
      const auto id = parse_int64(word, "token id");
      if (id < 0 || id > std::numeric_limits<TokenId>::max()) {
        throw ValidationError("token id '" + word + "' out of range");
      }
      seq.ids.push_back(static_cast<TokenId>(id));
    }
  }
  return seq;
}

void write_sequence(std::ostream& out, const TokenSequence& seq) {
  const auto n = static_cast<std::uint32_t>(seq.ids.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(seq.ids.data()),
            static_cast<std::streamsize>(seq.ids.size() * sizeof(TokenId)));
  if (!out) throw IoError("failed to write token sequence");
}

TokenSequence read_sequence(std::istream& in) {
  std::uint32_t n = 0;
  if (!in.read(reinterpret_cast<char*>(&n), sizeof n)) {
    throw IoError("truncated token sequence header");
  }
  TokenSequence seq;
  seq.ids.resize(n);
  if (!in.read(reinterpret_cast<char*>(seq.ids.data()),
               static_cast<std::streamsize>(n * sizeof(TokenId)))) {
    throw IoError("truncated token sequence body");
  }
  return seq;
}

}  // namespace tokbudget

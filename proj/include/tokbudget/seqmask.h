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

// Variable-length token sequences framed by per-block length tokens, the
// logit-masking decoder state machine that keeps sampled sequences well
// formed, and block-causal attention masks.
//
// Id layout: visual ids occupy [0, V); the length token for level index j
// is V + j.

#ifndef TOKBUDGET_SEQMASK_H_
#define TOKBUDGET_SEQMASK_H_

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tokbudget/core.h"
#include "tokbudget/random.h"

namespace tokbudget {

using TokenId = std::uint32_t;

class Vocab {
 public:
  Vocab(int n_visual, CandidateLevels levels);

  int n_visual() const { return n_visual_; }
  int n_special() const { return levels_.size(); }
  int size() const { return n_visual_ + levels_.size(); }
  const CandidateLevels& levels() const { return levels_; }

  TokenId special(int level_index) const;
  bool is_visual(TokenId id) const { return id < static_cast<TokenId>(n_visual_); }
  bool is_special(TokenId id) const {
    return id >= static_cast<TokenId>(n_visual_) && id < static_cast<TokenId>(size());
  }
  // Level index encoded by a special id.
  int level_index_of(TokenId id) const;

 private:
  int n_visual_;
  CandidateLevels levels_;
};

struct TokenSequence {
  std::vector<TokenId> ids;
  bool operator==(const TokenSequence&) const = default;
};

using BlockTokens = std::vector<std::vector<TokenId>>;

// Throws ValidationError when block t does not supply exactly k_t ids or an
// id is not visual.
TokenSequence encode_sequence(const Assignment& a, const BlockTokens& visual_tokens,
                              const Vocab& vocab);

enum class DecodeErrorKind {
  kUnexpectedSpecial,
  kUnexpectedVisual,
  kTruncated,
  kTrailingTokens,
  kOutOfRange,  // id >= V + m
};

std::string_view to_string(DecodeErrorKind kind);

struct DecodeError {
  DecodeErrorKind kind;
  std::size_t position;
  bool operator==(const DecodeError&) const = default;
};

struct DecodedSequence {
  Assignment assignment;
  BlockTokens tokens;
  bool operator==(const DecodedSequence&) const = default;
};

// Strict parser: exactly T groups and nothing after them.
std::variant<DecodedSequence, DecodeError> decode_sequence(const TokenSequence& seq,
                                                           const Vocab& vocab);

class DecoderState {
 public:
  enum class Phase { kExpectLength, kExpectVisual, kDone };

  static DecoderState initial() { return DecoderState(); }

  Phase phase() const { return phase_; }
  int block() const { return block_; }
  int remaining() const { return remaining_; }
  const std::vector<int>& prefix() const { return prefix_; }
  bool done() const { return phase_ == Phase::kDone; }

  bool operator==(const DecoderState&) const = default;

 private:
  friend DecoderState advance(const DecoderState&, TokenId, const Vocab&);
  Phase phase_ = Phase::kExpectLength;
  int block_ = 0;
  int remaining_ = 0;
  std::vector<int> prefix_;
};

using TokenMask = Eigen::Array<bool, Eigen::Dynamic, 1>;

// Allowed ids for the next step. Throws TerminalStateError in Done.
TokenMask next_mask(const DecoderState& state, const Vocab& vocab);

// Throws ProtocolError when `id` is not allowed by next_mask(state).
DecoderState advance(const DecoderState& state, TokenId id, const Vocab& vocab);

// Disallowed entries become -inf.
Eigen::VectorXd apply_logit_mask(const Eigen::VectorXd& logits, const TokenMask& mask);

// Samples from softmax(masked logits).
TokenId sample_masked(const Eigen::VectorXd& logits, const TokenMask& mask, Rng& rng);

// Runs the state machine to Done, drawing uniform-random logits each step.
// When `forced` is set every length token is fixed to that assignment.
TokenSequence sample_sequence(const Vocab& vocab, Rng& rng,
                              const std::optional<Assignment>& forced = std::nullopt);

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct MaskSet {
  BoolMatrix encoder_self;   // N x N
  BoolMatrix encoder_cross;  // N x T*P
  BoolMatrix decoder_self;   // T*P x T*P
  BoolMatrix decoder_cross;  // T*P x N
};

// Block index of each 1D query position (block-by-block in assignment order).
std::vector<int> query_blocks(const Assignment& a);
// Block index of each reference position, P per block.
std::vector<int> reference_blocks(int blocks, int refs_per_block);

// Entry (i, j) is true iff block(j) <= block(i). Throws ValidationError when
// refs_per_block < 1.
MaskSet build_masks(const Assignment& a, int refs_per_block);

// "S<j>" for the length token of level index j, decimal for visual ids.
std::string debug_string(const TokenSequence& seq, const Vocab& vocab);
TokenSequence parse_debug_string(std::string_view text, const Vocab& vocab);

// Little-endian u32 count followed by u32 ids.
void write_sequence(std::ostream& out, const TokenSequence& seq);
TokenSequence read_sequence(std::istream& in);

}  // namespace tokbudget

#endif  // TOKBUDGET_SEQMASK_H_

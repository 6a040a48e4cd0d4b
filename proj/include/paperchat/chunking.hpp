#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "paperchat/document.hpp"

namespace paperchat {

/// Byte range [begin, end) of one token inside the source text.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Token rule used everywhere a token count matters: split on ASCII
// whitespace, and every ASCII punctuation character is a token of its own.
std::vector<TokenSpan> token_spans(std::string_view text);
std::vector<std::string> tokenize(std::string_view text);
std::size_t count_tokens(std::string_view text);

/// First `max_tokens` tokens of `text`, whitespace collapsed.
std::string truncate_tokens(std::string_view text, std::size_t max_tokens);

/// Last `max_tokens` tokens of `text`, whitespace collapsed.
std::string tail_tokens(std::string_view text, std::size_t max_tokens);

inline constexpr std::size_t kDefaultSegmentSize = 150;

struct ChunkingConfig {
  std::size_t segment_size = kDefaultSegmentSize;
};

struct Chunk {
  std::size_t chunk_id = 0;
  std::size_t page_label = 0;
  std::string text;
  std::size_t token_count = 0;

  bool operator==(const Chunk&) const = default;
};

/// Greedy packing of each passage into chunks of at most
/// `cfg.segment_size` tokens. Chunks never cross passage boundaries and do
/// not overlap; page_label equals chunk_id. Throws InvalidArgument when
/// segment_size is zero.
std::vector<Chunk> segment(const CorpusView& corpus, const ChunkingConfig& cfg);

}  // namespace paperchat

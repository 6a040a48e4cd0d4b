#include "paperchat/chunking.hpp"

#include <algorithm>
#include <cctype>

#include "paperchat/errors.hpp"

namespace paperchat {

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

// Joins the tokens [first, last) of `text` back into a single line: original
// characters inside a run of adjacent tokens, one space wherever whitespace
// separated them.
std::string join_span(std::string_view text, const std::vector<TokenSpan>& spans, std::size_t first,
                      std::size_t last) {
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (i > first && spans[i].begin != spans[i - 1].end) out.push_back(' ');
    out.append(text.substr(spans[i].begin, spans[i].end - spans[i].begin));
  }
  return out;
}

}  // namespace

std::vector<TokenSpan> token_spans(std::string_view text) {
  std::vector<TokenSpan> spans;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
    } else if (is_punct(c)) {
      spans.push_back({i, i + 1});
      ++i;
    } else {
      std::size_t j = i;
      while (j < n) {
        const auto d = static_cast<unsigned char>(text[j]);
        if (is_space(d) || is_punct(d)) break;
        ++j;
      }
      spans.push_back({i, j});
      i = j;
    }
  }
  return spans;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  for (const auto& s : token_spans(text)) tokens.emplace_back(text.substr(s.begin, s.end - s.begin));
  return tokens;
}

std::size_t count_tokens(std::string_view text) { return token_spans(text).size(); }

std::string truncate_tokens(std::string_view text, std::size_t max_tokens) {
  const auto spans = token_spans(text);
  return join_span(text, spans, 0, std::min(max_tokens, spans.size()));
}

std::string tail_tokens(std::string_view text, std::size_t max_tokens) {
  const auto spans = token_spans(text);
  const std::size_t keep = std::min(max_tokens, spans.size());
  return join_span(text, spans, spans.size() - keep, spans.size());
}

std::vector<Chunk> segment(const CorpusView& corpus, const ChunkingConfig& cfg) {
  if (cfg.segment_size == 0) throw Error(ErrorCode::InvalidArgument, "segment size must be >= 1");
  std::vector<Chunk> chunks;
  for (const auto& passage : corpus.passages) {
    const auto spans = token_spans(passage.text);
    for (std::size_t first = 0; first < spans.size(); first += cfg.segment_size) {
      const std::size_t last = std::min(first + cfg.segment_size, spans.size());
      const std::size_t id = chunks.size();
      chunks.push_back(Chunk{id, id, join_span(passage.text, spans, first, last), last - first});
    }
  }
  return chunks;
}

}  // namespace paperchat

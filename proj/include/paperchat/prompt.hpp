#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "paperchat/chunking.hpp"
#include "paperchat/document.hpp"

namespace paperchat {

struct PromptParts {
  std::string docs_block;
  std::string instructions_block;
  std::string query_block;
};

/// A prompt ready for the gateway. For three-part prompts
/// rendered_text == docs + kPartSeparator + instructions + kPartSeparator + query.
struct PromptBundle {
  std::string rendered_text;
  PromptParts parts;
  std::size_t estimated_tokens = 1;
};

inline constexpr std::string_view kPartSeparator = "\n\n";
inline constexpr std::string_view kDocsPrefix = "I will provide the document chunks as follows: ";

/// Wraps free text as a prompt (no parts), estimating its tokens.
PromptBundle make_prompt(std::string text);

/// Joins three parts with kPartSeparator.
PromptBundle make_prompt(PromptParts parts);

struct RenderedChunk {
  std::size_t page_label = 0;
  std::string body;
};

RenderedChunk render_chunk(const Chunk& chunk);

/// One unit of evidence in a docs block. Unlabelled items (e.g. a multi-page
/// synthesis that carries its own inline labels) are rendered verbatim.
struct EvidenceItem {
  std::optional<std::size_t> page_label;
  std::string text;
};

std::string render_evidence(const EvidenceItem& item);

/// Three-part QA prompt. Throws EmptyEvidence with no evidence and
/// PreconditionViolation for an empty query.
PromptBundle build_qa_prompt(std::span<const EvidenceItem> evidence, std::string_view query);

/// Examiner prompt: header line, then "Question : q", blank line,
/// "Answer : a". Throws PreconditionViolation on empty inputs.
PromptBundle build_examiner_prompt(std::string_view question, std::string_view candidate_answer);

/// Key-reference prompt: optional "Paper summary:" section, "Abstract:",
/// numbered "References:" list, then the fixed instruction/format block.
/// Throws NoReferences, or PreconditionViolation when summary and abstract
/// are both empty.
PromptBundle build_keyref_prompt(std::string_view cached_summary, std::string_view abstract,
                                 std::span<const Reference> references);

std::string_view qa_instructions();
std::string_view examiner_header();
std::string_view keyref_instructions();
std::string_view chunk_refine_instructions();
std::string_view multipage_seed_instructions();
std::string_view multipage_fold_instructions();

}  // namespace paperchat

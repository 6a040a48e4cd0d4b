#include "paperchat/prompt.hpp"

#include <algorithm>

#include "paperchat/errors.hpp"
#include "paperchat/prompt_texts.hpp"

namespace paperchat {

std::string_view qa_instructions() { return prompts::qa_instructions; }
std::string_view examiner_header() { return prompts::examiner_header; }
std::string_view keyref_instructions() { return prompts::keyref_template; }
std::string_view chunk_refine_instructions() { return prompts::chunk_refine; }
std::string_view multipage_seed_instructions() { return prompts::multipage_seed; }
std::string_view multipage_fold_instructions() { return prompts::multipage_fold; }

PromptBundle make_prompt(std::string text) {
  PromptBundle bundle;
  bundle.estimated_tokens = std::max<std::size_t>(1, count_tokens(text));
  bundle.rendered_text = std::move(text);
  return bundle;
}

PromptBundle make_prompt(PromptParts parts) {
  std::string text;
  text.reserve(parts.docs_block.size() + parts.instructions_block.size() + parts.query_block.size() + 4);
  text += parts.docs_block;
  text += kPartSeparator;
  text += parts.instructions_block;
  text += kPartSeparator;
  text += parts.query_block;
  PromptBundle bundle = make_prompt(std::move(text));
  bundle.parts = std::move(parts);
  return bundle;
}

RenderedChunk render_chunk(const Chunk& chunk) {
  return RenderedChunk{chunk.page_label, "[" + std::to_string(chunk.page_label) + "] " + chunk.text};
}

std::string render_evidence(const EvidenceItem& item) {
  if (!item.page_label) return item.text;
  return "[" + std::to_string(*item.page_label) + "] " + item.text;
}

PromptBundle build_qa_prompt(std::span<const EvidenceItem> evidence, std::string_view query) {
  if (evidence.empty()) throw Error(ErrorCode::EmptyEvidence, "QA prompt needs at least one evidence chunk");
  if (query.empty()) throw Error(ErrorCode::PreconditionViolation, "QA prompt needs a non-empty query");

  PromptParts parts;
  parts.docs_block = std::string(kDocsPrefix);
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    if (i > 0) parts.docs_block += '\n';
    parts.docs_block += render_evidence(evidence[i]);
  }
  parts.instructions_block = std::string(qa_instructions());
  parts.query_block = "Query: " + std::string(query) + ". Please provide detailed findings in response to the query:";
  return make_prompt(std::move(parts));
}

PromptBundle build_examiner_prompt(std::string_view question, std::string_view candidate_answer) {
  if (question.empty() || candidate_answer.empty()) {
    throw Error(ErrorCode::PreconditionViolation, "examiner prompt needs a question and an answer");
  }
  PromptParts parts;
  parts.instructions_block = std::string(examiner_header());
  parts.query_block = "Question : " + std::string(question) + "\n\nAnswer : " + std::string(candidate_answer);
  PromptBundle bundle = make_prompt(parts.instructions_block + "\n" + parts.query_block);
  bundle.parts = std::move(parts);
  return bundle;
}

PromptBundle build_keyref_prompt(std::string_view cached_summary, std::string_view abstract,
                                 std::span<const Reference> references) {
  if (references.empty()) throw Error(ErrorCode::NoReferences, "paper has no references");
  if (cached_summary.empty() && abstract.empty()) {
    throw Error(ErrorCode::PreconditionViolation, "key-reference prompt needs a summary or an abstract");
  }
  std::string docs;
  if (!cached_summary.empty()) {
    docs += "Paper summary:\n";
    docs += cached_summary;
  }
  if (!abstract.empty()) {
    if (!docs.empty()) docs += kPartSeparator;
    docs += "Abstract:\n";
    docs += abstract;
  }
  std::string refs = "References:";
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto& r = references[i];
    refs += "\n" + std::to_string(i + 1) + ". " + r.title;
    if (!r.author.empty()) refs += ", " + r.author;
    if (!r.year.empty()) refs += ", " + r.year;
  }
  return make_prompt(docs + std::string(kPartSeparator) + refs + std::string(kPartSeparator) +
                     std::string(keyref_instructions()));
}

}  // namespace paperchat

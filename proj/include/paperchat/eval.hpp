#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paperchat/llm.hpp"
#include "paperchat/orchestrator.hpp"
#include "paperchat/retrieval.hpp"

namespace paperchat {

struct ExaminerScore {
  int score = 0;
  std::string rationale;
  std::string examiner_model;
};

/// First score in `text`: "<n>/100", then "<n> out of 100", then
/// "score ... <n>", each restricted to 0..100. Throws ScoreParseError.
int parse_score(std::string_view text);

/// round(100 * F1) over normalized token multisets. Throws
/// PreconditionViolation for an empty reference.
int deterministic_judge(std::string_view candidate, std::string_view reference_answer);

/// Full document text followed by the examiner prompt, sent at temperature 0.
ExaminerScore examiner_score(std::string_view question, std::string_view candidate,
                             std::string_view full_document_text, LlmGateway& gateway,
                             ChatModelClass examiner = ChatModelClass::ExaminerLarge);

struct FixtureQuestion {
  std::string id;
  std::string text;
  /// Answer the deterministic judge compares against (fixture paper).
  std::string reference_answer;
};

/// The six evaluation questions Q0..Q5 with reference answers for the
/// bundled LIMA fixture.
const std::vector<FixtureQuestion>& fixture_questions();

/// Seven retrieval configurations: three Cosine rows, four KNN rows.
std::vector<RetrievalConfig> table2_grid();

/// "Cosine S=150 k=3" style row label.
std::string config_label(const RetrievalConfig& config);

/// JSON array of {"strategy","S","k"} objects, or the literal "table2".
std::vector<RetrievalConfig> load_grid(const std::filesystem::path& path);
std::vector<RetrievalConfig> parse_grid(std::string_view json_text);

class Judge {
 public:
  virtual ~Judge() = default;
  virtual int score(const FixtureQuestion& question, std::string_view candidate) = 0;
  virtual std::string name() const = 0;
};

class DeterministicJudge final : public Judge {
 public:
  int score(const FixtureQuestion& question, std::string_view candidate) override;
  std::string name() const override { return "deterministic"; }
};

class ExaminerJudge final : public Judge {
 public:
  ExaminerJudge(LlmGateway& gateway, std::string full_document_text,
                ChatModelClass examiner = ChatModelClass::ExaminerLarge)
      : gateway_(gateway), full_text_(std::move(full_document_text)), examiner_(examiner) {}
  int score(const FixtureQuestion& question, std::string_view candidate) override;
  std::string name() const override { return "examiner"; }

 private:
  LlmGateway& gateway_;
  std::string full_text_;
  ChatModelClass examiner_;
};

struct AblationCell {
  RetrievalConfig config;
  std::string question_id;
  /// Empty when the cell failed; `error` says why.
  std::optional<int> score;
  std::string error;
};

struct AblationMatrix {
  std::vector<RetrievalConfig> grid;
  std::vector<std::string> question_ids;
  /// Row-major: cells[row * question_ids.size() + column].
  std::vector<AblationCell> cells;

  const AblationCell& at(std::size_t row, std::size_t column) const {
    return cells[row * question_ids.size() + column];
  }
};

/// Raw-chunk QA pipeline (Ada-class embeddings, Base chat model) at every
/// grid configuration for every question, judged per cell. Per-cell errors
/// become null cells.
AblationMatrix run_ablation(std::span<const RetrievalConfig> grid,
                            std::span<const FixtureQuestion> questions, Judge& judge,
                            const DocumentIndex& document, Orchestrator& orchestrator);

/// Delimited table: header "config|Q0|...", one row per configuration,
/// null cells as "—".
std::string render_table(const AblationMatrix& matrix);

/// One JSON object per cell, one per line.
std::string render_records(const AblationMatrix& matrix);

}  // namespace paperchat

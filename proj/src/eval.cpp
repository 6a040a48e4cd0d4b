#include "paperchat/eval.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "paperchat/chunking.hpp"
#include "paperchat/errors.hpp"
#include "paperchat/prompt.hpp"

namespace paperchat {

namespace {

// Each pattern's score group is 2; group 1 guards against longer numbers.
std::optional<int> first_in_range(const std::regex& pattern, const std::string& text) {
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern); it != std::sregex_iterator(); ++it) {
    const int value = std::stoi((*it)[2].str());
    if (value >= 0 && value <= 100) return value;
  }
  return std::nullopt;
}

}  // namespace

int parse_score(std::string_view text) {
  static const std::regex slash(R"((^|[^\d.])(\d{1,3})\s*/\s*100(?!\d))", std::regex::icase);
  static const std::regex out_of(R"((^|[^\d.])(\d{1,3})\s+out\s+of\s+100(?!\d))", std::regex::icase);
  static const std::regex score_word(R"((score)\D{0,40}?(\d{1,3})(?![\d.]))", std::regex::icase);
  const std::string s(text);
  for (const auto* pattern : {&slash, &out_of, &score_word}) {
    if (auto v = first_in_range(*pattern, s)) return *v;
  }
  throw Error(ErrorCode::ScoreParseError, "no 0-100 score found in examiner response");
}

namespace {

std::map<std::string, std::size_t> word_bag(std::string_view text) {
  std::map<std::string, std::size_t> bag;
  for (auto& t : tokenize(text)) {
    if (t.size() == 1 && std::ispunct(static_cast<unsigned char>(t[0]))) continue;
    for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    ++bag[t];
  }
  return bag;
}

}  // namespace

int deterministic_judge(std::string_view candidate, std::string_view reference_answer) {
  const auto ref = word_bag(reference_answer);
  if (ref.empty()) throw Error(ErrorCode::PreconditionViolation, "reference answer must not be empty");
  const auto cand = word_bag(candidate);
  std::size_t overlap = 0, cand_total = 0, ref_total = 0;
  for (const auto& [w, n] : cand) {
    cand_total += n;
    if (auto it = ref.find(w); it != ref.end()) overlap += std::min(n, it->second);
  }
  for (const auto& [w, n] : ref) ref_total += n;
  if (overlap == 0) return 0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(cand_total);
  const double recall = static_cast<double>(overlap) / static_cast<double>(ref_total);
  return static_cast<int>(std::lround(100.0 * 2.0 * precision * recall / (precision + recall)));
}

ExaminerScore examiner_score(std::string_view question, std::string_view candidate,
                             std::string_view full_document_text, LlmGateway& gateway, ChatModelClass examiner) {
  const auto examiner_prompt = build_examiner_prompt(question, candidate);
  auto prompt = make_prompt(std::string(full_document_text) + std::string(kPartSeparator) +
                            examiner_prompt.rendered_text);
  auto reply = gateway.complete(examiner, prompt, CompletionParams{kJudgeTemperature, 512}, "examiner");
  ExaminerScore out;
  out.score = parse_score(reply.text);
  out.rationale = std::move(reply.text);
  out.examiner_model = std::move(reply.model_id);
  return out;
}

const std::vector<FixtureQuestion>& fixture_questions() {
  static const std::vector<FixtureQuestion> questions{
      {"Q0", "what is the title of this paper ?", "LIMA: Less Is More for Alignment"},
      {"Q1", "What is the hypothesis about alignment in this paper?",
       "The superficial alignment hypothesis: a model learns almost all of its knowledge and capabilities during "
       "pretraining, and alignment mainly teaches it which format and style to use when interacting with users, so "
       "a small set of examples is enough."},
      {"Q2", "What is the experiment setup of this paper?",
       "A 65B parameter LLaMa model is fine-tuned with standard supervised loss on 1,000 curated prompts and "
       "responses, without reinforcement learning or human preference modeling, and compared with Alpaca 65B, "
       "DaVinci003, Bard, Claude and GPT-4 through human and GPT-4 preference judgments on 300 test prompts."},
      {"Q3", "What is the main discovery of this paper?",
       "Fine-tuning a strong pretrained model on only 1,000 carefully curated examples produces responses that are "
       "equivalent or preferred to GPT-4 in 43% of cases, showing that almost all knowledge comes from pretraining "
       "and limited instruction tuning data suffices for high quality output."},
      {"Q4", "How to explain the phenomenon observed in this paper?",
       "Pretraining gives the model its knowledge, so alignment only needs to teach the response style; scaling up "
       "input diversity and output quality helps, while scaling up the quantity of examples alone does not."},
      {"Q5", "find the key reference for the following paper",
       "Training a helpful and harmless assistant with reinforcement learning from human feedback; Scaling "
       "instruction-finetuned language models; Scaling language modeling with pathways."},
  };
  return questions;
}

std::vector<RetrievalConfig> table2_grid() {
  using enum RetrievalStrategy;
  return {{Cosine, 3, 150}, {Cosine, 5, 150}, {Cosine, 5, 300}, {Knn, 3, 150},
          {Knn, 3, 300},    {Knn, 5, 300},    {Knn, 6, 512}};
}

std::string config_label(const RetrievalConfig& config) {
  return std::string(config.strategy == RetrievalStrategy::Cosine ? "Cosine" : "KNN") +
         " S=" + std::to_string(config.segment_size) + " k=" + std::to_string(config.top_k);
}

std::vector<RetrievalConfig> parse_grid(std::string_view json_text) {
  auto j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::SchemaError, "grid is not valid JSON");
  if (j.is_string() && j.get<std::string>() == "table2") return table2_grid();
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::SchemaError, "grid must be a non-empty array");
  std::vector<RetrievalConfig> grid;
  for (const auto& row : j) {
    if (!row.is_object() || !row.contains("strategy") || !row.contains("S") || !row.contains("k") ||
        !row["strategy"].is_string() || !row["S"].is_number_unsigned() || !row["k"].is_number_unsigned()) {
      throw Error(ErrorCode::SchemaError, "grid rows need string strategy and positive integer S and k");
    }
    auto strategy = parse_strategy(row["strategy"].get<std::string>());
    if (!strategy) throw Error(ErrorCode::SchemaError, "unknown strategy " + row["strategy"].dump());
    RetrievalConfig cfg{*strategy, row["k"].get<std::size_t>(), row["S"].get<std::size_t>()};
    if (cfg.top_k == 0 || cfg.segment_size == 0) throw Error(ErrorCode::SchemaError, "S and k must be positive");
    grid.push_back(cfg);
  }
  return grid;
}

std::vector<RetrievalConfig> load_grid(const std::filesystem::path& path) {
  if (path == "table2") return table2_grid();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read grid " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid(buf.str());
}

int DeterministicJudge::score(const FixtureQuestion& question, std::string_view candidate) {
  return deterministic_judge(candidate, question.reference_answer);
}

int ExaminerJudge::score(const FixtureQuestion& question, std::string_view candidate) {
  return examiner_score(question.text, candidate, full_text_, gateway_, examiner_).score;
}

AblationMatrix run_ablation(std::span<const RetrievalConfig> grid, std::span<const FixtureQuestion> questions,
                            Judge& judge, const DocumentIndex& document, Orchestrator& orchestrator) {
  AblationMatrix matrix;
  matrix.grid.assign(grid.begin(), grid.end());
  for (const auto& q : questions) matrix.question_ids.push_back(q.id);

  for (const auto& cfg : grid) {
    const TierConfig pipeline{EmbeddingModelClass::Ada, cfg, std::nullopt, ChatModelClass::Base, std::nullopt};
    for (const auto& q : questions) {
      AblationCell cell{cfg, q.id, std::nullopt, {}};
      try {
        const auto answer = orchestrator.run_pipeline(q.text, document, pipeline, AssistanceTier::Entry);
        cell.score = judge.score(q, answer.text);
      } catch (const Error& e) {
        cell.error = std::string(to_string(e.code())) + ": " + e.what();
      }
      matrix.cells.push_back(std::move(cell));
    }
  }
  return matrix;
}

std::string render_table(const AblationMatrix& matrix) {
  std::string out = "config";
  for (const auto& id : matrix.question_ids) out += "|" + id;
  out += '\n';
  for (std::size_t r = 0; r < matrix.grid.size(); ++r) {
    out += config_label(matrix.grid[r]);
    for (std::size_t c = 0; c < matrix.question_ids.size(); ++c) {
      const auto& cell = matrix.at(r, c);
      out += "|" + (cell.score ? std::to_string(*cell.score) : std::string("—"));
    }
    out += '\n';
  }
  return out;
}

std::string render_records(const AblationMatrix& matrix) {
  std::string out;
  for (const auto& cell : matrix.cells) {
    nlohmann::json j{{"strategy", to_string(cell.config.strategy)},
                     {"S", cell.config.segment_size},
                     {"k", cell.config.top_k},
                     {"question_id", cell.question_id}};
    j["score"] = cell.score ? nlohmann::json(*cell.score) : nlohmann::json(nullptr);
    if (!cell.error.empty()) j["error"] = cell.error;
    out += j.dump() + '\n';
  }
  return out;
}

}  // namespace paperchat

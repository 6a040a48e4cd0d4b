#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace paperchat {

struct Section {
  std::string heading;
  std::string text;
  std::size_t ordinal = 0;

  bool operator==(const Section&) const = default;
};

struct Reference {
  std::string title;
  std::string year;
  std::string journal;
  std::string author;

  bool operator==(const Reference&) const = default;
};

struct FigureRecord {
  std::string figure_label;
  std::string figure_type;
  std::string figure_id;
  std::string figure_caption;
  std::string figure_data;

  bool operator==(const FigureRecord&) const = default;
};

/// Structured record of one scientific paper as delivered by the
/// structure parser. Immutable once ingested.
struct Paper {
  std::string title;
  std::string abstract;
  std::vector<Section> sections;
  std::vector<Reference> references;
  std::vector<FigureRecord> figures;
  std::string doi;

  bool operator==(const Paper&) const = default;
};

struct Passage {
  std::size_t page_ordinal = 0;
  std::string text;

  bool operator==(const Passage&) const = default;
};

/// Retrieval corpus: abstract, section bodies and figure captions in
/// document order. Never carries reference-list text.
struct CorpusView {
  std::string paper_id;
  std::vector<Passage> passages;
};

/// Validates a structured-parse document and builds a Paper.
/// Throws Error{SchemaError} or Error{EmptyDocument}.
Paper ingest_parsed_paper(const nlohmann::json& raw);

/// Same as above for the JSON text form; malformed JSON is a SchemaError.
Paper ingest_parsed_paper(std::string_view raw_text);

/// Serializes a Paper back into the structured-parse schema.
nlohmann::json to_parse_json(const Paper& paper);

/// Content address of a paper: SHA-256 over its canonical parse JSON.
std::string document_id(const Paper& paper);

CorpusView strip_references(const Paper& paper, std::string paper_id = {});

/// Everything the parser extracted (title, abstract, sections, captions and
/// the reference list) as plain text, for judges that read the whole paper.
std::string full_text(const Paper& paper);

}  // namespace paperchat

#include "paperchat/document.hpp"

#include <set>
#include <string>

#include "paperchat/digest.hpp"
#include "paperchat/errors.hpp"

namespace paperchat {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::SchemaError, "parse schema: " + what);
}

// Missing and null fields read as empty strings.
std::string optional_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (it->is_string()) return it->get<std::string>();
  schema_error(where + "." + key + " must be a string");
}

const json* optional_array(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  if (!it->is_array()) schema_error(std::string(key) + " must be an array");
  return &*it;
}

std::string reference_year(const json& obj, const std::string& where) {
  auto it = obj.find("year");
  if (it != obj.end() && it->is_number_integer()) return std::to_string(it->get<long long>());
  return optional_string(obj, "year", where);
}

}  // namespace

Paper ingest_parsed_paper(const json& raw) {
  if (!raw.is_object()) schema_error("document must be an object");
  auto title_it = raw.find("title");
  if (title_it == raw.end()) schema_error("missing required field title");
  if (!title_it->is_string()) schema_error("title must be a string");

  Paper paper;
  paper.title = title_it->get<std::string>();
  paper.abstract = optional_string(raw, "abstract", "document");
  paper.doi = optional_string(raw, "doi", "document");

  if (const json* sections = optional_array(raw, "sections")) {
    for (std::size_t i = 0; i < sections->size(); ++i) {
      const json& s = (*sections)[i];
      const std::string where = "sections[" + std::to_string(i) + "]";
      if (!s.is_object()) schema_error(where + " must be an object");
      paper.sections.push_back(
          Section{optional_string(s, "heading", where), optional_string(s, "text", where), i});
    }
  }

  if (const json* refs = optional_array(raw, "references")) {
    for (std::size_t i = 0; i < refs->size(); ++i) {
      const json& r = (*refs)[i];
      const std::string where = "references[" + std::to_string(i) + "]";
      if (!r.is_object()) schema_error(where + " must be an object");
      Reference ref{optional_string(r, "title", where), reference_year(r, where),
                    optional_string(r, "journal", where), optional_string(r, "author", where)};
      // Untitled entries (common in parser output) cannot be matched or cited.
      if (ref.title.empty()) continue;
      paper.references.push_back(std::move(ref));
    }
  }

  if (const json* figures = optional_array(raw, "figures")) {
    std::set<std::string> ids;
    for (std::size_t i = 0; i < figures->size(); ++i) {
      const json& f = (*figures)[i];
      const std::string where = "figures[" + std::to_string(i) + "]";
      if (!f.is_object()) schema_error(where + " must be an object");
      FigureRecord fig{optional_string(f, "figure_label", where),
                       optional_string(f, "figure_type", where),
                       optional_string(f, "figure_id", where),
                       optional_string(f, "figure_caption", where),
                       optional_string(f, "figure_data", where)};
      if (fig.figure_id.empty()) fig.figure_id = "fig-" + std::to_string(i);
      if (!ids.insert(fig.figure_id).second) schema_error("duplicate figure_id " + fig.figure_id);
      paper.figures.push_back(std::move(fig));
    }
  }

  if (paper.title.empty()) {
    if (paper.sections.empty()) throw Error(ErrorCode::EmptyDocument, "document has no title and no sections");
    schema_error("title must be non-empty");
  }
  return paper;
}

Paper ingest_parsed_paper(std::string_view raw_text) {
  json raw = json::parse(raw_text, nullptr, /*allow_exceptions=*/false);
  if (raw.is_discarded()) schema_error("not valid JSON");
  return ingest_parsed_paper(raw);
}

json to_parse_json(const Paper& paper) {
  json sections = json::array();
  for (const auto& s : paper.sections) sections.push_back({{"heading", s.heading}, {"text", s.text}});
  json refs = json::array();
  for (const auto& r : paper.references) {
    refs.push_back({{"title", r.title}, {"year", r.year}, {"journal", r.journal}, {"author", r.author}});
  }
  json figures = json::array();
  for (const auto& f : paper.figures) {
    figures.push_back({{"figure_label", f.figure_label},
                       {"figure_type", f.figure_type},
                       {"figure_id", f.figure_id},
                       {"figure_caption", f.figure_caption},
                       {"figure_data", f.figure_data}});
  }
  return json{{"title", paper.title},       {"abstract", paper.abstract}, {"sections", sections},
              {"references", refs},         {"figures", figures},         {"doi", paper.doi}};
}

std::string document_id(const Paper& paper) { return sha256_hex(to_parse_json(paper).dump()); }

CorpusView strip_references(const Paper& paper, std::string paper_id) {
  std::set<std::string_view> reference_titles;
  for (const auto& r : paper.references) reference_titles.insert(r.title);

  CorpusView view;
  view.paper_id = std::move(paper_id);
  auto add = [&](const std::string& text) {
    if (text.empty() || reference_titles.contains(text)) return;
    view.passages.push_back(Passage{view.passages.size(), text});
  };
  add(paper.abstract);
  for (const auto& s : paper.sections) add(s.text);
  for (const auto& f : paper.figures) add(f.figure_caption);
  return view;
}

std::string full_text(const Paper& paper) {
  std::string out = paper.title;
  auto block = [&out](const std::string& text) {
    if (text.empty()) return;
    out += "\n\n";
    out += text;
  };
  block(paper.abstract);
  for (const auto& s : paper.sections) {
    block(s.heading.empty() ? s.text : s.heading + "\n" + s.text);
  }
  for (const auto& f : paper.figures) block(f.figure_caption);
  if (!paper.references.empty()) {
    std::string refs = "References";
    for (std::size_t i = 0; i < paper.references.size(); ++i) {
      const auto& r = paper.references[i];
      refs += "\n" + std::to_string(i + 1) + ". " + r.title;
      if (!r.author.empty()) refs += ", " + r.author;
      if (!r.year.empty()) refs += ", " + r.year;
    }
    block(refs);
  }
  return out;
}

}  // namespace paperchat

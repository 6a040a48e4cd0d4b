#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "paperchat/document.hpp"
#include "paperchat/errors.hpp"

using namespace paperchat;
using nlohmann::json;

namespace {
json minimal() {
  return {{"title", "T"}, {"abstract", ""}, {"sections", json::array()},
          {"references", json::array()}, {"figures", json::array()}, {"doi", ""}};
}

ErrorCode code_of(const json& raw) {
  try {
    ingest_parsed_paper(raw);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}
}  // namespace

TEST_CASE("minimal parse ingests with no sections") {
  const Paper p = ingest_parsed_paper(minimal());
  CHECK(p.title == "T");
  CHECK(p.sections.empty());
  CHECK(p.references.empty());
}

TEST_CASE("fixture parse carries its title and counts") {
  const auto raw = json::parse(testkit::read_text(testkit::fixture_path("lima_parse.json")));
  const Paper p = ingest_parsed_paper(raw);
  CHECK(p.title == "LIMA: Less Is More for Alignment");
  // Counts walked directly over the raw JSON.
  CHECK(p.sections.size() == raw["sections"].size());
  CHECK(p.references.size() == raw["references"].size());
  CHECK(p.figures.size() == raw["figures"].size());
  for (std::size_t i = 1; i < p.sections.size(); ++i) CHECK(p.sections[i].ordinal > p.sections[i - 1].ordinal);
}

TEST_CASE("schema violations") {
  auto no_title = minimal();
  no_title.erase("title");
  CHECK(code_of(no_title) == ErrorCode::SchemaError);

  auto bad_sections = minimal();
  bad_sections["sections"] = "oops";
  CHECK(code_of(bad_sections) == ErrorCode::SchemaError);

  auto empty = minimal();
  empty["title"] = "";
  CHECK(code_of(empty) == ErrorCode::EmptyDocument);

  CHECK_THROWS_AS(ingest_parsed_paper(std::string_view("{not json")), Error);
}

TEST_CASE("missing optional fields become empty strings") {
  json raw = minimal();
  raw.erase("doi");
  raw["references"] = json::array({{{"title", "R"}}});
  const Paper p = ingest_parsed_paper(raw);
  CHECK(p.doi.empty());
  REQUIRE(p.references.size() == 1);
  CHECK(p.references[0].year.empty());
}

TEST_CASE("round trip through the parse schema") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const Paper p = oracle::synthetic_paper(rng);
    CHECK(ingest_parsed_paper(to_parse_json(p)) == p);
  }
  const Paper l = testkit::lima();
  CHECK(ingest_parsed_paper(to_parse_json(l)) == l);
}

TEST_CASE("document ids are content addressed") {
  const Paper a = testkit::lima();
  Paper b = testkit::lima();
  CHECK(document_id(a) == document_id(b));
  CHECK(document_id(a).size() == 64);
  b.sections[0].text += " changed";
  CHECK(document_id(a) != document_id(b));
}

TEST_CASE("strip_references") {
  Paper only_refs;
  only_refs.title = "T";
  only_refs.references = {{"Ref", "", "", ""}};
  CHECK(strip_references(only_refs).passages.empty());

  Paper ab;
  ab.title = "T";
  ab.abstract = "A";
  ab.sections = {{"H", "B", 0}};
  const auto corpus = strip_references(ab, "id");
  REQUIRE(corpus.passages.size() == 2);
  CHECK(corpus.passages[0].text == "A");
  CHECK(corpus.passages[1].text == "B");
  CHECK(corpus.paper_id == "id");

  Paper shared;
  shared.title = "T";
  shared.sections = {{"H", "We build on Scaling laws for everything in detail.", 0}};
  shared.references = {{"Scaling laws for everything", "2020", "J", "A"}};
  const auto kept = strip_references(shared);
  REQUIRE(kept.passages.size() == 1);
  CHECK(kept.passages[0].text.find("Scaling laws for everything") != std::string::npos);

  Paper figs;
  figs.title = "T";
  figs.figures = {{"1", "figure", "f", "A caption", "1,2,3"}};
  const auto fc = strip_references(figs);
  REQUIRE(fc.passages.size() == 1);
  CHECK(fc.passages[0].text == "A caption");
}

TEST_CASE("no passage equals a reference title on synthetic papers") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Paper p = oracle::synthetic_paper(rng);
    for (const auto& passage : strip_references(p).passages) {
      for (const auto& r : p.references) CHECK(passage.text != r.title);
    }
  }
}

TEST_CASE("full text includes references, corpus does not") {
  const Paper p = testkit::lima();
  const auto text = full_text(p);
  CHECK(text.find(p.title) != std::string::npos);
  CHECK(text.find(p.references[0].title) != std::string::npos);
}

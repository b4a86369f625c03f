#include <doctest.h>

#include <string>
#include <vector>

#include "policyflow/errors.hpp"
#include "policyflow/html.hpp"
#include "policyflow/segmenter.hpp"
#include "policyflow/text.hpp"
#include "test_support.hpp"

using namespace policyflow;

namespace {

const char* kGoldenFixtures[] = {"headings", "anchors", "bullets", "nested", "tables", "mixed"};

std::vector<std::string> all_lines(const std::vector<Segment>& segments) {
  std::vector<std::string> lines;
  for (const Segment& seg : segments) {
    for (const std::string& line : seg.raw_lines) lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("segmenter matches golden fixtures byte for byte") {
  for (const char* name : kGoldenFixtures) {
    CAPTURE(name);
    auto base = testsupport::fixture_dir() / "segmenter";
    std::string html = read_file(base / (std::string(name) + ".html"));
    std::string golden = read_file(base / (std::string(name) + ".golden"));
    std::vector<Segment> segments = segment_html(html);
    CHECK(segments_to_text(segments) == golden);
  }
}

TEST_CASE("segment indices are dense and in document order") {
  for (const char* name : kGoldenFixtures) {
    std::string html = read_file(testsupport::fixture_dir() / "segmenter" / (std::string(name) + ".html"));
    std::vector<Segment> segments = segment_html(html);
    for (std::size_t i = 0; i < segments.size(); ++i) {
      CHECK(segments[i].index == i);
      CHECK(!segments[i].text.empty());
      CHECK(segments[i].text == join(segments[i].raw_lines, "\n"));
    }
  }
}

TEST_CASE("re-segmenting rendered lines preserves line content") {
  for (const char* name : kGoldenFixtures) {
    CAPTURE(name);
    std::string html = read_file(testsupport::fixture_dir() / "segmenter" / (std::string(name) + ".html"));
    std::vector<Segment> first = segment_html(html);
    std::string rewrapped;
    for (const std::string& line : all_lines(first)) {
      rewrapped += "<p>" + testsupport::escape_html_text(line) + "</p>\n";
    }
    std::vector<Segment> second = segment_html(rewrapped);
    CHECK(all_lines(second) == all_lines(first));
  }
}

TEST_CASE("paragraph followed by list merges into a bullet group") {
  auto segments = segment_html(
      "<p>We collect:</p><ul><li>name</li><li>email address</li></ul>");
  REQUIRE(segments.size() == 1);
  CHECK(segments[0].kind == SegmentKind::bullet_group);
  CHECK(segments[0].text == "We collect:\n- name\n- email address");
}

TEST_CASE("nested list flattening joins parent and leaf text") {
  auto doc = parse_html("<ul><li>contact<ul><li>phone</li><li>email</li></ul></li></ul>");
  const HtmlNode* ul = doc->children.at(0).get();
  const HtmlNode* li = ul->children.at(0).get();
  auto leaves = flatten_nested_list(*li);
  CHECK(leaves == std::vector<std::string>{"contact: phone", "contact: email"});
}

TEST_CASE("boilerplate-only input raises EmptyDocument") {
  CHECK_THROWS_AS(segment_html("<script>x()</script><style>a{}</style>"), EmptyDocument);
  CHECK_THROWS_AS(segment_html("<head><title>t</title></head><footer>f</footer>"), EmptyDocument);
}

TEST_CASE("untokenizable input raises MalformedHtml") {
  CHECK_THROWS_AS(segment_html(""), MalformedHtml);
  CHECK_THROWS_AS(segment_html("   \n\t  "), MalformedHtml);
}

TEST_CASE("whitespace runs collapse inside every segment") {
  auto segments = segment_html("<p>a\n\n   b\tc</p>");
  REQUIRE(segments.size() == 1);
  CHECK(segments[0].text == "a b c");
}

TEST_CASE("table header detection prefers the first row with th") {
  auto segments = segment_html(
      "<table><tr><td>x</td><td>y</td></tr>"
      "<tr><th>A</th><th>B</th></tr>"
      "<tr><td>1</td><td>2</td></tr></table>");
  REQUIRE(segments.size() == 2);
  CHECK(segments[0].text == "_table_A|B\nx|y");
  CHECK(segments[1].text == "_table_A|B\n1|2");
  CHECK(segments[0].kind == SegmentKind::table_row);
  for (const auto& seg : segments) CHECK(seg.raw_lines.size() == 2);
}

TEST_CASE("neighbors returns adjacent segments and checks bounds") {
  auto segments = segment_html("<p>one</p><p>two</p><p>three</p>");
  REQUIRE(segments.size() == 3);
  Neighbors n0 = neighbors(segments, 0);
  CHECK(n0.prev == nullptr);
  CHECK(n0.next == &segments[1]);
  Neighbors n1 = neighbors(segments, 1);
  CHECK(n1.prev == &segments[0]);
  CHECK(n1.next == &segments[2]);
  Neighbors n2 = neighbors(segments, 2);
  CHECK(n2.prev == &segments[1]);
  CHECK(n2.next == nullptr);
  CHECK_THROWS_AS(neighbors(segments, 3), IndexOutOfRange);
}

TEST_CASE("text and json encodings carry the same content") {
  auto segments = segment_html("<h1>T</h1><p>We collect:</p><ul><li>a</li></ul>");
  std::string text = segments_to_text(segments);
  std::string ndjson = segments_to_ndjson(segments);
  CHECK(text ==
        "0\theading\t*T\n"
        "1\tbullet_group\tWe collect:\\n- a\n");
  CHECK(ndjson ==
        "{\"index\":0,\"kind\":\"heading\",\"text\":\"*T\"}\n"
        "{\"index\":1,\"kind\":\"bullet_group\",\"text\":\"We collect:\\n- a\"}\n");
}

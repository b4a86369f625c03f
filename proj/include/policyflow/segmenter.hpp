#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace policyflow {

struct PolicyDocument {
  std::string policy_id;
  std::string org_name;
  std::string html;
};

enum class SegmentKind { heading, paragraph, bullet_group, table_row };

std::string_view segment_kind_name(SegmentKind kind);

struct Segment {
  std::size_t index = 0;
  SegmentKind kind = SegmentKind::paragraph;
  std::string text;                    // lines joined with '\n', never empty
  std::vector<std::string> raw_lines;  // constituent lines in order
};

// Turns one HTML document into ordered text segments:
//   1. head/footer/style/script subtrees are dropped;
//   2. paragraphs (anchor text excluded), h1-h5 headings ("*" prefix) and
//      list items ("- " prefix, items containing anchors skipped, nested
//      lists flattened to "parent: child" leaf lines) are walked in document
//      order, skipping elements nested in a list or table;
//   3. each table emits one two-line segment per data row:
//      "_table_" + header cells joined "|", then the row cells joined "|";
//      the header row is the first row with a <th>, else the first row;
//   4. each run of consecutive "- " lines merges with the heading or
//      paragraph directly before it into a bullet_group; a leading orphan
//      run becomes its own bullet_group.
// Throws MalformedHtml on untokenizable input, EmptyDocument when nothing
// survives boilerplate removal.
std::vector<Segment> segment_html(std::string_view html);

inline std::vector<Segment> segment_document(const PolicyDocument& doc) {
  return segment_html(doc.html);
}

// Depth-first leaf lines of a (possibly nested) list item's sublists, each
// prefixed with the item's own text: "parent: child".
std::vector<std::string> flatten_nested_list(const struct HtmlNode& list_item);

// One record per line: "<index>\t<kind>\t<text>" with \, tab and newline
// escaped inside the text field.
std::string segments_to_text(const std::vector<Segment>& segments);

// Same content as newline-delimited JSON objects {index, kind, text}.
std::string segments_to_ndjson(const std::vector<Segment>& segments);

struct Neighbors {
  const Segment* prev = nullptr;  // nullptr at the ends
  const Segment* next = nullptr;
};

// Throws IndexOutOfRange when i is not a valid segment index.
Neighbors neighbors(const std::vector<Segment>& segments, std::size_t i);

}  // namespace policyflow

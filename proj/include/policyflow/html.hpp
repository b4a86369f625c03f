#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace policyflow {

// Minimal DOM for real-world policy pages. The parser is lenient: unknown
// and unclosed tags never fail, mismatched close tags are recovered, and
// script/style bodies are consumed as raw text.
struct HtmlNode {
  enum class Kind { document, element, text };

  Kind kind = Kind::document;
  std::string tag;   // elements only, lowercase
  std::string text;  // text nodes only, entities decoded
  HtmlNode* parent = nullptr;
  std::vector<std::unique_ptr<HtmlNode>> children;

  bool is_element(std::string_view name) const {
    return kind == Kind::element && tag == name;
  }
};

// Throws MalformedHtml when the input has no tokenizable content at all.
std::unique_ptr<HtmlNode> parse_html(std::string_view html);

// Concatenated text of the subtree in document order, whitespace collapsed.
// Subtrees whose element tag is listed in `exclude` contribute nothing.
std::string extract_text(const HtmlNode& node, const std::vector<std::string>& exclude = {});

bool has_descendant(const HtmlNode& node, std::string_view tag);

bool has_ancestor(const HtmlNode& node, std::string_view tag);

}  // namespace policyflow

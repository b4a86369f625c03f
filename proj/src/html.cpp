#include "policyflow/html.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "policyflow/errors.hpp"
#include "policyflow/text.hpp"

namespace policyflow {

namespace {

const std::set<std::string, std::less<>> kVoidElements = {
    "area", "base", "br",   "col",  "embed",  "hr",    "img",
    "input", "link", "meta", "param", "source", "track", "wbr"};

// Opening any of these implicitly closes an open <p>.
const std::set<std::string, std::less<>> kClosesParagraph = {
    "address", "article", "aside", "blockquote", "div", "dl", "fieldset",
    "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5",
    "h6", "header", "hr", "main", "nav", "ol", "p", "pre", "section",
    "table", "ul"};

const std::set<std::string, std::less<>> kRawText = {"script", "style"};

std::string decode_entities(std::string_view s) {
  static const std::map<std::string, std::string, std::less<>> kNamed = {
      {"amp", "&"},  {"lt", "<"},    {"gt", ">"},    {"quot", "\""},
      {"apos", "'"}, {"nbsp", " "},  {"ndash", "-"}, {"mdash", "-"},
      {"copy", "(c)"}, {"reg", "(r)"}, {"rsquo", "'"}, {"lsquo", "'"},
      {"rdquo", "\""}, {"ldquo", "\""}, {"hellip", "..."}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    std::size_t end = s.find(';', i + 1);
    if (end == std::string_view::npos || end - i > 12) {
      out.push_back('&');
      continue;
    }
    std::string_view body = s.substr(i + 1, end - i - 1);
    if (!body.empty() && body[0] == '#') {
      long code = 0;
      bool ok = false;
      if (body.size() > 1 && (body[1] == 'x' || body[1] == 'X')) {
        code = std::strtol(std::string(body.substr(2)).c_str(), nullptr, 16);
        ok = body.size() > 2;
      } else {
        code = std::strtol(std::string(body.substr(1)).c_str(), nullptr, 10);
        ok = body.size() > 1;
      }
      if (ok && code > 0 && code < 128) {
        out.push_back(static_cast<char>(code));
      } else if (ok) {
        out.push_back(' ');
      } else {
        out.push_back('&');
        continue;
      }
      i = end;
      continue;
    }
    if (auto it = kNamed.find(body); it != kNamed.end()) {
      out.append(it->second);
      i = end;
    } else {
      out.push_back('&');
    }
  }
  return out;
}

struct Token {
  enum class Kind { open, close, text };
  Kind kind;
  std::string tag;        // open/close
  bool self_closing = false;
  std::string text;       // text tokens, raw
};

bool is_tag_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

std::vector<Token> tokenize(std::string_view html) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = html.size();
  auto emit_text = [&tokens](std::string_view raw) {
    if (!raw.empty()) tokens.push_back({Token::Kind::text, "", false, std::string(raw)});
  };
  while (i < n) {
    if (html[i] != '<') {
      std::size_t lt = html.find('<', i);
      if (lt == std::string_view::npos) lt = n;
      emit_text(html.substr(i, lt - i));
      i = lt;
      continue;
    }
    // Comments, doctype, CDATA.
    if (html.compare(i, 4, "<!--") == 0) {
      std::size_t end = html.find("-->", i + 4);
      i = (end == std::string_view::npos) ? n : end + 3;
      continue;
    }
    if (i + 1 < n && (html[i + 1] == '!' || html[i + 1] == '?')) {
      std::size_t end = html.find('>', i + 1);
      i = (end == std::string_view::npos) ? n : end + 1;
      continue;
    }
    bool closing = i + 1 < n && html[i + 1] == '/';
    std::size_t name_start = i + (closing ? 2 : 1);
    if (name_start >= n || !is_tag_name_start(html[name_start])) {
      // Stray '<' is literal text.
      emit_text(html.substr(i, 1));
      ++i;
      continue;
    }
    std::size_t p = name_start;
    while (p < n && (std::isalnum(static_cast<unsigned char>(html[p])) != 0 || html[p] == '-')) ++p;
    std::string tag = to_lower(html.substr(name_start, p - name_start));
    // Scan to '>' while honoring quoted attribute values.
    char quote = 0;
    bool self_closing = false;
    while (p < n) {
      char c = html[p];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        break;
      }
      ++p;
    }
    self_closing = p > name_start && html[p - 1] == '/';
    i = (p < n) ? p + 1 : n;
    if (closing) {
      tokens.push_back({Token::Kind::close, tag, false, ""});
    } else {
      tokens.push_back({Token::Kind::open, tag, self_closing, ""});
      if (!self_closing && kRawText.count(tag)) {
        // Raw text until the matching close tag, case-insensitive.
        std::string close_marker = "</" + tag;
        std::size_t end = i;
        while (end < n) {
          std::size_t cand = html.find('<', end);
          if (cand == std::string_view::npos) {
            end = n;
            break;
          }
          if (cand + close_marker.size() <= n &&
              iequals(html.substr(cand, close_marker.size()), close_marker)) {
            end = cand;
            break;
          }
          end = cand + 1;
        }
        emit_text(html.substr(i, end - i));
        if (end < n) {
          std::size_t gt = html.find('>', end);
          i = (gt == std::string_view::npos) ? n : gt + 1;
          tokens.push_back({Token::Kind::close, tag, false, ""});
        } else {
          i = n;
        }
      }
    }
  }
  return tokens;
}

HtmlNode* append_element(HtmlNode* parent, std::string tag) {
  auto node = std::make_unique<HtmlNode>();
  node->kind = HtmlNode::Kind::element;
  node->tag = std::move(tag);
  node->parent = parent;
  parent->children.push_back(std::move(node));
  return parent->children.back().get();
}

void append_text(HtmlNode* parent, std::string text) {
  auto node = std::make_unique<HtmlNode>();
  node->kind = HtmlNode::Kind::text;
  node->text = std::move(text);
  node->parent = parent;
  parent->children.push_back(std::move(node));
}

// Implicit close set per newly opened tag: opening `key` closes an open
// element in `value` when it is the nearest open container.
bool implicitly_closes(const std::string& open_tag, const std::string& new_tag) {
  if (open_tag == "p") return kClosesParagraph.count(new_tag) > 0;
  if (open_tag == "li") return new_tag == "li";
  if (open_tag == "dt" || open_tag == "dd") return new_tag == "dt" || new_tag == "dd";
  if (open_tag == "td" || open_tag == "th") {
    return new_tag == "td" || new_tag == "th" || new_tag == "tr";
  }
  if (open_tag == "tr") return new_tag == "tr";
  return false;
}

}  // namespace

std::unique_ptr<HtmlNode> parse_html(std::string_view html) {
  if (trim(html).empty()) {
    throw MalformedHtml("input contains no tokenizable content");
  }
  std::vector<Token> tokens = tokenize(html);
  auto doc = std::make_unique<HtmlNode>();
  doc->kind = HtmlNode::Kind::document;
  HtmlNode* current = doc.get();

  auto close_one = [&current]() {
    if (current->parent != nullptr) current = current->parent;
  };

  for (Token& tok : tokens) {
    switch (tok.kind) {
      case Token::Kind::text: {
        std::string decoded = decode_entities(tok.text);
        if (!trim(decoded).empty()) append_text(current, std::move(decoded));
        break;
      }
      case Token::Kind::open: {
        while (current->kind == HtmlNode::Kind::element &&
               implicitly_closes(current->tag, tok.tag)) {
          close_one();
        }
        if (kVoidElements.count(tok.tag) || tok.self_closing) {
          append_element(current, tok.tag);
        } else {
          current = append_element(current, tok.tag);
        }
        break;
      }
      case Token::Kind::close: {
        if (kVoidElements.count(tok.tag)) break;
        // Pop to the nearest matching open element; ignore unmatched closes.
        HtmlNode* probe = current;
        while (probe->kind == HtmlNode::Kind::element && probe->tag != tok.tag) {
          probe = probe->parent;
        }
        if (probe->kind == HtmlNode::Kind::element) {
          current = probe->parent != nullptr ? probe->parent : probe;
        }
        break;
      }
    }
  }
  return doc;
}

std::string extract_text(const HtmlNode& node, const std::vector<std::string>& exclude) {
  std::string raw;
  auto walk = [&raw, &exclude](const HtmlNode& n, auto&& self) -> void {
    if (n.kind == HtmlNode::Kind::text) {
      raw += n.text;
      raw += ' ';
      return;
    }
    if (n.kind == HtmlNode::Kind::element &&
        std::find(exclude.begin(), exclude.end(), n.tag) != exclude.end()) {
      return;
    }
    for (const auto& child : n.children) self(*child, self);
  };
  walk(node, walk);
  return collapse_whitespace(raw);
}

bool has_descendant(const HtmlNode& node, std::string_view tag) {
  for (const auto& child : node.children) {
    if (child->is_element(tag) || has_descendant(*child, tag)) return true;
  }
  return false;
}

bool has_ancestor(const HtmlNode& node, std::string_view tag) {
  for (const HtmlNode* p = node.parent; p != nullptr; p = p->parent) {
    if (p->is_element(tag)) return true;
  }
  return false;
}

}  // namespace policyflow

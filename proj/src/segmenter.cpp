#include "policyflow/segmenter.hpp"

#include <set>

#include <json.hpp>

#include "policyflow/errors.hpp"
#include "policyflow/html.hpp"
#include "policyflow/text.hpp"

namespace policyflow {

std::string_view segment_kind_name(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::heading: return "heading";
    case SegmentKind::paragraph: return "paragraph";
    case SegmentKind::bullet_group: return "bullet_group";
    case SegmentKind::table_row: return "table_row";
  }
  return "paragraph";
}

namespace {

const std::set<std::string, std::less<>> kDroppedSubtrees = {"head", "footer", "style",
                                                             "script"};
const std::set<std::string, std::less<>> kHeadings = {"h1", "h2", "h3", "h4", "h5"};

bool is_list(const HtmlNode& node) {
  return node.is_element("ul") || node.is_element("ol");
}

void prune_boilerplate(HtmlNode& node) {
  auto& kids = node.children;
  for (std::size_t i = 0; i < kids.size();) {
    if (kids[i]->kind == HtmlNode::Kind::element && kDroppedSubtrees.count(kids[i]->tag)) {
      kids.erase(kids.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      prune_boilerplate(*kids[i]);
      ++i;
    }
  }
}

// One line of intermediate output; table_row items carry both lines in text.
struct Line {
  enum class Kind { heading, paragraph, bullet, table_row };
  Kind kind;
  std::string text;
};

void emit_table(const HtmlNode& table, std::vector<Line>& out) {
  std::vector<const HtmlNode*> rows;
  auto collect_rows = [&rows](const HtmlNode& n, auto&& self) -> void {
    for (const auto& child : n.children) {
      if (child->is_element("table")) continue;  // nested tables are not re-segmented
      if (child->is_element("tr")) rows.push_back(child.get());
      self(*child, self);
    }
  };
  collect_rows(table, collect_rows);
  if (rows.empty()) return;

  auto row_cells = [](const HtmlNode& tr) {
    std::vector<std::string> cells;
    for (const auto& child : tr.children) {
      if (child->is_element("td") || child->is_element("th")) {
        cells.push_back(extract_text(*child));
      }
    }
    return cells;
  };
  auto row_has_th = [](const HtmlNode& tr) {
    for (const auto& child : tr.children) {
      if (child->is_element("th")) return true;
    }
    return false;
  };

  const HtmlNode* header = rows.front();
  for (const HtmlNode* row : rows) {
    if (row_has_th(*row)) {
      header = row;
      break;
    }
  }
  std::string header_line = "_table_" + join(row_cells(*header), "|");
  for (const HtmlNode* row : rows) {
    if (row == header) continue;
    std::vector<std::string> cells = row_cells(*row);
    bool all_empty = true;
    for (const auto& c : cells) {
      if (!c.empty()) all_empty = false;
    }
    if (cells.empty() || all_empty) continue;
    out.push_back({Line::Kind::table_row, header_line + "\n" + join(cells, "|")});
  }
}

void process_element(const HtmlNode& el, std::vector<Line>& out);

void process_list(const HtmlNode& list, std::vector<Line>& out) {
  for (const auto& child : list.children) {
    if (child->kind == HtmlNode::Kind::element) process_element(*child, out);
  }
}

void process_list_item(const HtmlNode& li, std::vector<Line>& out) {
  if (has_descendant(li, "a")) return;
  if (has_descendant(li, "ul") || has_descendant(li, "ol")) {
    for (const std::string& leaf : flatten_nested_list(li)) {
      out.push_back({Line::Kind::bullet, "- " + leaf});
    }
    return;
  }
  std::string text = extract_text(li);
  if (!text.empty()) out.push_back({Line::Kind::bullet, "- " + text});
}

void process_element(const HtmlNode& el, std::vector<Line>& out) {
  if (el.is_element("p")) {
    std::string text = extract_text(el, {"a"});
    if (!text.empty()) out.push_back({Line::Kind::paragraph, text});
  } else if (el.kind == HtmlNode::Kind::element && kHeadings.count(el.tag)) {
    std::string text = extract_text(el);
    if (!text.empty()) out.push_back({Line::Kind::heading, "*" + text});
  } else if (el.is_element("li")) {
    process_list_item(el, out);
  } else if (is_list(el)) {
    process_list(el, out);
  }
}

void walk(const HtmlNode& node, std::vector<Line>& out) {
  for (const auto& child : node.children) {
    if (child->kind != HtmlNode::Kind::element) continue;
    if (child->is_element("table")) {
      emit_table(*child, out);
      continue;
    }
    const bool handled = child->is_element("p") || kHeadings.count(child->tag) > 0 ||
                         child->is_element("li") || is_list(*child);
    if (handled) {
      process_element(*child, out);
      continue;  // processing consumed the subtree
    }
    walk(*child, out);
  }
}

Segment make_segment(SegmentKind kind, std::vector<std::string> lines) {
  Segment seg;
  seg.kind = kind;
  seg.raw_lines = std::move(lines);
  seg.text = join(seg.raw_lines, "\n");
  return seg;
}

}  // namespace

std::vector<std::string> flatten_nested_list(const HtmlNode& list_item) {
  std::string own = extract_text(list_item, {"ul", "ol"});

  std::vector<const HtmlNode*> sublists;
  auto find_sublists = [&sublists](const HtmlNode& n, auto&& self) -> void {
    for (const auto& child : n.children) {
      if (is_list(*child)) {
        sublists.push_back(child.get());
      } else if (child->kind == HtmlNode::Kind::element && !child->is_element("li")) {
        self(*child, self);
      }
    }
  };
  find_sublists(list_item, find_sublists);

  std::vector<std::string> leaves;
  auto add = [&own, &leaves](const std::string& leaf) {
    leaves.push_back(own.empty() ? leaf : own + ": " + leaf);
  };
  for (const HtmlNode* list : sublists) {
    for (const auto& child : list->children) {
      if (!child->is_element("li")) continue;
      if (has_descendant(*child, "a")) continue;
      if (has_descendant(*child, "ul") || has_descendant(*child, "ol")) {
        for (const std::string& leaf : flatten_nested_list(*child)) add(leaf);
      } else {
        std::string text = extract_text(*child);
        if (!text.empty()) add(text);
      }
    }
  }
  return leaves;
}

std::vector<Segment> segment_html(std::string_view html) {
  std::unique_ptr<HtmlNode> doc = parse_html(html);
  prune_boilerplate(*doc);

  std::vector<Line> lines;
  walk(*doc, lines);

  std::vector<Segment> segments;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (lines[i].kind == Line::Kind::bullet) {
      std::vector<std::string> bullets;
      while (i < lines.size() && lines[i].kind == Line::Kind::bullet) {
        bullets.push_back(std::move(lines[i].text));
        ++i;
      }
      // A bullet run attaches to the heading or paragraph directly before it.
      if (!segments.empty() && (segments.back().kind == SegmentKind::heading ||
                                segments.back().kind == SegmentKind::paragraph)) {
        Segment& host = segments.back();
        host.kind = SegmentKind::bullet_group;
        for (std::string& b : bullets) host.raw_lines.push_back(std::move(b));
        host.text = join(host.raw_lines, "\n");
      } else {
        segments.push_back(make_segment(SegmentKind::bullet_group, std::move(bullets)));
      }
      continue;
    }
    const Line& line = lines[i];
    switch (line.kind) {
      case Line::Kind::heading:
        segments.push_back(make_segment(SegmentKind::heading, {line.text}));
        break;
      case Line::Kind::paragraph:
        segments.push_back(make_segment(SegmentKind::paragraph, {line.text}));
        break;
      case Line::Kind::table_row:
        segments.push_back(make_segment(SegmentKind::table_row, split(line.text, '\n')));
        break;
      case Line::Kind::bullet:
        break;  // unreachable, handled above
    }
    ++i;
  }

  if (segments.empty()) throw EmptyDocument("no segments after boilerplate removal");
  for (std::size_t idx = 0; idx < segments.size(); ++idx) segments[idx].index = idx;
  return segments;
}

std::string segments_to_text(const std::vector<Segment>& segments) {
  std::string out;
  for (const Segment& seg : segments) {
    out += std::to_string(seg.index);
    out += '\t';
    out += segment_kind_name(seg.kind);
    out += '\t';
    out += escape_field(seg.text);
    out += '\n';
  }
  return out;
}

std::string segments_to_ndjson(const std::vector<Segment>& segments) {
  std::string out;
  for (const Segment& seg : segments) {
    nlohmann::ordered_json record;
    record["index"] = seg.index;
    record["kind"] = segment_kind_name(seg.kind);
    record["text"] = seg.text;
    out += record.dump();
    out += '\n';
  }
  return out;
}

Neighbors neighbors(const std::vector<Segment>& segments, std::size_t i) {
  if (i >= segments.size()) {
    throw IndexOutOfRange("segment index " + std::to_string(i) + " of " +
                          std::to_string(segments.size()));
  }
  Neighbors n;
  if (i > 0) n.prev = &segments[i - 1];
  if (i + 1 < segments.size()) n.next = &segments[i + 1];
  return n;
}

}  // namespace policyflow

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "remake/common.hpp"

namespace remake {

enum class NodeKind { Section, KeyValue, OrderedList, Bullet, Text, StatusLine };

// A node of the virtual document tree. Only Section and OrderedList carry
// children; the children of an OrderedList are leaves whose `value` becomes
// the item text.
struct DocNode {
    NodeKind kind = NodeKind::Text;
    std::string label;
    std::string value;
    std::vector<DocNode> children;

    static DocNode section(std::string label, std::vector<DocNode> children = {});
    static DocNode key_value(std::string label, std::string value);
    static DocNode ordered_list(std::vector<DocNode> items);
    static DocNode bullet(std::string value);
    static DocNode text(std::string value);
    static DocNode status_line(std::string label, std::string value);

    bool operator==(const DocNode&) const = default;
};

// Throws StructuralError if any node in the tree violates the kind rules.
void validate(const DocNode& root);

// Canonical Markdown:
//   Section at depth d   -> d '#', space, label; children at depth d + 1
//   KeyValue             -> "- label: value"
//   Bullet               -> "- value"
//   OrderedList item i   -> "i. value" (1-based)
//   Text                 -> value
//   StatusLine           -> "label: value"
// Every Section that is not the first line is preceded by exactly one blank
// line, so sibling sections are separated by one blank line. Output ends with
// exactly one newline.
std::string render_markdown(const DocNode& root, int depth = 1);

// Returns a copy of `root` with the unique Section labelled `label` replaced.
// Throws AmbiguityError on zero or several matches.
DocNode replace_section(const DocNode& root, std::string_view label, const DocNode& replacement);

const DocNode* find_section(const DocNode& root, std::string_view label);
std::size_t count_nodes(const DocNode& root);

// Restricted inverse of render_markdown: recovers the tree from the canonical
// layout. Ambiguous inputs resolve as follows: "- a: b" is a KeyValue, "a: b"
// a StatusLine, "N. x" an OrderedList item; everything else is Text.
// Consecutive ordered items merge into one list.
DocNode parse_layout(std::string_view markdown);

}  // namespace remake

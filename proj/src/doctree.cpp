#include "remake/doctree.hpp"

#include <algorithm>
#include <cctype>

namespace remake {

DocNode DocNode::section(std::string label, std::vector<DocNode> children) {
    return {NodeKind::Section, std::move(label), {}, std::move(children)};
}
DocNode DocNode::key_value(std::string label, std::string value) {
    return {NodeKind::KeyValue, std::move(label), std::move(value), {}};
}
DocNode DocNode::ordered_list(std::vector<DocNode> items) {
    return {NodeKind::OrderedList, {}, {}, std::move(items)};
}
DocNode DocNode::bullet(std::string value) { return {NodeKind::Bullet, {}, std::move(value), {}}; }
DocNode DocNode::text(std::string value) { return {NodeKind::Text, {}, std::move(value), {}}; }
DocNode DocNode::status_line(std::string label, std::string value) {
    return {NodeKind::StatusLine, std::move(label), std::move(value), {}};
}

namespace {

bool single_line(std::string_view s) { return s.find_first_of("\r\n") == std::string_view::npos; }

void check_node(const DocNode& n, bool in_list) {
    if (!single_line(n.label) || !single_line(n.value)) {
        throw StructuralError("node text must be a single line: '" + n.label + "'");
    }
    switch (n.kind) {
        case NodeKind::Section:
            if (in_list) throw StructuralError("section inside an ordered list");
            if (n.label.empty()) throw StructuralError("section without a label");
            for (const auto& c : n.children) check_node(c, false);
            return;
        case NodeKind::OrderedList:
            if (in_list) throw StructuralError("nested ordered list");
            for (const auto& c : n.children) check_node(c, true);
            return;
        case NodeKind::KeyValue:
            if (n.label.empty()) throw StructuralError("key-value without a label");
            [[fallthrough]];
        case NodeKind::Bullet:
        case NodeKind::Text:
        case NodeKind::StatusLine:
            if (!n.children.empty()) {
                throw StructuralError("leaf node '" + n.label + "' has children");
            }
            return;
    }
}

void render(const DocNode& n, int depth, std::string& out) {
    switch (n.kind) {
        case NodeKind::Section:
            if (!out.empty()) out += '\n';
            out.append(static_cast<std::size_t>(depth), '#');
            out += ' ';
            out += n.label;
            out += '\n';
            for (const auto& c : n.children) render(c, depth + 1, out);
            return;
        case NodeKind::KeyValue:
            out += "- " + n.label + ": " + n.value + '\n';
            return;
        case NodeKind::Bullet:
            out += "- " + n.value + '\n';
            return;
        case NodeKind::Text:
            out += n.value + '\n';
            return;
        case NodeKind::StatusLine:
            out += n.label + ": " + n.value + '\n';
            return;
        case NodeKind::OrderedList: {
            std::size_t i = 1;
            for (const auto& c : n.children) {
                out += std::to_string(i++) + ". " + c.value + '\n';
            }
            return;
        }
    }
}

std::size_t count_matches(const DocNode& n, std::string_view label) {
    std::size_t k = (n.kind == NodeKind::Section && n.label == label) ? 1 : 0;
    for (const auto& c : n.children) k += count_matches(c, label);
    return k;
}

DocNode replace_in(const DocNode& n, std::string_view label, const DocNode& replacement) {
    if (n.kind == NodeKind::Section && n.label == label) return replacement;
    DocNode copy{n.kind, n.label, n.value, {}};
    copy.children.reserve(n.children.size());
    for (const auto& c : n.children) copy.children.push_back(replace_in(c, label, replacement));
    return copy;
}

}  // namespace

void validate(const DocNode& root) { check_node(root, false); }

std::string render_markdown(const DocNode& root, int depth) {
    validate(root);
    std::string out;
    render(root, std::max(depth, 1), out);
    while (out.size() > 1 && out[out.size() - 1] == '\n' && out[out.size() - 2] == '\n') {
        out.pop_back();
    }
    if (out.empty() || out.back() != '\n') out += '\n';
    return out;
}

DocNode replace_section(const DocNode& root, std::string_view label, const DocNode& replacement) {
    std::size_t matches = count_matches(root, label);
    if (matches != 1) {
        throw AmbiguityError("expected exactly one section '" + std::string(label) + "', found " +
                             std::to_string(matches));
    }
    return replace_in(root, label, replacement);
}

const DocNode* find_section(const DocNode& root, std::string_view label) {
    if (root.kind == NodeKind::Section && root.label == label) return &root;
    for (const auto& c : root.children) {
        if (const DocNode* hit = find_section(c, label)) return hit;
    }
    return nullptr;
}

std::size_t count_nodes(const DocNode& root) {
    std::size_t k = 1;
    for (const auto& c : root.children) k += count_nodes(c);
    return k;
}

namespace {

// Returns the digit count of an "N. " prefix, or 0.
std::size_t ordered_prefix(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == 0 || line.substr(i, 2) != ". ") return 0;
    return i;
}

}  // namespace

DocNode parse_layout(std::string_view markdown) {
    DocNode root = DocNode::section("_root_");
    // Stack of (depth, section) pointers; depth 0 is the synthetic root.
    std::vector<std::pair<int, DocNode*>> stack{{0, &root}};

    std::size_t pos = 0;
    while (pos < markdown.size()) {
        std::size_t nl = markdown.find('\n', pos);
        if (nl == std::string_view::npos) nl = markdown.size();
        std::string_view line = markdown.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;

        std::size_t hashes = 0;
        while (hashes < line.size() && line[hashes] == '#') ++hashes;
        if (hashes > 0 && hashes < line.size() && line[hashes] == ' ') {
            int depth = static_cast<int>(hashes);
            while (stack.size() > 1 && stack.back().first >= depth) stack.pop_back();
            DocNode* parent = stack.back().second;
            parent->children.push_back(DocNode::section(std::string(line.substr(hashes + 1))));
            stack.emplace_back(depth, &parent->children.back());
            continue;
        }

        DocNode* parent = stack.back().second;
        if (std::size_t digits = ordered_prefix(line)) {
            std::string item(line.substr(digits + 2));
            if (parent->children.empty() || parent->children.back().kind != NodeKind::OrderedList) {
                parent->children.push_back(DocNode::ordered_list({}));
            }
            parent->children.back().children.push_back(DocNode::text(std::move(item)));
            continue;
        }
        if (line.starts_with("- ")) {
            std::string_view body = line.substr(2);
            std::size_t colon = body.find(": ");
            if (colon != std::string_view::npos && colon > 0) {
                parent->children.push_back(DocNode::key_value(std::string(body.substr(0, colon)),
                                                              std::string(body.substr(colon + 2))));
            } else {
                parent->children.push_back(DocNode::bullet(std::string(body)));
            }
            continue;
        }
        std::size_t colon = line.find(": ");
        if (colon != std::string_view::npos && colon > 0) {
            parent->children.push_back(DocNode::status_line(std::string(line.substr(0, colon)),
                                                            std::string(line.substr(colon + 2))));
            continue;
        }
        parent->children.push_back(DocNode::text(std::string(line)));
    }

    if (root.children.size() == 1 && root.children.front().kind == NodeKind::Section) {
        return std::move(root.children.front());
    }
    return root;
}

}  // namespace remake

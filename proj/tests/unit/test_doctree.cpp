#include <doctest.h>

#include <random>

#include "remake/doctree.hpp"

using namespace remake;

namespace {

std::string random_word(std::mt19937& rng) {
    static const char* words[] = {"food", "indian", "area", "north", "cocum", "19:30", "Results", "x y", "a-b"};
    return words[rng() % std::size(words)];
}

// Random well-formed tree; sections nest up to `depth` levels.
DocNode random_tree(std::mt19937& rng, int depth) {
    // The layout is only unambiguous when leaves precede subsections.
    std::vector<DocNode> children;
    std::vector<DocNode> subsections;
    int n = static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
        switch (rng() % 6) {
            case 0:
                if (depth > 0) {
                    subsections.push_back(random_tree(rng, depth - 1));
                    break;
                }
                [[fallthrough]];
            case 1: children.push_back(DocNode::key_value(random_word(rng), random_word(rng))); break;
            case 2: {
                if (!children.empty() && children.back().kind == NodeKind::OrderedList) break;
                std::vector<DocNode> items;
                for (int k = 0, m = 1 + static_cast<int>(rng() % 3); k < m; ++k)
                    items.push_back(DocNode::text(random_word(rng) + " " + random_word(rng)));
                children.push_back(DocNode::ordered_list(std::move(items)));
                break;
            }
            case 3: children.push_back(DocNode::bullet(random_word(rng))); break;
            case 4: children.push_back(DocNode::text("plain " + random_word(rng))); break;
            default: children.push_back(DocNode::status_line("Status", random_word(rng))); break;
        }
    }
    for (auto& sub : subsections) children.push_back(std::move(sub));
    return DocNode::section("S" + std::to_string(rng() % 1000), std::move(children));
}

// Labels made unique so replace_section always has exactly one target.
void relabel(DocNode& n, int& counter) {
    if (n.kind == NodeKind::Section) n.label = "Section " + std::to_string(counter++);
    for (auto& c : n.children) relabel(c, counter);
}

void collect_sections(const DocNode& n, std::vector<const DocNode*>& out) {
    if (n.kind == NodeKind::Section) out.push_back(&n);
    for (const auto& c : n.children) collect_sections(c, out);
}

DocNode three_sections() {
    return DocNode::section("MultiWOZ Interface",
                            {DocNode::section("Chat", {DocNode::bullet("user: hi")}),
                             DocNode::section("Search: restaurant", {DocNode::key_value("food", "indian")}),
                             DocNode::section("Booking", {DocNode::status_line("Status", "none")})});
}

}  // namespace

TEST_CASE("render_markdown follows the layout rules") {
    CHECK(render_markdown(DocNode::section("Search: restaurant", {DocNode::key_value("food", "indian")}), 2) ==
          "## Search: restaurant\n- food: indian\n");
    CHECK(render_markdown(DocNode::section("Booking"), 2) == "## Booking\n");
    CHECK(render_markdown(DocNode::section("T", {DocNode::ordered_list({DocNode::text("a"), DocNode::text("b")}),
                                                 DocNode::status_line("Results", "2 found"),
                                                 DocNode::bullet("x"), DocNode::text("raw")})) ==
          "# T\n1. a\n2. b\nResults: 2 found\n- x\nraw\n");
    CHECK(render_markdown(three_sections()) ==
          "# MultiWOZ Interface\n\n## Chat\n- user: hi\n\n## Search: restaurant\n- food: indian\n\n"
          "## Booking\nStatus: none\n");
}

TEST_CASE("malformed trees are structural errors") {
    DocNode leaf = DocNode::key_value("food", "indian");
    leaf.children.push_back(DocNode::text("x"));
    CHECK_THROWS_AS(validate(leaf), StructuralError);
    CHECK_THROWS_AS(render_markdown(DocNode::section("T", {leaf})), StructuralError);
    CHECK_THROWS_AS(render_markdown(DocNode::section("")), StructuralError);
    CHECK_THROWS_AS(render_markdown(DocNode::section("T", {DocNode::key_value("", "v")})), StructuralError);
    CHECK_THROWS_AS(render_markdown(DocNode::section("T", {DocNode::text("two\nlines")})), StructuralError);
}

TEST_CASE("replace_section keeps everything else") {
    DocNode tree = three_sections();
    DocNode booking = DocNode::section("Booking", {DocNode::key_value("day", "saturday"),
                                                   DocNode::status_line("Status", "success")});
    DocNode replaced = replace_section(tree, "Booking", booking);
    REQUIRE(replaced.children.size() == 3);
    CHECK(replaced.children[0] == tree.children[0]);
    CHECK(replaced.children[1] == tree.children[1]);
    CHECK(replaced.children[2] == booking);

    DocNode direct = tree;
    direct.children[2] = booking;
    CHECK(render_markdown(replaced) == render_markdown(direct));

    CHECK_THROWS_AS(replace_section(tree, "Taxi", booking), AmbiguityError);
    DocNode twice = tree;
    twice.children.push_back(DocNode::section("Chat"));
    CHECK_THROWS_AS(replace_section(twice, "Chat", booking), AmbiguityError);
}

TEST_CASE("property: rendering is pure and the layout parser recovers the tree") {
    std::mt19937 rng(7);
    for (int i = 0; i < 300; ++i) {
        DocNode tree = random_tree(rng, 3);
        std::string a = render_markdown(tree);
        CHECK(a == render_markdown(DocNode(tree)));
        CHECK(a.ends_with("\n"));
        CHECK_FALSE(a.ends_with("\n\n"));
        CHECK(parse_layout(a) == tree);
    }
}

TEST_CASE("property: replace_section preserves the count of the other nodes") {
    std::mt19937 rng(11);
    for (int i = 0; i < 200; ++i) {
        DocNode tree = random_tree(rng, 3);
        int counter = 0;
        relabel(tree, counter);
        std::vector<const DocNode*> sections;
        collect_sections(tree, sections);
        const DocNode* target = sections[rng() % sections.size()];
        if (target == &tree) continue;
        DocNode replacement = random_tree(rng, 1);
        replacement.label = target->label;
        int c2 = 1000;
        for (auto& ch : replacement.children) relabel(ch, c2);
        std::size_t before = count_nodes(tree) - count_nodes(*target);
        DocNode out = replace_section(tree, target->label, replacement);
        CHECK(count_nodes(out) - count_nodes(replacement) == before);
    }
}

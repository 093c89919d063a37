#include <doctest.h>

#include <algorithm>

#include "radiation/error.hpp"
#include "radiation/uiminer.hpp"
#include "radiation/xmlreader.hpp"
#include "test_support.hpp"

using namespace radiation;
using testsupport::temp_dir;
using testsupport::write_file;

TEST_CASE("xml reader handles attributes, entities and nesting") {
    const auto root = parse_xml(
        "<?xml version=\"1.0\"?><resources>"
        "<string name=\"a\">Tom &amp; Jerry</string>"
        "<string name=\"b\">Hello <b>bold</b> world</string>"
        "<!-- comment --><string name=\"c\"><![CDATA[x < y]]></string>"
        "</resources>",
        "test");
    REQUIRE(root->tag == "resources");
    std::vector<const XmlNode*> strings;
    for (const auto& child : root->children)
        if (!child->is_text()) strings.push_back(child.get());
    REQUIRE(strings.size() == 3);
    CHECK(strings[0]->inner_text() == "Tom & Jerry");
    CHECK(strings[1]->inner_text() == "Hello bold world");
    CHECK(strings[2]->inner_text() == "x < y");
}

TEST_CASE("xml reader rejects malformed documents") {
    CHECK_THROWS_AS(parse_xml("<a><b></a>", "test"), ValidationError);
    CHECK_THROWS_AS(parse_xml("<a attr=oops/>", "test"), ValidationError);
    CHECK_THROWS_AS(parse_xml("no markup at all", "test"), ValidationError);
}

TEST_CASE("parse_strings resolves the mic label example") {
    const auto dir = temp_dir("strings");
    write_file(dir / "strings.xml",
               "<resources><string name=\"btn_mic_label\">Start Listening</string>"
               "</resources>");
    const StringTable table = parse_strings(dir / "strings.xml");
    REQUIRE(table.count("btn_mic_label") == 1);
    CHECK(table.at("btn_mic_label") == "Start Listening");
}

TEST_CASE("parse_strings on empty resources") {
    const auto dir = temp_dir("strings_empty");
    write_file(dir / "strings.xml", "<resources/>");
    CHECK(parse_strings(dir / "strings.xml").empty());
}

TEST_CASE("parse_strings keeps the last duplicate and warns") {
    const auto dir = temp_dir("strings_dup");
    write_file(dir / "strings.xml",
               "<resources><string name=\"k\">first</string>"
               "<string name=\"k\">second</string></resources>");
    std::vector<std::string> warnings;
    const StringTable table = parse_strings(dir / "strings.xml", &warnings);
    CHECK(table.at("k") == "second");
    CHECK(warnings.size() == 1);
}

TEST_CASE("parse_strings is fatal on malformed xml") {
    const auto dir = temp_dir("strings_bad");
    write_file(dir / "strings.xml", "<resources><string name=\"k\">oops</resources>");
    CHECK_THROWS_AS(parse_strings(dir / "strings.xml"), ValidationError);
}

namespace {

std::filesystem::path make_tree(const std::string& tag, const std::string& layout_xml,
                                const std::string& strings_xml = "") {
    const auto root = temp_dir(tag);
    write_file(root / "res" / "layout" / "main.xml", layout_xml);
    if (!strings_xml.empty()) write_file(root / "res" / "values" / "strings.xml", strings_xml);
    return root;
}

} // namespace

TEST_CASE("parse_layouts mines the mic button") {
    const auto root = make_tree(
        "mic",
        "<LinearLayout xmlns:android=\"http://x\">"
        "<Button android:id=\"@+id/btn_mic\" android:text=\"@string/btn_mic_label\" "
        "android:src=\"@drawable/mic\"/></LinearLayout>",
        "<resources><string name=\"btn_mic_label\">Start Listening</string></resources>");
    const StringTable strings = parse_strings(root / "res" / "values" / "strings.xml");
    const auto elements = parse_layouts(root, strings);
    REQUIRE(elements.size() == 1);
    CHECK(elements[0].element_type == "Button");
    CHECK(elements[0].resource_id == "btn_mic");
    CHECK(elements[0].label == "Start Listening");
    CHECK(elements[0].icon == "mic");
    CHECK(element_key(elements[0]) == "id:btn_mic");
}

TEST_CASE("container-only layouts yield no elements") {
    const auto root = make_tree(
        "containers",
        "<LinearLayout><FrameLayout><RelativeLayout/></FrameLayout></LinearLayout>");
    CHECK(parse_layouts(root, {}).empty());
}

TEST_CASE("unresolvable string reference leaves the label absent") {
    const auto root = make_tree(
        "unresolved",
        "<LinearLayout><Button android:id=\"@+id/b\" android:text=\"@string/missing\"/>"
        "</LinearLayout>");
    std::vector<std::string> warnings;
    const auto elements = parse_layouts(root, {}, 0, {}, &warnings);
    REQUIRE(elements.size() == 1);
    CHECK(elements[0].label.empty());
    CHECK(!warnings.empty());
}

TEST_CASE("literal text is kept verbatim") {
    const auto root = make_tree(
        "literal", "<FrameLayout><TextView android:text=\"Hello there\"/></FrameLayout>");
    const auto elements = parse_layouts(root, {});
    REQUIRE(elements.size() == 1);
    CHECK(elements[0].label == "Hello there");
    CHECK(elements[0].resource_id.empty());
    CHECK(element_key(elements[0]) == "tl:TextView|hello there");
}

TEST_CASE("unparseable layout file is skipped with a warning") {
    const auto root = make_tree("broken", "<LinearLayout><Button</LinearLayout>");
    write_file(root / "res" / "layout" / "ok.xml",
               "<FrameLayout><Button android:id=\"@+id/fine\"/></FrameLayout>");
    std::vector<std::string> warnings;
    const auto elements = parse_layouts(root, {}, 0, {}, &warnings);
    REQUIRE(elements.size() == 1);
    CHECK(elements[0].resource_id == "fine");
    CHECK(!warnings.empty());
}

TEST_CASE("menu items and custom views are mined") {
    const auto root = temp_dir("menu");
    write_file(root / "res" / "menu" / "main.xml",
               "<menu><item android:id=\"@+id/menu_save\" android:title=\"Save\" "
               "android:icon=\"@drawable/ic_save\"/></menu>");
    write_file(root / "res" / "layout" / "main.xml",
               "<LinearLayout><com.example.FancyChip android:id=\"@+id/chip\"/>"
               "<ImageView/></LinearLayout>");
    std::vector<std::string> warnings;
    const auto elements = parse_layouts(root, {}, 0, {}, &warnings);
    REQUIRE(elements.size() == 2);
    CHECK(elements[0].element_type == "com.example.FancyChip");
    CHECK(elements[1].element_type == "MenuItem");
    CHECK(elements[1].resource_id == "menu_save");
    CHECK(elements[1].label == "Save");
    CHECK(elements[1].icon == "ic_save");
    // The bare ImageView has neither id nor label and is skipped.
    CHECK(!warnings.empty());
}

TEST_CASE("element keys fall back to normalized labels") {
    UIElement e;
    e.element_type = "Button";
    e.label = "  Saved   PAGES ";
    CHECK(element_key(e) == "tl:Button|saved pages");
    e.resource_id = "saved_pages";
    CHECK(element_key(e) == "id:saved_pages");
}

TEST_CASE("describe_element matches the worked examples") {
    UIElement mic;
    mic.element_type = "Button";
    mic.resource_id = "btn_mic";
    mic.label = "Start Listening";
    mic.icon = "mic";
    CHECK(describe_element(mic, testsupport::lemmas(), testsupport::stops()) ==
          std::vector<std::string>{"button", "btn", "mic", "start", "listen", "mic"});

    UIElement bare;
    bare.element_type = "Switch";
    CHECK(describe_element(bare, testsupport::lemmas(), testsupport::stops()) ==
          std::vector<std::string>{"switch"});

    UIElement tabs;
    tabs.element_type = "Button";
    tabs.resource_id = "closeAllTabs2";
    const auto tokens = describe_element(tabs, testsupport::lemmas(), testsupport::stops());
    REQUIRE(tokens.size() >= 4);
    CHECK(tokens[1] == "close");
    CHECK(tokens[2] == "all");
    CHECK(tokens[3] == "tab");
}

TEST_CASE("wikipedia fixture v2.0 contains the walkthrough element set") {
    const auto root = testsupport::data_dir() / "fixtures" / "wikipedia" / "res-v2.0";
    const StringTable strings = parse_strings(root / "res" / "values" / "strings.xml");
    const auto elements = parse_layouts(root, strings, 1);
    std::vector<std::string> labels;
    for (const auto& e : elements) labels.push_back(e.label);
    for (const char* expected :
         {"Share via", "Saved pages", "Location service", "Close all tabs"})
        CHECK(std::find(labels.begin(), labels.end(), expected) != labels.end());
    // The overflow menu button rounds out the walkthrough element set.
    bool has_menu_button = false;
    for (const auto& e : elements)
        if (e.resource_id == "menu_button") has_menu_button = true;
    CHECK(has_menu_button);
}

TEST_CASE("re-parsing identical trees is deterministic") {
    const auto root = testsupport::data_dir() / "fixtures" / "wikipedia" / "res-v2.0";
    const StringTable strings = parse_strings(root / "res" / "values" / "strings.xml");
    const auto a = parse_layouts(root, strings, 1);
    const auto b = parse_layouts(root, strings, 1);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].element_type == b[i].element_type);
        CHECK(a[i].resource_id == b[i].resource_id);
        CHECK(a[i].label == b[i].label);
        CHECK(a[i].icon == b[i].icon);
        CHECK(element_key(a[i]) == element_key(b[i]));
    }
}

#include "radiation/uiminer.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <set>

#include "radiation/error.hpp"
#include "radiation/xmlreader.hpp"

namespace radiation {

namespace {

// Visible widget tags mined as functionality. Containers and purely
// structural tags stay out; custom views (dotted tags) are always in.
const std::set<std::string>& default_widget_tags() {
    static const std::set<std::string> tags = {
        "Button",        "ImageButton",    "TextView",     "EditText",
        "CheckBox",      "RadioButton",    "Switch",       "ToggleButton",
        "Spinner",       "SeekBar",        "RatingBar",    "ImageView",
        "SearchView",    "VideoView",      "CheckedTextView",
        "AutoCompleteTextView", "MultiAutoCompleteTextView",
        "FloatingActionButton", "Chip",     "NumberPicker", "DatePicker",
        "TimePicker",
    };
    return tags;
}

std::string strip_reference(const std::string& value, const char* prefix) {
    // "@+id/foo", "@id/foo", "@string/foo", "@drawable/foo" -> "foo"
    if (value.rfind(prefix, 0) == 0) return value.substr(std::strlen(prefix));
    return {};
}

void warn(std::vector<std::string>* warnings, const std::string& msg) {
    if (warnings) warnings->push_back(msg);
}

struct MineContext {
    const StringTable* strings;
    const std::set<std::string>* widget_tags;
    int release_ordinal;
    std::string source_file;
    bool in_menu;
    std::vector<UIElement>* out;
    std::vector<std::string>* warnings;
};

std::string resolve_label(const MineContext& ctx, const std::string& raw) {
    const std::string key = strip_reference(raw, "@string/");
    if (key.empty()) return raw; // literal text kept verbatim
    auto it = ctx.strings->find(key);
    if (it != ctx.strings->end()) return it->second;
    warn(ctx.warnings, ctx.source_file + ": unresolvable @string/" + key);
    return {};
}

void mine_node(const XmlNode& node, const MineContext& ctx) {
    if (node.is_text()) return;
    const std::string& tag = node.tag;
    const bool is_menu_item = ctx.in_menu && tag == "item";
    const bool is_custom_view = !ctx.in_menu && tag.find('.') != std::string::npos;
    const bool is_widget = !ctx.in_menu && ctx.widget_tags->count(tag) != 0;

    if (is_menu_item || is_custom_view || is_widget) {
        UIElement e;
        e.release_ordinal = ctx.release_ordinal;
        e.element_type = is_menu_item ? "MenuItem" : tag;
        e.source_file = ctx.source_file;
        if (const auto* id = node.attribute("android:id")) {
            std::string rid = strip_reference(*id, "@+id/");
            if (rid.empty()) rid = strip_reference(*id, "@id/");
            e.resource_id = rid;
        }
        const auto* text = node.attribute(ctx.in_menu ? "android:title" : "android:text");
        if (text) e.label = resolve_label(ctx, *text);
        const auto* icon = node.attribute(ctx.in_menu ? "android:icon" : "android:src");
        if (icon) e.icon = strip_reference(*icon, "@drawable/");
        if (!e.resource_id.empty() || !e.label.empty()) {
            ctx.out->push_back(std::move(e));
        } else {
            warn(ctx.warnings,
                 ctx.source_file + ": <" + tag + "> without id or label skipped");
        }
    }
    for (const auto& child : node.children) mine_node(*child, ctx);
}

std::vector<std::filesystem::path> xml_files_sorted(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(dir)) return files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace

std::string element_key(const UIElement& e) {
    if (!e.resource_id.empty()) return "id:" + e.resource_id;
    std::string normalized;
    bool pending_space = false;
    for (char c : e.label) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            pending_space = !normalized.empty();
        } else {
            if (pending_space) normalized += ' ';
            pending_space = false;
            normalized += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    return "tl:" + e.element_type + "|" + normalized;
}

StringTable parse_strings(const std::filesystem::path& path,
                          std::vector<std::string>* warnings) {
    auto root = parse_xml_file(path.string());
    if (root->tag != "resources")
        throw ValidationError(path.string() + ": expected <resources> root");
    StringTable table;
    for (const auto& child : root->children) {
        if (child->is_text() || child->tag != "string") continue;
        const auto* name = child->attribute("name");
        if (!name) continue;
        if (table.count(*name))
            warn(warnings, path.string() + ": duplicate string name '" + *name +
                               "', keeping the last value");
        table[*name] = child->inner_text();
    }
    return table;
}

std::vector<UIElement> parse_layouts(const std::filesystem::path& resource_root,
                                     const StringTable& strings, int release_ordinal,
                                     const std::vector<std::string>& extra_widget_tags,
                                     std::vector<std::string>* warnings) {
    std::set<std::string> tags = default_widget_tags();
    tags.insert(extra_widget_tags.begin(), extra_widget_tags.end());

    std::vector<UIElement> elements;
    const std::filesystem::path res = resource_root / "res";
    struct Source {
        std::filesystem::path dir;
        bool in_menu;
    };
    const Source sources[] = {{res / "layout", false}, {res / "menu", true}};
    for (const auto& source : sources) {
        for (const auto& file : xml_files_sorted(source.dir)) {
            std::unique_ptr<XmlNode> root;
            try {
                root = parse_xml_file(file.string());
            } catch (const ValidationError& e) {
                warn(warnings, std::string("skipped layout file: ") + e.what());
                continue;
            }
            MineContext ctx{&strings, &tags,     release_ordinal, file.string(),
                            source.in_menu, &elements, warnings};
            mine_node(*root, ctx);
        }
    }
    return elements;
}

std::vector<std::string> describe_element(const UIElement& e, const LemmaTable& lemmas,
                                          const StopList& stops) {
    std::string doc = e.element_type;
    for (const auto& part : split_identifier(e.resource_id)) doc += " " + part;
    if (!e.label.empty()) doc += " " + e.label;
    for (const auto& part : split_identifier(e.icon)) doc += " " + part;
    return preprocess(doc, lemmas, stops);
}

} // namespace radiation

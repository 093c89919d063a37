#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "radiation/textprep.hpp"

namespace radiation {

/// Resolved string resources: name -> display text.
using StringTable = std::map<std::string, std::string>;

/// A visible widget mined from layout/menu resources. At least one of
/// resource_id/label is present; elements with neither are not emitted.
struct UIElement {
    int release_ordinal = 0;
    std::string element_type; // widget tag, or "MenuItem" for menu items
    std::string resource_id;  // empty when absent
    std::string label;        // empty when absent
    std::string icon;         // drawable name, empty when absent
    std::string source_file;
};

/// Cross-release identity: the resource id when present, otherwise the
/// element type plus the lowercased, whitespace-collapsed label.
std::string element_key(const UIElement& e);

/// Parses res/values/strings.xml. Nested markup is flattened to inner text;
/// a duplicate name keeps the last value and records a warning. Malformed
/// XML is fatal for the file (callers degrade to an empty table).
StringTable parse_strings(const std::filesystem::path& path,
                          std::vector<std::string>* warnings = nullptr);

/// Walks res/layout/*.xml and res/menu/*.xml under `resource_root` and emits
/// widget elements in document order, files in lexicographic path order.
/// Container tags are excluded; custom views (tags with a dot) included.
/// An unparseable layout file is skipped with a warning.
std::vector<UIElement> parse_layouts(const std::filesystem::path& resource_root,
                                     const StringTable& strings, int release_ordinal = 0,
                                     const std::vector<std::string>& extra_widget_tags = {},
                                     std::vector<std::string>* warnings = nullptr);

/// Description document for linking: element type, the split resource id,
/// the label and the split icon name, normalized by textprep::preprocess.
std::vector<std::string> describe_element(const UIElement& e, const LemmaTable& lemmas,
                                          const StopList& stops);

} // namespace radiation

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace radiation {

/// Small DOM for the well-formed XML that Android resource files use.
/// Supports elements, attributes, text, CDATA, comments, processing
/// instructions and the five predefined entities. No DTDs, no namespaces
/// resolution (prefixes are kept verbatim in names).
struct XmlNode {
    /// Empty tag marks a text node; its content is in `text`.
    std::string tag;
    std::map<std::string, std::string> attributes;
    std::vector<std::unique_ptr<XmlNode>> children;
    std::string text;

    bool is_text() const { return tag.empty(); }

    const std::string* attribute(const std::string& name) const {
        auto it = attributes.find(name);
        return it == attributes.end() ? nullptr : &it->second;
    }

    /// All character data in document order, with nested markup flattened
    /// ("<string>Hello <b>bold</b> world</string>" -> "Hello bold world").
    std::string inner_text() const;
};

/// Parses a document and returns its root element. Throws ValidationError
/// on malformed input.
std::unique_ptr<XmlNode> parse_xml(const std::string& content, const std::string& source_name);

std::unique_ptr<XmlNode> parse_xml_file(const std::string& path);

} // namespace radiation

#include "radiation/xmlreader.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "radiation/error.hpp"

namespace radiation {

std::string XmlNode::inner_text() const {
    if (is_text()) return text;
    std::string out;
    for (const auto& child : children) out += child->inner_text();
    return out;
}

namespace {

class Parser {
public:
    Parser(const std::string& content, std::string source)
        : s_(content), source_(std::move(source)) {}

    std::unique_ptr<XmlNode> parse() {
        skip_prolog();
        auto root = parse_element();
        skip_misc();
        if (pos_ != s_.size()) fail("trailing content after document element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& why) {
        throw ValidationError(source_ + ": malformed XML: " + why);
    }

    bool starts_with(const char* prefix) const {
        return s_.compare(pos_, std::strlen(prefix), prefix) == 0;
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
                                    s_[pos_] == '\r'))
            ++pos_;
    }

    void skip_until(const char* terminator, const char* what) {
        const auto end = s_.find(terminator, pos_);
        if (end == std::string::npos) fail(std::string("unterminated ") + what);
        pos_ = end + std::strlen(terminator);
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                pos_ += 4;
                skip_until("-->", "comment");
            } else if (starts_with("<?")) {
                pos_ += 2;
                skip_until("?>", "processing instruction");
            } else {
                return;
            }
        }
    }

    void skip_prolog() {
        // Byte order mark, XML declaration, comments, doctype.
        if (s_.compare(0, 3, "\xEF\xBB\xBF") == 0) pos_ = 3;
        skip_misc();
        if (starts_with("<!DOCTYPE")) {
            skip_until(">", "doctype");
            skip_misc();
        }
    }

    bool is_name_char(char c) const {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-' || c == '.' || c == ':';
    }

    std::string parse_name() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
        if (pos_ == start) fail("expected a name");
        return s_.substr(start, pos_ - start);
    }

    std::string decode_entities(const std::string& raw) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size();) {
            if (raw[i] != '&') {
                out += raw[i++];
                continue;
            }
            const auto semi = raw.find(';', i);
            if (semi == std::string::npos) fail("unterminated entity");
            const std::string entity = raw.substr(i + 1, semi - i - 1);
            if (entity == "amp") out += '&';
            else if (entity == "lt") out += '<';
            else if (entity == "gt") out += '>';
            else if (entity == "quot") out += '"';
            else if (entity == "apos") out += '\'';
            else if (!entity.empty() && entity[0] == '#') {
                long code = 0;
                try {
                    code = (entity.size() > 1 && (entity[1] == 'x' || entity[1] == 'X'))
                               ? std::stol(entity.substr(2), nullptr, 16)
                               : std::stol(entity.substr(1));
                } catch (...) {
                    fail("bad character reference '&" + entity + ";'");
                }
                append_utf8(out, static_cast<unsigned long>(code));
            } else {
                fail("unknown entity '&" + entity + ";'");
            }
            i = semi + 1;
        }
        return out;
    }

    static void append_utf8(std::string& out, unsigned long cp) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    static void append_text(XmlNode& node, const std::string& chunk) {
        if (chunk.empty()) return;
        if (!node.children.empty() && node.children.back()->is_text()) {
            node.children.back()->text += chunk;
        } else {
            auto text_node = std::make_unique<XmlNode>();
            text_node->text = chunk;
            node.children.push_back(std::move(text_node));
        }
    }

    std::unique_ptr<XmlNode> parse_element() {
        if (pos_ >= s_.size() || s_[pos_] != '<') fail("expected an element");
        ++pos_;
        auto node = std::make_unique<XmlNode>();
        node->tag = parse_name();
        for (;;) {
            skip_ws();
            if (pos_ >= s_.size()) fail("unterminated start tag of <" + node->tag + ">");
            if (s_[pos_] == '/') {
                if (pos_ + 1 >= s_.size() || s_[pos_ + 1] != '>') fail("bad empty-element tag");
                pos_ += 2;
                return node;
            }
            if (s_[pos_] == '>') {
                ++pos_;
                break;
            }
            const std::string name = parse_name();
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != '=') fail("attribute '" + name + "' missing '='");
            ++pos_;
            skip_ws();
            if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\''))
                fail("attribute '" + name + "' missing quoted value");
            const char quote = s_[pos_++];
            const auto end = s_.find(quote, pos_);
            if (end == std::string::npos) fail("unterminated attribute value");
            node->attributes[name] = decode_entities(s_.substr(pos_, end - pos_));
            pos_ = end + 1;
        }
        // Content loop.
        for (;;) {
            if (pos_ >= s_.size()) fail("missing </" + node->tag + ">");
            if (s_[pos_] == '<') {
                if (starts_with("<!--")) {
                    pos_ += 4;
                    skip_until("-->", "comment");
                } else if (starts_with("<![CDATA[")) {
                    pos_ += 9;
                    const auto end = s_.find("]]>", pos_);
                    if (end == std::string::npos) fail("unterminated CDATA");
                    append_text(*node, s_.substr(pos_, end - pos_));
                    pos_ = end + 3;
                } else if (starts_with("<?")) {
                    pos_ += 2;
                    skip_until("?>", "processing instruction");
                } else if (starts_with("</")) {
                    pos_ += 2;
                    const std::string closing = parse_name();
                    if (closing != node->tag)
                        fail("mismatched </" + closing + ">, expected </" + node->tag + ">");
                    skip_ws();
                    if (pos_ >= s_.size() || s_[pos_] != '>') fail("bad end tag");
                    ++pos_;
                    return node;
                } else {
                    node->children.push_back(parse_element());
                }
            } else {
                const auto next = s_.find('<', pos_);
                const auto end = next == std::string::npos ? s_.size() : next;
                append_text(*node, decode_entities(s_.substr(pos_, end - pos_)));
                pos_ = end;
            }
        }
    }

    const std::string& s_;
    std::string source_;
    std::size_t pos_ = 0;
};

} // namespace

std::unique_ptr<XmlNode> parse_xml(const std::string& content, const std::string& source_name) {
    Parser parser(content, source_name);
    return parser.parse();
}

std::unique_ptr<XmlNode> parse_xml_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_xml(buf.str(), path);
}

} // namespace radiation

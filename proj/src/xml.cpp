#include "mapek/xml.hpp"

#include <expat.h>

#include <memory>

#include "mapek/error.hpp"
#include "mapek/numfmt.hpp"

namespace mapek {

const std::string* XmlElement::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
    }
    return nullptr;
}

XmlElement& XmlElement::set(std::string key, std::string value) {
    attributes.emplace_back(std::move(key), std::move(value));
    return *this;
}

XmlElement& XmlElement::add(XmlElement child) {
    children.push_back(std::move(child));
    return *this;
}

namespace {

struct ParseState {
    XML_Parser parser = nullptr;
    std::vector<XmlElement*> stack;
    XmlElement root;
    bool have_root = false;
    std::vector<std::string> raw_text;
};

void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
    auto* st = static_cast<ParseState*>(user);
    XmlElement el;
    el.name = name;
    el.line = static_cast<int>(XML_GetCurrentLineNumber(st->parser));
    for (int i = 0; attrs[i] != nullptr; i += 2) el.attributes.emplace_back(attrs[i], attrs[i + 1]);
    if (st->stack.empty()) {
        st->root = std::move(el);
        st->have_root = true;
        st->stack.push_back(&st->root);
    } else {
        auto& parent = *st->stack.back();
        parent.children.push_back(std::move(el));
        st->stack.push_back(&parent.children.back());
    }
    st->raw_text.emplace_back();
}

void on_end(void* user, const XML_Char*) {
    auto* st = static_cast<ParseState*>(user);
    st->stack.back()->text = std::string(trim(st->raw_text.back()));
    st->raw_text.pop_back();
    st->stack.pop_back();
}

void on_text(void* user, const XML_Char* s, int len) {
    auto* st = static_cast<ParseState*>(user);
    if (!st->raw_text.empty()) st->raw_text.back().append(s, static_cast<std::size_t>(len));
}

}  // namespace

XmlElement parse_xml(std::string_view document) {
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
        XML_ParserCreate("UTF-8"), &XML_ParserFree);
    ParseState st;
    st.parser = parser.get();
    // Only the open path is held by pointer; an ancestor's children vector
    // never grows while one of its descendants is open.
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);
    if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE) ==
        XML_STATUS_ERROR) {
        const auto line = XML_GetCurrentLineNumber(parser.get());
        const auto col = XML_GetCurrentColumnNumber(parser.get());
        throw Error("malformed-xml",
                    std::string(XML_ErrorString(XML_GetErrorCode(parser.get()))) + " at line " +
                        std::to_string(line) + " column " + std::to_string(col),
                    "line " + std::to_string(line));
    }
    if (!st.have_root) throw Error("malformed-xml", "document has no root element");
    return std::move(st.root);
}

std::string escape_xml(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

namespace {

void write_element(const XmlElement& el, int depth, std::string& out) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += '<';
    out += el.name;
    for (const auto& [k, v] : el.attributes) {
        out += ' ';
        out += k;
        out += "=\"";
        out += escape_xml(v);
        out += '"';
    }
    if (el.children.empty() && el.text.empty()) {
        out += "/>\n";
        return;
    }
    out += '>';
    if (el.children.empty()) {
        out += escape_xml(el.text);
    } else {
        out += '\n';
        for (const auto& child : el.children) write_element(child, depth + 1, out);
        out.append(static_cast<std::size_t>(depth) * 2, ' ');
    }
    out += "</";
    out += el.name;
    out += ">\n";
}

}  // namespace

std::string write_xml(const XmlElement& root) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    write_element(root, 0, out);
    return out;
}

std::string child_path(const std::string& parent, std::string_view name, std::size_t index) {
    std::string p = parent;
    p += '/';
    p += name;
    if (index > 0) {
        p += '[';
        p += std::to_string(index);
        p += ']';
    }
    return p;
}

}  // namespace mapek

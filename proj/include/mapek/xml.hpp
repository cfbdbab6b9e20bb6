#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mapek {

/// Minimal element tree: attributes in document order, trimmed character data.
/// No namespaces and no mixed content beyond trimmed text.
struct XmlElement {
    XmlElement() = default;
    explicit XmlElement(std::string element_name) : name(std::move(element_name)) {}

    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<XmlElement> children;
    std::string text;
    int line = 0;

    const std::string* attribute(std::string_view key) const;
    XmlElement& set(std::string key, std::string value);
    XmlElement& add(XmlElement child);
};

/// Throws Error{"malformed-xml"} with line and column on bad input.
XmlElement parse_xml(std::string_view document);

/// Canonical writer: XML declaration, 2-space indentation, LF endings,
/// attributes in stored order, childless elements self-closed.
std::string write_xml(const XmlElement& root);

std::string escape_xml(std::string_view text);

/// Builds "/root/child[2]" style paths, 1-based among same-named siblings.
std::string child_path(const std::string& parent, std::string_view name, std::size_t index);

}  // namespace mapek

#include <charconv>
#include <cmath>
#include <cstdio>

#include "mapek/diagnostic.hpp"
#include "mapek/numfmt.hpp"
#include "mapek/placement.hpp"

namespace mapek {

std::string format_diagnostic(const Diagnostic& d) {
    std::string out = d.severity == Severity::error ? "error" : "warning";
    out += ' ';
    out += d.code;
    out += ' ';
    out += d.path.empty() ? "/" : d.path;
    out += ' ';
    out += d.message;
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    for (const auto& d : diagnostics) {
        if (d.severity == Severity::error) return true;
    }
    return false;
}

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

std::string format_fixed6(double value) {
    if (value == 0.0) value = 0.0;  // collapse -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

std::string_view trim(std::string_view text) {
    const auto ws = " \t\r\n";
    const auto first = text.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(ws);
    return text.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<std::uint64_t> parse_unsigned(std::string_view text) {
    text = trim(text);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::optional<std::int64_t> parse_signed(std::string_view text) {
    text = trim(text);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::string_view to_string(Node node) {
    return node == Node::gateway ? "gateway" : "backend";
}

std::string_view to_string(Component component) {
    switch (component) {
        case Component::monitor: return "monitor";
        case Component::knowledge: return "knowledge";
        case Component::analyzer: return "analyzer";
        case Component::planner: return "planner";
        case Component::executor: return "executor";
    }
    return "?";
}

std::optional<Node> parse_node(std::string_view text) {
    if (text == "gateway") return Node::gateway;
    if (text == "backend") return Node::backend;
    return std::nullopt;
}

std::optional<Component> parse_component(std::string_view text) {
    for (auto c : all_components) {
        if (to_string(c) == text) return c;
    }
    return std::nullopt;
}

Placements default_placements() {
    return {{Component::monitor, Node::gateway},
            {Component::knowledge, Node::backend},
            {Component::analyzer, Node::backend},
            {Component::planner, Node::backend},
            {Component::executor, Node::gateway}};
}

}  // namespace mapek

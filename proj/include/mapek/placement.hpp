#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "mapek/error.hpp"

namespace mapek {

enum class Node { gateway, backend };

enum class Component { monitor, knowledge, analyzer, planner, executor };

inline constexpr std::array<Component, 5> all_components{
    Component::monitor, Component::knowledge, Component::analyzer, Component::planner,
    Component::executor};

std::string_view to_string(Node node);
std::string_view to_string(Component component);
std::optional<Node> parse_node(std::string_view text);
std::optional<Component> parse_component(std::string_view text);

using Placements = std::map<Component, Node>;

/// Master-slave split: monitor and executor on the gateway, the rest on the backend.
Placements default_placements();

/// Undirected gateway/backend link; the latency applies in both directions.
struct LinkSpec {
    Node a = Node::gateway;
    Node b = Node::backend;
    Tick latency = 0;

    friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

inline constexpr Tick default_link_latency = 2;

}  // namespace mapek

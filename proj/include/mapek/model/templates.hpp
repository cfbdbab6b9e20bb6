#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mapek/model/model.hpp"

namespace mapek::model {

/// Data a template sees: objects, arrays of objects, and string scalars.
using TemplateView = nlohmann::ordered_json;

/// Flattened APSM view used by the template packs. Numbers are pre-rendered
/// strings so the output never depends on float formatting defaults.
TemplateView build_template_view(const ApsmModel& apsm);

/// Renders one template.
///   {{path}}          value at a dot path, XML-escaped
///   {{&path}}         same, unescaped
///   {{.}}             the current `each` item when it is a scalar
///   {{#each path}}    repeats the block for every array element
///   {{/each}}
/// A line holding nothing but an each tag renders as nothing. Errors:
/// unresolved-placeholder, unbalanced-each, malformed-tag; `where()` is
/// "line N".
std::string render_template(std::string_view text, const TemplateView& view);

/// Renders every *.tmpl file of `pack_dir`; output names drop the suffix.
/// Throws empty-template-pack, missing-template-pack, or a render error
/// whose `where()` is "<file>:line N".
std::map<std::string, std::string> render_templates(const ApsmModel& apsm,
                                                    const std::filesystem::path& pack_dir);

}  // namespace mapek::model

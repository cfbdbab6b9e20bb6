#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mapek/device_spec.hpp"
#include "mapek/diagnostic.hpp"
#include "mapek/mape/types.hpp"
#include "mapek/placement.hpp"
#include "mapek/policy/rules.hpp"
#include "mapek/xml.hpp"

namespace mapek::model {

enum class Stage { pim, apim, apsm };

std::string_view to_string(Stage stage);

struct Task {
    std::string id;
    std::string goal;
    std::vector<std::string> composite_refs;

    friend bool operator==(const Task&, const Task&) = default;
};

enum class ServiceKind { sensor, actuator, logic };

std::string_view to_string(ServiceKind kind);

struct Service {
    std::string id;
    ServiceKind kind = ServiceKind::sensor;
    std::string entity_ref;
    std::string property;  // empty for logic services

    /// "entity.property", the path the monitor and policies use.
    std::string path() const { return entity_ref + "." + property; }

    friend bool operator==(const Service&, const Service&) = default;
};

struct Interaction {
    std::string from;
    std::string to;
    std::string message;

    friend bool operator==(const Interaction&, const Interaction&) = default;
};

struct Composite {
    std::string id;
    std::vector<std::string> service_refs;
    std::vector<Interaction> interactions;

    friend bool operator==(const Composite&, const Composite&) = default;
};

/// Platform-independent model. `entities` describes the physical entities the
/// services refer to; it may be left empty while the model is still abstract.
struct PimModel {
    std::string domain_name;
    std::vector<Task> tasks;
    std::vector<Service> services;
    std::vector<Composite> composites;
    std::vector<DeviceSpec> entities;

    const Task* find_task(std::string_view id) const;
    const Service* find_service(std::string_view id) const;
    const Composite* find_composite(std::string_view id) const;
    const DeviceSpec* find_entity(std::string_view id) const;

    /// Services reachable from the task through its composites, first-seen order.
    std::vector<const Service*> task_services(const Task& task) const;

    friend bool operator==(const PimModel&, const PimModel&) = default;
};

struct MapeLoopSpec {
    std::string task_ref;
    mape::MonitorConfig monitor;
    std::vector<policy::Symptom> symptoms;
    std::vector<mape::PredictionSpec> predictions;
    std::vector<policy::EcaRule> rules;
    std::vector<std::string> effectors;  // actuator-service ids

    friend bool operator==(const MapeLoopSpec&, const MapeLoopSpec&) = default;
};

struct ApimModel {
    PimModel pim;
    std::vector<MapeLoopSpec> loops;

    MapeLoopSpec* find_loop(std::string_view task);

    friend bool operator==(const ApimModel&, const ApimModel&) = default;
};

struct ApsmModel {
    ApimModel apim;
    std::string target;
    Placements placements;
    std::vector<LinkSpec> links;

    friend bool operator==(const ApsmModel&, const ApsmModel&) = default;
};

using Model = std::variant<PimModel, ApimModel, ApsmModel>;

/// Throws Error with codes malformed-xml, wrong-stage-root,
/// missing-required-field, unknown-element, unknown-attribute, invalid-value,
/// syntax-error; `where()` holds the document path.
Model parse_model(std::string_view text, Stage stage);

/// Root element name of a document ("pim", "apim", "scenario", ...).
std::string root_name(std::string_view text);

/// Empty iff every structural invariant holds; diagnostics in document order.
std::vector<Diagnostic> validate_model(const Model& model);

struct ScaffoldOptions {
    Tick sensor_interval = 1;
    Tick reporting_interval = 5;
};

/// One MAPE loop per task; each sensor-service property of the task gets a
/// periodic monitor entry. Throws Error{"invalid-pim"}.
ApimModel pim_to_apim(const PimModel& pim, const ScaffoldOptions& options = {});

struct Binding {
    std::string target = "simkernel";
    std::vector<std::pair<std::string, std::string>> placements;  // component -> node
    std::vector<LinkSpec> links;
};

const std::vector<std::string>& known_targets();

/// Applies placements over the master-slave defaults. Without links a single
/// gateway/backend link of default latency is added. Throws unknown-target,
/// unknown-component-in-placement, invalid-value, invalid-apim.
ApsmModel apim_to_apsm(const ApimModel& apim, const Binding& binding);

/// Deterministic XML: fixed attribute order, document-model element order,
/// 2-space indentation, LF endings; empty optional lists emit nothing.
std::string canonical_serialize(const Model& model);

XmlElement to_xml(const PimModel& pim);
XmlElement to_xml(const ApimModel& apim);
XmlElement to_xml(const ApsmModel& apsm);

}  // namespace mapek::model

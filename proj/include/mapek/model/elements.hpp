#pragma once

// XML mapping for the elements shared by the APIM/APSM models and the
// scenario document: monitor, thresholds, symptoms, predictions, rules,
// device bodies, placements and links.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mapek/device_spec.hpp"
#include "mapek/mape/types.hpp"
#include "mapek/placement.hpp"
#include "mapek/policy/rules.hpp"
#include "mapek/xml.hpp"

namespace mapek::model {

/// Typed attribute access with document-path errors. Call finish() to reject
/// attributes that were never read.
class ElementReader {
public:
    ElementReader(const XmlElement& element, std::string path);

    const XmlElement& element() const { return element_; }
    const std::string& path() const { return path_; }

    std::string required(std::string_view key);
    std::optional<std::string> optional(std::string_view key);
    double number(std::string_view key);
    double number_or(std::string_view key, double fallback);
    std::uint64_t unsigned_int(std::string_view key, std::uint64_t max = UINT64_MAX);
    std::uint64_t unsigned_or(std::string_view key, std::uint64_t fallback, std::uint64_t max = UINT64_MAX);
    std::int64_t signed_int(std::string_view key);
    void finish();

    /// Children paired with their document paths ("parent/name[i]").
    std::vector<std::pair<const XmlElement*, std::string>> children() const;
    void no_text() const;

private:
    std::string attr_path(std::string_view key) const;

    const XmlElement& element_;
    std::string path_;
    std::set<std::string, std::less<>> used_;
};

[[noreturn]] void unknown_element(const XmlElement& element, const std::string& path);

policy::Expression read_expression(std::string_view text, const std::string& path);

mape::MonitorConfig read_monitor(const XmlElement& element, const std::string& path);
mape::SenseSpec read_sense(const XmlElement& element, const std::string& path);
mape::LocalThreshold read_threshold(const XmlElement& element, const std::string& path);
policy::Symptom read_symptom(const XmlElement& element, const std::string& path);
mape::PredictionSpec read_prediction(const XmlElement& element, const std::string& path);
policy::EcaRule read_rule(const XmlElement& element, const std::string& path);
policy::Action read_action(const XmlElement& element, const std::string& path);
/// Reads <property>/<actuator> children into `device`.
void read_device_body(const XmlElement& element, const std::string& path, DeviceSpec& device);
Placements read_placements(const XmlElement& element, const std::string& path);
std::vector<LinkSpec> read_links(const XmlElement& element, const std::string& path);

XmlElement write_monitor(const mape::MonitorConfig& monitor);
XmlElement write_sense(const mape::SenseSpec& sense);
XmlElement write_threshold(const mape::LocalThreshold& threshold);
XmlElement write_symptom(const policy::Symptom& symptom);
XmlElement write_prediction(const mape::PredictionSpec& prediction);
XmlElement write_rule(const policy::EcaRule& rule);
XmlElement write_action(const policy::Action& action);
void write_device_body(const DeviceSpec& device, XmlElement& element);
XmlElement write_placements(const Placements& placements);
XmlElement write_links(const std::vector<LinkSpec>& links);

}  // namespace mapek::model

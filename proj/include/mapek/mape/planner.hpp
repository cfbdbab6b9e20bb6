#pragma once

#include <optional>
#include <span>

#include "mapek/mape/types.hpp"
#include "mapek/policy/rules.hpp"

namespace mapek::mape {

/// Picks the rule for the request's symptom and instantiates its template.
/// Returns nothing when no rule matches (the caller logs it as unhandled).
std::optional<ChangePlan> plan_compose(const AdaptationRequest& request,
                                       std::span<const policy::EcaRule> rules,
                                       const policy::StateView& view, Tick now,
                                       std::string plan_id);

class Planner {
public:
    std::optional<ChangePlan> compose(const AdaptationRequest& request,
                                      std::span<const policy::EcaRule> rules,
                                      const policy::StateView& view, Tick now);

private:
    std::uint64_t next_plan_ = 1;
};

}  // namespace mapek::mape

#include "mapek/mape/planner.hpp"

namespace mapek::mape {

std::optional<ChangePlan> plan_compose(const AdaptationRequest& request,
                                       std::span<const policy::EcaRule> rules,
                                       const policy::StateView& view, Tick now, std::string plan_id) {
    const auto* rule = policy::select_rule(rules, request.symptom, view, now);
    if (rule == nullptr) return std::nullopt;
    return ChangePlan{std::move(plan_id), request.id, rule->id, rule->plan_template};
}

std::optional<ChangePlan> Planner::compose(const AdaptationRequest& request,
                                           std::span<const policy::EcaRule> rules,
                                           const policy::StateView& view, Tick now) {
    auto plan = plan_compose(request, rules, view, now, "plan-" + std::to_string(next_plan_));
    if (plan) ++next_plan_;
    return plan;
}

}  // namespace mapek::mape

#include "mapek/mape/executor.hpp"

namespace mapek::mape {

Executor::Executor(std::set<std::string> effectors) : effectors_(std::move(effectors)) {}

std::vector<Dispatch> Executor::dispatch_step(Active& active) {
    std::vector<Dispatch> out;
    const auto& step = active.plan.steps[active.step];
    for (std::size_t i = 0; i < step.size(); ++i) {
        active.pending.insert(i);
        out.push_back(Dispatch{active.plan.id, active.step, i, step[i]});
    }
    return out;
}

ExecutorUpdate Executor::run(const ChangePlan& plan) {
    ExecutorUpdate update;
    if (active_.count(plan.id) != 0) throw Error("duplicate-plan", "plan '" + plan.id + "' is already running");
    for (const auto& step : plan.steps) {
        for (const auto& action : step) {
            if (effectors_.count(action.effector) == 0) {
                update.failed_plan = plan.id;
                update.failure_reason = "unknown-effector";
                update.failure_detail = action.effector;
                return update;
            }
        }
    }
    if (plan.steps.empty()) {
        update.completed = plan;
        return update;
    }
    auto& active = active_[plan.id];
    active.plan = plan;
    update.dispatches = dispatch_step(active);
    return update;
}

ExecutorUpdate Executor::on_ack(const Ack& ack) {
    auto it = active_.find(ack.plan);
    if (it == active_.end()) throw Error("ack-for-unknown-plan", "no running plan '" + ack.plan + "'");
    auto& active = it->second;
    if (ack.step != active.step || active.pending.count(ack.action) == 0) {
        throw Error("unexpected-ack", "plan '" + ack.plan + "' is not waiting for step " +
                                          std::to_string(ack.step) + " action " + std::to_string(ack.action));
    }
    ExecutorUpdate update;
    if (!ack.ok) {
        update.failed_plan = ack.plan;
        update.failure_reason = "negative-ack";
        update.failure_detail = ack.reason;
        active_.erase(it);
        return update;
    }
    active.pending.erase(ack.action);
    if (!active.pending.empty()) return update;
    ++active.step;
    if (active.step == active.plan.steps.size()) {
        update.completed = std::move(active.plan);
        active_.erase(it);
        return update;
    }
    update.dispatches = dispatch_step(active);
    return update;
}

}  // namespace mapek::mape

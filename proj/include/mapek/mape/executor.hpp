#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mapek/mape/types.hpp"

namespace mapek::mape {

struct Dispatch {
    std::string plan;
    std::size_t step = 0;
    std::size_t action = 0;  // index inside the step
    policy::Action command;
};

struct Ack {
    std::string plan;
    std::size_t step = 0;
    std::size_t action = 0;
    bool ok = true;
    std::string reason;
};

struct ExecutorUpdate {
    std::vector<Dispatch> dispatches;
    std::optional<ChangePlan> completed;
    std::optional<std::string> failed_plan;
    std::string failure_reason;
    std::string failure_detail;
};

/// Dispatches plan steps in order: every action of a step goes out together,
/// and step i+1 only after all of step i is acknowledged.
class Executor {
public:
    explicit Executor(std::set<std::string> effectors);

    /// Aborts with plan-failed (nothing dispatched) if any action names an
    /// unknown effector.
    ExecutorUpdate run(const ChangePlan& plan);

    /// Throws Error{"ack-for-unknown-plan"}. A negative ack fails the plan.
    ExecutorUpdate on_ack(const Ack& ack);

    std::size_t in_flight() const { return active_.size(); }

private:
    struct Active {
        ChangePlan plan;
        std::size_t step = 0;
        std::set<std::size_t> pending;
    };

    std::vector<Dispatch> dispatch_step(Active& active);

    std::set<std::string> effectors_;
    std::map<std::string, Active> active_;
};

}  // namespace mapek::mape

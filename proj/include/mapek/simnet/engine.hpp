#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "mapek/error.hpp"

namespace mapek::simnet {

/// Discrete-event queue over integer ticks. Events run in (tick, seq) order,
/// seq being assigned at schedule time.
template <typename Message>
class Engine {
public:
    struct Event {
        Tick tick = 0;
        std::uint64_t seq = 0;
        Message message;
    };

    Tick now() const { return now_; }
    bool empty() const { return queue_.empty(); }

    std::optional<Tick> next_tick() const {
        if (queue_.empty()) return std::nullopt;
        return queue_.top().tick;
    }

    /// Throws schedule-in-past when `at` precedes the clock.
    std::uint64_t schedule(Tick at, Message message) {
        if (at < now_) {
            throw Error("schedule-in-past", "cannot schedule at tick " + std::to_string(at) + " when the clock is at " +
                                                std::to_string(now_));
        }
        const auto seq = next_seq_++;
        queue_.push(Event{at, seq, std::move(message)});
        return seq;
    }

    /// Moves the clock forward; pending events must not be skipped.
    void advance_clock(Tick to) {
        if (to < now_) throw Error("clock-rewind", "clock cannot move back to " + std::to_string(to));
        if (auto next = next_tick(); next && *next < to) {
            throw Error("skipped-events", "events pending at tick " + std::to_string(*next));
        }
        now_ = to;
    }

    /// Runs every event due at the current tick, including ones scheduled
    /// for this tick by the handler. Returns the number processed.
    template <typename Handler>
    std::size_t drain(Handler&& handler) {
        std::size_t n = 0;
        while (!queue_.empty() && queue_.top().tick == now_) {
            Event event = queue_.top();
            queue_.pop();
            handler(event);
            ++n;
        }
        return n;
    }

    /// Jumps to the lowest pending tick and drains it. Returns 0 when idle.
    template <typename Handler>
    std::size_t step(Handler&& handler) {
        auto next = next_tick();
        if (!next) return 0;
        now_ = *next;
        return drain(handler);
    }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.tick != b.tick ? a.tick > b.tick : a.seq > b.seq;
        }
    };

    Tick now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

}  // namespace mapek::simnet

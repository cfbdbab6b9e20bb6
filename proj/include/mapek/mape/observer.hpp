#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace mapek::mape {

struct ObserverLink {
    std::string subject;
    std::string observer;
    std::string kind;

    friend bool operator==(const ObserverLink&, const ObserverLink&) = default;
};

/// Subject/observer registry shared by the loop components. Delivery itself
/// is delegated to the caller so a transport can decide between a direct
/// call and a latency-delayed message.
class ObserverHub {
public:
    void register_component(std::string id);
    bool is_registered(std::string_view id) const;

    /// Throws unknown-component or duplicate-subscription.
    const ObserverLink& subscribe(std::string subject, std::string observer, std::string kind);

    /// Subscribers of (subject, kind) in subscription order.
    std::vector<ObserverLink> subscribers(std::string_view subject, std::string_view kind) const;

    /// Calls deliver(link) for each subscriber in subscription order; returns the count.
    template <typename Deliver>
    std::size_t notify(std::string_view subject, std::string_view kind, Deliver&& deliver) const {
        std::size_t n = 0;
        for (const auto& link : links_) {
            if (link.subject == subject && link.kind == kind) {
                deliver(link);
                ++n;
            }
        }
        return n;
    }

    const std::vector<ObserverLink>& links() const { return links_; }

private:
    std::unordered_set<std::string> components_;
    std::vector<ObserverLink> links_;
};

}  // namespace mapek::mape

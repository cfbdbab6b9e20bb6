#include "mapek/mape/observer.hpp"

#include <algorithm>

#include "mapek/error.hpp"

namespace mapek::mape {

void ObserverHub::register_component(std::string id) { components_.insert(std::move(id)); }

bool ObserverHub::is_registered(std::string_view id) const {
    return components_.count(std::string(id)) != 0;
}

const ObserverLink& ObserverHub::subscribe(std::string subject, std::string observer, std::string kind) {
    if (!is_registered(subject)) throw Error("unknown-component", "subject '" + subject + "' is not registered");
    if (!is_registered(observer)) throw Error("unknown-component", "observer '" + observer + "' is not registered");
    ObserverLink link{std::move(subject), std::move(observer), std::move(kind)};
    if (std::find(links_.begin(), links_.end(), link) != links_.end()) {
        throw Error("duplicate-subscription",
                    link.observer + " already observes " + link.kind + " from " + link.subject);
    }
    links_.push_back(std::move(link));
    return links_.back();
}

std::vector<ObserverLink> ObserverHub::subscribers(std::string_view subject, std::string_view kind) const {
    std::vector<ObserverLink> out;
    notify(subject, kind, [&](const ObserverLink& l) { out.push_back(l); });
    return out;
}

}  // namespace mapek::mape

#include "fogsense/apps/bus.hpp"

#include <cstdlib>
#include <json.hpp>

namespace fogsense::apps {

using components::Fields;
using Json = nlohmann::ordered_json;

sim::Millis travel_time(Stop a, Stop b, sim::Millis segment_ms) { return std::llabs(a - b) * segment_ms; }

std::vector<Stop> nearest_neighbor_route(Stop start, const std::set<Stop>& stops) {
    std::vector<Stop> route{start};
    std::set<Stop> left = stops;
    left.erase(start);
    Stop cur = start;
    while (!left.empty()) {
        auto best = left.begin();
        for (auto it = left.begin(); it != left.end(); ++it) {
            // Ascending iteration keeps the lower stop on ties.
            if (std::llabs(*it - cur) < std::llabs(*best - cur)) {
                best = it;
            }
        }
        cur = *best;
        route.push_back(cur);
        left.erase(best);
    }
    return route;
}

sim::Millis route_travel(const std::vector<Stop>& route, sim::Millis segment_ms) {
    sim::Millis total = 0;
    for (std::size_t i = 1; i < route.size(); ++i) {
        total += travel_time(route[i - 1], route[i], segment_ms);
    }
    return total;
}

std::map<Stop, sim::SimTime> eta_table(const std::vector<Stop>& route, sim::SimTime depart, sim::Millis segment_ms) {
    std::map<Stop, sim::SimTime> eta;
    auto t = depart;
    for (std::size_t i = 1; i < route.size(); ++i) {
        t = t + travel_time(route[i - 1], route[i], segment_ms);
        eta.emplace(route[i], t);
    }
    return eta;
}

BusApp::BusApp(components::FogNode& fog, BusConfig config)
    : fog_(fog), config_(config), position_(config.start_stop), route_{config.start_stop} {
    fog_.subscribe(kCallTopic, "bus_on_call", [this](const dtps::Message& m) { on_call(m); });
    fog_.subscribe(kBidTopic, "bus_on_bid", [this](const dtps::Message& m) { on_bid(m); });
    fog_.add_start_hook([this] {
        fog_.trace("BUS_AT", Fields{{"stop", position_}});
        fog_.every(config_.update_period, [this] { update_route(); });
    });
}

std::set<Stop> BusApp::pending() const {
    std::set<Stop> out = calls_;
    for (const auto& [sensor, stop] : passengers_) {
        out.insert(stop);
    }
    return out;
}

void BusApp::update_route() {
    fog_.query_all_sensors(components::RequiredAnswers::unbounded(),
                           components::Query::one_time(components::PromptTag::Destination),
                           [this](const components::GeneralQueryResult& r) { on_destinations(r); });
}

void BusApp::on_destinations(const components::GeneralQueryResult& r) {
    bool changed = false;
    for (const auto& [sensor, payload] : r.answers) {
        if (delivered_.contains(sensor)) {
            continue;
        }
        const auto j = nlohmann::json::parse(payload, nullptr, false);
        if (j.is_discarded() || !j.contains("destination") || !j["destination"].is_number_integer()) {
            continue;
        }
        const auto stop = j["destination"].get<Stop>();
        auto [it, inserted] = passengers_.try_emplace(sensor, stop);
        if (inserted || it->second != stop) {
            it->second = stop;
            fog_.trace("PASSENGER", Fields{{"sensor", sensor}, {"destination", stop}});
            changed = true;
        }
    }
    if (changed) {
        replan();
    }
}

void BusApp::on_call(const dtps::Message& m) {
    const auto stop = std::stoll(m.payload_text());
    const auto call = m.id.str();
    auto& state = bids_[call];
    if (state.heard) {
        return;
    }
    state.heard = true;
    state.stop = stop;
    const bool has = pending().contains(stop);
    Json j;
    j["call"] = call;
    j["stop"] = stop;
    j["bus"] = fog_.id();
    j["pending"] = static_cast<std::int64_t>(pending().size());
    j["has"] = has;
    fog_.trace("CALL_HEARD", Fields{{"stop", stop}, {"call", call}, {"has", has}});
    fog_.publish(kBidTopic, std::string_view(j.dump()));
    fog_.set_timer(config_.bid_window, [this, call] { resolve(call); });
}

void BusApp::on_bid(const dtps::Message& m) {
    const auto j = nlohmann::json::parse(m.payload_text(), nullptr, false);
    if (j.is_discarded()) {
        return;
    }
    auto& state = bids_[j["call"].get<std::string>()];
    if (state.resolved) {
        return;
    }
    state.bids[j["bus"].get<std::string>()] = Bid{j["has"].get<bool>(), j["pending"].get<std::int64_t>()};
}

void BusApp::resolve(const std::string& call) {
    auto& state = bids_.at(call);
    state.resolved = true;
    const NodeId* winner = nullptr;
    const Bid* best = nullptr;
    for (const auto& [bus, bid] : state.bids) {
        // Map order is ascending id, so strict comparisons keep the lower id.
        if (best == nullptr || (bid.has_stop && !best->has_stop) ||
            (bid.has_stop == best->has_stop && bid.pending < best->pending)) {
            winner = &bus;
            best = &bid;
        }
    }
    if (winner == nullptr || *winner != fog_.id()) {
        fog_.trace("CALL_YIELD", Fields{{"stop", state.stop}, {"call", call}, {"winner", winner ? *winner : ""}});
        return;
    }
    const bool fresh = calls_.insert(state.stop).second;
    fog_.trace("ASSIGN", Fields{{"stop", state.stop}, {"call", call}, {"bids", state.bids.size()}, {"fresh", fresh}});
    if (fresh) {
        replan();
    }
}

void BusApp::replan() {
    const Stop from = moving_ ? target_ : position_;
    auto stops = pending();
    route_ = nearest_neighbor_route(from, stops);
    std::string text;
    for (const auto s : route_) {
        text += (text.empty() ? "" : ">") + std::to_string(s);
    }
    const auto travel = route_travel(route_, config_.segment_ms);
    fog_.trace("ROUTE", Fields{{"route", text}, {"travel", travel}, {"pending", stops.size()}});
    if (route_.size() > 1) {
        Json j;
        j["bus"] = fog_.id();
        j["route"] = route_;
        Json eta = Json::object();
        for (const auto& [stop, t] : eta_table(route_, fog_.now(), config_.segment_ms)) {
            eta[std::to_string(stop)] = t.ms();
        }
        j["eta"] = std::move(eta);
        fog_.publish(kEtaTopic, std::string_view(j.dump()));
    }
    if (!moving_) {
        depart();
    }
}

void BusApp::depart() {
    auto stops = pending();
    if (stops.contains(position_)) {
        target_ = position_;
    } else if (stops.empty()) {
        return;
    } else {
        target_ = nearest_neighbor_route(position_, stops).at(1);
    }
    moving_ = true;
    fog_.set_timer(travel_time(position_, target_, config_.segment_ms), [this] { arrive(); });
}

void BusApp::arrive() {
    moving_ = false;
    position_ = target_;
    const bool called = calls_.erase(position_) > 0;
    std::size_t dropped = 0;
    for (auto it = passengers_.begin(); it != passengers_.end();) {
        if (it->second == position_) {
            delivered_.insert(it->first);
            it = passengers_.erase(it);
            ++dropped;
        } else {
            ++it;
        }
    }
    fog_.trace("VISITED", Fields{{"stop", position_}, {"call", called}, {"passengers", dropped}});
    replan();
}

void call_a_bus(components::SensorNode& stop_sensor, Stop stop) {
    stop_sensor.trace("CALL_BUS", Fields{{"stop", stop}});
    stop_sensor.publish(kCallTopic, std::string_view(std::to_string(stop)));
}

}  // namespace fogsense::apps

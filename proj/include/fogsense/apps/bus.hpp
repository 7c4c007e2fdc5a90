#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fogsense/components/fog.hpp"
#include "fogsense/components/sensor.hpp"

namespace fogsense::apps {

using components::NodeId;
using Stop = std::int64_t;

inline const std::string kCallTopic = "CALL";
inline const std::string kBidTopic = "BID";
inline const std::string kEtaTopic = "ETA";

/// Stops lie on a line; travelling between a and b takes |a - b| segments.
sim::Millis travel_time(Stop a, Stop b, sim::Millis segment_ms);

/// `start` followed by every stop in `stops`, each next stop being the
/// closest remaining one (ties to the lower stop). `start` itself is not
/// repeated even if it is in `stops`.
std::vector<Stop> nearest_neighbor_route(Stop start, const std::set<Stop>& stops);

/// Total travel time along a route (first element is the start).
sim::Millis route_travel(const std::vector<Stop>& route, sim::Millis segment_ms);

/// Arrival time at each stop of `route`, departing route[0] at `depart`.
std::map<Stop, sim::SimTime> eta_table(const std::vector<Stop>& route, sim::SimTime depart, sim::Millis segment_ms);

struct BusConfig {
    Stop start_stop = 0;
    sim::Millis segment_ms = 60000;
    sim::Millis update_period = 30000;  // destination query period
    sim::Millis bid_window = 1000;      // time to collect competing bids for a call
};

/// A bus carries a fog node. It polls onboard passengers for their
/// destinations, takes call-a-bus requests from stop sensors, and drives a
/// nearest-neighbor route over the pending stops.
///
/// When several buses hear the same call they each publish a bid; after the
/// bid window every bus picks the same winner: a bus that already has the
/// stop pending, otherwise the one with the fewest pending stops, ties to
/// the lower node id.
class BusApp {
public:
    BusApp(components::FogNode& fog, BusConfig config);

    /// Runs one destination poll now.
    void update_route();

    [[nodiscard]] Stop position() const { return position_; }
    [[nodiscard]] std::set<Stop> pending() const;
    [[nodiscard]] const std::vector<Stop>& route() const { return route_; }

private:
    struct Bid {
        bool has_stop = false;
        std::int64_t pending = 0;
    };
    struct CallState {
        Stop stop = 0;
        bool heard = false;
        bool resolved = false;
        std::map<NodeId, Bid> bids;
    };

    void on_call(const dtps::Message& m);
    void on_bid(const dtps::Message& m);
    void resolve(const std::string& call);
    void on_destinations(const components::GeneralQueryResult& r);
    void replan();
    void depart();
    void arrive();

    components::FogNode& fog_;
    BusConfig config_;
    Stop position_;
    bool moving_ = false;
    Stop target_ = 0;
    std::set<Stop> calls_;
    std::map<NodeId, Stop> passengers_;  // onboard sensor -> destination
    std::set<NodeId> delivered_;
    std::map<std::string, CallState> bids_;
    std::vector<Stop> route_;
};

/// Stop-side "call a bus" button.
void call_a_bus(components::SensorNode& stop_sensor, Stop stop);

}  // namespace fogsense::apps

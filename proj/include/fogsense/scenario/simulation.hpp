#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogsense/apps/bus.hpp"
#include "fogsense/apps/density.hpp"
#include "fogsense/apps/family_safety.hpp"
#include "fogsense/apps/mule.hpp"
#include "fogsense/components/cloud.hpp"
#include "fogsense/components/fog.hpp"
#include "fogsense/components/sensor.hpp"
#include "fogsense/scenario/scenario.hpp"

namespace fogsense::scenario {

class InvariantViolation : public std::runtime_error {
public:
    InvariantViolation(std::string invariant, const sim::TraceRecord& at, const std::string& detail);

    [[nodiscard]] const std::string& invariant() const { return invariant_; }
    [[nodiscard]] std::uint64_t seq() const { return seq_; }
    [[nodiscard]] sim::SimTime time() const { return time_; }

private:
    std::string invariant_;
    std::uint64_t seq_;
    sim::SimTime time_;
};

/// Checks runtime invariants on every trace record as it is emitted and
/// throws InvariantViolation on the first breach:
///   clock-monotonic      time never decreases, seq strictly increases
///   at-most-once         one DELIVER per (node, message, handler)
///   safelist-monotone    each fog adds a phone to its SafeList once
///   ok-publish-bound     publish(OK, p) count <= 1 + number of fogs
class InvariantMonitor {
public:
    explicit InvariantMonitor(std::size_t fog_count) : fog_count_(fog_count) {}

    void observe(const sim::TraceRecord& r);

private:
    std::size_t fog_count_;
    bool any_ = false;
    sim::SimTime last_time_;
    std::uint64_t last_seq_ = 0;
    std::set<std::tuple<std::string, std::string, std::string>> delivered_;
    std::map<std::string, std::set<std::string>> safe_;
    std::map<std::string, std::size_t> ok_publishes_;
};

/// A scenario instantiated on a kernel: nodes, links and apps wired up and
/// ready to run.
class Simulation {
public:
    explicit Simulation(const Scenario& scenario);

    /// Runs to the scenario's stop time and returns the full trace.
    std::vector<sim::TraceRecord> run();

    sim::Kernel& kernel() { return kernel_; }
    [[nodiscard]] const Scenario& scenario() const { return scenario_; }

    components::FogNode& fog(const NodeId& id);
    components::SensorNode& sensor(const NodeId& id);
    components::CloudNode& cloud(const NodeId& id);

    [[nodiscard]] const std::map<NodeId, std::unique_ptr<apps::FamilySafetyFog>>& safety_fogs() const { return safety_fogs_; }
    [[nodiscard]] const std::map<NodeId, std::unique_ptr<apps::BusApp>>& buses() const { return buses_; }
    [[nodiscard]] const std::map<NodeId, std::unique_ptr<apps::DataMuleApp>>& mules() const { return mules_; }

private:
    void install(const AppSpec& app);
    void at(components::Node& node, sim::Millis t, std::function<void()> fn);
    components::Node& node(const NodeId& id);

    Scenario scenario_;
    sim::Kernel kernel_;
    InvariantMonitor monitor_;
    std::map<NodeId, std::unique_ptr<components::Node>> nodes_;
    std::map<NodeId, std::unique_ptr<apps::FamilySafetyFog>> safety_fogs_;
    std::vector<std::unique_ptr<apps::FamilySafetySensor>> safety_sensors_;
    std::vector<std::unique_ptr<apps::DensityMapApp>> density_;
    std::map<NodeId, std::unique_ptr<apps::BusApp>> buses_;
    std::map<NodeId, std::unique_ptr<apps::DataMuleApp>> mules_;
};

/// Loads, builds and runs in one call. Throws InvalidScenario or
/// InvariantViolation.
std::vector<sim::TraceRecord> run_scenario(const Scenario& scenario);

}  // namespace fogsense::scenario

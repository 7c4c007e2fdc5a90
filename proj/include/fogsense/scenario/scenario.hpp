#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fogsense/components/params.hpp"
#include "fogsense/components/query.hpp"
#include "fogsense/components/sensor.hpp"
#include "fogsense/sim/kernel.hpp"

namespace fogsense::scenario {

using sim::Millis;
using sim::NodeId;
using sim::Role;

struct NodeSpec {
    NodeId id;
    Role role = Role::Sensor;
    components::SensorProfile profile;  // sensors only
};

struct LinkSpec {
    NodeId a;
    NodeId b;
    Millis latency = 0;
    std::vector<std::pair<Millis, Millis>> up;  // [start, end)
};

// ---- app activations -----------------------------------------------------

struct FamilyMember {
    NodeId sensor;
    std::string phone;
    std::set<std::string> family;
};
struct FamilySafetyApp {
    std::vector<NodeId> fogs;  // empty: every fog
    std::vector<FamilyMember> sensors;
};
struct DensityMapApp {
    NodeId fog;
    std::vector<Millis> at;
};
struct BusApp {
    NodeId fog;
    std::int64_t start_stop = 0;
    Millis segment_ms = 60000;
    Millis update_period_ms = 30000;
    Millis bid_window_ms = 1000;
};
struct CallABusApp {
    NodeId sensor;
    std::int64_t stop = 0;
    std::vector<Millis> at;
};
struct DataMuleApp {
    NodeId fog;
    std::string stream;
    std::vector<std::string> metrics;
    Millis window_ms = 10000;
};
struct PublishApp {
    NodeId node;
    std::string topic;
    std::string payload;
    std::vector<Millis> at;
};
struct SubscribeApp {
    NodeId node;
    std::string topic;
};
struct ContinuousQueryApp {
    NodeId fog;
    NodeId sensor;
    std::string query;
    Millis at = 0;
};
struct GeneralQueryApp {
    NodeId fog;
    components::RequiredAnswers required = components::RequiredAnswers::unbounded();
    components::PromptTag prompt = components::PromptTag::Position;
    Millis at = 0;
};
struct ConfigPushApp {
    NodeId cloud;
    NodeId fog;  // "*" for every fog
    std::string id;
    std::string data;
    Millis at = 0;
};

using AppSpec = std::variant<FamilySafetyApp, DensityMapApp, BusApp, CallABusApp, DataMuleApp, PublishApp, SubscribeApp,
                             ContinuousQueryApp, GeneralQueryApp, ConfigPushApp>;

struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    Millis stop_time = 0;
    components::Params params;
    std::vector<NodeSpec> nodes;
    std::vector<LinkSpec> links;
    std::vector<AppSpec> apps;

    [[nodiscard]] const NodeSpec* find(const NodeId& id) const;
    [[nodiscard]] std::vector<NodeId> ids(Role role) const;
};

/// One validation problem. `where` is a JSON path like "links[3].b", or
/// "line N" for syntax errors.
struct Diagnostic {
    std::string where;
    std::string message;

    [[nodiscard]] std::string str() const { return where.empty() ? message : where + ": " + message; }
};

struct LoadResult {
    std::optional<Scenario> scenario;
    std::vector<Diagnostic> diagnostics;

    [[nodiscard]] bool ok() const { return scenario.has_value(); }
};

/// Command-line overrides applied after the file is read and before
/// validation of the final values.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<Millis> until;
    std::vector<std::pair<std::string, std::string>> params;
};

/// Parses and validates scenario text. Collects every problem rather than
/// stopping at the first; `scenario` is set only when there are none.
LoadResult load_scenario_text(const std::string& text, const Overrides& overrides = {});
LoadResult load_scenario_file(const std::string& path, const Overrides& overrides = {});

class InvalidScenario : public std::runtime_error {
public:
    explicit InvalidScenario(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace fogsense::scenario

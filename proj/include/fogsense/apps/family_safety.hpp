#pragma once

#include <set>
#include <string>

#include "fogsense/components/fog.hpp"
#include "fogsense/components/sensor.hpp"

namespace fogsense::apps {

using components::NodeId;
using PhoneNumber = std::string;

inline const std::string kOkTopic = "OK";

/// Fog side: keep a SafeList of phone numbers known to be OK, republish
/// each number once, and ask every newly connected sensor to mark itself OK.
class FamilySafetyFog {
public:
    explicit FamilySafetyFog(components::FogNode& fog);

    [[nodiscard]] const std::set<PhoneNumber>& safe_list() const { return safe_; }

private:
    void on_ok(const dtps::Message& m);

    components::FogNode& fog_;
    std::set<PhoneNumber> safe_;
};

/// Sensor side: show family members that are safe and let the user mark
/// themself OK when prompted.
class FamilySafetySensor {
public:
    FamilySafetySensor(components::SensorNode& sensor, PhoneNumber phone, std::set<PhoneNumber> family);

    [[nodiscard]] const std::set<PhoneNumber>& displayed() const { return displayed_; }

private:
    void on_ok(const dtps::Message& m);
    void on_prompt(const components::Query& q);

    components::SensorNode& sensor_;
    PhoneNumber phone_;
    std::set<PhoneNumber> family_;
    std::set<PhoneNumber> displayed_;
    bool confirmed_ = false;
};

}  // namespace fogsense::apps

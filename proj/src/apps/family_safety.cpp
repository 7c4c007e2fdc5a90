#include "fogsense/apps/family_safety.hpp"

namespace fogsense::apps {

using components::Fields;

FamilySafetyFog::FamilySafetyFog(components::FogNode& fog) : fog_(fog) {
    fog_.subscribe(kOkTopic, "fs_fog_on_ok", [this](const dtps::Message& m) { on_ok(m); });
    fog_.on_sensor_connection([this](const NodeId& sensor) {
        fog_.query_specific_sensor(sensor, components::Query::one_time(components::PromptTag::MarkSelfOk));
    });
}

void FamilySafetyFog::on_ok(const dtps::Message& m) {
    const auto p = m.payload_text();
    if (safe_.contains(p)) {
        return;
    }
    // Insert first: publishing delivers to this node's own OK handler
    // synchronously, and the guard must already see p.
    safe_.insert(p);
    fog_.trace("SAFE_ADD", Fields{{"phone", p}, {"size", safe_.size()}, {"msg", m.id.str()}});
    fog_.publish(kOkTopic, std::string_view(p));
}

FamilySafetySensor::FamilySafetySensor(components::SensorNode& sensor, PhoneNumber phone, std::set<PhoneNumber> family)
    : sensor_(sensor), phone_(std::move(phone)), family_(std::move(family)) {
    sensor_.subscribe(kOkTopic, "fs_sensor_on_ok", [this](const dtps::Message& m) { on_ok(m); });
    sensor_.set_prompt_handler(components::PromptTag::MarkSelfOk, [this](const components::Query& q) { on_prompt(q); });
}

void FamilySafetySensor::on_ok(const dtps::Message& m) {
    const auto p = m.payload_text();
    // Every fog republishes a number once, so the same p arrives under
    // several message ids; the display is shown once per family member.
    if (!family_.contains(p) || !displayed_.insert(p).second) {
        return;
    }
    sensor_.trace("DISPLAY", Fields{{"what", "SAFE"}, {"phone", p}, {"msg", m.id.str()}});
}

void FamilySafetySensor::on_prompt(const components::Query& q) {
    sensor_.trace("DISPLAY", Fields{{"what", "MARK_SELF_OK"}, {"phone", phone_}, {"query", q.id}});
    sensor_.ask_user(q, [this] {
        if (confirmed_) {
            return;
        }
        confirmed_ = true;
        sensor_.publish(kOkTopic, std::string_view(phone_));
    });
}

}  // namespace fogsense::apps

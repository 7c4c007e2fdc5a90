#include "fogsense/scenario/simulation.hpp"

namespace fogsense::scenario {

using components::Fields;

InvariantViolation::InvariantViolation(std::string invariant, const sim::TraceRecord& at, const std::string& detail)
    : std::runtime_error("invariant " + invariant + " violated at trace seq " + std::to_string(at.seq) + " (t=" +
                         std::to_string(at.time.ms()) + ", node " + at.node + ", " + at.kind + "): " + detail),
      invariant_(std::move(invariant)),
      seq_(at.seq),
      time_(at.time) {}

void InvariantMonitor::observe(const sim::TraceRecord& r) {
    if (any_ && (r.time < last_time_ || r.seq <= last_seq_)) {
        throw InvariantViolation("clock-monotonic", r, "previous record at t=" + std::to_string(last_time_.ms()));
    }
    any_ = true;
    last_time_ = r.time;
    last_seq_ = r.seq;

    if (r.kind == "DELIVER") {
        if (!delivered_.emplace(r.node, r.str("msg"), r.str("handler")).second) {
            throw InvariantViolation("at-most-once", r, "message " + r.str("msg") + " delivered twice to " + r.str("handler"));
        }
    } else if (r.kind == "SAFE_ADD") {
        if (!safe_[r.node].insert(r.str("phone")).second) {
            throw InvariantViolation("safelist-monotone", r, "phone " + r.str("phone") + " added twice");
        }
    } else if (r.kind == "PUBLISH" && r.str("topic") == apps::kOkTopic) {
        const auto n = ++ok_publishes_[r.str("payload")];
        if (n > 1 + fog_count_) {
            throw InvariantViolation("ok-publish-bound", r,
                                     "phone " + r.str("payload") + " published " + std::to_string(n) + " times");
        }
    }
}

Simulation::Simulation(const Scenario& scenario)
    : scenario_(scenario), kernel_(scenario.seed), monitor_(scenario.ids(Role::Fog).size()) {
    kernel_.tracer().set_observer([this](const sim::TraceRecord& r) { monitor_.observe(r); });
    for (const auto& n : scenario_.nodes) {
        kernel_.add_node(n.id, n.role);
    }
    for (const auto& l : scenario_.links) {
        sim::Link link{l.a, l.b, l.latency, {}};
        for (const auto& [s, e] : l.up) {
            link.up.push_back(sim::Interval{sim::SimTime{s}, sim::SimTime{e}});
        }
        kernel_.add_link(std::move(link));
    }
    for (const auto& n : scenario_.nodes) {
        std::unique_ptr<components::Node> node;
        switch (n.role) {
            case Role::Cloud:
                node = std::make_unique<components::CloudNode>(n.id, kernel_, scenario_.params);
                break;
            case Role::Fog:
                node = std::make_unique<components::FogNode>(n.id, kernel_, scenario_.params);
                break;
            case Role::Sensor:
                node = std::make_unique<components::SensorNode>(n.id, kernel_, scenario_.params, n.profile);
                break;
        }
        nodes_.emplace(n.id, std::move(node));
    }
    for (const auto& app : scenario_.apps) {
        install(app);
    }
}

components::Node& Simulation::node(const NodeId& id) {
    const auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw sim::UnknownNode(id);
    }
    return *it->second;
}

components::FogNode& Simulation::fog(const NodeId& id) { return dynamic_cast<components::FogNode&>(node(id)); }
components::SensorNode& Simulation::sensor(const NodeId& id) { return dynamic_cast<components::SensorNode&>(node(id)); }
components::CloudNode& Simulation::cloud(const NodeId& id) { return dynamic_cast<components::CloudNode&>(node(id)); }

void Simulation::at(components::Node& n, sim::Millis t, std::function<void()> fn) {
    n.add_start_hook([&n, t, fn = std::move(fn)] { n.set_timer(t, fn); });
}

void Simulation::install(const AppSpec& spec) {
    std::visit(
        [this](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, FamilySafetyApp>) {
                const auto fogs = a.fogs.empty() ? scenario_.ids(Role::Fog) : a.fogs;
                for (const auto& f : fogs) {
                    if (!safety_fogs_.contains(f)) {
                        safety_fogs_.emplace(f, std::make_unique<apps::FamilySafetyFog>(fog(f)));
                    }
                }
                for (const auto& m : a.sensors) {
                    safety_sensors_.push_back(std::make_unique<apps::FamilySafetySensor>(sensor(m.sensor), m.phone, m.family));
                }
            } else if constexpr (std::is_same_v<T, DensityMapApp>) {
                auto& app = *density_.emplace_back(std::make_unique<apps::DensityMapApp>(fog(a.fog)));
                for (const auto t : a.at) {
                    at(fog(a.fog), t, [&app] { app.request(); });
                }
            } else if constexpr (std::is_same_v<T, BusApp>) {
                buses_[a.fog] = std::make_unique<apps::BusApp>(
                    fog(a.fog), apps::BusConfig{a.start_stop, a.segment_ms, a.update_period_ms, a.bid_window_ms});
            } else if constexpr (std::is_same_v<T, CallABusApp>) {
                auto& s = sensor(a.sensor);
                for (const auto t : a.at) {
                    at(s, t, [&s, stop = a.stop] { apps::call_a_bus(s, stop); });
                }
            } else if constexpr (std::is_same_v<T, DataMuleApp>) {
                mules_[a.fog] = std::make_unique<apps::DataMuleApp>(fog(a.fog), apps::MuleConfig{a.stream, a.metrics, a.window_ms});
            } else if constexpr (std::is_same_v<T, PublishApp>) {
                auto& n = node(a.node);
                for (const auto t : a.at) {
                    at(n, t, [&n, topic = a.topic, payload = a.payload] { n.publish(topic, std::string_view(payload)); });
                }
            } else if constexpr (std::is_same_v<T, SubscribeApp>) {
                node(a.node).subscribe(a.topic, "app", [](const dtps::Message&) {});
            } else if constexpr (std::is_same_v<T, ContinuousQueryApp>) {
                auto& f = fog(a.fog);
                at(f, a.at, [&f, sensor = a.sensor, text = a.query] {
                    try {
                        f.query_specific_sensor(sensor, components::Query::continuous(text));
                    } catch (const std::invalid_argument& e) {
                        f.trace("APP_ERROR", Fields{{"app", "continuous_query"}, {"error", e.what()}});
                    }
                });
            } else if constexpr (std::is_same_v<T, GeneralQueryApp>) {
                auto& f = fog(a.fog);
                at(f, a.at, [&f, required = a.required, prompt = a.prompt] {
                    f.query_all_sensors(required, components::Query::one_time(prompt));
                });
            } else if constexpr (std::is_same_v<T, ConfigPushApp>) {
                auto& c = cloud(a.cloud);
                at(c, a.at, [&c, fog = a.fog, blob = components::ConfigBlob{a.id, a.data}] { c.push_config(fog, blob); });
            }
        },
        spec);
}

std::vector<sim::TraceRecord> Simulation::run() {
    for (const auto& n : scenario_.nodes) {
        kernel_.trace(n.id, "NODE", Fields{{"role", sim::to_string(n.role)}});
    }
    auto trace = kernel_.run_until(sim::SimTime{scenario_.stop_time});
    kernel_.finish();
    return trace;
}

std::vector<sim::TraceRecord> run_scenario(const Scenario& scenario) {
    Simulation sim(scenario);
    return sim.run();
}

}  // namespace fogsense::scenario

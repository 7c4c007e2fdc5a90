#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fogsense/scenario/scenario.hpp"

namespace fogsense::scenario {

namespace {

using Json = nlohmann::ordered_json;

// Walks the document, recording every problem with its JSON path.
class Checker {
public:
    std::vector<Diagnostic> diags;

    void error(const std::string& where, std::string message) { diags.push_back({where, std::move(message)}); }

    static std::string at(const std::string& base, const std::string& key) {
        return base.empty() ? key : base + "." + key;
    }
    static std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

    const Json* field(const Json& obj, const std::string& base, const std::string& key, bool required) {
        if (const auto it = obj.find(key); it != obj.end()) {
            return &*it;
        }
        if (required) {
            error(at(base, key), "required field is missing");
        }
        return nullptr;
    }

    void unknown_keys(const Json& obj, const std::string& base, std::initializer_list<std::string_view> allowed) {
        for (const auto& [k, v] : obj.items()) {
            if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
                error(at(base, k), "unknown field");
            }
        }
    }

    std::optional<std::string> string(const Json& obj, const std::string& base, const std::string& key, bool required,
                                      bool non_empty = true) {
        const auto* v = field(obj, base, key, required);
        if (v == nullptr) return std::nullopt;
        if (!v->is_string()) {
            error(at(base, key), "expected a string");
            return std::nullopt;
        }
        auto s = v->get<std::string>();
        if (non_empty && s.empty()) {
            error(at(base, key), "must not be empty");
            return std::nullopt;
        }
        return s;
    }

    std::optional<std::int64_t> integer(const Json& obj, const std::string& base, const std::string& key, bool required,
                                        std::int64_t min = std::numeric_limits<std::int64_t>::min()) {
        const auto* v = field(obj, base, key, required);
        if (v == nullptr) return std::nullopt;
        return integer_value(*v, at(base, key), min);
    }

    std::optional<std::int64_t> integer_value(const Json& v, const std::string& where,
                                              std::int64_t min = std::numeric_limits<std::int64_t>::min()) {
        if (!v.is_number_integer()) {
            error(where, "expected an integer");
            return std::nullopt;
        }
        const auto n = v.is_number_unsigned() && v.get<std::uint64_t>() > std::uint64_t(INT64_MAX)
                           ? std::optional<std::int64_t>{}
                           : std::optional<std::int64_t>{v.get<std::int64_t>()};
        if (!n) {
            error(where, "integer out of range");
            return std::nullopt;
        }
        if (*n < min) {
            error(where, "must be >= " + std::to_string(min));
            return std::nullopt;
        }
        return n;
    }

    std::optional<double> number(const Json& obj, const std::string& base, const std::string& key, bool required) {
        const auto* v = field(obj, base, key, required);
        if (v == nullptr) return std::nullopt;
        if (!v->is_number() || !std::isfinite(v->get<double>())) {
            error(at(base, key), "expected a finite number");
            return std::nullopt;
        }
        return v->get<double>();
    }

    const Json* array(const Json& obj, const std::string& base, const std::string& key, bool required) {
        const auto* v = field(obj, base, key, required);
        if (v == nullptr) return nullptr;
        if (!v->is_array()) {
            error(at(base, key), "expected an array");
            return nullptr;
        }
        return v;
    }

    const Json* object(const Json& obj, const std::string& base, const std::string& key, bool required) {
        const auto* v = field(obj, base, key, required);
        if (v == nullptr) return nullptr;
        if (!v->is_object()) {
            error(at(base, key), "expected an object");
            return nullptr;
        }
        return v;
    }

    /// "at": a single time or a list of times, each in [0, stop).
    std::vector<Millis> times(const Json& obj, const std::string& base, Millis stop, bool required) {
        std::vector<Millis> out;
        const auto* v = field(obj, base, "at", required);
        if (v == nullptr) return out;
        const auto where = at(base, "at");
        auto one = [&](const Json& e, const std::string& w) {
            if (auto t = integer_value(e, w, 0)) {
                if (stop > 0 && *t >= stop) {
                    error(w, "time " + std::to_string(*t) + " is not before stop_time " + std::to_string(stop));
                } else {
                    out.push_back(*t);
                }
            }
        };
        if (v->is_array()) {
            for (std::size_t i = 0; i < v->size(); ++i) one((*v)[i], at(where, i));
        } else {
            one(*v, where);
        }
        return out;
    }
};

struct NodeIndex {
    std::map<NodeId, Role> roles;

    bool expect(Checker& c, const std::string& where, const std::optional<NodeId>& id,
                std::initializer_list<Role> allowed) const {
        if (!id) return false;
        const auto it = roles.find(*id);
        if (it == roles.end()) {
            c.error(where, "unknown node '" + *id + "'");
            return false;
        }
        if (std::find(allowed.begin(), allowed.end(), it->second) == allowed.end()) {
            std::string names;
            for (auto r : allowed) names += (names.empty() ? "" : " or ") + std::string(sim::to_string(r));
            c.error(where, "node '" + *id + "' is a " + std::string(sim::to_string(it->second)) + ", expected " + names);
            return false;
        }
        return true;
    }
};

std::optional<components::FieldGen> parse_gen(Checker& c, const Json& g, const std::string& where) {
    using Kind = components::FieldGen::Kind;
    if (!g.is_object()) {
        c.error(where, "expected an object");
        return std::nullopt;
    }
    const auto kind = c.string(g, where, "kind", true);
    if (!kind) return std::nullopt;
    components::FieldGen out;
    if (*kind == "const") {
        c.unknown_keys(g, where, {"kind", "value"});
        out.kind = Kind::Const;
        if (auto v = c.number(g, where, "value", true)) out.a = *v; else return std::nullopt;
    } else if (*kind == "uniform" || *kind == "int_uniform") {
        c.unknown_keys(g, where, {"kind", "min", "max"});
        out.kind = *kind == "uniform" ? Kind::Uniform : Kind::IntUniform;
        const auto lo = c.number(g, where, "min", true);
        const auto hi = c.number(g, where, "max", true);
        if (!lo || !hi) return std::nullopt;
        if (*lo > *hi) {
            c.error(where, "min must not exceed max");
            return std::nullopt;
        }
        if (out.kind == Kind::IntUniform && (std::floor(*lo) != *lo || std::floor(*hi) != *hi)) {
            c.error(where, "int_uniform bounds must be integers");
            return std::nullopt;
        }
        out.a = *lo;
        out.b = *hi;
    } else if (*kind == "counter") {
        c.unknown_keys(g, where, {"kind", "start", "step"});
        out.kind = Kind::Counter;
        out.a = c.number(g, where, "start", false).value_or(0.0);
        out.b = c.number(g, where, "step", false).value_or(1.0);
    } else if (*kind == "text") {
        c.unknown_keys(g, where, {"kind", "value"});
        out.kind = Kind::Text;
        if (auto v = c.string(g, where, "value", true, false)) out.text = *v; else return std::nullopt;
    } else {
        c.error(Checker::at(where, "kind"), "unknown generator '" + *kind + "' (const, uniform, int_uniform, counter, text)");
        return std::nullopt;
    }
    return out;
}

void parse_sensor(Checker& c, const Json& n, const std::string& where, components::SensorProfile& p) {
    if (const auto* pos = c.field(n, where, "position", false)) {
        const auto w = Checker::at(where, "position");
        if (!pos->is_array() || pos->size() != 2 || !(*pos)[0].is_number() || !(*pos)[1].is_number() ||
            !std::isfinite((*pos)[0].get<double>()) || !std::isfinite((*pos)[1].get<double>())) {
            c.error(w, "expected [x, y] with finite numbers");
        } else {
            p.waypoints.push_back({0, (*pos)[0].get<double>(), (*pos)[1].get<double>()});
        }
    }
    if (const auto* wps = c.array(n, where, "waypoints", false)) {
        if (!p.waypoints.empty()) {
            c.error(Checker::at(where, "waypoints"), "give either position or waypoints, not both");
        }
        p.waypoints.clear();
        for (std::size_t i = 0; i < wps->size(); ++i) {
            const auto w = Checker::at(Checker::at(where, "waypoints"), i);
            const auto& e = (*wps)[i];
            if (!e.is_object()) {
                c.error(w, "expected an object {t, x, y}");
                continue;
            }
            const auto t = c.integer(e, w, "t", true, 0);
            const auto x = c.number(e, w, "x", true);
            const auto y = c.number(e, w, "y", true);
            if (!t || !x || !y) continue;
            if (!p.waypoints.empty() && *t <= p.waypoints.back().t) {
                c.error(w, "waypoint times must be strictly increasing");
                continue;
            }
            p.waypoints.push_back({*t, *x, *y});
        }
    }
    if (const auto* u = c.field(n, where, "user", false)) {
        const auto w = Checker::at(where, "user");
        if (u->is_string() && u->get<std::string>() == "ignore") {
            p.response_delay.reset();
        } else if (u->is_object()) {
            c.unknown_keys(*u, w, {"response_delay_ms"});
            if (auto d = c.integer(*u, w, "response_delay_ms", true, 0)) p.response_delay = *d;
        } else {
            c.error(w, "expected \"ignore\" or {\"response_delay_ms\": n}");
        }
    }
    if (const auto* d = c.field(n, where, "destination", false)) {
        if (auto v = c.integer_value(*d, Checker::at(where, "destination"))) p.destination = *v;
    }
    if (auto v = c.integer(n, where, "persons_nearby", false, 0)) p.persons_nearby = *v;
    if (const auto* streams = c.array(n, where, "streams", false)) {
        std::set<std::string> names;
        for (std::size_t i = 0; i < streams->size(); ++i) {
            const auto w = Checker::at(Checker::at(where, "streams"), i);
            const auto& s = (*streams)[i];
            if (!s.is_object()) {
                c.error(w, "expected an object");
                continue;
            }
            c.unknown_keys(s, w, {"name", "period_ms", "fields"});
            components::StreamSpec spec;
            const auto name = c.string(s, w, "name", true);
            const auto period = c.integer(s, w, "period_ms", true, 1);
            const auto* fields = c.object(s, w, "fields", true);
            if (!name || !period || fields == nullptr) continue;
            if (!names.insert(*name).second) {
                c.error(Checker::at(w, "name"), "duplicate stream '" + *name + "'");
                continue;
            }
            if (fields->empty()) {
                c.error(Checker::at(w, "fields"), "a stream needs at least one field");
                continue;
            }
            spec.name = *name;
            spec.period = *period;
            bool ok = true;
            for (const auto& [fname, gen] : fields->items()) {
                auto g = parse_gen(c, gen, Checker::at(Checker::at(w, "fields"), fname));
                if (!g) {
                    ok = false;
                    continue;
                }
                spec.fields.emplace_back(fname, std::move(*g));
            }
            if (ok) p.streams.push_back(std::move(spec));
        }
    }
}

std::optional<AppSpec> parse_app(Checker& c, const Json& a, const std::string& w, const NodeIndex& idx, Millis stop) {
    if (!a.is_object()) {
        c.error(w, "expected an object");
        return std::nullopt;
    }
    const auto type = c.string(a, w, "type", true);
    if (!type) return std::nullopt;
    const auto errors_before = c.diags.size();
    auto ok = [&] { return c.diags.size() == errors_before; };

    if (*type == "family_safety") {
        c.unknown_keys(a, w, {"type", "fogs", "sensors"});
        FamilySafetyApp app;
        if (const auto* fogs = c.array(a, w, "fogs", false)) {
            for (std::size_t i = 0; i < fogs->size(); ++i) {
                const auto fw = Checker::at(Checker::at(w, "fogs"), i);
                if (!(*fogs)[i].is_string()) {
                    c.error(fw, "expected a node id");
                    continue;
                }
                const auto id = (*fogs)[i].get<std::string>();
                if (idx.expect(c, fw, id, {Role::Fog})) app.fogs.push_back(id);
            }
        }
        if (const auto* sensors = c.array(a, w, "sensors", true)) {
            std::set<NodeId> seen;
            for (std::size_t i = 0; i < sensors->size(); ++i) {
                const auto sw = Checker::at(Checker::at(w, "sensors"), i);
                const auto& s = (*sensors)[i];
                if (!s.is_object()) {
                    c.error(sw, "expected an object");
                    continue;
                }
                c.unknown_keys(s, sw, {"sensor", "phone", "family"});
                FamilyMember m;
                const auto id = c.string(s, sw, "sensor", true);
                const auto phone = c.string(s, sw, "phone", true);
                if (idx.expect(c, Checker::at(sw, "sensor"), id, {Role::Sensor}) && !seen.insert(*id).second) {
                    c.error(Checker::at(sw, "sensor"), "sensor '" + *id + "' listed twice");
                }
                if (const auto* fam = c.array(s, sw, "family", false)) {
                    for (std::size_t k = 0; k < fam->size(); ++k) {
                        if (!(*fam)[k].is_string() || (*fam)[k].get<std::string>().empty()) {
                            c.error(Checker::at(Checker::at(sw, "family"), k), "expected a phone number");
                        } else {
                            m.family.insert((*fam)[k].get<std::string>());
                        }
                    }
                }
                if (id && phone) {
                    m.sensor = *id;
                    m.phone = *phone;
                    app.sensors.push_back(std::move(m));
                }
            }
        }
        if (ok()) return app;
    } else if (*type == "density_map") {
        c.unknown_keys(a, w, {"type", "fog", "at"});
        DensityMapApp app;
        const auto fog = c.string(a, w, "fog", true);
        idx.expect(c, Checker::at(w, "fog"), fog, {Role::Fog});
        app.at = c.times(a, w, stop, true);
        if (ok()) {
            app.fog = *fog;
            return app;
        }
    } else if (*type == "bus") {
        c.unknown_keys(a, w, {"type", "fog", "start_stop", "segment_ms", "update_period_ms", "bid_window_ms"});
        BusApp app;
        const auto fog = c.string(a, w, "fog", true);
        idx.expect(c, Checker::at(w, "fog"), fog, {Role::Fog});
        if (auto v = c.integer(a, w, "start_stop", false)) app.start_stop = *v;
        if (auto v = c.integer(a, w, "segment_ms", false, 0)) app.segment_ms = *v;
        if (auto v = c.integer(a, w, "update_period_ms", false, 1)) app.update_period_ms = *v;
        if (auto v = c.integer(a, w, "bid_window_ms", false, 0)) app.bid_window_ms = *v;
        if (ok()) {
            app.fog = *fog;
            return app;
        }
    } else if (*type == "call_a_bus") {
        c.unknown_keys(a, w, {"type", "sensor", "stop", "at"});
        CallABusApp app;
        const auto s = c.string(a, w, "sensor", true);
        idx.expect(c, Checker::at(w, "sensor"), s, {Role::Sensor});
        const auto stop_id = c.integer(a, w, "stop", true);
        app.at = c.times(a, w, stop, true);
        if (ok()) {
            app.sensor = *s;
            app.stop = *stop_id;
            return app;
        }
    } else if (*type == "data_mule") {
        c.unknown_keys(a, w, {"type", "fog", "stream", "metrics", "window_ms"});
        DataMuleApp app;
        const auto fog = c.string(a, w, "fog", true);
        idx.expect(c, Checker::at(w, "fog"), fog, {Role::Fog});
        const auto stream = c.string(a, w, "stream", true);
        if (const auto* ms = c.array(a, w, "metrics", true)) {
            if (ms->empty()) c.error(Checker::at(w, "metrics"), "at least one metric is required");
            for (std::size_t i = 0; i < ms->size(); ++i) {
                if (!(*ms)[i].is_string() || (*ms)[i].get<std::string>().empty()) {
                    c.error(Checker::at(Checker::at(w, "metrics"), i), "expected a field name");
                } else {
                    app.metrics.push_back((*ms)[i].get<std::string>());
                }
            }
        }
        if (auto v = c.integer(a, w, "window_ms", false, 1)) app.window_ms = *v;
        if (ok()) {
            app.fog = *fog;
            app.stream = *stream;
            return app;
        }
    } else if (*type == "publish") {
        c.unknown_keys(a, w, {"type", "node", "topic", "payload", "at"});
        PublishApp app;
        const auto node = c.string(a, w, "node", true);
        idx.expect(c, Checker::at(w, "node"), node, {Role::Cloud, Role::Fog, Role::Sensor});
        const auto topic = c.string(a, w, "topic", true);
        const auto payload = c.string(a, w, "payload", false, false);
        app.at = c.times(a, w, stop, true);
        if (ok()) {
            app.node = *node;
            app.topic = *topic;
            app.payload = payload.value_or("");
            return app;
        }
    } else if (*type == "subscribe") {
        c.unknown_keys(a, w, {"type", "node", "topic"});
        const auto node = c.string(a, w, "node", true);
        idx.expect(c, Checker::at(w, "node"), node, {Role::Cloud, Role::Fog, Role::Sensor});
        const auto topic = c.string(a, w, "topic", true);
        if (ok()) return SubscribeApp{*node, *topic};
    } else if (*type == "continuous_query") {
        c.unknown_keys(a, w, {"type", "fog", "sensor", "query", "at"});
        const auto fog = c.string(a, w, "fog", true);
        idx.expect(c, Checker::at(w, "fog"), fog, {Role::Fog});
        const auto s = c.string(a, w, "sensor", true);
        idx.expect(c, Checker::at(w, "sensor"), s, {Role::Sensor});
        const auto q = c.string(a, w, "query", true);
        const auto at = c.times(a, w, stop, true);
        if (at.size() > 1) c.error(Checker::at(w, "at"), "a continuous query is installed once");
        if (ok()) return ContinuousQueryApp{*fog, *s, *q, at.front()};
    } else if (*type == "general_query") {
        c.unknown_keys(a, w, {"type", "fog", "required", "prompt", "at"});
        GeneralQueryApp app;
        const auto fog = c.string(a, w, "fog", true);
        idx.expect(c, Checker::at(w, "fog"), fog, {Role::Fog});
        if (const auto* r = c.field(a, w, "required", false)) {
            if (r->is_string() && r->get<std::string>() == "UNBOUNDED") {
                app.required = components::RequiredAnswers::unbounded();
            } else if (auto n = c.integer_value(*r, Checker::at(w, "required"), 1)) {
                app.required = components::RequiredAnswers::exactly(static_cast<std::uint64_t>(*n));
            }
        }
        if (const auto p = c.string(a, w, "prompt", false)) {
            if (auto tag = components::parse_prompt(*p)) {
                app.prompt = *tag;
            } else {
                c.error(Checker::at(w, "prompt"), "unknown prompt '" + *p + "'");
            }
        }
        const auto at = c.times(a, w, stop, true);
        if (at.size() > 1) c.error(Checker::at(w, "at"), "give one time per general_query");
        if (ok()) {
            app.fog = *fog;
            app.at = at.front();
            return app;
        }
    } else if (*type == "config_push") {
        c.unknown_keys(a, w, {"type", "cloud", "fog", "id", "data", "at"});
        const auto cloud = c.string(a, w, "cloud", true);
        idx.expect(c, Checker::at(w, "cloud"), cloud, {Role::Cloud});
        const auto fog = c.string(a, w, "fog", false).value_or("*");
        if (fog != "*") idx.expect(c, Checker::at(w, "fog"), fog, {Role::Fog});
        const auto id = c.string(a, w, "id", true);
        const auto data = c.string(a, w, "data", false, false).value_or("");
        const auto at = c.times(a, w, stop, false);
        if (at.size() > 1) c.error(Checker::at(w, "at"), "give one time per config_push");
        if (ok()) return ConfigPushApp{*cloud, fog, *id, data, at.empty() ? 0 : at.front()};
    } else {
        c.error(Checker::at(w, "type"), "unknown app type '" + *type + "'");
    }
    return std::nullopt;
}

}  // namespace

const NodeSpec* Scenario::find(const NodeId& id) const {
    const auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.id == id; });
    return it == nodes.end() ? nullptr : &*it;
}

std::vector<NodeId> Scenario::ids(Role role) const {
    std::vector<NodeId> out;
    for (const auto& n : nodes) {
        if (n.role == role) out.push_back(n.id);
    }
    return out;
}

InvalidScenario::InvalidScenario(std::vector<Diagnostic> diagnostics)
    : std::runtime_error([&] {
          std::string s = "invalid scenario:";
          for (const auto& d : diagnostics) s += "\n  " + d.str();
          return s;
      }()),
      diagnostics_(std::move(diagnostics)) {}

LoadResult load_scenario_text(const std::string& text, const Overrides& overrides) {
    LoadResult result;
    Checker c;
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Map the byte offset to a line number for the diagnostic.
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        result.diagnostics.push_back({"line " + std::to_string(line), e.what()});
        return result;
    }
    if (!doc.is_object()) {
        result.diagnostics.push_back({"", "top level must be an object"});
        return result;
    }
    c.unknown_keys(doc, "", {"name", "seed", "stop_time", "params", "nodes", "links", "apps", "description"});

    Scenario s;
    s.name = c.string(doc, "", "name", true).value_or("");
    if (const auto* seed = c.field(doc, "", "seed", false)) {
        if (seed->is_number_unsigned()) {
            s.seed = seed->get<std::uint64_t>();
        } else if (seed->is_number_integer() && seed->get<std::int64_t>() >= 0) {
            s.seed = static_cast<std::uint64_t>(seed->get<std::int64_t>());
        } else {
            c.error("seed", "expected an unsigned 64-bit integer");
        }
    }
    if (overrides.seed) s.seed = *overrides.seed;
    // Intervals and app times are checked against the file's stop_time;
    // --until only changes where the run ends.
    s.stop_time = c.integer(doc, "", "stop_time", true, 1).value_or(0);
    if (overrides.until && *overrides.until <= 0) {
        c.error("--until", "must be > 0");
    }

    if (const auto* params = c.object(doc, "", "params", false)) {
        for (const auto& [k, v] : params->items()) {
            if (!v.is_number()) {
                c.error(Checker::at("params", k), "expected a number");
                continue;
            }
            if (auto err = s.params.set(k, v.dump())) c.error(Checker::at("params", k), *err);
        }
    }
    for (const auto& [k, v] : overrides.params) {
        if (auto err = s.params.set(k, v)) c.error("--param " + k, *err);
    }
    for (const auto& p : s.params.problems()) c.error("params", p);

    NodeIndex idx;
    if (const auto* nodes = c.array(doc, "", "nodes", true)) {
        for (std::size_t i = 0; i < nodes->size(); ++i) {
            const auto w = Checker::at("nodes", i);
            const auto& n = (*nodes)[i];
            if (!n.is_object()) {
                c.error(w, "expected an object");
                continue;
            }
            c.unknown_keys(n, w, {"id", "role", "position", "waypoints", "user", "destination", "persons_nearby", "streams"});
            const auto id = c.string(n, w, "id", true);
            const auto role_text = c.string(n, w, "role", true);
            std::optional<Role> role;
            if (role_text) {
                role = sim::parse_role(*role_text);
                if (!role) c.error(Checker::at(w, "role"), "unknown role '" + *role_text + "' (cloud, fog, sensor)");
            }
            if (id && id->front() == '@') {
                c.error(Checker::at(w, "id"), "ids starting with '@' are reserved");
                continue;
            }
            if (id && idx.roles.contains(*id)) {
                c.error(Checker::at(w, "id"), "duplicate node id '" + *id + "'");
                continue;
            }
            NodeSpec spec;
            if (role == Role::Sensor) {
                parse_sensor(c, n, w, spec.profile);
            } else if (role) {
                for (const auto* key : {"position", "waypoints", "user", "destination", "persons_nearby", "streams"}) {
                    if (n.contains(key)) c.error(Checker::at(w, key), "only sensors take this field");
                }
            }
            if (id && role) {
                idx.roles.emplace(*id, *role);
                spec.id = *id;
                spec.role = *role;
                s.nodes.push_back(std::move(spec));
            }
        }
    }

    if (const auto* links = c.array(doc, "", "links", false)) {
        std::set<std::pair<NodeId, NodeId>> pairs;
        for (std::size_t i = 0; i < links->size(); ++i) {
            const auto w = Checker::at("links", i);
            const auto& l = (*links)[i];
            if (!l.is_object()) {
                c.error(w, "expected an object");
                continue;
            }
            c.unknown_keys(l, w, {"a", "b", "latency_ms", "up"});
            const auto before = c.diags.size();
            LinkSpec spec;
            const auto a = c.string(l, w, "a", true);
            const auto b = c.string(l, w, "b", true);
            const bool a_ok = idx.expect(c, Checker::at(w, "a"), a, {Role::Cloud, Role::Fog, Role::Sensor});
            const bool b_ok = idx.expect(c, Checker::at(w, "b"), b, {Role::Cloud, Role::Fog, Role::Sensor});
            if (a_ok && b_ok) {
                if (*a == *b) {
                    c.error(w, "link from '" + *a + "' to itself");
                } else if (!pairs.insert(std::minmax(*a, *b)).second) {
                    c.error(w, "duplicate link between '" + *a + "' and '" + *b + "'");
                }
            }
            spec.latency = c.integer(l, w, "latency_ms", false, 0).value_or(s.params.default_latency);
            if (const auto* up = c.array(l, w, "up", false)) {
                for (std::size_t k = 0; k < up->size(); ++k) {
                    const auto iw = Checker::at(Checker::at(w, "up"), k);
                    const auto& iv = (*up)[k];
                    if (!iv.is_array() || iv.size() != 2) {
                        c.error(iw, "expected [start, end]");
                        continue;
                    }
                    const auto st = c.integer_value(iv[0], iw, 0);
                    const auto en = c.integer_value(iv[1], iw, 0);
                    if (!st || !en) continue;
                    if (*st >= *en) {
                        c.error(iw, "empty interval [" + std::to_string(*st) + ", " + std::to_string(*en) + ")");
                        continue;
                    }
                    if (*en > s.stop_time) {
                        c.error(iw, "interval ends after stop_time " + std::to_string(s.stop_time));
                        continue;
                    }
                    if (!spec.up.empty() && *st < spec.up.back().second) {
                        c.error(iw, "up-interval overlaps or precedes the previous one on link " + a.value_or("?") +
                                        "-" + b.value_or("?"));
                        continue;
                    }
                    spec.up.emplace_back(*st, *en);
                }
            } else {
                spec.up.emplace_back(0, s.stop_time);
            }
            if (c.diags.size() == before) {
                spec.a = *a;
                spec.b = *b;
                s.links.push_back(std::move(spec));
            }
        }
    }

    if (const auto* apps = c.array(doc, "", "apps", false)) {
        for (std::size_t i = 0; i < apps->size(); ++i) {
            if (auto app = parse_app(c, (*apps)[i], Checker::at("apps", i), idx, s.stop_time)) {
                s.apps.push_back(std::move(*app));
            }
        }
    }

    if (overrides.until && *overrides.until > 0) {
        s.stop_time = *overrides.until;
    }
    result.diagnostics = std::move(c.diags);
    if (result.diagnostics.empty()) {
        result.scenario = std::move(s);
    }
    return result;
}

LoadResult load_scenario_file(const std::string& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) {
        LoadResult r;
        r.diagnostics.push_back({path, "cannot open file"});
        return r;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return load_scenario_text(ss.str(), overrides);
}

}  // namespace fogsense::scenario

#include "fogsense/cql/executor.hpp"

namespace fogsense::cql {

WindowedAggregate::WindowedAggregate(QueryAst ast, SimTime installed_at) : ast_(std::move(ast)) {
    validate(ast_);
    next_tick_ = installed_at + ast_.every;
}

SampleResult WindowedAggregate::on_sample(const Sample& sample) {
    SampleResult result;
    if (sample.stream != ast_.stream) {
        return result;
    }
    for (const auto& c : ast_.where) {
        const auto it = sample.fields.find(c.field);
        if (it == sample.fields.end() || it->second.index() != c.literal.index()) {
            result.status = SampleStatus::TypeMismatch;
            return result;
        }
        if (!compare(it->second, c.op, c.literal)) {
            result.status = SampleStatus::Filtered;
            return result;
        }
    }
    Value value = 0.0;
    if (ast_.field != "*") {
        const auto it = sample.fields.find(ast_.field);
        if (it == sample.fields.end() || (ast_.numeric_aggregate() && !std::holds_alternative<double>(it->second))) {
            result.status = SampleStatus::TypeMismatch;
            return result;
        }
        value = it->second;
    }

    result.status = SampleStatus::Admitted;
    Entry e{sample.time, admitted_++, std::move(value)};
    window_.push_back(e);
    push_extrema(e);

    if (ast_.window == WindowKind::Count) {
        while (window_.size() > static_cast<std::size_t>(ast_.size)) {
            evict_front();
        }
        if (admitted_ % static_cast<std::uint64_t>(ast_.every) == 0) {
            result.emission = emit(sample.time);
        }
    }
    return result;
}

std::optional<Emission> WindowedAggregate::on_tick(SimTime now) {
    if (ast_.window != WindowKind::Time) {
        return std::nullopt;
    }
    while (next_tick_ <= now) {
        next_tick_ += ast_.every;
    }
    // Window extent is (now - size, now].
    while (!window_.empty() && window_.front().time <= now - ast_.size) {
        evict_front();
    }
    return emit(now);
}

void WindowedAggregate::evict_front() {
    const auto idx = window_.front().index;
    window_.pop_front();
    if (!min_candidates_.empty() && min_candidates_.front().index == idx) min_candidates_.pop_front();
    if (!max_candidates_.empty() && max_candidates_.front().index == idx) max_candidates_.pop_front();
}

void WindowedAggregate::push_extrema(const Entry& e) {
    if (ast_.aggregate == Aggregate::Min) {
        while (!min_candidates_.empty() && std::get<double>(min_candidates_.back().value) >= std::get<double>(e.value)) {
            min_candidates_.pop_back();
        }
        min_candidates_.push_back(e);
    } else if (ast_.aggregate == Aggregate::Max) {
        while (!max_candidates_.empty() && std::get<double>(max_candidates_.back().value) <= std::get<double>(e.value)) {
            max_candidates_.pop_back();
        }
        max_candidates_.push_back(e);
    }
}

std::optional<Emission> WindowedAggregate::emit(SimTime at) {
    Emission out;
    out.time = at;
    out.window_count = window_.size();
    if (ast_.aggregate == Aggregate::Count) {
        out.value = static_cast<double>(window_.size());
        return out;
    }
    // Every other aggregate is undefined on an empty window.
    if (window_.empty()) {
        return std::nullopt;
    }
    switch (ast_.aggregate) {
        case Aggregate::Sum:
        case Aggregate::Avg: {
            double sum = 0;
            for (const auto& e : window_) {
                sum += std::get<double>(e.value);
            }
            out.value = ast_.aggregate == Aggregate::Sum ? sum : sum / static_cast<double>(window_.size());
            break;
        }
        case Aggregate::Min: out.value = min_candidates_.front().value; break;
        case Aggregate::Max: out.value = max_candidates_.front().value; break;
        case Aggregate::Last: out.value = window_.back().value; break;
        case Aggregate::Count: break;
    }
    return out;
}

InstanceId Executor::install(QueryAst ast, SimTime now, EmitCallback emit) {
    const auto id = next_++;
    instances_.emplace(id, Installed{WindowedAggregate(std::move(ast), now), std::move(emit)});
    return id;
}

bool Executor::uninstall(InstanceId id) { return instances_.erase(id) > 0; }

std::vector<std::pair<InstanceId, SampleStatus>> Executor::on_sample(const Sample& sample) {
    std::vector<std::pair<InstanceId, SampleStatus>> statuses;
    std::vector<std::pair<InstanceId, Emission>> emitted;
    for (auto& [id, inst] : instances_) {
        if (inst.query.ast().stream != sample.stream) {
            continue;
        }
        auto r = inst.query.on_sample(sample);
        statuses.emplace_back(id, r.status);
        if (r.emission) {
            emitted.emplace_back(id, std::move(*r.emission));
        }
    }
    // Callbacks may uninstall instances; run them after the sweep.
    for (const auto& [id, em] : emitted) {
        if (const auto it = instances_.find(id); it != instances_.end() && it->second.emit) {
            it->second.emit(id, em);
        }
    }
    return statuses;
}

void Executor::tick(InstanceId id, SimTime now) {
    const auto it = instances_.find(id);
    if (it == instances_.end()) {
        return;
    }
    auto em = it->second.query.on_tick(now);
    if (em && it->second.emit) {
        it->second.emit(id, *em);
    }
}

const WindowedAggregate* Executor::find(InstanceId id) const {
    const auto it = instances_.find(id);
    return it == instances_.end() ? nullptr : &it->second.query;
}

bool Executor::uses_stream(const std::string& stream) const {
    for (const auto& [id, inst] : instances_) {
        if (inst.query.ast().stream == stream) {
            return true;
        }
    }
    return false;
}

}  // namespace fogsense::cql

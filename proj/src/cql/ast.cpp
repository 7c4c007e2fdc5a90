#include "fogsense/cql/ast.hpp"

#include <charconv>
#include <cmath>

namespace fogsense::cql {

std::string_view to_string(Aggregate a) {
    switch (a) {
        case Aggregate::Count: return "COUNT";
        case Aggregate::Sum: return "SUM";
        case Aggregate::Avg: return "AVG";
        case Aggregate::Min: return "MIN";
        case Aggregate::Max: return "MAX";
        case Aggregate::Last: return "LAST";
    }
    return "?";
}

std::string_view to_string(Comparator c) {
    switch (c) {
        case Comparator::Eq: return "=";
        case Comparator::Ne: return "!=";
        case Comparator::Lt: return "<";
        case Comparator::Le: return "<=";
        case Comparator::Gt: return ">";
        case Comparator::Ge: return ">=";
    }
    return "?";
}

std::string_view to_string(WindowKind w) { return w == WindowKind::Time ? "TIME" : "COUNT"; }

std::optional<Aggregate> parse_aggregate(std::string_view upper) {
    if (upper == "COUNT") return Aggregate::Count;
    if (upper == "SUM") return Aggregate::Sum;
    if (upper == "AVG") return Aggregate::Avg;
    if (upper == "MIN") return Aggregate::Min;
    if (upper == "MAX") return Aggregate::Max;
    if (upper == "LAST") return Aggregate::Last;
    return std::nullopt;
}

void validate(const QueryAst& ast) {
    if (ast.field.empty()) {
        throw SemanticError("aggregate field is empty");
    }
    if (ast.field == "*" && ast.aggregate != Aggregate::Count) {
        throw SemanticError(std::string(to_string(ast.aggregate)) + "(*) is not allowed; only COUNT(*)");
    }
    if (ast.stream.empty()) {
        throw SemanticError("stream name is empty");
    }
    if (ast.size <= 0) {
        throw SemanticError("window size must be positive");
    }
    if (ast.every <= 0) {
        throw SemanticError("EVERY must be positive");
    }
    for (const auto& c : ast.where) {
        if (c.field.empty() || c.field == "*") {
            throw SemanticError("predicate needs a field name");
        }
        if (const auto* d = std::get_if<double>(&c.literal); d != nullptr && !std::isfinite(*d)) {
            throw SemanticError("predicate literal must be finite");
        }
    }
}

std::string format_value(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) {
        char buf[64];
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *d);
        return std::string(buf, ptr);
    }
    std::string out = "'";
    for (const char c : std::get<std::string>(v)) {
        if (c == '\'') {
            out += "''";
        } else {
            out += c;
        }
    }
    out += '\'';
    return out;
}

std::string format(const QueryAst& ast) {
    std::string out = "SELECT ";
    out += to_string(ast.aggregate);
    out += '(' + ast.field + ") FROM " + ast.stream;
    for (std::size_t i = 0; i < ast.where.size(); ++i) {
        const auto& c = ast.where[i];
        out += i == 0 ? " WHERE " : " AND ";
        out += c.field;
        out += ' ';
        out += to_string(c.op);
        out += ' ';
        out += format_value(c.literal);
    }
    out += " WINDOW ";
    out += to_string(ast.window);
    out += ' ' + std::to_string(ast.size) + " EVERY " + std::to_string(ast.every);
    return out;
}

bool compare(const Value& lhs, Comparator op, const Value& rhs) {
    auto apply = [op](const auto& a, const auto& b) {
        switch (op) {
            case Comparator::Eq: return a == b;
            case Comparator::Ne: return a != b;
            case Comparator::Lt: return a < b;
            case Comparator::Le: return a <= b;
            case Comparator::Gt: return a > b;
            case Comparator::Ge: return a >= b;
        }
        return false;
    };
    if (lhs.index() != rhs.index()) {
        throw std::invalid_argument("type mismatch in comparison");
    }
    if (const auto* a = std::get_if<double>(&lhs)) {
        return apply(*a, std::get<double>(rhs));
    }
    return apply(std::get<std::string>(lhs), std::get<std::string>(rhs));
}

}  // namespace fogsense::cql

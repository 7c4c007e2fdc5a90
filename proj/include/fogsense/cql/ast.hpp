#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fogsense::cql {

enum class Aggregate : std::uint8_t { Count, Sum, Avg, Min, Max, Last };
enum class Comparator : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };
enum class WindowKind : std::uint8_t { Time, Count };

/// Numbers are 64-bit floats; strings compare lexicographically.
using Value = std::variant<double, std::string>;

struct Comparison {
    std::string field;
    Comparator op = Comparator::Eq;
    Value literal;

    friend bool operator==(const Comparison&, const Comparison&) = default;
};

/// SELECT <agg>(<field>) FROM <stream> [WHERE <pred> {AND <pred>}]
///   WINDOW (TIME <n> | COUNT <n>) [EVERY <n>]
struct QueryAst {
    Aggregate aggregate = Aggregate::Count;
    std::string field;  // "*" only for COUNT
    std::string stream;
    std::vector<Comparison> where;
    WindowKind window = WindowKind::Time;
    std::int64_t size = 0;   // ms for TIME, samples for COUNT
    std::int64_t every = 0;  // same unit as size

    [[nodiscard]] bool numeric_aggregate() const {
        return aggregate != Aggregate::Count && aggregate != Aggregate::Last;
    }

    friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

class SemanticError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::string_view to_string(Aggregate a);
std::string_view to_string(Comparator c);
std::string_view to_string(WindowKind w);
std::optional<Aggregate> parse_aggregate(std::string_view upper);

/// Throws SemanticError when the AST breaks a dialect rule.
void validate(const QueryAst& ast);

/// Canonical text: upper-case keywords, single spaces, EVERY always present.
std::string format(const QueryAst& ast);
std::string format_value(const Value& v);

bool compare(const Value& lhs, Comparator op, const Value& rhs);

}  // namespace fogsense::cql

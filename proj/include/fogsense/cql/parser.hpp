#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fogsense/cql/ast.hpp"

namespace fogsense::cql {

class ParseError : public std::invalid_argument {
public:
    ParseError(std::size_t position, std::vector<std::string> expected, std::string found);

    /// Byte offset of the offending token in the query text.
    [[nodiscard]] std::size_t position() const { return position_; }
    [[nodiscard]] const std::vector<std::string>& expected() const { return expected_; }
    [[nodiscard]] const std::string& found() const { return found_; }

private:
    std::size_t position_;
    std::vector<std::string> expected_;
    std::string found_;
};

/// Parses and validates a query. Throws ParseError for syntax problems and
/// SemanticError for well-formed but invalid queries.
QueryAst parse(std::string_view text);

}  // namespace fogsense::cql

#pragma once

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fogsense/sim/trace.hpp"

namespace fogsense::scenario {

class TraceFormatError : public std::runtime_error {
public:
    TraceFormatError(std::size_t line, const std::string& what)
        : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// One JSON object per line: time, seq, node, kind, then the record's
/// fields in emission order.
std::string to_json_line(const sim::TraceRecord& r);
void write_trace(std::ostream& out, const std::vector<sim::TraceRecord>& records);
std::vector<sim::TraceRecord> read_trace(std::istream& in);

/// Metrics report over a trace. Pure function of the records.
nlohmann::ordered_json summarize(const std::vector<sim::TraceRecord>& records);

}  // namespace fogsense::scenario

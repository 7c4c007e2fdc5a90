#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fogsense::sim {

using Bytes = std::vector<std::uint8_t>;

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every field on the wire is a 4-byte little-endian length followed by that
// many bytes. Integers are always carried as 8-byte little-endian payloads
// (length 8), so a reader never has to guess widths.
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v);
    ByteWriter& u64(std::uint64_t v);
    ByteWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
    ByteWriter& f64(double v);
    ByteWriter& str(std::string_view s);
    ByteWriter& bytes(std::span<const std::uint8_t> b);

    [[nodiscard]] const Bytes& view() const { return out_; }
    Bytes take() && { return std::move(out_); }

private:
    void length(std::size_t n);
    Bytes out_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8();
    std::uint64_t u64();
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64();
    std::string str();
    Bytes bytes();

    [[nodiscard]] bool done() const { return pos_ == in_.size(); }

private:
    std::span<const std::uint8_t> field();
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace fogsense::sim

#include "fogsense/sim/bytes.hpp"

#include <bit>
#include <cstring>

namespace fogsense::sim {

namespace {

void put_le(Bytes& out, std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

std::uint64_t get_le(std::span<const std::uint8_t> in) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    }
    return v;
}

}  // namespace

void ByteWriter::length(std::size_t n) {
    if (n > 0xffffffffULL) {
        throw std::length_error("wire field longer than 4 GiB");
    }
    put_le(out_, n, 4);
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
    length(1);
    out_.push_back(v);
    return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
    length(8);
    put_le(out_, v, 8);
    return *this;
}

ByteWriter& ByteWriter::f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }

ByteWriter& ByteWriter::str(std::string_view s) {
    length(s.size());
    out_.insert(out_.end(), s.begin(), s.end());
    return *this;
}

ByteWriter& ByteWriter::bytes(std::span<const std::uint8_t> b) {
    length(b.size());
    out_.insert(out_.end(), b.begin(), b.end());
    return *this;
}

std::span<const std::uint8_t> ByteReader::field() {
    if (in_.size() - pos_ < 4) {
        throw DecodeError("truncated length prefix");
    }
    const auto n = static_cast<std::size_t>(get_le(in_.subspan(pos_, 4)));
    pos_ += 4;
    if (in_.size() - pos_ < n) {
        throw DecodeError("truncated field");
    }
    auto f = in_.subspan(pos_, n);
    pos_ += n;
    return f;
}

std::uint8_t ByteReader::u8() {
    const auto f = field();
    if (f.size() != 1) {
        throw DecodeError("expected 1-byte field");
    }
    return f[0];
}

std::uint64_t ByteReader::u64() {
    const auto f = field();
    if (f.size() != 8) {
        throw DecodeError("expected 8-byte field");
    }
    return get_le(f);
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str() {
    const auto f = field();
    return {f.begin(), f.end()};
}

Bytes ByteReader::bytes() {
    const auto f = field();
    return {f.begin(), f.end()};
}

}  // namespace fogsense::sim

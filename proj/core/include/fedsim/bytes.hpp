#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedsim {

using Bytes = std::vector<uint8_t>;
using Digest32 = std::array<uint8_t, 32>;

/// Thrown when a byte stream is truncated or otherwise malformed.
struct DeserializeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Canonical serialization: little-endian fixed-width integers,
/// u32 length prefixes for variable-length sequences.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
    }
    void raw(std::span<const uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
    void digest(const Digest32& d) { raw(d); }
    void var_bytes(std::span<const uint8_t> b) {
        u32(uint32_t(b.size()));
        raw(b);
    }

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> b) : data_(b) {}

    uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(data_[pos_++]) << (8 * i);
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(data_[pos_++]) << (8 * i);
        return v;
    }
    void raw(std::span<uint8_t> out) {
        need(out.size());
        std::memcpy(out.data(), data_.data() + pos_, out.size());
        pos_ += out.size();
    }
    Digest32 digest() {
        Digest32 d;
        raw(d);
        return d;
    }
    Bytes var_bytes(size_t max_len = 1u << 24) {
        uint32_t n = u32();
        if (n > max_len) throw DeserializeError("length prefix too large");
        Bytes out(n);
        raw(out);
        return out;
    }
    /// Reads a length prefix for a sequence of fixed-size items.
    uint32_t seq_len(size_t max_items = 1u << 20) {
        uint32_t n = u32();
        if (n > max_items) throw DeserializeError("sequence too long");
        return n;
    }

    bool done() const { return pos_ == data_.size(); }
    void expect_done() const {
        if (!done()) throw DeserializeError("trailing bytes");
    }

private:
    void need(size_t n) const {
        if (pos_ + n > data_.size()) throw DeserializeError("truncated input");
    }
    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

std::string to_hex(std::span<const uint8_t> b);
Bytes from_hex(const std::string& s);
std::string to_hex(const Digest32& d);

}  // namespace fedsim

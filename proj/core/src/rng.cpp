#include "fedsim/rng.hpp"

#include "fedsim/hash.hpp"

#include <sodium.h>

#include <cmath>
#include <cstring>

namespace fedsim {

DetRng::DetRng(uint64_t seed) {
    uint8_t raw[8];
    for (int i = 0; i < 8; ++i) raw[i] = uint8_t(seed >> (8 * i));
    key_ = hash32("fedsim/rng-seed", raw);
}

DetRng::DetRng(const Digest32& key) : key_(key) {}

DetRng DetRng::fork(std::string_view label) {
    ByteWriter w;
    w.digest(key_);
    w.var_bytes(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(label.data()), label.size()));
    return DetRng(hash32("fedsim/rng-fork", w.bytes()));
}

void DetRng::refill() {
    uint8_t nonce[8];
    for (int i = 0; i < 8; ++i) nonce[i] = uint8_t(counter_ >> (8 * i));
    ++counter_;
    std::memset(block_.data(), 0, block_.size());
    crypto_stream_chacha20_xor(block_.data(), block_.data(), block_.size(), nonce,
                               key_.data());
    avail_ = block_.size();
}

void DetRng::fill(std::span<uint8_t> out) {
    size_t off = 0;
    while (off < out.size()) {
        if (avail_ == 0) refill();
        size_t n = std::min(avail_, out.size() - off);
        std::memcpy(out.data() + off, block_.data() + (block_.size() - avail_), n);
        avail_ -= n;
        off += n;
    }
}

uint64_t DetRng::next_u64() {
    uint8_t b[8];
    fill(b);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
    return v;
}

uint64_t DetRng::uniform(uint64_t bound) {
    // rejection sampling over the largest multiple of bound
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % bound;
}

double DetRng::uniform_real(double lo, double hi) {
    double u = double(next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

double DetRng::exponential(double mean) {
    double u;
    do {
        u = uniform_real(0.0, 1.0);
    } while (u <= 0.0);
    return -mean * std::log(u);
}

}  // namespace fedsim

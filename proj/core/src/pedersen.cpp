#include "fedsim/pedersen.hpp"

#include "fedsim/hash.hpp"

#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace fedsim {

namespace {
struct AssetIdHash {
    size_t operator()(const AssetId& a) const {
        size_t h = 0;
        for (int i = 0; i < 8; ++i) h |= size_t(a[i]) << (8 * i);
        return h;
    }
};
// generator derivation is pure; memoized because commits hit it constantly
std::mutex gen_mutex;
std::unordered_map<AssetId, GroupElement, AssetIdHash> gen_cache;
}  // namespace

GroupElement asset_generator(const AssetId& asset) {
    {
        std::lock_guard lock(gen_mutex);
        auto it = gen_cache.find(asset);
        if (it != gen_cache.end()) return it->second;
    }
    GroupElement h;
    for (uint32_t ctr = 0;; ++ctr) {
        ByteWriter w;
        w.digest(asset);
        w.u32(ctr);
        h = GroupElement::from_hash(hash64("fedsim/asset-generator", w.bytes()));
        if (!h.is_identity() && !(h == GroupElement::generator())) break;
    }
    std::lock_guard lock(gen_mutex);
    gen_cache.emplace(asset, h);
    return h;
}

Commitment commit(uint64_t value, const Scalar& blinder, const AssetId& asset) {
    if (kMaxValueBits < 64 && value >= (uint64_t(1) << kMaxValueBits))
        throw std::range_error("committed value out of range");
    GroupElement vh = asset_generator(asset) * Scalar::from_u64(value);
    return {vh + GroupElement::base_mul(blinder)};
}

bool balance_check(std::span<const Commitment> inputs,
                   std::span<const Commitment> outputs,
                   const std::map<AssetId, uint64_t>& explicit_fee) {
    GroupElement acc;
    for (const auto& c : inputs) acc = acc + c.point;
    for (const auto& c : outputs) acc = acc - c.point;
    for (const auto& [asset, amount] : explicit_fee) {
        if (amount >= (uint64_t(1) << kMaxValueBits)) return false;
        acc = acc - commit(amount, Scalar::zero(), asset).point;
    }
    return acc.is_identity();
}

}  // namespace fedsim

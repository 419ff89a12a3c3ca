#pragma once

#include "fedsim/group.hpp"

#include <map>

namespace fedsim {

using AssetId = Digest32;

/// Per-asset second generator: hash-to-group over the asset id under a
/// domain tag, retried with an incrementing counter until the result is
/// neither the identity nor the base generator. Nobody knows discrete-log
/// relations between any two generators.
GroupElement asset_generator(const AssetId& asset);

/// Pedersen commitment C = value * H_asset + blinder * G.
struct Commitment {
    GroupElement point;

    Commitment operator+(const Commitment& o) const { return {point + o.point}; }
    Commitment operator-(const Commitment& o) const { return {point - o.point}; }
    bool operator==(const Commitment&) const = default;

    void serialize(ByteWriter& w) const { point.serialize(w); }
    static Commitment deserialize(ByteReader& r) {
        return {GroupElement::deserialize(r)};
    }
};

/// Maximum committable value; commit() rejects larger values.
inline constexpr unsigned kMaxValueBits = 52;

Commitment commit(uint64_t value, const Scalar& blinder, const AssetId& asset);

/// True iff sum(inputs) - sum(outputs) - sum(fee commitments) is the
/// identity. Fees are public per-asset amounts committed with blinder zero.
bool balance_check(std::span<const Commitment> inputs,
                   std::span<const Commitment> outputs,
                   const std::map<AssetId, uint64_t>& explicit_fee);

}  // namespace fedsim

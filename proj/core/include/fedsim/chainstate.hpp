#pragma once

#include "fedsim/block.hpp"

#include <map>
#include <set>

namespace fedsim {

/// Ledger state after a sequence of applied blocks. A value type: block
/// application copies, so a rejected block leaves the input untouched.
struct ChainState {
    std::map<OutPoint, TxOutput> utxos;
    std::map<OutPoint, uint64_t> utxo_height;  // height the outpoint confirmed at
    uint64_t height = 0;
    uint64_t time = 0;  // timestamp of the tip
    Digest32 tip_digest = genesis_digest();
    std::vector<BlockHeader> headers;
    /// Circulating supply per asset, tracked through explicit issuance,
    /// destruction and peg events (confidential transfers conserve it).
    std::map<AssetId, uint64_t> supply;
    /// Fees accumulate here, federation-controlled (sidechain rule).
    std::map<AssetId, uint64_t> fee_pool;
    /// Parent-chain lock outpoints already minted against (sidechain only).
    std::set<OutPoint> claimed_pegins;

    static Digest32 genesis_digest();

    /// Confirmation depth of an unspent outpoint: 1 when it confirmed in the
    /// tip block. Returns 0 for unknown outpoints.
    uint64_t depth_of(const OutPoint& op) const;
};

}  // namespace fedsim

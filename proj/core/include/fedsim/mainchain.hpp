#pragma once

#include "fedsim/validation.hpp"
#include "fedsim/rng.hpp"

#include <unordered_map>

namespace fedsim {

/// Modeled proof-of-work parent chain. Block arrivals are exponentially
/// distributed; competing miners can hold different tips, so short
/// reorganizations and orphaned blocks are possible (unlike the sidechain).
class MainchainModel {
public:
    explicit MainchainModel(ChainRules rules);

    const ChainRules& rules() const { return rules_; }
    /// Longest-chain tip state.
    const ChainState& best() const { return *best_state_; }
    const Digest32& best_tip() const { return best_tip_; }
    /// Blocks that lost the longest-chain race.
    uint64_t orphan_count() const;
    uint64_t blocks_mined() const { return blocks_.size(); }

    void submit(Transaction tx) { mempool_.push_back(std::move(tx)); }
    size_t mempool_size() const { return mempool_.size(); }

    /// Draws the next inter-block delay.
    static double draw_interval(DetRng& rng, double mean_interval);

    /// Mines a block on `miner`'s current tip at absolute time `time`,
    /// including every mempool transaction valid against that tip.
    const Block& mine(uint32_t miner, uint64_t time);

    /// Single-miner convenience: draw a delay, mine, return the block time.
    uint64_t extend(DetRng& rng, double mean_interval);

    /// Propagation: `miner` learns of the block with digest `tip` and
    /// switches to it if that chain is strictly longer than its view.
    void notify_miner(uint32_t miner, const Digest32& tip);

    const std::vector<Block>& blocks() const { return blocks_; }
    /// The longest-chain block sequence, genesis-side first.
    std::vector<Block> best_chain() const;
    const ChainState* state_at(const Digest32& tip) const;

private:
    ChainRules rules_;
    std::unordered_map<std::string, ChainState> states_;  // hex tip digest -> state
    const ChainState* best_state_;
    Digest32 best_tip_;
    std::unordered_map<uint32_t, Digest32> miner_tips_;
    std::vector<Transaction> mempool_;
    std::vector<Block> blocks_;
    uint64_t last_time_ = 0;

    const ChainState& view_of(uint32_t miner) const;
};

}  // namespace fedsim

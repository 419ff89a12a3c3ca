#include "fedsim/mainchain.hpp"

#include <algorithm>
#include <stdexcept>

namespace fedsim {

MainchainModel::MainchainModel(ChainRules rules) : rules_(std::move(rules)) {
    ChainState genesis;
    best_tip_ = genesis.tip_digest;
    auto [it, _] = states_.emplace(to_hex(best_tip_), std::move(genesis));
    best_state_ = &it->second;
}

uint64_t MainchainModel::orphan_count() const {
    return blocks_.size() - best_state_->height;
}

double MainchainModel::draw_interval(DetRng& rng, double mean_interval) {
    if (mean_interval <= 0) throw std::invalid_argument("mean interval must be positive");
    return rng.exponential(mean_interval);
}

const ChainState* MainchainModel::state_at(const Digest32& tip) const {
    auto it = states_.find(to_hex(tip));
    return it == states_.end() ? nullptr : &it->second;
}

const ChainState& MainchainModel::view_of(uint32_t miner) const {
    auto it = miner_tips_.find(miner);
    if (it == miner_tips_.end()) return *best_state_;
    const ChainState* s = state_at(it->second);
    return s ? *s : *best_state_;
}

const Block& MainchainModel::mine(uint32_t miner, uint64_t time) {
    const ChainState& parent = view_of(miner);
    if (time < parent.time) time = parent.time;  // clocks never run backwards

    Block block;
    block.header.height = parent.height + 1;
    block.header.prev = parent.tip_digest;
    block.header.timestamp = time;
    block.header.stamp = WorkStamp{miner, uint64_t(blocks_.size())};

    // greedy inclusion of whatever validates against the parent tip
    ChainState scratch = parent;
    scratch.height = block.header.height;
    scratch.time = time;
    std::vector<Transaction> keep;
    for (auto& tx : mempool_) {
        if (tx_validate(tx, scratch, rules_, time).ok()) {
            block.txs.push_back(tx);
            for (const auto& in : tx.inputs) scratch.utxos.erase(in.prev);
            if (tx.pegin) scratch.claimed_pegins.insert(tx.pegin->lock_outpoint);
        } else {
            keep.push_back(std::move(tx));
        }
    }
    mempool_ = std::move(keep);
    block.header.merkle_root = block.compute_merkle_root();

    ApplyResult applied = block_apply(parent, block, rules_);
    if (!applied.state)
        throw std::logic_error(std::string("mined block rejected: ") +
                               applied.result.detail);
    Digest32 tip = block.header.digest();
    auto [it, _] = states_.emplace(to_hex(tip), std::move(*applied.state));
    blocks_.push_back(block);
    miner_tips_[miner] = tip;
    if (it->second.height > best_state_->height) {
        best_state_ = &it->second;
        best_tip_ = tip;
    }
    last_time_ = time;
    return blocks_.back();
}

uint64_t MainchainModel::extend(DetRng& rng, double mean_interval) {
    uint64_t t = last_time_ + uint64_t(draw_interval(rng, mean_interval));
    mine(0, t);
    return t;
}

std::vector<Block> MainchainModel::best_chain() const {
    std::map<Digest32, const Block*> by_digest;
    for (const auto& b : blocks_) by_digest[b.header.digest()] = &b;
    std::vector<Block> chain;
    Digest32 cursor = best_tip_;
    while (true) {
        auto it = by_digest.find(cursor);
        if (it == by_digest.end()) break;  // reached genesis
        chain.push_back(*it->second);
        cursor = it->second->header.prev;
    }
    std::reverse(chain.begin(), chain.end());
    return chain;
}

void MainchainModel::notify_miner(uint32_t miner, const Digest32& tip) {
    const ChainState* s = state_at(tip);
    if (!s) return;
    const ChainState& cur = view_of(miner);
    if (s->height > cur.height) miner_tips_[miner] = tip;
}

}  // namespace fedsim

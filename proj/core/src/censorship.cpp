#include "fedsim/censorship.hpp"

#include <map>
#include <stdexcept>

namespace fedsim {

std::set<uint32_t> censorship_monitor(std::span<const RoundRecord> history,
                                      uint32_t window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    std::map<uint32_t, std::vector<size_t>> by_proposer;  // indices into history
    for (size_t i = 0; i < history.size(); ++i)
        by_proposer[history[i].proposer].push_back(i);

    std::set<uint32_t> flagged;
    for (const auto& [proposer, indices] : by_proposer) {
        if (indices.size() < window) continue;
        size_t start = indices[indices.size() - window];
        bool all_failed = true;
        for (size_t j = indices.size() - window; j < indices.size(); ++j)
            if (history[indices[j]].success) all_failed = false;
        if (!all_failed) continue;
        // someone else succeeding over the same stretch separates censorship
        // from a network-wide outage
        bool other_success = false;
        for (size_t i = start; i < history.size(); ++i)
            if (history[i].proposer != proposer && history[i].success)
                other_success = true;
        if (other_success) flagged.insert(proposer);
    }
    return flagged;
}

}  // namespace fedsim

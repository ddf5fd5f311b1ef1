#pragma once

// Brute-force oracles kept deliberately naive and independent of the
// library's search paths: every injective total map is generated and
// filtered through the definition.

#include <algorithm>
#include <optional>
#include <vector>

#include "fraisse/structure.hpp"

namespace oracle {

using fraisse::Element;
using fraisse::FinStructure;
using fraisse::PartialMap;

inline std::vector<PartialMap> all_injective_maps(const FinStructure& a, const FinStructure& b) {
    std::vector<PartialMap> out;
    const auto& dom = a.universe();
    const auto& codom = b.universe();
    if (dom.size() > codom.size()) return out;
    std::vector<Element> chosen(codom.begin(), codom.end());
    // enumerate ordered selections via permutations of codomain indices
    std::vector<std::size_t> idx(codom.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::vector<std::size_t> select(dom.size());
    std::vector<bool> used(codom.size(), false);
    std::vector<PartialMap> result;
    std::function<void(std::size_t)> rec = [&](std::size_t depth) {
        if (depth == dom.size()) {
            std::vector<std::pair<Element, Element>> pairs;
            for (std::size_t k = 0; k < dom.size(); ++k)
                pairs.emplace_back(dom[k], codom[select[k]]);
            result.emplace_back(std::move(pairs));
            return;
        }
        for (std::size_t k = 0; k < codom.size(); ++k) {
            if (used[k]) continue;
            used[k] = true;
            select[depth] = k;
            rec(depth + 1);
            used[k] = false;
        }
    };
    rec(0);
    std::sort(result.begin(), result.end());
    return result;
}

inline std::vector<PartialMap> naive_embeddings(const FinStructure& a, const FinStructure& b) {
    std::vector<PartialMap> out;
    for (const auto& f : all_injective_maps(a, b))
        if (fraisse::is_embedding(f, a, b)) out.push_back(f);
    return out;
}

inline bool naive_is_isomorphic(const FinStructure& a, const FinStructure& b) {
    if (a.size() != b.size()) return false;
    return !naive_embeddings(a, b).empty();
}

}  // namespace oracle

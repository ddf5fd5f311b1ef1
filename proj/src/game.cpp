#include "fraisse/game.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace fraisse {

namespace {

struct GameContext {
    const FinStructure* a;
    const FinStructure* b;
    std::map<std::string, bool> memo;
};

std::string position_key(std::vector<std::pair<Element, Element>> pos, std::size_t depth) {
    std::sort(pos.begin(), pos.end());
    std::ostringstream out;
    out << depth << "#";
    for (const auto& [x, y] : pos) out << x << ":" << y << ",";
    return out.str();
}

// position maps a-elements to b-elements and is an induced partial iso of
// (a, b); returns true iff the duplicator survives `depth` more rounds
bool duplicator_wins(GameContext& ctx, std::vector<std::pair<Element, Element>>& pos,
                     std::size_t depth) {
    if (depth == 0) return true;
    std::string key = position_key(pos, depth);
    auto it = ctx.memo.find(key);
    if (it != ctx.memo.end()) return it->second;

    auto valid = [&](const std::vector<std::pair<Element, Element>>& candidate) {
        PartialMap f{candidate};
        if (!f.injective()) return false;
        // partial iso across the two structures: compare tuples over the
        // assigned points in both directions
        auto dom = f.domain();
        for (const auto& name : ctx.a->realized_symbols()) {
            unsigned arity = ctx.a->vocabulary()->require(name).arity;
            if (dom.empty()) continue;
            std::vector<std::size_t> idx(arity, 0);
            while (true) {
                Tuple t(arity);
                for (unsigned k = 0; k < arity; ++k) t[k] = dom[idx[k]];
                if (ctx.a->has_tuple(name, t) != ctx.b->has_tuple(name, *f.apply_tuple(t)))
                    return false;
                unsigned p = arity;
                while (p > 0) {
                    if (++idx[p - 1] < dom.size()) break;
                    idx[p - 1] = 0;
                    --p;
                }
                if (p == 0) break;
            }
        }
        for (const auto& name : ctx.b->realized_symbols()) {
            unsigned arity = ctx.b->vocabulary()->require(name).arity;
            auto ran = f.range();
            if (ran.empty()) continue;
            PartialMap back = f.inverse();
            std::vector<std::size_t> idx(arity, 0);
            while (true) {
                Tuple t(arity);
                for (unsigned k = 0; k < arity; ++k) t[k] = ran[idx[k]];
                if (ctx.b->has_tuple(name, t) != ctx.a->has_tuple(name, *back.apply_tuple(t)))
                    return false;
                unsigned p = arity;
                while (p > 0) {
                    if (++idx[p - 1] < ran.size()) break;
                    idx[p - 1] = 0;
                    --p;
                }
                if (p == 0) break;
            }
        }
        return true;
    };

    bool result = true;
    // spoiler picks a side and a point; duplicator needs one good reply
    for (int side = 0; side < 2 && result; ++side) {
        const FinStructure& from = side == 0 ? *ctx.a : *ctx.b;
        for (Element pick : from.universe()) {
            bool already = false;
            for (const auto& [x, y] : pos)
                if ((side == 0 ? x : y) == pick) already = true;
            if (already) continue;
            const FinStructure& to = side == 0 ? *ctx.b : *ctx.a;
            bool reply_found = false;
            for (Element reply : to.universe()) {
                bool reply_used = false;
                for (const auto& [x, y] : pos)
                    if ((side == 0 ? y : x) == reply) reply_used = true;
                if (reply_used) continue;
                auto extended = pos;
                if (side == 0)
                    extended.emplace_back(pick, reply);
                else
                    extended.emplace_back(reply, pick);
                if (!valid(extended)) continue;
                if (duplicator_wins(ctx, extended, depth - 1)) {
                    reply_found = true;
                    break;
                }
            }
            if (!reply_found) {
                result = false;
                break;
            }
        }
    }
    ctx.memo.emplace(std::move(key), result);
    return result;
}

}  // namespace

bool bf_equivalent(const FinStructure& a, const FinStructure& b, std::size_t depth) {
    GameContext ctx{&a, &b, {}};
    std::vector<std::pair<Element, Element>> pos;
    return duplicator_wins(ctx, pos, depth);
}

}  // namespace fraisse

#include <algorithm>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "fraisse/ages.hpp"
#include "fraisse/errors.hpp"

namespace fraisse {

namespace {

constexpr const char* kEdge = "E";

// bit position of the unordered pair (a < b) in the triangular layout
std::size_t pair_bit(std::size_t a, std::size_t b) {
    return b * (b - 1) / 2 + a;
}

class GraphsAge : public AgeRep {
public:
    GraphsAge() : AgeRep("graphs", make_vocab()) {}

    FinStructure member(const BigNat& index) const override {
        auto [n, bits] = decode_cached(index);
        FinStructure s(vocabulary());
        for (std::size_t k = 0; k < n; ++k) s.add_element(static_cast<Element>(k));
        for (std::size_t b = 1; b < n; ++b) {
            for (std::size_t a = 0; a < b; ++a) {
                if (bits.bit(pair_bit(a, b))) {
                    s.add_tuple(kEdge, Tuple{static_cast<Element>(a), static_cast<Element>(b)});
                    s.add_tuple(kEdge, Tuple{static_cast<Element>(b), static_cast<Element>(a)});
                }
            }
        }
        return s;
    }

    bool decide_embedding(const BigNat& i, const BigNat& j, const PartialMap& f) const override {
        auto [na, abits] = decode_cached(i);
        auto [nb, bbits] = decode_cached(j);
        if (f.size() != na || !f.injective()) return false;
        for (const auto& [src, tgt] : f.pairs()) {
            if (src >= na || tgt >= nb) return false;
        }
        auto dom = f.domain();
        if (dom.size() != na) return false;
        for (std::size_t x = 0; x < na; ++x) {
            for (std::size_t y = x + 1; y < na; ++y) {
                bool ea = abits.bit(pair_bit(x, y));
                Element fx = *f.apply(static_cast<Element>(x));
                Element fy = *f.apply(static_cast<Element>(y));
                std::size_t lo = std::min(fx, fy), hi = std::max(fx, fy);
                bool eb = bbits.bit(pair_bit(lo, hi));
                if (ea != eb) return false;
            }
        }
        return true;
    }

    std::optional<Identification> identify(const FinStructure& s) const override {
        const auto& u = s.universe();
        // expect a simple graph: symmetric, irreflexive
        for (const auto& t : s.relation(kEdge)) {
            if (t.size() != 2 || t[0] == t[1]) return std::nullopt;
            if (!s.has_tuple(kEdge, Tuple{t[1], t[0]})) return std::nullopt;
        }
        for (const auto& name : s.realized_symbols())
            if (name != kEdge) return std::nullopt;
        BigNat bits;
        for (std::size_t b = 1; b < u.size(); ++b)
            for (std::size_t a = 0; a < b; ++a)
                if (s.has_tuple(kEdge, Tuple{u[a], u[b]})) bits.set_bit(pair_bit(a, b));
        BigNat index = offset(u.size()) + bits;
        std::vector<std::pair<Element, Element>> pairs;
        for (std::size_t k = 0; k < u.size(); ++k) pairs.emplace_back(static_cast<Element>(k), u[k]);
        return Identification{std::move(index), PartialMap(std::move(pairs))};
    }

    bool goals_prechecked() const override { return true; }

    void emit_goals(const FinStructure& stage, GoalTracker& tracker,
                    std::vector<ExtensionGoal>& out, std::size_t budget) const override {
        // one-point extension saturation over the first vertices: for each
        // small S and U <= S, demand a vertex adjacent on S exactly to U.
        // Extension witnesses survive growth (amalgams never add edges
        // between existing vertices), so satisfied demands are marked off.
        std::vector<Element> focus;
        for (Element e : stage.universe()) {
            if (focus.size() >= 12) break;
            focus.push_back(e);
        }
        std::size_t n = focus.size();
        // full-demand patterns (U = S) first: their witnesses carry exactly
        // the demanded edges, so they satisfy every superset pattern too
        for (int phase = 0; phase < 2; ++phase)
        for (std::size_t mask = 0; mask < (std::size_t{1} << n) && out.size() < budget; ++mask) {
            std::vector<Element> s_set;
            for (std::size_t k = 0; k < n; ++k)
                if ((mask >> k) & 1u) s_set.push_back(focus[k]);
            if (s_set.size() > 3) continue;
            for (std::size_t sub = 0;; sub = (sub - mask) & mask) {
                if ((phase == 0) != (sub == mask)) {
                    if (sub == mask) break;
                    continue;
                }
                std::string key = "ext:" + std::to_string(mask) + ":" + std::to_string(sub);
                if (!tracker.seen(key) && out.size() < budget) {
                    bool satisfied = false;
                    for (Element z : stage.universe()) {
                        bool in_s = false;
                        for (Element v : s_set)
                            if (v == z) in_s = true;
                        if (in_s) continue;
                        bool ok = true;
                        for (std::size_t k = 0; k < n && ok; ++k) {
                            if (!((mask >> k) & 1u)) continue;
                            bool want = (sub >> k) & 1u;
                            if (stage.has_tuple(kEdge, Tuple{z, focus[k]}) != want) ok = false;
                        }
                        if (ok) {
                            satisfied = true;
                            break;
                        }
                    }
                    if (satisfied) {
                        tracker.mark(key);
                    } else {
                        std::vector<Element> u_set;
                        for (std::size_t k = 0; k < n; ++k)
                            if ((sub >> k) & 1u) u_set.push_back(focus[k]);
                        FinStructure pattern = substructure(stage, s_set);
                        Element fresh = s_set.empty()
                                            ? 0
                                            : *std::max_element(s_set.begin(), s_set.end()) + 1;
                        pattern.add_element(fresh);
                        for (Element v : u_set) {
                            pattern.add_tuple(kEdge, Tuple{fresh, v});
                            pattern.add_tuple(kEdge, Tuple{v, fresh});
                        }
                        out.push_back({s_set, std::move(pattern), PartialMap::identity(s_set),
                                       fresh, std::move(key)});
                    }
                }
                if (sub == mask) break;
            }
        }
    }

private:
    static VocabularyPtr make_vocab() {
        auto v = std::make_shared<Vocabulary>();
        v->add_symbol(Symbol{kEdge, 2, "1"});
        return v;
    }

    mutable std::mutex cache_mu_;
    mutable std::unordered_map<BigNat, std::pair<std::size_t, BigNat>, BigNatHash> decode_cache_;

    std::pair<std::size_t, BigNat> decode_cached(const BigNat& index) const {
        {
            std::lock_guard<std::mutex> lock(cache_mu_);
            auto it = decode_cache_.find(index);
            if (it != decode_cache_.end()) return it->second;
        }
        auto decoded = decode(index);
        std::lock_guard<std::mutex> lock(cache_mu_);
        if (decode_cache_.size() > 512) decode_cache_.clear();
        decode_cache_.emplace(index, decoded);
        return decoded;
    }

    static BigNat offset(std::size_t n) {
        // sum over k < n of 2^C(k,2)
        BigNat total;
        for (std::size_t k = 0; k < n; ++k) {
            BigNat block(1);
            total += block.shifted_left(k * (k - 1) / 2);
        }
        return total;
    }

    static std::pair<std::size_t, BigNat> decode(const BigNat& index) {
        BigNat rest = index;
        std::size_t n = 0;
        while (true) {
            BigNat block = BigNat(1).shifted_left(n * (n - 1) / 2);
            if (rest < block) return {n, rest};
            rest -= block;
            ++n;
            if (n > 4096) throw BoundExceeded("graph member index beyond the desk scale");
        }
    }
};

}  // namespace

AgeRepPtr make_graphs_age() {
    return std::make_shared<GraphsAge>();
}

}  // namespace fraisse

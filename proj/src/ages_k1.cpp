#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "fraisse/ages.hpp"
#include "fraisse/errors.hpp"

namespace fraisse {

std::string k1_u_name() { return "U@1"; }
std::string k1_order_name() { return "<@1"; }
std::string k1_color_name(const Rational& q) { return "Q{" + q.to_string() + "}@1"; }

namespace {

std::optional<Rational> parse_color_name(const std::string& name) {
    if (name.size() < 5 || name.rfind("Q{", 0) != 0) return std::nullopt;
    auto close = name.find("}@1");
    if (close == std::string::npos || close + 3 != name.size()) return std::nullopt;
    try {
        Rational q = Rational::parse(name.substr(2, close - 2));
        if (k1_color_name(q) != name) return std::nullopt;  // canonical reduced form only
        return q;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

VocabularyPtr make_k1_vocab() {
    auto v = std::make_shared<Vocabulary>();
    v->add_symbol(Symbol{k1_u_name(), 1, "1"});
    v->add_symbol(Symbol{k1_order_name(), 2, "1"});
    v->add_family(SymbolFamily{
        "Q-colors",
        [](const std::string& name) -> std::optional<Symbol> {
            if (parse_color_name(name)) return Symbol{name, 1, "1"};
            return std::nullopt;
        },
        [](std::size_t k) -> std::optional<Symbol> {
            return Symbol{k1_color_name(rational_at(k)), 1, "1"};
        }});
    return v;
}

/// Members are finite sets of rationals. Index 0 is the empty structure,
/// odd index 2k+1 the singleton {rational k}, even index 2k+2 the bitmask
/// k over rational positions. Singletons stay cheap this way, which keeps
/// the density goals of the limit construction within a short horizon.
class K1Age : public AgeRep {
public:
    K1Age() : AgeRep("k1", make_k1_vocab()) {}

    FinStructure member(const BigNat& index) const override {
        return structure_for(colors_of(index));
    }

    bool decide_embedding(const BigNat& i, const BigNat& j, const PartialMap& f) const override {
        auto ci = colors_of(i);
        auto cj = colors_of(j);
        if (f.size() != ci.size() || !f.injective()) return false;
        auto dom = f.domain();
        for (std::size_t k = 0; k < ci.size(); ++k) {
            if (dom.size() <= k || dom[k] != static_cast<Element>(k)) return false;
        }
        for (const auto& [src, tgt] : f.pairs()) {
            if (tgt >= cj.size()) return false;
            if (!(ci[src] == cj[tgt])) return false;  // colors are exact, order follows
        }
        return true;
    }

    std::optional<Identification> identify(const FinStructure& s) const override {
        auto colored = read_colors(s);
        if (!colored) return std::nullopt;
        BigNat mask;
        for (const auto& [q, elem] : *colored) mask.set_bit(rational_index(q));
        BigNat index = pair_or_zero(*colored, mask);
        std::vector<std::pair<Element, Element>> pairs;
        Element k = 0;
        for (const auto& [q, elem] : *colored) pairs.emplace_back(k++, elem);
        return Identification{std::move(index), PartialMap(std::move(pairs))};
    }

    Amalgam amalgamate(const FinStructure& a, const FinStructure& b,
                       const FinStructure& /*c*/, const PartialMap& /*f*/,
                       const PartialMap& /*g*/) const override {
        // the amalgam is the union of the color sets; gluing is forced
        // because colors are unique per structure
        auto a_colors = read_colors_or_throw(a);
        auto b_colors = read_colors_or_throw(b);
        std::map<std::string, Element> a_by_name;
        for (const auto& [q, elem] : a_colors) a_by_name[k1_color_name(q)] = elem;

        FinStructure d = a;
        Element fresh = a.universe().empty() ? 0 : a.universe().back() + 1;
        std::vector<std::pair<Element, Element>> gprime;
        std::vector<std::pair<Rational, Element>> added;
        for (const auto& [q, elem] : b_colors) {
            auto it = a_by_name.find(k1_color_name(q));
            if (it != a_by_name.end()) {
                gprime.emplace_back(elem, it->second);
            } else {
                d.add_element(fresh);
                d.add_tuple(k1_u_name(), Tuple{fresh});
                d.add_tuple(k1_color_name(q), Tuple{fresh});
                gprime.emplace_back(elem, fresh);
                added.emplace_back(q, fresh);
                ++fresh;
            }
        }
        // order tuples: compare colors across the union
        std::vector<std::pair<Rational, Element>> all = a_colors;
        all.insert(all.end(), added.begin(), added.end());
        for (const auto& [qx, ex] : all) {
            for (const auto& [qy, ey] : all) {
                if (qx.less(qy) && !d.has_tuple(k1_order_name(), Tuple{ex, ey}))
                    d.add_tuple(k1_order_name(), Tuple{ex, ey});
            }
        }
        return Amalgam{std::move(d), PartialMap::identity(a.universe()),
                       PartialMap(std::move(gprime))};
    }

    bool has_embedding_search() const override { return true; }
    std::optional<PartialMap> find_member_embedding(const FinStructure& pattern,
                                                    const FinStructure& stage) const override {
        // colors are unique per structure, so an embedding exists exactly
        // when every pattern color is realized, and it is then forced
        auto want = read_colors_or_throw(pattern);
        auto have = read_colors_or_throw(stage);
        std::map<std::string, Element> by_color;
        for (const auto& [q, elem] : have) by_color[k1_color_name(q)] = elem;
        std::vector<std::pair<Element, Element>> pairs;
        for (const auto& [q, elem] : want) {
            auto it = by_color.find(k1_color_name(q));
            if (it == by_color.end()) return std::nullopt;
            pairs.emplace_back(elem, it->second);
        }
        return PartialMap(std::move(pairs));
    }

    FinStructure append_u(const FinStructure& s, const UPosition& where) const override {
        auto colored = read_colors_or_throw(s);
        auto color_of = [&](Element e) {
            for (const auto& [q, elem] : colored)
                if (elem == e) return q;
            throw Error("append_u: element is not part of the structure");
        };
        Rational fresh_color;
        switch (where.kind) {
            case UPosition::Kind::First:
                fresh_color = colored.empty() ? Rational(0, 1)
                                              : rational_below(colored.front().first);
                break;
            case UPosition::Kind::Below: {
                Rational bound = color_of(where.lo);
                std::optional<Rational> pred;
                for (const auto& [q, elem] : colored)
                    if (q.less(bound)) pred = q;
                fresh_color = pred ? rational_between(*pred, bound) : rational_below(bound);
                break;
            }
            case UPosition::Kind::Above: {
                Rational bound = color_of(where.lo);
                std::optional<Rational> succ;
                for (auto it = colored.rbegin(); it != colored.rend(); ++it)
                    if (bound.less(it->first)) succ = it->first;
                fresh_color = succ ? rational_between(bound, *succ) : rational_above(bound);
                break;
            }
            case UPosition::Kind::Between:
                fresh_color = rational_between(color_of(where.lo), color_of(where.hi));
                break;
        }
        Element fresh = s.universe().empty() ? 0 : s.universe().back() + 1;
        FinStructure out = s;
        out.add_element(fresh);
        out.add_tuple(k1_u_name(), Tuple{fresh});
        out.add_tuple(k1_color_name(fresh_color), Tuple{fresh});
        for (const auto& [q, elem] : colored) {
            if (q.less(fresh_color))
                out.add_tuple(k1_order_name(), Tuple{elem, fresh});
            else
                out.add_tuple(k1_order_name(), Tuple{fresh, elem});
        }
        return out;
    }

    bool goals_prechecked() const override { return true; }

    void emit_goals(const FinStructure& stage, GoalTracker& tracker,
                    std::vector<ExtensionGoal>& out, std::size_t budget) const override {
        auto colored = read_colors(stage);
        if (!colored || colored->empty()) return;
        std::vector<std::pair<Rational, Element>> focus;
        for (const auto& [q, elem] : *colored) {
            if (elem < 10) focus.push_back({q, elem});
        }
        if (focus.empty()) return;
        auto realized_between = [&](const Rational& lo, const Rational& hi) {
            for (const auto& [q, elem] : *colored)
                if (lo.less(q) && q.less(hi)) return true;
            return false;
        };
        auto push_singleton = [&](const Rational& q, const std::string& key) {
            if (out.size() >= budget || tracker.seen(key)) return;
            out.push_back({{}, structure_for({q}), PartialMap{}, 0, key});
        };
        for (std::size_t k = 0; k + 1 < focus.size() && out.size() < budget; ++k) {
            const auto& [lo, le] = focus[k];
            const auto& [hi, he] = focus[k + 1];
            if (realized_between(lo, hi)) continue;
            push_singleton(rational_between(lo, hi),
                           "mid:" + std::to_string(le) + ":" + std::to_string(he));
        }
        const Rational& min_q = colored->front().first;
        const Rational& max_q = colored->back().first;
        if (focus.front().first == min_q)
            push_singleton(rational_below(min_q), "below:" + std::to_string(focus.front().second));
        if (focus.back().first == max_q)
            push_singleton(rational_above(max_q), "above:" + std::to_string(focus.back().second));
    }

private:
    mutable std::mutex cache_mu_;
    mutable std::unordered_map<BigNat, std::vector<Rational>, BigNatHash> colors_cache_;

    std::vector<Rational> colors_of(const BigNat& index) const {
        {
            std::lock_guard<std::mutex> lock(cache_mu_);
            auto it = colors_cache_.find(index);
            if (it != colors_cache_.end()) return it->second;
        }
        std::vector<Rational> colors = colors_of_uncached(index);
        std::lock_guard<std::mutex> lock(cache_mu_);
        if (colors_cache_.size() > 512) colors_cache_.clear();
        colors_cache_.emplace(index, colors);
        return colors;
    }

    std::vector<Rational> colors_of_uncached(const BigNat& index) const {
        if (index.is_zero()) return {};
        BigNat reduced = index - BigNat(1);
        std::vector<Rational> colors;
        if (!reduced.bit(0)) {
            // even offset: 2k + 1 -> singleton {rational k}
            colors.push_back(rational_at(static_cast<std::size_t>(
                reduced.shifted_right(1).to_u64())));
        } else {
            BigNat mask = reduced.shifted_right(1);
            for (std::size_t pos : set_decode(mask)) colors.push_back(rational_at(pos));
        }
        std::sort(colors.begin(), colors.end(),
                  [](const Rational& x, const Rational& y) { return x.less(y); });
        return colors;
    }

    static BigNat pair_or_zero(const std::vector<std::pair<Rational, Element>>& colored,
                               const BigNat& mask) {
        if (colored.empty()) return BigNat(0);
        BigNat index = mask.shifted_left(1);
        index += BigNat(2);  // 2k + 2: canonical bitmask coding
        return index;
    }

    FinStructure structure_for(std::vector<Rational> colors) const {
        std::sort(colors.begin(), colors.end(),
                  [](const Rational& x, const Rational& y) { return x.less(y); });
        FinStructure s(vocabulary());
        for (std::size_t k = 0; k < colors.size(); ++k) {
            Element e = static_cast<Element>(k);
            s.add_element(e);
            s.add_tuple(k1_u_name(), Tuple{e});
            s.add_tuple(k1_color_name(colors[k]), Tuple{e});
        }
        for (std::size_t x = 0; x < colors.size(); ++x)
            for (std::size_t y = x + 1; y < colors.size(); ++y)
                s.add_tuple(k1_order_name(),
                            Tuple{static_cast<Element>(x), static_cast<Element>(y)});
        return s;
    }

    /// Element colors sorted by rational value; nullopt if s is not a valid
    /// K_1 structure (every point exactly one color, U everywhere, order
    /// matching the colors).
    std::optional<std::vector<std::pair<Rational, Element>>> read_colors(
        const FinStructure& s) const {
        std::map<Element, Rational> color_of;
        for (const auto& name : s.realized_symbols()) {
            if (name == k1_u_name()) continue;
            if (name == k1_order_name()) continue;
            auto q = parse_color_name(name);
            if (!q) return std::nullopt;
            for (const auto& t : s.relation(name)) {
                if (t.size() != 1) return std::nullopt;
                if (color_of.count(t[0])) return std::nullopt;
                color_of.emplace(t[0], *q);
            }
        }
        if (color_of.size() != s.size()) return std::nullopt;
        for (Element e : s.universe())
            if (!s.has_tuple(k1_u_name(), Tuple{e})) return std::nullopt;
        std::vector<std::pair<Rational, Element>> out;
        for (const auto& [elem, q] : color_of) out.emplace_back(q, elem);
        std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
            return x.first.less(y.first);
        });
        for (std::size_t x = 0; x < out.size(); ++x) {
            for (std::size_t y = 0; y < out.size(); ++y) {
                bool expect = x < y;
                if (s.has_tuple(k1_order_name(), Tuple{out[x].second, out[y].second}) != expect)
                    return std::nullopt;
            }
        }
        // distinct colors only
        for (std::size_t x = 0; x + 1 < out.size(); ++x)
            if (out[x].first == out[x + 1].first) return std::nullopt;
        return out;
    }

    std::vector<std::pair<Rational, Element>> read_colors_or_throw(const FinStructure& s) const {
        auto c = read_colors(s);
        if (!c) throw Error("structure is not a K_1 member");
        return *c;
    }
};

}  // namespace

AgeRepPtr make_k1_age() {
    return std::make_shared<K1Age>();
}

}  // namespace fraisse

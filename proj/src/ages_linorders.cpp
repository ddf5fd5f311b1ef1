#include <algorithm>
#include <memory>

#include "fraisse/ages.hpp"
#include "fraisse/errors.hpp"

namespace fraisse {

namespace {

constexpr const char* kOrder = "<";

class LinearOrdersAge : public AgeRep {
public:
    explicit LinearOrdersAge(std::string tag, bool skip_singleton)
        : AgeRep(std::move(tag), make_vocab()), skip_singleton_(skip_singleton) {}

    FinStructure member(const BigNat& index) const override {
        std::size_t n = index.fits_u64() ? static_cast<std::size_t>(index.to_u64()) : 0;
        if (!index.fits_u64())
            throw BoundExceeded("linear order member index beyond the desk scale");
        if (skip_singleton_ && n > 0) ++n;  // sizes 0, 2, 3, ...: the defect under test
        return chain(n);
    }

    bool decide_embedding(const BigNat& i, const BigNat& j, const PartialMap& f) const override {
        FinStructure a = member(i);
        std::size_t nb = member_size(j);
        if (f.domain() != a.universe()) return false;
        if (!f.injective()) return false;
        Element prev = 0;
        bool first = true;
        for (const auto& [src, tgt] : f.pairs()) {
            if (tgt >= nb) return false;
            if (!first && tgt <= prev) return false;  // sources ascend, images must too
            prev = tgt;
            first = false;
        }
        return true;
    }

    std::optional<Identification> identify(const FinStructure& s) const override {
        // a finite linear order: exactly one direction per distinct pair
        std::vector<Element> sorted = s.universe();
        std::sort(sorted.begin(), sorted.end(), [&](Element x, Element y) {
            return s.has_tuple(kOrder, Tuple{x, y});
        });
        for (std::size_t x = 0; x < sorted.size(); ++x) {
            for (std::size_t y = 0; y < sorted.size(); ++y) {
                bool expect = x < y;
                if (s.has_tuple(kOrder, Tuple{sorted[x], sorted[y]}) != expect) return std::nullopt;
            }
        }
        std::size_t n = sorted.size();
        if (skip_singleton_) {
            if (n == 1) return std::nullopt;
            std::vector<std::pair<Element, Element>> pairs;
            for (std::size_t k = 0; k < n; ++k) pairs.emplace_back(static_cast<Element>(k), sorted[k]);
            return Identification{BigNat(n == 0 ? 0 : n - 1), PartialMap(std::move(pairs))};
        }
        std::vector<std::pair<Element, Element>> pairs;
        for (std::size_t k = 0; k < n; ++k) pairs.emplace_back(static_cast<Element>(k), sorted[k]);
        return Identification{BigNat(n), PartialMap(std::move(pairs))};
    }

    Amalgam amalgamate(const FinStructure& a, const FinStructure& b, const FinStructure& c,
                       const PartialMap& f, const PartialMap& g) const override {
        std::vector<Element> a_sorted = sorted_by_order(a);
        std::vector<Element> b_sorted = sorted_by_order(b);
        std::vector<Element> c_sorted = sorted_by_order(c);
        // merge: new points of b are placed just below their least upper
        // c-bound; within a region, a's points come first, then b's in order

        auto region_a = [&](Element y) {
            std::size_t r = 0;
            for (Element ce : c_sorted) {
                Element img = *f.apply(ce);
                if (img == y || a.has_tuple(kOrder, Tuple{img, y})) ++r;
            }
            return r;
        };
        auto region_b = [&](Element x) {
            std::size_t r = 0;
            for (Element ce : c_sorted) {
                Element img = *g.apply(ce);
                if (b.has_tuple(kOrder, Tuple{img, x})) ++r;
            }
            return r;
        };

        Element fresh = a.universe().empty() ? 0 : a.universe().back() + 1;
        PartialMap g_inv = g.inverse();
        std::vector<std::pair<Element, Element>> gprime;
        struct Entry {
            std::size_t region;
            int side;  // 0 = from a, 1 = new from b
            std::size_t rank;
            Element id;
        };
        std::vector<Entry> entries;
        for (std::size_t k = 0; k < a_sorted.size(); ++k)
            entries.push_back({region_a(a_sorted[k]), 0, k, a_sorted[k]});
        for (std::size_t k = 0; k < b_sorted.size(); ++k) {
            Element x = b_sorted[k];
            if (auto pre = g_inv.apply(x)) {
                gprime.emplace_back(x, *f.apply(*pre));
                continue;
            }
            entries.push_back({region_b(x), 1, k, fresh});
            gprime.emplace_back(x, fresh);
            ++fresh;
        }
        std::sort(entries.begin(), entries.end(), [](const Entry& l, const Entry& r) {
            if (l.region != r.region) return l.region < r.region;
            if (l.side != r.side) return l.side < r.side;
            return l.rank < r.rank;
        });

        FinStructure d(a.vocabulary());
        for (const auto& e : entries) d.add_element(e.id);
        for (std::size_t x = 0; x < entries.size(); ++x)
            for (std::size_t y = x + 1; y < entries.size(); ++y)
                d.add_tuple(kOrder, Tuple{entries[x].id, entries[y].id});
        return Amalgam{std::move(d), PartialMap::identity(a.universe()),
                       PartialMap(std::move(gprime))};
    }

    FinStructure extend_to_embed(const FinStructure& stage,
                                 const FinStructure& member) const override {
        // a chain of length k embeds once the stage has k points: append
        // just enough fresh points on top
        FinStructure d = stage;
        Element fresh = stage.universe().empty() ? 0 : stage.universe().back() + 1;
        for (std::size_t k = stage.size(); k < member.size(); ++k) {
            d.add_element(fresh);
            for (Element z : d.universe())
                if (z != fresh) d.add_tuple(kOrder, Tuple{z, fresh});
            ++fresh;
        }
        return d;
    }

    bool has_embedding_search() const override { return true; }
    std::optional<PartialMap> find_member_embedding(const FinStructure& pattern,
                                                    const FinStructure& stage) const override {
        // any k elements of a linear order host a k-chain: take the least
        // k elements in stage order
        if (pattern.size() > stage.size()) return std::nullopt;
        std::vector<Element> sorted = sorted_by_order(stage);
        std::vector<Element> psorted = sorted_by_order(pattern);
        std::vector<std::pair<Element, Element>> pairs;
        for (std::size_t k = 0; k < psorted.size(); ++k) pairs.emplace_back(psorted[k], sorted[k]);
        return PartialMap(std::move(pairs));
    }

    bool goals_prechecked() const override { return true; }

    void emit_goals(const FinStructure& stage, GoalTracker& tracker,
                    std::vector<ExtensionGoal>& out, std::size_t budget) const override {
        if (skip_singleton_) return;
        std::vector<Element> focus;
        for (Element e : stage.universe()) {
            if (e < 16) focus.push_back(e);
        }
        std::sort(focus.begin(), focus.end(), [&](Element x, Element y) {
            return stage.has_tuple(kOrder, Tuple{x, y});
        });
        auto gap_empty = [&](Element lo, Element hi) {
            for (Element z : stage.universe())
                if (stage.has_tuple(kOrder, Tuple{lo, z}) && stage.has_tuple(kOrder, Tuple{z, hi}))
                    return false;
            return true;
        };
        auto push = [&](ExtensionGoal goal) {
            if (out.size() < budget && !tracker.seen(goal.key)) out.push_back(std::move(goal));
        };
        for (std::size_t k = 0; k + 1 < focus.size() && out.size() < budget; ++k) {
            Element lo = focus[k], hi = focus[k + 1];
            if (!gap_empty(lo, hi)) continue;
            FinStructure pattern = chain(3);
            push({std::vector<Element>{lo, hi}, pattern,
                  PartialMap({{0, lo}, {2, hi}}), 1,
                  "between:" + std::to_string(lo) + ":" + std::to_string(hi)});
        }
        if (!focus.empty() && out.size() < budget) {
            Element lo = focus.front();
            bool has_below = false;
            for (Element z : stage.universe())
                if (stage.has_tuple(kOrder, Tuple{z, lo})) has_below = true;
            if (!has_below)
                push({{lo}, chain(2), PartialMap({{1, lo}}), 0, "below:" + std::to_string(lo)});
            Element hi = focus.back();
            bool has_above = false;
            for (Element z : stage.universe())
                if (stage.has_tuple(kOrder, Tuple{hi, z})) has_above = true;
            if (!has_above)
                push({{hi}, chain(2), PartialMap({{0, hi}}), 1, "above:" + std::to_string(hi)});
        }
    }

private:
    bool skip_singleton_;

    static VocabularyPtr make_vocab() {
        auto v = std::make_shared<Vocabulary>();
        v->add_symbol(Symbol{kOrder, 2, "1"});
        return v;
    }

    std::size_t member_size(const BigNat& index) const {
        std::size_t n = static_cast<std::size_t>(index.to_u64());
        if (skip_singleton_ && n > 0) ++n;
        return n;
    }

    FinStructure chain(std::size_t n) const {
        FinStructure s(vocabulary());
        for (std::size_t k = 0; k < n; ++k) s.add_element(static_cast<Element>(k));
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = x + 1; y < n; ++y)
                s.add_tuple(kOrder, Tuple{static_cast<Element>(x), static_cast<Element>(y)});
        return s;
    }

    static std::vector<Element> sorted_by_order(const FinStructure& s) {
        std::vector<Element> out = s.universe();
        std::sort(out.begin(), out.end(), [&](Element x, Element y) {
            return s.has_tuple(kOrder, Tuple{x, y});
        });
        return out;
    }
};

}  // namespace

AgeRepPtr make_linear_orders_age() {
    return std::make_shared<LinearOrdersAge>("linorders", false);
}

AgeRepPtr make_broken_linorders_age() {
    return std::make_shared<LinearOrdersAge>("linorders-defective", true);
}

}  // namespace fraisse

#include "fraisse/structure.hpp"

#include <algorithm>

#include "fraisse/errors.hpp"

namespace fraisse {

const std::set<Tuple> FinStructure::kEmptyRelation{};

PartialMap::PartialMap(std::vector<std::pair<Element, Element>> pairs) : pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end());
    for (std::size_t i = 1; i < pairs_.size(); ++i) {
        if (pairs_[i].first == pairs_[i - 1].first) {
            if (pairs_[i].second == pairs_[i - 1].second) {
                pairs_.erase(pairs_.begin() + static_cast<std::ptrdiff_t>(i--));
            } else {
                throw Error("partial map is not functional");
            }
        }
    }
}

PartialMap PartialMap::identity(const std::vector<Element>& elems) {
    std::vector<std::pair<Element, Element>> pairs;
    pairs.reserve(elems.size());
    for (Element e : elems) pairs.emplace_back(e, e);
    return PartialMap(std::move(pairs));
}

std::optional<Element> PartialMap::apply(Element x) const {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::make_pair(x, Element{0}));
    if (it != pairs_.end() && it->first == x) return it->second;
    return std::nullopt;
}

std::vector<Element> PartialMap::domain() const {
    std::vector<Element> out;
    out.reserve(pairs_.size());
    for (const auto& [s, t] : pairs_) out.push_back(s);
    return out;
}

std::vector<Element> PartialMap::range() const {
    std::vector<Element> out;
    out.reserve(pairs_.size());
    for (const auto& [s, t] : pairs_) out.push_back(t);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool PartialMap::injective() const {
    auto r = range();
    return r.size() == pairs_.size();
}

PartialMap PartialMap::inverse() const {
    if (!injective()) throw Error("cannot invert a non-injective map");
    std::vector<std::pair<Element, Element>> flipped;
    flipped.reserve(pairs_.size());
    for (const auto& [s, t] : pairs_) flipped.emplace_back(t, s);
    return PartialMap(std::move(flipped));
}

PartialMap PartialMap::compose(const PartialMap& g, const PartialMap& f) {
    std::vector<std::pair<Element, Element>> pairs;
    for (const auto& [x, y] : f.pairs_) {
        if (auto z = g.apply(y)) pairs.emplace_back(x, *z);
    }
    return PartialMap(std::move(pairs));
}

PartialMap PartialMap::extended(Element x, Element y) const {
    auto pairs = pairs_;
    pairs.emplace_back(x, y);
    return PartialMap(std::move(pairs));
}

PartialMap PartialMap::restricted(const std::vector<Element>& dom) const {
    std::vector<std::pair<Element, Element>> pairs;
    for (const auto& [s, t] : pairs_) {
        if (std::find(dom.begin(), dom.end(), s) != dom.end()) pairs.emplace_back(s, t);
    }
    return PartialMap(std::move(pairs));
}

std::optional<Tuple> PartialMap::apply_tuple(const Tuple& t) const {
    Tuple out;
    out.reserve(t.size());
    for (Element e : t) {
        auto img = apply(e);
        if (!img) return std::nullopt;
        out.push_back(*img);
    }
    return out;
}

bool FinStructure::contains(Element e) const {
    return std::binary_search(universe_.begin(), universe_.end(), e);
}

void FinStructure::add_element(Element e) {
    auto it = std::lower_bound(universe_.begin(), universe_.end(), e);
    if (it == universe_.end() || *it != e) universe_.insert(it, e);
}

void FinStructure::add_tuple(const std::string& symbol, const Tuple& t) {
    if (vocab_) {
        unsigned arity = vocab_->require(symbol).arity;
        if (t.size() != arity)
            throw Error("tuple length " + std::to_string(t.size()) + " does not match arity of " +
                        symbol);
    }
    for (Element e : t) {
        if (!contains(e)) throw Error("tuple entry outside the universe");
    }
    relations_[symbol].insert(t);
}

bool FinStructure::has_tuple(const std::string& symbol, const Tuple& t) const {
    auto it = relations_.find(symbol);
    return it != relations_.end() && it->second.count(t) > 0;
}

std::vector<std::string> FinStructure::realized_symbols() const {
    std::vector<std::string> out;
    for (const auto& [name, tuples] : relations_) {
        if (!tuples.empty()) out.push_back(name);
    }
    return out;
}

const std::set<Tuple>& FinStructure::relation(const std::string& symbol) const {
    auto it = relations_.find(symbol);
    return it == relations_.end() ? kEmptyRelation : it->second;
}

bool FinStructure::same_content(const FinStructure& other) const {
    return universe_ == other.universe_ && relations_ == other.relations_;
}

bool is_embedding(const PartialMap& f, const FinStructure& a, const FinStructure& b) {
    if (a.vocabulary() != b.vocabulary())
        throw VocabularyMismatch("embedding check across different vocabularies");
    if (f.domain() != a.universe()) return false;
    if (!f.injective()) return false;
    for (Element img : f.range()) {
        if (!b.contains(img)) return false;
    }
    // forward: every A-tuple maps to a B-tuple
    for (const auto& name : a.realized_symbols()) {
        for (const auto& t : a.relation(name)) {
            auto img = f.apply_tuple(t);
            if (!img || !b.has_tuple(name, *img)) return false;
        }
    }
    // backward: every B-tuple inside the image pulls back
    PartialMap back = f.inverse();
    for (const auto& name : b.realized_symbols()) {
        for (const auto& t : b.relation(name)) {
            auto pre = back.apply_tuple(t);
            if (pre && !a.has_tuple(name, *pre)) return false;
        }
    }
    return true;
}

namespace {

// Sound partial check after extending the assignment by (src -> tgt):
// every fully-assigned tuple must match on both sides.
bool consistent_extension(const PartialMap& f, const FinStructure& a, const FinStructure& b,
                          Element src, Element tgt) {
    for (const auto& name : a.realized_symbols()) {
        for (const auto& t : a.relation(name)) {
            if (std::find(t.begin(), t.end(), src) == t.end()) continue;
            auto img = f.apply_tuple(t);
            if (img && !b.has_tuple(name, *img)) return false;
        }
    }
    PartialMap back = f.inverse();
    for (const auto& name : b.realized_symbols()) {
        for (const auto& t : b.relation(name)) {
            if (std::find(t.begin(), t.end(), tgt) == t.end()) continue;
            auto pre = back.apply_tuple(t);
            if (pre && !a.has_tuple(name, *pre)) return false;
        }
    }
    return true;
}

void search_embeddings(const FinStructure& a, const FinStructure& b,
                       std::vector<std::pair<Element, Element>>& assigned,
                       std::vector<bool>& used, std::size_t depth,
                       std::vector<PartialMap>& out, bool first_only) {
    const auto& dom = a.universe();
    const auto& codom = b.universe();
    if (depth == dom.size()) {
        out.emplace_back(assigned);
        return;
    }
    Element src = dom[depth];
    for (std::size_t j = 0; j < codom.size(); ++j) {
        if (used[j]) continue;
        if (first_only && !out.empty()) return;
        Element tgt = codom[j];
        assigned.emplace_back(src, tgt);
        PartialMap partial(assigned);
        if (consistent_extension(partial, a, b, src, tgt)) {
            used[j] = true;
            search_embeddings(a, b, assigned, used, depth + 1, out, first_only);
            used[j] = false;
        }
        assigned.pop_back();
    }
}

}  // namespace

std::vector<PartialMap> enumerate_embeddings(const FinStructure& a, const FinStructure& b,
                                             std::size_t domain_bound) {
    if (a.vocabulary() != b.vocabulary())
        throw VocabularyMismatch("embedding enumeration across different vocabularies");
    if (a.size() > domain_bound)
        throw BoundExceeded("enumerate_embeddings: domain larger than the configured bound");
    std::vector<std::pair<Element, Element>> assigned;
    std::vector<bool> used(b.size(), false);
    std::vector<PartialMap> out;
    search_embeddings(a, b, assigned, used, 0, out, false);
    return out;
}

std::optional<PartialMap> find_embedding(const FinStructure& a, const FinStructure& b) {
    if (a.vocabulary() != b.vocabulary())
        throw VocabularyMismatch("embedding search across different vocabularies");
    std::vector<std::pair<Element, Element>> assigned;
    std::vector<bool> used(b.size(), false);
    std::vector<PartialMap> out;
    search_embeddings(a, b, assigned, used, 0, out, true);
    if (out.empty()) return std::nullopt;
    return out.front();
}

std::optional<PartialMap> find_isomorphism(const FinStructure& a, const FinStructure& b) {
    if (a.size() != b.size()) return std::nullopt;
    return find_embedding(a, b);
}

FinStructure substructure(const FinStructure& a, const std::vector<Element>& s) {
    for (Element e : s) {
        if (!a.contains(e)) throw NotSubset("substructure: set not contained in the universe");
    }
    FinStructure out(a.vocabulary());
    for (Element e : s) out.add_element(e);
    for (const auto& name : a.realized_symbols()) {
        for (const auto& t : a.relation(name)) {
            bool inside = std::all_of(t.begin(), t.end(), [&](Element e) { return out.contains(e); });
            if (inside) out.add_tuple(name, t);
        }
    }
    return out;
}

std::vector<Literal> atomic_diagram(const FinStructure& a) {
    std::vector<Literal> out;
    for (const auto& name : a.realized_symbols()) {
        unsigned arity = a.vocabulary() ? a.vocabulary()->require(name).arity
                                        : static_cast<unsigned>(a.relation(name).begin()->size());
        // all tuples over the universe in lexicographic order
        const auto& u = a.universe();
        if (u.empty()) continue;
        std::vector<std::size_t> idx(arity, 0);
        while (true) {
            Tuple t(arity);
            for (unsigned k = 0; k < arity; ++k) t[k] = u[idx[k]];
            out.push_back(Literal{name, t, a.has_tuple(name, t)});
            unsigned pos = arity;
            while (pos > 0) {
                if (++idx[pos - 1] < u.size()) break;
                idx[pos - 1] = 0;
                --pos;
            }
            if (pos == 0) break;
        }
    }
    return out;
}

}  // namespace fraisse

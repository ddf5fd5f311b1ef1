#include <algorithm>

#include "fraisse/errors.hpp"
#include "tower_internal.hpp"

namespace fraisse {

namespace {

std::optional<std::size_t> parse_block_index(const std::string& name, const std::string& mark) {
    // "Qn{<k>}@<mark>"
    const std::string prefix = "Qn{";
    const std::string suffix = "}@" + mark;
    if (name.rfind(prefix, 0) != 0) return std::nullopt;
    if (name.size() <= prefix.size() + suffix.size()) return std::nullopt;
    if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) return std::nullopt;
    std::string digits = name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
    if (digits.empty()) return std::nullopt;
    std::size_t value = 0;
    for (char ch : digits) {
        if (ch < '0' || ch > '9') return std::nullopt;
        value = value * 10 + static_cast<std::size_t>(ch - '0');
    }
    return value;
}

VocabularyPtr make_limit_vocab(const Notation& a, std::weak_ptr<Tower> tower,
                               std::size_t horizon) {
    auto vocab = std::make_shared<Vocabulary>();
    const std::string mark = a.text();
    vocab->add_symbol(Symbol{"U@" + mark, 1, mark});
    vocab->add_symbol(Symbol{"<@" + mark, 2, mark});
    vocab->add_family(SymbolFamily{
        "blocks@" + mark,
        [mark](const std::string& name) -> std::optional<Symbol> {
            if (parse_block_index(name, mark)) return Symbol{name, 1, mark};
            return std::nullopt;
        },
        [mark](std::size_t k) -> std::optional<Symbol> {
            return Symbol{"Qn{" + std::to_string(k) + "}@" + mark, 1, mark};
        }});
    // the union of the lower vocabularies: resolution follows the levels
    // the tower has materialized so far (decoding a member materializes
    // its blocks' levels before any symbol lookup happens)
    vocab->add_family(SymbolFamily{
        "levels@" + mark,
        [tower, a, horizon](const std::string& name) -> std::optional<Symbol> {
            auto t = tower.lock();
            if (!t) return std::nullopt;
            for (std::size_t n = 0;; ++n) {
                Notation an = a.fundamental_element(n);
                if (n >= horizon && !t->materialized(an.text())) break;
                if (auto sym = t->level(an).vocabulary->lookup(name)) return sym;
            }
            return std::nullopt;
        },
        [tower, a](std::size_t k) -> std::optional<Symbol> {
            auto t = tower.lock();
            if (!t) return std::nullopt;
            auto prefix = t->level(a.fundamental_element(0)).vocabulary->enumerate(k + 1);
            if (prefix.size() <= k) return std::nullopt;
            return prefix[k];
        }});
    return vocab;
}

}  // namespace

LimitAge::LimitAge(Notation a, std::weak_ptr<Tower> tower, std::size_t horizon)
    : AgeRep("tower:" + a.text(), make_limit_vocab(a, tower, horizon)),
      a_(a),
      tower_(std::move(tower)) {
    u_name_ = "U@" + a_.text();
    order_name_ = "<@" + a_.text();
}

std::shared_ptr<Tower> LimitAge::tower() const {
    auto t = tower_.lock();
    if (!t) throw Error("limit age outlived its tower");
    return t;
}

std::string LimitAge::block_name(std::size_t n) const {
    return "Qn{" + std::to_string(n) + "}@" + a_.text();
}

const TowerLevel& LimitAge::block_level(std::size_t n) const {
    return tower()->level(a_.fundamental_element(n));
}

std::optional<std::size_t> LimitAge::block_of_name(const std::string& name) const {
    return parse_block_index(name, a_.text());
}

Element LimitAge::block_element(std::size_t n, Element x) {
    BigNat code = pair_encode(BigNat(n), BigNat(x));
    if (!code.fits_u64() || code.to_u64() > 0xFFFFFFFFull)
        throw BoundExceeded("limit block element beyond the id space");
    return static_cast<Element>(code.to_u64());
}

std::vector<std::pair<std::size_t, BigNat>> LimitAge::decode_sigma(const BigNat& index) const {
    auto [mask, vals] = pair_decode(index);
    std::vector<std::size_t> blocks = set_decode(mask);
    std::vector<std::pair<std::size_t, BigNat>> sigma;
    BigNat rest = vals;
    for (std::size_t n : blocks) {
        auto [head, tail] = pair_decode(rest);
        sigma.emplace_back(n, head);
        rest = tail;
    }
    // normalization: blocks holding an empty lower member are dropped, so
    // that the domain comparison of the embedding criterion is exact
    std::vector<std::pair<std::size_t, BigNat>> out;
    for (auto& [n, j] : sigma) {
        if (block_level(n).age->member(j).size() > 0) out.emplace_back(n, j);
    }
    return out;
}

BigNat LimitAge::encode_sigma(const std::vector<std::pair<std::size_t, BigNat>>& sigma) {
    BigNat mask;
    for (const auto& [n, j] : sigma) mask.set_bit(n);
    BigNat vals;
    for (std::size_t k = sigma.size(); k-- > 0;) vals = pair_encode(sigma[k].second, vals);
    return pair_encode(mask, vals);
}

FinStructure LimitAge::member(const BigNat& index) const {
    {
        std::lock_guard<std::mutex> lock(cache_mu_);
        auto it = member_cache_.find(index);
        if (it != member_cache_.end()) return it->second;
    }
    auto sigma = decode_sigma(index);
    FinStructure s(vocabulary());
    std::vector<std::pair<std::size_t, std::vector<Element>>> block_u;  // per block, in order
    for (const auto& [n, j] : sigma) {
        const TowerLevel& level = block_level(n);
        FinStructure lm = level.age->member(j);
        for (Element x : lm.universe()) s.add_element(block_element(n, x));
        for (const auto& name : lm.realized_symbols()) {
            for (const auto& t : lm.relation(name)) {
                Tuple mapped = t;
                for (Element& e : mapped) e = block_element(n, e);
                s.add_tuple(name, mapped);
            }
        }
        std::vector<Element> us;
        for (Element x : lm.universe()) {
            s.add_tuple(block_name(n), Tuple{block_element(n, x)});
            if (lm.has_tuple(level.u_name, Tuple{x})) us.push_back(block_element(n, x));
        }
        const std::string& low_order = level.order_name;
        std::sort(us.begin(), us.end(), [&](Element x, Element y) {
            return s.has_tuple(low_order, Tuple{x, y});
        });
        for (Element u : us) s.add_tuple(u_name_, Tuple{u});
        block_u.emplace_back(n, std::move(us));
    }
    // the order: within a block inherited, across blocks by block index
    std::vector<Element> all_u;
    for (const auto& [n, us] : block_u) all_u.insert(all_u.end(), us.begin(), us.end());
    for (std::size_t x = 0; x < all_u.size(); ++x)
        for (std::size_t y = x + 1; y < all_u.size(); ++y)
            s.add_tuple(order_name_, Tuple{all_u[x], all_u[y]});

    std::lock_guard<std::mutex> lock(cache_mu_);
    if (member_cache_.size() > 128) member_cache_.clear();
    member_cache_.emplace(index, s);
    return s;
}

bool LimitAge::decide_embedding(const BigNat& i, const BigNat& j, const PartialMap& f) const {
    auto sigma_i = decode_sigma(i);
    auto sigma_j = decode_sigma(j);
    FinStructure mi = member(i);
    if (f.domain() != mi.universe() || !f.injective()) return false;
    std::map<std::size_t, BigNat> j_of;
    for (const auto& [n, idx] : sigma_j) j_of.emplace(n, idx);
    for (const auto& [n, idx] : sigma_i) {
        auto jt = j_of.find(n);
        if (jt == j_of.end()) return false;  // dom(sigma_i) must lie in dom(sigma_j)
        // component map: conjugate f by the block placement
        const TowerLevel& level = block_level(n);
        FinStructure lm = level.age->member(idx);
        std::vector<std::pair<Element, Element>> comp;
        for (Element x : lm.universe()) {
            auto img = f.apply(block_element(n, x));
            if (!img) return false;
            auto [bn, bx] = pair_decode(BigNat(*img));
            if (!bn.fits_u64() || bn.to_u64() != n) return false;  // blocks are preserved
            comp.emplace_back(x, static_cast<Element>(bx.to_u64()));
        }
        if (!level.age->decide_embedding(idx, jt->second, PartialMap(std::move(comp))))
            return false;
    }
    return true;
}

std::vector<std::string> LimitAge::membership_violations(const FinStructure& s) const {
    std::vector<std::string> out;
    std::map<std::size_t, std::vector<Element>> blocks;
    for (Element e : s.universe()) {
        std::size_t count = 0;
        for (const auto& name : s.realized_symbols()) {
            auto n = block_of_name(name);
            if (n && s.has_tuple(name, Tuple{e})) {
                blocks[*n].push_back(e);
                ++count;
            }
        }
        if (count != 1)
            out.push_back("element " + std::to_string(e) + " is not in exactly one block");
    }
    if (!out.empty()) return out;
    std::set<Element> u_marked;
    for (const auto& t : s.relation(u_name_)) u_marked.insert(t[0]);
    std::vector<std::pair<std::size_t, Element>> u_info;  // block, element
    for (const auto& [n, elems] : blocks) {
        const TowerLevel& level = block_level(n);
        // block content as a lower-level structure
        FinStructure content(level.vocabulary);
        for (Element e : elems) content.add_element(e);
        for (const auto& name : s.realized_symbols()) {
            if (block_of_name(name) || name == u_name_ || name == order_name_) continue;
            if (!level.vocabulary->lookup(name)) continue;
            for (const auto& t : s.relation(name)) {
                bool touches = false, inside = true;
                for (Element e : t) {
                    if (content.contains(e)) touches = true;
                    else inside = false;
                }
                if (!touches) continue;
                if (!inside) {
                    out.push_back("lower symbol " + name + " crosses block " + std::to_string(n));
                    continue;
                }
                content.add_tuple(name, t);
            }
        }
        if (!level.age->identify(content))
            out.push_back("block " + std::to_string(n) + " is not a lower-level member");
        for (Element e : elems) {
            bool low_u = content.has_tuple(level.u_name, Tuple{e});
            if (low_u != (u_marked.count(e) > 0))
                out.push_back("U mark of element " + std::to_string(e) +
                              " disagrees with its block");
            if (low_u) u_info.emplace_back(n, e);
        }
    }
    // condition: the order is within-block inherited, across blocks by index
    for (const auto& [n0, u0] : u_info) {
        for (const auto& [n1, u1] : u_info) {
            if (u0 == u1) continue;
            bool expect;
            if (n0 != n1) {
                expect = n0 < n1;
            } else {
                const TowerLevel& level = block_level(n0);
                expect = s.has_tuple(level.order_name, Tuple{u0, u1});
            }
            if (s.has_tuple(order_name_, Tuple{u0, u1}) != expect)
                out.push_back("limit order law fails on (" + std::to_string(u0) + "," +
                              std::to_string(u1) + ")");
        }
    }
    return out;
}

std::optional<Identification> LimitAge::identify(const FinStructure& s) const {
    if (!membership_violations(s).empty()) return std::nullopt;
    std::map<std::size_t, std::vector<Element>> blocks;
    for (Element e : s.universe()) {
        for (const auto& name : s.realized_symbols()) {
            auto n = block_of_name(name);
            if (n && s.has_tuple(name, Tuple{e})) blocks[*n].push_back(e);
        }
    }
    std::vector<std::pair<std::size_t, BigNat>> sigma;
    std::vector<std::pair<Element, Element>> iso;
    for (const auto& [n, elems] : blocks) {
        const TowerLevel& level = block_level(n);
        FinStructure content(level.vocabulary);
        for (Element e : elems) content.add_element(e);
        for (const auto& name : s.realized_symbols()) {
            if (block_of_name(name) || name == u_name_ || name == order_name_) continue;
            if (!level.vocabulary->lookup(name)) continue;
            for (const auto& t : s.relation(name)) {
                bool inside = std::all_of(t.begin(), t.end(),
                                          [&](Element e) { return content.contains(e); });
                if (inside) content.add_tuple(name, t);
            }
        }
        auto id = level.age->identify(content);
        if (!id) return std::nullopt;
        sigma.emplace_back(n, id->index);
        FinStructure canon = level.age->member(id->index);
        for (Element x : canon.universe())
            iso.emplace_back(block_element(n, x), *id->iso.apply(x));
    }
    return Identification{encode_sigma(sigma), PartialMap(std::move(iso))};
}

Amalgam LimitAge::amalgamate(const FinStructure& a, const FinStructure& b, const FinStructure& c,
                             const PartialMap& f, const PartialMap& g) const {
    auto blocks_of = [&](const FinStructure& s) {
        std::map<std::size_t, std::vector<Element>> blocks;
        for (const auto& name : s.realized_symbols()) {
            auto n = block_of_name(name);
            if (!n) continue;
            for (const auto& t : s.relation(name)) blocks[*n].push_back(t[0]);
        }
        for (auto& [n, elems] : blocks) std::sort(elems.begin(), elems.end());
        return blocks;
    };
    auto strip_block = [&](const FinStructure& s, std::size_t n,
                           const std::vector<Element>& elems) {
        const TowerLevel& level = block_level(n);
        FinStructure content(level.vocabulary);
        for (Element e : elems) content.add_element(e);
        for (const auto& name : s.realized_symbols()) {
            if (block_of_name(name) || name == u_name_ || name == order_name_) continue;
            if (!level.vocabulary->lookup(name)) continue;
            for (const auto& t : s.relation(name)) {
                bool inside = std::all_of(t.begin(), t.end(),
                                          [&](Element e) { return content.contains(e); });
                if (inside) content.add_tuple(name, t);
            }
        }
        return content;
    };
    auto a_blocks = blocks_of(a);
    auto b_blocks = blocks_of(b);
    auto c_blocks = blocks_of(c);
    std::set<std::size_t> all_blocks;
    for (const auto& [n, e] : a_blocks) all_blocks.insert(n);
    for (const auto& [n, e] : b_blocks) all_blocks.insert(n);

    Element fresh = a.universe().empty() ? 0 : a.universe().back() + 1;
    FinStructure d(vocabulary());
    std::vector<std::pair<Element, Element>> gp;
    std::vector<std::pair<std::size_t, FinStructure>> d_blocks;

    static const std::vector<Element> kNoElems;
    for (std::size_t n : all_blocks) {
        const auto& a_elems = a_blocks.count(n) ? a_blocks.at(n) : kNoElems;
        const auto& b_elems = b_blocks.count(n) ? b_blocks.at(n) : kNoElems;
        const auto& c_elems = c_blocks.count(n) ? c_blocks.at(n) : kNoElems;
        const TowerLevel& level = block_level(n);
        FinStructure aB = strip_block(a, n, a_elems);
        FinStructure bB = strip_block(b, n, b_elems);
        FinStructure cB = strip_block(c, n, c_elems);
        Amalgam low = level.age->amalgamate(aB, bB, cB, f.restricted(c_elems),
                                            g.restricted(c_elems));
        std::map<Element, Element> remap;
        for (Element e : low.d.universe())
            if (!aB.contains(e)) remap[e] = fresh++;
        auto global = [&](Element e) {
            auto it = remap.find(e);
            return it == remap.end() ? e : it->second;
        };
        FinStructure content(level.vocabulary);
        for (Element e : low.d.universe()) content.add_element(global(e));
        for (const auto& name : low.d.realized_symbols())
            for (const auto& t : low.d.relation(name)) {
                Tuple mapped = t;
                for (Element& e : mapped) e = global(e);
                content.add_tuple(name, mapped);
            }
        for (Element e : b_elems) gp.emplace_back(e, global(*low.g_prime.apply(e)));
        d_blocks.emplace_back(n, std::move(content));
    }

    // assemble: block contents, then marks, then the order over all U parts
    std::vector<Element> all_u;
    for (const auto& [n, content] : d_blocks) {
        const TowerLevel& level = block_level(n);
        for (Element e : content.universe()) {
            d.add_element(e);
            d.add_tuple(block_name(n), Tuple{e});
        }
        for (const auto& name : content.realized_symbols())
            for (const auto& t : content.relation(name)) d.add_tuple(name, t);
        std::vector<Element> us;
        for (Element e : content.universe())
            if (content.has_tuple(level.u_name, Tuple{e})) us.push_back(e);
        std::sort(us.begin(), us.end(), [&](Element x, Element y) {
            return content.has_tuple(level.order_name, Tuple{x, y});
        });
        for (Element u : us) d.add_tuple(u_name_, Tuple{u});
        all_u.insert(all_u.end(), us.begin(), us.end());
    }
    for (std::size_t x = 0; x < all_u.size(); ++x)
        for (std::size_t y = x + 1; y < all_u.size(); ++y)
            d.add_tuple(order_name_, Tuple{all_u[x], all_u[y]});
    return Amalgam{std::move(d), PartialMap::identity(a.universe()), PartialMap(std::move(gp))};
}

FinStructure LimitAge::append_u(const FinStructure& s, const UPosition& where) const {
    auto block_of_element = [&](Element e) -> std::size_t {
        for (const auto& name : s.realized_symbols()) {
            auto n = block_of_name(name);
            if (n && s.has_tuple(name, Tuple{e})) return *n;
        }
        throw Error("append_u: element without a block");
    };
    std::size_t target = 0;
    UPosition low_pos = where;
    switch (where.kind) {
        case UPosition::Kind::First:
            target = 0;
            break;
        case UPosition::Kind::Below:
            target = block_of_element(where.lo);
            break;
        case UPosition::Kind::Above:
            target = block_of_element(where.lo);
            break;
        case UPosition::Kind::Between: {
            std::size_t n0 = block_of_element(where.lo);
            std::size_t n1 = block_of_element(where.hi);
            target = n0;
            if (n0 != n1) {
                low_pos.kind = UPosition::Kind::Above;  // just above lo within its block
            }
            break;
        }
    }
    const TowerLevel& level = block_level(target);
    // the block content, lower vocabulary
    std::vector<Element> elems;
    for (Element e : s.universe()) {
        if (s.has_tuple(block_name(target), Tuple{e})) elems.push_back(e);
    }
    FinStructure content(level.vocabulary);
    for (Element e : elems) content.add_element(e);
    for (const auto& name : s.realized_symbols()) {
        if (block_of_name(name) || name == u_name_ || name == order_name_) continue;
        if (!level.vocabulary->lookup(name)) continue;
        for (const auto& t : s.relation(name)) {
            bool inside = std::all_of(t.begin(), t.end(),
                                      [&](Element e) { return content.contains(e); });
            if (inside) content.add_tuple(name, t);
        }
    }
    FinStructure grown = level.age->append_u(content, low_pos);
    Element added = 0;
    bool found = false;
    for (Element e : grown.universe())
        if (!content.contains(e)) {
            added = e;
            found = true;
            break;
        }
    if (!found) throw Error("append_u: lower level added nothing");
    Element global = s.universe().empty() ? 0 : s.universe().back() + 1;

    FinStructure out = s;
    out.add_element(global);
    out.add_tuple(block_name(target), Tuple{global});
    out.add_tuple(u_name_, Tuple{global});
    for (const auto& name : grown.realized_symbols()) {
        for (const auto& t : grown.relation(name)) {
            if (std::find(t.begin(), t.end(), added) == t.end()) continue;
            Tuple mapped = t;
            for (Element& e : mapped)
                if (e == added) e = global;
            out.add_tuple(name, mapped);
        }
    }
    // rebuild the limit order against the new element
    for (Element u : s.universe()) {
        if (!s.has_tuple(u_name_, Tuple{u})) continue;
        std::size_t nu = block_of_element(u);
        bool below;
        if (nu != target) {
            below = nu < target;
        } else {
            below = out.has_tuple(level.order_name, Tuple{u, global});
        }
        if (below)
            out.add_tuple(order_name_, Tuple{u, global});
        else
            out.add_tuple(order_name_, Tuple{global, u});
    }
    return out;
}

}  // namespace fraisse

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include "fraisse/errors.hpp"
#include "tower_internal.hpp"

namespace fraisse {

namespace {

constexpr std::size_t kSizeCap = 4096;  // desk-scale guard on decoded parts

/// Fold a digit vector (least significant first) into a number.
BigNat fold_digits(const std::vector<unsigned>& digits, std::uint64_t base) {
    BigNat code;
    for (std::size_t k = digits.size(); k-- > 0;) {
        code.mul_small(base);
        code.add_small(digits[k]);
    }
    return code;
}

std::vector<unsigned> unfold_digits(BigNat code, std::uint64_t base, std::size_t count) {
    std::vector<unsigned> digits(count, 0);
    if (base <= 1) return digits;
    for (std::size_t k = 0; k < count; ++k)
        digits[k] = static_cast<unsigned>(code.divmod_small(base));
    return digits;
}

}  // namespace

VocabularyPtr make_successor_vocab(const Notation& b, const TowerLevel& lower) {
    auto vocab = std::make_shared<Vocabulary>();
    const std::string mark = b.text();
    vocab->add_symbol(Symbol{"V@" + mark, 1, mark});
    vocab->add_symbol(Symbol{"M@" + mark, 1, mark});
    vocab->add_symbol(Symbol{"U@" + mark, 1, mark});
    vocab->add_symbol(Symbol{"P@" + mark, 2, mark});
    vocab->add_symbol(Symbol{"F@" + mark, 3, mark});
    vocab->add_symbol(Symbol{"<@" + mark, 2, mark});
    VocabularyPtr lower_vocab = lower.vocabulary;
    vocab->add_family(SymbolFamily{
        "lower:" + lower.notation.text(),
        [lower_vocab](const std::string& name) { return lower_vocab->lookup(name); },
        [lower_vocab](std::size_t k) -> std::optional<Symbol> {
            auto prefix = lower_vocab->enumerate(k + 1);
            if (prefix.size() <= k) return std::nullopt;
            return prefix[k];
        }});
    return vocab;
}

SuccessorAge::SuccessorAge(Notation b, TowerLevel lower)
    : AgeRep("tower:" + b.text(), make_successor_vocab(b, lower)),
      b_(b),
      lower_(std::move(lower)) {
    const std::string mark = b_.text();
    v_name_ = "V@" + mark;
    m_name_ = "M@" + mark;
    u_name_ = "U@" + mark;
    p_name_ = "P@" + mark;
    f_name_ = "F@" + mark;
    order_name_ = "<@" + mark;
}

SuccessorAge::Parts SuccessorAge::partition(const FinStructure& s) const {
    Parts parts;
    for (Element e : s.universe()) {
        if (s.has_tuple(v_name_, Tuple{e})) parts.v.push_back(e);
        else if (s.has_tuple(u_name_, Tuple{e})) parts.u.push_back(e);
        else parts.m.push_back(e);  // condition 1 checked by the validator
    }
    return parts;
}

FinStructure SuccessorAge::strip_to_lower(const FinStructure& s,
                                          const std::vector<Element>& m_elems) const {
    FinStructure out(lower_.vocabulary);
    for (Element e : m_elems) out.add_element(e);
    for (const auto& name : s.realized_symbols()) {
        if (!lower_.vocabulary->lookup(name)) continue;
        for (const auto& t : s.relation(name)) {
            bool inside = std::all_of(t.begin(), t.end(),
                                      [&](Element e) { return out.contains(e); });
            if (inside) out.add_tuple(name, t);
        }
    }
    return out;
}

std::vector<Element> SuccessorAge::lower_u_sorted(const FinStructure& s,
                                                  const std::vector<Element>& m_elems) const {
    std::vector<Element> out;
    for (Element e : m_elems)
        if (s.has_tuple(lower_.u_name, Tuple{e})) out.push_back(e);
    std::sort(out.begin(), out.end(), [&](Element x, Element y) {
        return s.has_tuple(lower_.order_name, Tuple{x, y});
    });
    return out;
}

SuccessorAge::FMap SuccessorAge::read_f(const FinStructure& s,
                                        const std::vector<Element>& vs) const {
    FMap f;
    std::set<Element> vset(vs.begin(), vs.end());
    for (const auto& t : s.relation(f_name_)) {
        if (t.size() != 3) continue;
        if (!vset.count(t[0]) || !vset.count(t[1])) continue;
        f[norm(t[0], t[1])] = t[2];
    }
    return f;
}

bool SuccessorAge::close_star(FMap& f, const std::vector<Element>& vs,
                              const std::function<bool(Element, Element)>& less_a,
                              const std::set<FPair>* frozen,
                              const std::vector<FPair>* seed) const {
    std::deque<FPair> work;
    if (seed) {
        for (const auto& pair : *seed) work.push_back(pair);
    } else {
        for (const auto& [pair, color] : f) work.push_back(pair);
    }
    auto minimum = [&](Element c1, Element c2) { return less_a(c1, c2) ? c1 : c2; };
    while (!work.empty()) {
        auto [x, y] = work.front();
        work.pop_front();
        Element cxy = f.at(norm(x, y));
        for (Element z : vs) {
            if (z == x || z == y) continue;
            auto xz = f.find(norm(x, z));
            auto yz = f.find(norm(y, z));
            // pivot x over edges (x,y),(x,z)
            if (xz != f.end()) {
                if (xz->second != cxy) {
                    Element forced = minimum(xz->second, cxy);
                    if (yz != f.end()) {
                        if (yz->second != forced) return false;
                    } else {
                        FPair key = norm(y, z);
                        if (frozen && frozen->count(key)) return false;
                        f[key] = forced;
                        work.push_back(key);
                        yz = f.find(key);
                    }
                } else if (yz != f.end() && !less_a(cxy, yz->second)) {
                    return false;  // equal pivot colors demand a larger third
                }
            }
            // pivot y over edges (y,x),(y,z)
            if (yz != f.end()) {
                if (yz->second != cxy) {
                    Element forced = minimum(yz->second, cxy);
                    auto xz2 = f.find(norm(x, z));
                    if (xz2 != f.end()) {
                        if (xz2->second != forced) return false;
                    } else {
                        FPair key = norm(x, z);
                        if (frozen && frozen->count(key)) return false;
                        f[key] = forced;
                        work.push_back(key);
                    }
                } else {
                    auto xz2 = f.find(norm(x, z));
                    if (xz2 != f.end() && !less_a(cxy, xz2->second)) return false;
                }
            }
            // pivot z over edges (z,x),(z,y) constrains (x,y) itself
            auto xz3 = f.find(norm(x, z));
            auto yz3 = f.find(norm(y, z));
            if (xz3 != f.end() && yz3 != f.end()) {
                if (xz3->second != yz3->second) {
                    if (cxy != minimum(xz3->second, yz3->second)) return false;
                } else if (!less_a(xz3->second, cxy)) {
                    return false;
                }
            }
        }
    }
    return true;
}

FinStructure SuccessorAge::member(const BigNat& index) const {
    {
        std::lock_guard<std::mutex> lock(cache_mu_);
        auto it = member_cache_.find(index);
        if (it != member_cache_.end()) return it->second;
    }
    FinStructure built = member_uncached(index);
    std::lock_guard<std::mutex> lock(cache_mu_);
    if (member_cache_.size() > 128) member_cache_.clear();
    member_cache_.emplace(index, built);
    return built;
}

FinStructure SuccessorAge::member_uncached(const BigNat& index) const {
    auto [i1, i2] = pair_decode(index);
    auto [nv_code, rest] = pair_decode(i2);
    auto [nu_code, rest2] = pair_decode(rest);
    auto [pcode, fcode] = pair_decode(rest2);
    if (!nv_code.fits_u64() || nv_code.to_u64() > kSizeCap)
        throw BoundExceeded("successor member: V part beyond the desk scale");
    if (!nu_code.fits_u64() || nu_code.to_u64() > kSizeCap)
        throw BoundExceeded("successor member: U part beyond the desk scale");
    std::size_t nv = static_cast<std::size_t>(nv_code.to_u64());
    std::size_t nu = static_cast<std::size_t>(nu_code.to_u64());

    FinStructure m_low = lower_.age->member(i1);
    std::vector<Element> ua = lower_u_sorted_lowvocab(m_low);

    std::vector<unsigned> p_digits = unfold_digits(pcode, nu + 1, nv);
    std::vector<unsigned> f_digits = unfold_digits(fcode, ua.size() + 1, nv * (nv - 1) / 2);

    // layout: lower universe as-is, then V, then U
    Element next = m_low.universe().empty() ? 0 : m_low.universe().back() + 1;
    std::vector<Element> v_ids, u_ids;
    for (std::size_t k = 0; k < nv; ++k) v_ids.push_back(next++);
    for (std::size_t k = 0; k < nu; ++k) u_ids.push_back(next++);

    FinStructure s(vocabulary());
    for (Element e : m_low.universe()) s.add_element(e);
    for (Element e : v_ids) s.add_element(e);
    for (Element e : u_ids) s.add_element(e);
    for (const auto& name : m_low.realized_symbols())
        for (const auto& t : m_low.relation(name)) s.add_tuple(name, t);
    for (Element e : m_low.universe()) s.add_tuple(m_name_, Tuple{e});
    for (Element e : v_ids) s.add_tuple(v_name_, Tuple{e});
    for (Element e : u_ids) s.add_tuple(u_name_, Tuple{e});
    for (std::size_t x = 0; x < nu; ++x)
        for (std::size_t y = x + 1; y < nu; ++y)
            s.add_tuple(order_name_, Tuple{u_ids[x], u_ids[y]});
    for (std::size_t k = 0; k < nv; ++k) {
        if (p_digits[k] == 0) continue;
        s.add_tuple(p_name_, Tuple{v_ids[k], u_ids[p_digits[k] - 1]});
    }

    // requested colors, repaired to the closed edge-coloring law; valid
    // (already closed) requests pass through the fast path unchanged
    auto less_a = [&](Element c1, Element c2) {
        return m_low.has_tuple(lower_.order_name, Tuple{c1, c2});
    };
    FMap requested;
    std::size_t digit_pos = 0;
    for (std::size_t y = 1; y < nv; ++y)
        for (std::size_t x = 0; x < y; ++x, ++digit_pos)
            if (f_digits[digit_pos] != 0)
                requested[norm(v_ids[x], v_ids[y])] = ua[f_digits[digit_pos] - 1];
    FMap committed = requested;
    std::size_t before = committed.size();
    if (!close_star(committed, v_ids, less_a) || committed.size() != before) {
        committed.clear();
        for (const auto& [key, color] : requested) {
            if (committed.count(key)) continue;  // forced earlier by the closure
            FMap trial = committed;
            trial[key] = color;
            std::vector<FPair> seed{key};
            if (close_star(trial, v_ids, less_a, nullptr, &seed)) committed = std::move(trial);
        }
    }
    for (const auto& [pair, color] : committed) {
        s.add_tuple(f_name_, Tuple{pair.first, pair.second, color});
        s.add_tuple(f_name_, Tuple{pair.second, pair.first, color});
    }
    return s;
}

std::vector<Element> SuccessorAge::lower_u_sorted_lowvocab(const FinStructure& m_low) const {
    std::vector<Element> out;
    for (Element e : m_low.universe())
        if (m_low.has_tuple(lower_.u_name, Tuple{e})) out.push_back(e);
    std::sort(out.begin(), out.end(), [&](Element x, Element y) {
        return m_low.has_tuple(lower_.order_name, Tuple{x, y});
    });
    return out;
}

bool SuccessorAge::decide_embedding(const BigNat& i, const BigNat& j,
                                    const PartialMap& f) const {
    FinStructure mi = member(i);
    FinStructure mj = member(j);
    Parts pi = partition(mi);
    Parts pj = partition(mj);
    if (f.domain() != mi.universe() || !f.injective()) return false;
    for (Element e : f.range())
        if (!mj.contains(e)) return false;
    auto kind_of = [this](const FinStructure& s, Element e) {
        if (s.has_tuple(v_name_, Tuple{e})) return 0;
        if (s.has_tuple(u_name_, Tuple{e})) return 1;
        return 2;
    };
    for (const auto& [src, tgt] : f.pairs())
        if (kind_of(mi, src) != kind_of(mj, tgt)) return false;

    // the restriction to the M part must be a lower-level
    // embedding, then the finitely many new relations are checked directly
    auto [i1, i2] = pair_decode(i);
    auto [j1, j2] = pair_decode(j);
    if (!lower_.age->decide_embedding(i1, j1, f.restricted(pi.m))) return false;

    auto check_relation = [&](const std::string& name, unsigned arity) {
        const auto& dom = mi.universe();
        std::vector<std::size_t> idx(arity, 0);
        if (dom.empty()) return true;
        while (true) {
            Tuple t(arity);
            for (unsigned k = 0; k < arity; ++k) t[k] = dom[idx[k]];
            if (mi.has_tuple(name, t) != mj.has_tuple(name, *f.apply_tuple(t))) return false;
            unsigned pos = arity;
            while (pos > 0) {
                if (++idx[pos - 1] < dom.size()) break;
                idx[pos - 1] = 0;
                --pos;
            }
            if (pos == 0) break;
        }
        return true;
    };
    return check_relation(p_name_, 2) && check_relation(order_name_, 2) &&
           check_relation(f_name_, 3);
}

std::vector<std::string> SuccessorAge::membership_violations(const FinStructure& s) const {
    std::vector<std::string> out;
    std::set<Element> v_set, m_set, u_set;
    for (Element e : s.universe()) {
        int marks = 0;
        if (s.has_tuple(v_name_, Tuple{e})) {
            ++marks;
            v_set.insert(e);
        }
        if (s.has_tuple(m_name_, Tuple{e})) {
            ++marks;
            m_set.insert(e);
        }
        if (s.has_tuple(u_name_, Tuple{e})) {
            ++marks;
            u_set.insert(e);
        }
        if (marks != 1)
            out.push_back("element " + std::to_string(e) +
                          " is not in exactly one of V, M, U");
    }
    if (!out.empty()) return out;
    std::vector<Element> m_elems(m_set.begin(), m_set.end());
    std::vector<Element> v_elems(v_set.begin(), v_set.end());
    std::vector<Element> u_elems(u_set.begin(), u_set.end());

    // condition 2: the M part is a lower-level member
    FinStructure m_low = strip_to_lower(s, m_elems);
    if (!lower_.age->identify(m_low))
        out.push_back("M part is not a member of the lower age");

    // condition 3: lower relations void outside M
    for (const auto& name : s.realized_symbols()) {
        if (!lower_.vocabulary->lookup(name)) continue;
        for (const auto& t : s.relation(name)) {
            for (Element e : t) {
                if (!m_set.count(e)) {
                    out.push_back("lower symbol " + name + " touches a non-M element");
                    break;
                }
            }
        }
    }

    // condition 4: P is a partial vertex coloring V -> U_b
    std::map<Element, Element> p_of;
    for (const auto& t : s.relation(p_name_)) {
        if (!v_set.count(t[0]) || !u_set.count(t[1])) {
            out.push_back("P tuple outside V x U");
            continue;
        }
        auto [it, fresh] = p_of.emplace(t[0], t[1]);
        if (!fresh && it->second != t[1])
            out.push_back("P assigns two colors to vertex " + std::to_string(t[0]));
    }

    // condition 5: F is a symmetric partial edge coloring with U_a colors
    std::vector<Element> ua = lower_u_sorted(s, m_elems);
    std::set<Element> ua_set(ua.begin(), ua.end());
    FMap fmap;
    for (const auto& t : s.relation(f_name_)) {
        if (t.size() != 3 || !v_set.count(t[0]) || !v_set.count(t[1]) || t[0] == t[1] ||
            !ua_set.count(t[2])) {
            out.push_back("F tuple is not a U_a-colored edge on distinct vertices");
            continue;
        }
        if (!s.has_tuple(f_name_, Tuple{t[1], t[0], t[2]}))
            out.push_back("F is not symmetric on (" + std::to_string(t[0]) + "," +
                          std::to_string(t[1]) + ")");
        auto [it, fresh] = fmap.emplace(norm(t[0], t[1]), t[2]);
        if (!fresh && it->second != t[2])
            out.push_back("F assigns two colors to one edge");
    }

    // condition 6: <_b is a linear order on U_b
    for (const auto& t : s.relation(order_name_)) {
        if (!u_set.count(t[0]) || !u_set.count(t[1]))
            out.push_back("<_b tuple outside U_b");
    }
    for (Element x : u_elems) {
        if (s.has_tuple(order_name_, Tuple{x, x}))
            out.push_back("<_b is reflexive at " + std::to_string(x));
        for (Element y : u_elems) {
            if (x == y) continue;
            bool xy = s.has_tuple(order_name_, Tuple{x, y});
            bool yx = s.has_tuple(order_name_, Tuple{y, x});
            if (xy == yx)
                out.push_back("<_b is not linear on (" + std::to_string(x) + "," +
                              std::to_string(y) + ")");
            for (Element z : u_elems) {
                if (z == x || z == y) continue;
                if (xy && s.has_tuple(order_name_, Tuple{y, z}) &&
                    !s.has_tuple(order_name_, Tuple{x, z}))
                    out.push_back("<_b is not transitive");
            }
        }
    }

    // condition 7: the edge-coloring law, strict form. Distinct colors at
    // a pivot force the minimum on the opposite edge (defined!); equal
    // colors admit only a strictly larger opposite color.
    auto less_a = [&](Element c1, Element c2) {
        return s.has_tuple(lower_.order_name, Tuple{c1, c2});
    };
    for (Element w : v_elems) {
        for (Element x : v_elems) {
            if (x == w) continue;
            auto wx = fmap.find(norm(w, x));
            if (wx == fmap.end()) continue;
            for (Element y : v_elems) {
                if (y == w || y == x || y <= x) continue;
                auto wy = fmap.find(norm(w, y));
                if (wy == fmap.end()) continue;
                auto xy = fmap.find(norm(x, y));
                if (wx->second != wy->second) {
                    Element forced =
                        less_a(wx->second, wy->second) ? wx->second : wy->second;
                    if (xy == fmap.end())
                        out.push_back("edge law: forced edge (" + std::to_string(x) + "," +
                                      std::to_string(y) + ") is uncolored");
                    else if (xy->second != forced)
                        out.push_back("edge law: edge (" + std::to_string(x) + "," +
                                      std::to_string(y) + ") must take the pivot minimum");
                } else if (xy != fmap.end() && !less_a(wx->second, xy->second)) {
                    out.push_back("edge law: equal pivot colors demand a larger edge color at (" +
                                  std::to_string(x) + "," + std::to_string(y) + ")");
                }
            }
        }
    }
    return out;
}

std::optional<Identification> SuccessorAge::identify(const FinStructure& s) const {
    if (!membership_violations(s).empty()) return std::nullopt;
    Parts parts = partition(s);
    FinStructure m_low = strip_to_lower(s, parts.m);
    auto lower_id = lower_.age->identify(m_low);
    if (!lower_id) return std::nullopt;

    std::vector<Element> u_sorted = parts.u;
    std::sort(u_sorted.begin(), u_sorted.end(), [&](Element x, Element y) {
        return s.has_tuple(order_name_, Tuple{x, y});
    });
    std::vector<Element> v_sorted = parts.v;  // ascending id

    std::size_t nv = v_sorted.size(), nu = u_sorted.size();
    std::vector<unsigned> p_digits(nv, 0);
    for (std::size_t k = 0; k < nv; ++k) {
        for (std::size_t r = 0; r < nu; ++r) {
            if (s.has_tuple(p_name_, Tuple{v_sorted[k], u_sorted[r]}))
                p_digits[k] = static_cast<unsigned>(r + 1);
        }
    }
    std::vector<Element> ua = lower_u_sorted(s, parts.m);
    std::map<Element, unsigned> ua_rank;
    for (std::size_t r = 0; r < ua.size(); ++r) ua_rank[ua[r]] = static_cast<unsigned>(r);
    FMap fmap = read_f(s, v_sorted);
    std::vector<unsigned> f_digits(nv * (nv - 1) / 2, 0);
    std::size_t pos = 0;
    for (std::size_t y = 1; y < nv; ++y) {
        for (std::size_t x = 0; x < y; ++x, ++pos) {
            auto it = fmap.find(norm(v_sorted[x], v_sorted[y]));
            if (it != fmap.end()) f_digits[pos] = ua_rank.at(it->second) + 1;
        }
    }
    BigNat i2 = pair_encode(
        BigNat(nv),
        pair_encode(BigNat(nu), pair_encode(fold_digits(p_digits, nu + 1),
                                            fold_digits(f_digits, ua.size() + 1))));
    BigNat index = pair_encode(lower_id->index, i2);

    // canonical layout mirrors member(): lower universe, then V, then U
    FinStructure canon_low = lower_.age->member(lower_id->index);
    Element next = canon_low.universe().empty() ? 0 : canon_low.universe().back() + 1;
    std::vector<std::pair<Element, Element>> iso = lower_id->iso.pairs();
    for (std::size_t k = 0; k < nv; ++k) iso.emplace_back(next++, v_sorted[k]);
    for (std::size_t k = 0; k < nu; ++k) iso.emplace_back(next++, u_sorted[k]);
    return Identification{std::move(index), PartialMap(std::move(iso))};
}


namespace {

FinStructure rename_element(const FinStructure& s, Element from, Element to) {
    FinStructure out(s.vocabulary());
    for (Element e : s.universe()) out.add_element(e == from ? to : e);
    for (const auto& name : s.realized_symbols()) {
        for (const auto& t : s.relation(name)) {
            Tuple mapped = t;
            for (Element& e : mapped)
                if (e == from) e = to;
            out.add_tuple(name, mapped);
        }
    }
    return out;
}

}  // namespace

/// Inserts a fresh lower-level U element into dM at the requested order
/// position and renames it to a globally fresh id.
Element SuccessorAge::insert_color(FinStructure& dM, const UPosition& pos,
                                   Element& fresh) const {
    FinStructure grown = lower_.age->append_u(dM, pos);
    Element added = 0;
    bool found = false;
    for (Element e : grown.universe()) {
        if (!dM.contains(e)) {
            added = e;
            found = true;
            break;
        }
    }
    if (!found) throw Error("append_u did not add an element");
    Element global = fresh++;
    dM = rename_element(grown, added, global);
    return global;
}

/// Colors all pairs between the new vertex and the complete core, keeping
/// the edge-coloring law closed. Forced values are pivot minima; the free
/// class shares one fresh color inserted into the gap above the largest
/// predefined color.
void SuccessorAge::complete_vertex(Element beta, const std::vector<Element>& core, FMap& fd,
                                   FinStructure& dM, Element& fresh) const {
    if (core.empty()) return;
    auto less_a = [&](Element c1, Element c2) {
        return dM.has_tuple(lower_.order_name, Tuple{c1, c2});
    };
    std::vector<Element> defined;
    for (Element z : core)
        if (fd.count(norm(beta, z))) defined.push_back(z);
    if (defined.empty()) {
        // fresh color strictly below everything already used
        std::vector<Element> colors = lower_u_sorted_lowvocab(dM);
        UPosition pos;
        if (colors.empty()) {
            pos.kind = UPosition::Kind::First;
        } else {
            pos.kind = UPosition::Kind::Below;
            pos.lo = colors.front();
        }
        Element e0 = insert_color(dM, pos, fresh);
        for (Element z : core) fd[norm(beta, z)] = e0;
        return;
    }
    std::vector<Element> free_class;
    for (Element w : core) {
        if (fd.count(norm(beta, w))) continue;
        std::optional<Element> forced;
        bool conflict = false;
        for (Element z : defined) {
            Element cbz = fd.at(norm(beta, z));
            auto zw = fd.find(norm(z, w));
            if (zw == fd.end())
                throw Error("successor amalgam: core is not color-complete");
            if (zw->second == cbz) continue;
            Element candidate = less_a(zw->second, cbz) ? zw->second : cbz;
            if (forced && *forced != candidate) conflict = true;
            forced = candidate;
        }
        if (conflict) throw Error("successor amalgam: inconsistent forced colors");
        if (forced) {
            fd[norm(beta, w)] = *forced;
        } else {
            free_class.push_back(w);
        }
    }
    if (free_class.empty()) return;
    // lower bound: the largest predefined color at beta
    Element bound = fd.at(norm(beta, defined.front()));
    for (Element z : defined) {
        Element c = fd.at(norm(beta, z));
        if (less_a(bound, c)) bound = c;
    }
    // upper bound: the smallest color among free-class pairs
    std::optional<Element> ceiling;
    for (std::size_t i = 0; i < free_class.size(); ++i) {
        for (std::size_t j = i + 1; j < free_class.size(); ++j) {
            auto it = fd.find(norm(free_class[i], free_class[j]));
            if (it == fd.end()) throw Error("successor amalgam: core is not color-complete");
            if (!ceiling || less_a(it->second, *ceiling)) ceiling = it->second;
        }
    }
    UPosition pos;
    if (ceiling) {
        pos.kind = UPosition::Kind::Between;
        pos.lo = bound;
        pos.hi = *ceiling;
    } else {
        pos.kind = UPosition::Kind::Above;
        pos.lo = bound;
    }
    Element e = insert_color(dM, pos, fresh);
    for (Element w : free_class) fd[norm(beta, w)] = e;
}

Amalgam SuccessorAge::amalgamate(const FinStructure& a, const FinStructure& b,
                                 const FinStructure& c, const PartialMap& f,
                                 const PartialMap& g) const {
    Parts pa = partition(a);
    Parts pb = partition(b);
    Parts pc = partition(c);

    // stage 1: amalgamate the M parts at the lower level
    FinStructure aM = strip_to_lower(a, pa.m);
    FinStructure bM = strip_to_lower(b, pb.m);
    FinStructure cM = strip_to_lower(c, pc.m);
    Amalgam low = lower_.age->amalgamate(aM, bM, cM, f.restricted(pc.m), g.restricted(pc.m));

    Element fresh = a.universe().empty() ? 0 : a.universe().back() + 1;
    std::map<Element, Element> low_remap;
    for (Element e : low.d.universe())
        if (!aM.contains(e)) low_remap[e] = fresh++;
    auto low_id = [&](Element e) {
        auto it = low_remap.find(e);
        return it == low_remap.end() ? e : it->second;
    };
    FinStructure dM(lower_.vocabulary);
    for (Element e : low.d.universe()) dM.add_element(low_id(e));
    for (const auto& name : low.d.realized_symbols())
        for (const auto& t : low.d.relation(name)) {
            Tuple mapped = t;
            for (Element& e : mapped) e = low_id(e);
            dM.add_tuple(name, mapped);
        }
    std::map<Element, Element> g_m;  // b's M part into d
    for (Element e : bM.universe()) g_m[e] = low_id(*low.g_prime.apply(e));

    // stage 2: V part with the edge-coloring completion
    PartialMap g_inv = g.inverse();
    std::map<Element, Element> g_v;
    std::vector<Element> new_v;
    for (Element v : pb.v) {
        if (auto pre = g_inv.apply(v)) {
            g_v[v] = *f.apply(*pre);
        } else {
            g_v[v] = fresh;
            new_v.push_back(fresh);
            ++fresh;
        }
    }
    std::vector<Element> all_v = pa.v;
    all_v.insert(all_v.end(), new_v.begin(), new_v.end());

    auto less_d = [&](Element c1, Element c2) {
        return dM.has_tuple(lower_.order_name, Tuple{c1, c2});
    };
    FMap fd = read_f(a, pa.v);
    std::vector<FPair> seeded;
    FMap fb = read_f(b, pb.v);
    for (const auto& [pair, color] : fb) {
        FPair key = norm(g_v.at(pair.first), g_v.at(pair.second));
        auto it = g_m.find(color);
        Element mapped_color = it == g_m.end() ? color : it->second;
        auto [slot, inserted] = fd.emplace(key, mapped_color);
        if (!inserted && slot->second != mapped_color)
            throw Error("successor amalgam: edge colorings disagree on the common part");
        if (inserted) seeded.push_back(key);
    }
    std::set<FPair> frozen;
    for (std::size_t x = 0; x < pa.v.size(); ++x)
        for (std::size_t y = x + 1; y < pa.v.size(); ++y) {
            FPair key = norm(pa.v[x], pa.v[y]);
            if (!fd.count(key)) frozen.insert(key);
        }
    if (!close_star(fd, all_v, less_d, &frozen, &seeded))
        throw Error("successor amalgam: edge-coloring closure failed");

    // color-complete the new vertices when the base side is complete
    if (frozen.empty()) {
        std::vector<Element> core = pa.v;
        for (Element beta : new_v) {
            complete_vertex(beta, core, fd, dM, fresh);
            core.push_back(beta);
        }
    }

    // stage 3: U part (linear merge) and the vertex coloring P
    std::vector<Element> a_u_sorted = pa.u;
    std::sort(a_u_sorted.begin(), a_u_sorted.end(), [&](Element x, Element y) {
        return a.has_tuple(order_name_, Tuple{x, y});
    });
    std::vector<Element> c_u_sorted = pc.u;
    std::sort(c_u_sorted.begin(), c_u_sorted.end(), [&](Element x, Element y) {
        return c.has_tuple(order_name_, Tuple{x, y});
    });
    auto region_a = [&](Element y) {
        std::size_t r = 0;
        for (Element ce : c_u_sorted) {
            Element img = *f.apply(ce);
            if (img == y || a.has_tuple(order_name_, Tuple{img, y})) ++r;
        }
        return r;
    };
    auto region_b = [&](Element x) {
        std::size_t r = 0;
        for (Element ce : c_u_sorted)
            if (b.has_tuple(order_name_, Tuple{*g.apply(ce), x})) ++r;
        return r;
    };
    struct UEntry {
        std::size_t region;
        int side;
        std::size_t rank;
        Element id;
    };
    std::vector<UEntry> u_entries;
    for (std::size_t k = 0; k < a_u_sorted.size(); ++k)
        u_entries.push_back({region_a(a_u_sorted[k]), 0, k, a_u_sorted[k]});
    std::map<Element, Element> g_u;
    std::vector<Element> b_u_sorted = pb.u;
    std::sort(b_u_sorted.begin(), b_u_sorted.end(), [&](Element x, Element y) {
        return b.has_tuple(order_name_, Tuple{x, y});
    });
    for (std::size_t k = 0; k < b_u_sorted.size(); ++k) {
        Element x = b_u_sorted[k];
        if (auto pre = g_inv.apply(x)) {
            g_u[x] = *f.apply(*pre);
            continue;
        }
        g_u[x] = fresh;
        u_entries.push_back({region_b(x), 1, k, fresh});
        ++fresh;
    }
    std::sort(u_entries.begin(), u_entries.end(), [](const UEntry& l, const UEntry& r) {
        if (l.region != r.region) return l.region < r.region;
        if (l.side != r.side) return l.side < r.side;
        return l.rank < r.rank;
    });

    std::map<Element, Element> p_d;  // vertex -> U color
    for (const auto& t : a.relation(p_name_)) p_d[t[0]] = t[1];
    for (const auto& t : b.relation(p_name_)) {
        Element v = g_v.at(t[0]);
        Element u = g_u.at(t[1]);
        auto [it, inserted] = p_d.emplace(v, u);
        if (!inserted && it->second != u)
            throw Error("successor amalgam: vertex colorings disagree on the common part");
    }
    // keep P total over the vertices when the base side is P-total
    bool a_p_total = true;
    for (Element v : pa.v)
        if (!p_d.count(v)) a_p_total = false;
    if (a_p_total) {
        for (Element v : new_v) {
            if (p_d.count(v)) continue;
            UEntry entry{u_entries.size(), 2, 0, fresh};
            u_entries.push_back(entry);
            p_d[v] = fresh;
            ++fresh;
        }
    }

    // assemble
    FinStructure d(vocabulary());
    for (Element e : dM.universe()) d.add_element(e);
    for (Element e : all_v) d.add_element(e);
    for (const auto& entry : u_entries) d.add_element(entry.id);
    for (const auto& name : dM.realized_symbols())
        for (const auto& t : dM.relation(name)) d.add_tuple(name, t);
    for (Element e : dM.universe()) d.add_tuple(m_name_, Tuple{e});
    for (Element e : all_v) d.add_tuple(v_name_, Tuple{e});
    for (const auto& entry : u_entries) d.add_tuple(u_name_, Tuple{entry.id});
    for (std::size_t x = 0; x < u_entries.size(); ++x)
        for (std::size_t y = x + 1; y < u_entries.size(); ++y)
            d.add_tuple(order_name_, Tuple{u_entries[x].id, u_entries[y].id});
    for (const auto& [pair, color] : fd) {
        d.add_tuple(f_name_, Tuple{pair.first, pair.second, color});
        d.add_tuple(f_name_, Tuple{pair.second, pair.first, color});
    }
    for (const auto& [v, u] : p_d) d.add_tuple(p_name_, Tuple{v, u});

    std::vector<std::pair<Element, Element>> gp;
    for (const auto& [src, tgt] : g_m) gp.emplace_back(src, tgt);
    for (const auto& [src, tgt] : g_v) gp.emplace_back(src, tgt);
    for (const auto& [src, tgt] : g_u) gp.emplace_back(src, tgt);
    return Amalgam{std::move(d), PartialMap::identity(a.universe()), PartialMap(std::move(gp))};
}

bool SuccessorAge::goals_prechecked() const { return true; }

void SuccessorAge::emit_goals(const FinStructure& stage, GoalTracker& tracker,
                              std::vector<ExtensionGoal>& out, std::size_t budget) const {
    // density and endlessness of (U_b, <_b) over the first U elements
    std::vector<Element> focus;
    for (Element e : stage.universe()) {
        if (focus.size() >= 10) break;
        if (stage.has_tuple(u_name_, Tuple{e})) focus.push_back(e);
    }
    if (focus.empty()) {
        // bootstrap: demand a single U element
        std::string key = "u:first";
        if (!tracker.seen(key) && out.size() < budget) {
            FinStructure pattern = u_chain(1);
            out.push_back({{}, std::move(pattern), PartialMap{}, 0, key});
        }
        return;
    }
    std::sort(focus.begin(), focus.end(), [&](Element x, Element y) {
        return stage.has_tuple(order_name_, Tuple{x, y});
    });
    auto gap_empty = [&](Element lo, Element hi) {
        for (Element z : stage.universe())
            if (stage.has_tuple(order_name_, Tuple{lo, z}) &&
                stage.has_tuple(order_name_, Tuple{z, hi}))
                return false;
        return true;
    };
    auto push = [&](ExtensionGoal goal) {
        if (out.size() < budget && !tracker.seen(goal.key)) out.push_back(std::move(goal));
    };
    for (std::size_t k = 0; k + 1 < focus.size() && out.size() < budget; ++k) {
        Element lo = focus[k], hi = focus[k + 1];
        if (!gap_empty(lo, hi)) continue;
        push({{lo, hi}, u_chain(3), PartialMap({{0, lo}, {2, hi}}), 1,
              "mid:" + std::to_string(lo) + ":" + std::to_string(hi)});
    }
    bool has_below = false, has_above = false;
    for (Element z : stage.universe()) {
        if (stage.has_tuple(order_name_, Tuple{z, focus.front()})) has_below = true;
        if (stage.has_tuple(order_name_, Tuple{focus.back(), z})) has_above = true;
    }
    if (!has_below)
        push({{focus.front()}, u_chain(2), PartialMap({{1, focus.front()}}), 0,
              "below:" + std::to_string(focus.front())});
    if (!has_above)
        push({{focus.back()}, u_chain(2), PartialMap({{0, focus.back()}}), 1,
              "above:" + std::to_string(focus.back())});
}

FinStructure SuccessorAge::u_chain(std::size_t n) const {
    FinStructure s(vocabulary());
    for (std::size_t k = 0; k < n; ++k) {
        s.add_element(static_cast<Element>(k));
        s.add_tuple(u_name_, Tuple{static_cast<Element>(k)});
    }
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y)
            s.add_tuple(order_name_, Tuple{static_cast<Element>(x), static_cast<Element>(y)});
    return s;
}

FinStructure SuccessorAge::append_u(const FinStructure& s, const UPosition& where) const {
    Parts parts = partition(s);
    std::vector<Element> u_sorted = parts.u;
    std::sort(u_sorted.begin(), u_sorted.end(), [&](Element x, Element y) {
        return s.has_tuple(order_name_, Tuple{x, y});
    });
    Element fresh = s.universe().empty() ? 0 : s.universe().back() + 1;
    FinStructure out = s;
    out.add_element(fresh);
    out.add_tuple(u_name_, Tuple{fresh});
    auto below_new = [&](Element z) {
        switch (where.kind) {
            case UPosition::Kind::First:
                return false;
            case UPosition::Kind::Below:
                return z != where.lo && s.has_tuple(order_name_, Tuple{z, where.lo});
            case UPosition::Kind::Above:
                return z == where.lo || s.has_tuple(order_name_, Tuple{z, where.lo});
            case UPosition::Kind::Between:
                return z == where.lo || s.has_tuple(order_name_, Tuple{z, where.lo});
        }
        return false;
    };
    for (Element z : u_sorted) {
        if (below_new(z))
            out.add_tuple(order_name_, Tuple{z, fresh});
        else
            out.add_tuple(order_name_, Tuple{fresh, z});
    }
    return out;
}

}  // namespace fraisse

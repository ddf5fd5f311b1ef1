#include "fraisse/scott.hpp"

#include <algorithm>

#include "fraisse/errors.hpp"

namespace fraisse::scott {

namespace {

constexpr std::size_t kBaseCap = 5;
constexpr std::size_t kCandidateCap = 6;

std::vector<std::string> realized_union(const FinStructure& a, const FinStructure& b) {
    std::vector<std::string> out = a.realized_symbols();
    for (const auto& name : b.realized_symbols())
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    std::sort(out.begin(), out.end());
    return out;
}

unsigned arity_of(const FinStructure& s, const std::string& name) {
    if (s.vocabulary()) {
        if (auto sym = s.vocabulary()->lookup(name)) return sym->arity;
    }
    if (!s.relation(name).empty()) return static_cast<unsigned>(s.relation(name).begin()->size());
    throw Error("cannot determine arity of " + name);
}

/// Complete quantifier-free type of a tuple as a bit fingerprint over the
/// given symbols: relation literals over all position tuples, plus the
/// equality pattern between positions. Exact, not a hash, as long as the
/// bit budget suffices (desk-scale tuples and vocabularies).
std::uint64_t fingerprint(const FinStructure& s, const Tuple& t,
                          const std::vector<std::string>& symbols) {
    std::uint64_t bits = 0;
    std::size_t pos = 0;
    auto push_bit = [&](bool value) {
        if (pos >= 64) throw BoundExceeded("tuple type fingerprint overflow");
        if (value) bits |= (std::uint64_t{1} << pos);
        ++pos;
    };
    std::size_t k = t.size();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) push_bit(t[i] == t[j]);
    for (const auto& name : symbols) {
        unsigned arity = arity_of(s, name);
        std::vector<std::size_t> idx(arity, 0);
        while (true) {
            Tuple probe(arity);
            for (unsigned r = 0; r < arity; ++r) probe[r] = t[idx[r]];
            push_bit(s.has_tuple(name, probe));
            unsigned p = arity;
            while (p > 0) {
                if (++idx[p - 1] < k) break;
                idx[p - 1] = 0;
                --p;
            }
            if (p == 0) break;
        }
    }
    return bits;
}

std::vector<Tuple> tuples_of_length(const std::vector<Element>& universe, std::size_t k) {
    std::vector<Tuple> out;
    if (k == 0 || universe.empty()) return out;
    std::vector<std::size_t> idx(k, 0);
    while (true) {
        Tuple t(k);
        for (std::size_t r = 0; r < k; ++r) t[r] = universe[idx[r]];
        out.push_back(t);
        std::size_t p = k;
        while (p > 0) {
            if (++idx[p - 1] < universe.size()) break;
            idx[p - 1] = 0;
            --p;
        }
        if (p == 0) break;
    }
    return out;
}

std::size_t tuple_rank(const std::vector<Element>& universe, const Tuple& t) {
    std::size_t rank = 0;
    for (Element e : t) {
        auto it = std::lower_bound(universe.begin(), universe.end(), e);
        rank = rank * universe.size() + static_cast<std::size_t>(it - universe.begin());
    }
    return rank;
}

}  // namespace

std::string Sentence::quantifier_shape() const {
    return kind == Kind::TupleType ? "Pi1" : "Pi2";
}

std::string predicate_name(const Tuple& t) {
    std::string out = "P[";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(t[i]);
    }
    return out + "]";
}

ExpansionSchema build_schema(const FinStructure& a, std::size_t tuple_len_bound) {
    if (a.size() > kBaseCap)
        throw BoundExceeded("build_schema: base structure larger than the desk bound");
    if (a.size() == 0) throw Error("build_schema: the base structure must be nonempty");
    ExpansionSchema schema;
    schema.base = a;
    // one more than the base size: the length at which the equality
    // patterns of repeated entries pin the candidate's cardinality
    schema.tuple_len_bound = tuple_len_bound == 0 ? a.size() + 1 : tuple_len_bound;

    auto star = std::make_shared<Vocabulary>();
    if (a.vocabulary()) {
        VocabularyPtr base_vocab = a.vocabulary();
        star->add_family(SymbolFamily{
            "base",
            [base_vocab](const std::string& name) { return base_vocab->lookup(name); },
            [base_vocab](std::size_t k) -> std::optional<Symbol> {
                auto prefix = base_vocab->enumerate(k + 1);
                if (prefix.size() <= k) return std::nullopt;
                return prefix[k];
            }});
    }
    for (std::size_t k = 1; k <= schema.tuple_len_bound; ++k) {
        for (const auto& t : tuples_of_length(a.universe(), k)) {
            schema.tuples.push_back(t);
            star->add_symbol(Symbol{predicate_name(t), static_cast<unsigned>(k), "1"});
        }
    }
    schema.tau_star = star;

    auto symbols = a.realized_symbols();
    for (const auto& t : schema.tuples) {
        Sentence s;
        s.kind = Sentence::Kind::TupleType;
        s.subject = t;
        for (std::size_t i = 0; i < t.size(); ++i) {
            for (std::size_t j = i + 1; j < t.size(); ++j) {
                if (t[i] == t[j])
                    s.equal_positions.emplace_back(i, j);
                else
                    s.distinct_positions.emplace_back(i, j);
            }
        }
        for (const auto& name : symbols) {
            unsigned arity = arity_of(a, name);
            std::vector<std::size_t> idx(arity, 0);
            while (true) {
                Tuple probe(arity);
                std::vector<unsigned> positions(arity);
                for (unsigned r = 0; r < arity; ++r) {
                    probe[r] = t[idx[r]];
                    positions[r] = static_cast<unsigned>(idx[r]);
                }
                s.literals.push_back(
                    Sentence::PositionLiteral{name, positions, a.has_tuple(name, probe)});
                unsigned p = arity;
                while (p > 0) {
                    if (++idx[p - 1] < t.size()) break;
                    idx[p - 1] = 0;
                    --p;
                }
                if (p == 0) break;
            }
        }
        schema.sentences.push_back(std::move(s));
    }
    Sentence covering;
    covering.kind = Sentence::Kind::Covering;
    schema.sentences.push_back(covering);
    for (const auto& t : schema.tuples) {
        if (t.size() >= schema.tuple_len_bound) continue;
        Sentence ext;
        ext.kind = Sentence::Kind::Extension;
        ext.subject = t;
        schema.sentences.push_back(std::move(ext));
    }
    return schema;
}

TupleTyping type_tuples(const FinStructure& s, const std::vector<std::string>& symbols,
                        std::size_t max_len) {
    TupleTyping typing;
    typing.symbols = symbols;
    typing.max_len = max_len;
    typing.by_length.resize(max_len + 1);
    typing.fingerprint_by_rank.resize(max_len + 1);
    for (std::size_t k = 1; k <= max_len; ++k) {
        auto all = tuples_of_length(s.universe(), k);
        typing.fingerprint_by_rank[k].resize(all.size());
        for (std::size_t r = 0; r < all.size(); ++r) {
            std::uint64_t fp = fingerprint(s, all[r], symbols);
            typing.fingerprint_by_rank[k][r] = fp;
            typing.by_length[k][fp].push_back(static_cast<std::uint32_t>(r));
        }
    }
    return typing;
}

ExpansionVerdict check_expansion(const ExpansionSchema& schema, const FinStructure& b,
                                 const TupleTyping* typing_hint,
                                 const TupleTyping* base_typing) {
    if (b.size() > kCandidateCap)
        throw BoundExceeded("check_expansion: candidate larger than the desk bound");
    const FinStructure& a = schema.base;
    auto symbols = realized_union(a, b);

    TupleTyping local;
    const TupleTyping* typing = typing_hint;
    bool hint_usable = typing && typing->max_len >= schema.tuple_len_bound &&
                       std::includes(typing->symbols.begin(), typing->symbols.end(),
                                     symbols.begin(), symbols.end());
    if (hint_usable) {
        // a superset symbol list refines types consistently on both sides
        symbols = typing->symbols;
    } else {
        local = type_tuples(b, symbols, schema.tuple_len_bound);
        typing = &local;
    }
    // the base side may carry its own precomputed types over the same list
    bool base_usable = base_typing && base_typing->symbols == symbols &&
                       base_typing->max_len >= schema.tuple_len_bound;
    auto base_fp = [&](const Tuple& t) {
        if (base_usable)
            return base_typing->fingerprint_by_rank[t.size()][tuple_rank(a.universe(), t)];
        return fingerprint(a, t, symbols);
    };

    const std::size_t nb = b.size();
    const std::size_t na = a.size();
    const auto& b_universe = b.universe();
    const auto& a_universe = a.universe();

    // cheap covering screen on the point types before any allocation:
    // pruning only shrinks the canonical assignment, so a screen failure
    // already decides the verdict
    {
        std::uint64_t covered = 0;
        for (Element ae : a_universe) {
            auto it = typing->by_length[1].find(base_fp(Tuple{ae}));
            if (it == typing->by_length[1].end() || it->second.empty())
                return ExpansionVerdict{false, {}};
            for (std::uint32_t r : it->second) covered |= (std::uint64_t{1} << r);
        }
        for (std::size_t r = 0; r < nb; ++r)
            if (!((covered >> r) & 1u)) return ExpansionVerdict{false, {}};
    }

    // canonical assignment: the realizers of the complete qf type, one
    // fixed-width bitmask per base tuple in a flat arena (lengths mixed)
    constexpr std::size_t kWords = 4;  // 6^3 < 256 candidate tuples at the caps
    std::vector<std::size_t> count(schema.tuple_len_bound + 1, 1);
    std::vector<std::size_t> bcount(schema.tuple_len_bound + 1, 1);
    std::vector<std::size_t> offset(schema.tuple_len_bound + 2, 0);
    for (std::size_t k = 1; k <= schema.tuple_len_bound; ++k) {
        count[k] = count[k - 1] * na;
        bcount[k] = bcount[k - 1] * nb;
        if (bcount[k] > kWords * 64) throw BoundExceeded("check_expansion: mask overflow");
        offset[k + 1] = offset[k] + count[k];
    }
    std::vector<std::uint64_t> arena((offset[schema.tuple_len_bound + 1] + 1) * kWords, 0);
    auto word = [&](std::size_t k, std::size_t ai) {
        return arena.data() + (offset[k] + ai) * kWords;
    };
    auto test_bit = [](const std::uint64_t* w, std::size_t i) {
        return (w[i / 64] >> (i % 64)) & 1u;
    };
    for (std::size_t k = 1; k <= schema.tuple_len_bound; ++k) {
        for (const auto& t : tuples_of_length(a_universe, k)) {
            auto it = typing->by_length[k].find(base_fp(t));
            if (it == typing->by_length[k].end()) continue;
            std::uint64_t* w = word(k, tuple_rank(a_universe, t));
            for (std::uint32_t r : it->second) w[r / 64] |= (std::uint64_t{1} << (r % 64));
        }
    }

    // prune to the greatest fixpoint of the extension obligations
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t k = 1; k < schema.tuple_len_bound; ++k) {
            for (std::size_t ai = 0; ai < count[k]; ++ai) {
                std::uint64_t* m = word(k, ai);
                for (std::size_t bi = 0; bi < bcount[k]; ++bi) {
                    if (!test_bit(m, bi)) continue;
                    bool keep = true;
                    // forth: every candidate point extends under some child
                    for (std::size_t y = 0; y < nb && keep; ++y) {
                        bool ok = false;
                        for (std::size_t c = 0; c < na && !ok; ++c) {
                            if (test_bit(word(k + 1, ai * na + c), bi * nb + y)) ok = true;
                        }
                        keep = ok;
                    }
                    // realization: every child predicate is realized over it
                    for (std::size_t c = 0; c < na && keep; ++c) {
                        bool ok = false;
                        const std::uint64_t* child = word(k + 1, ai * na + c);
                        for (std::size_t y = 0; y < nb && !ok; ++y)
                            if (test_bit(child, bi * nb + y)) ok = true;
                        keep = ok;
                    }
                    if (!keep) {
                        m[bi / 64] &= ~(std::uint64_t{1} << (bi % 64));
                        changed = true;
                    }
                }
            }
        }
    }

    // the covering sentence on the fixpoint decides expandability
    {
        std::vector<bool> covered(nb, false);
        for (Element ae : a_universe) {
            const std::uint64_t* m = word(1, tuple_rank(a_universe, Tuple{ae}));
            bool any = false;
            for (std::size_t r = 0; r < nb; ++r)
                if (test_bit(m, r)) {
                    covered[r] = true;
                    any = true;
                }
            if (!any) return ExpansionVerdict{false, {}};
        }
        for (std::size_t r = 0; r < nb; ++r)
            if (!covered[r]) return ExpansionVerdict{false, {}};
    }

    ExpansionVerdict verdict;
    verdict.expandable = true;
    for (std::size_t k = 1; k <= schema.tuple_len_bound; ++k) {
        auto b_tuples = tuples_of_length(b_universe, k);
        for (const auto& t : tuples_of_length(a_universe, k)) {
            const std::uint64_t* m = word(k, tuple_rank(a_universe, t));
            std::set<Tuple>& slot = verdict.witness.assignment[t];
            for (std::size_t r = 0; r < b_tuples.size(); ++r)
                if (test_bit(m, r)) slot.insert(b_tuples[r]);
        }
    }
    return verdict;
}

bool satisfies(const ExpansionSchema& schema, const FinStructure& b, const Expansion& expansion,
               std::string* failing_clause) {
    auto assigned = [&](const Tuple& a_tuple) -> const std::set<Tuple>& {
        static const std::set<Tuple> kEmpty;
        auto it = expansion.assignment.find(a_tuple);
        return it == expansion.assignment.end() ? kEmpty : it->second;
    };
    auto fail = [&](const std::string& reason) {
        if (failing_clause) *failing_clause = reason;
        return false;
    };
    for (const auto& s : schema.sentences) {
        switch (s.kind) {
            case Sentence::Kind::TupleType: {
                for (const auto& bt : assigned(s.subject)) {
                    if (bt.size() != s.subject.size())
                        return fail("tuple type: arity mismatch under " +
                                    predicate_name(s.subject));
                    for (auto [i, j] : s.equal_positions)
                        if (bt[i] != bt[j])
                            return fail("tuple type: equality pattern fails under " +
                                        predicate_name(s.subject));
                    for (auto [i, j] : s.distinct_positions)
                        if (bt[i] == bt[j])
                            return fail("tuple type: distinctness fails under " +
                                        predicate_name(s.subject));
                    for (const auto& lit : s.literals) {
                        Tuple probe(lit.positions.size());
                        for (std::size_t r = 0; r < lit.positions.size(); ++r)
                            probe[r] = bt[lit.positions[r]];
                        if (b.has_tuple(lit.symbol, probe) != lit.positive)
                            return fail("tuple type: literal " + lit.symbol + " fails under " +
                                        predicate_name(s.subject));
                    }
                }
                break;
            }
            case Sentence::Kind::Covering: {
                for (Element y : b.universe()) {
                    bool some = false;
                    for (Element ae : schema.base.universe())
                        if (assigned(Tuple{ae}).count(Tuple{y})) some = true;
                    if (!some)
                        return fail("covering: candidate point " + std::to_string(y) +
                                    " falls under no point predicate");
                }
                for (Element ae : schema.base.universe()) {
                    if (assigned(Tuple{ae}).empty())
                        return fail("covering: point predicate of " + std::to_string(ae) +
                                    " is unrealized");
                }
                break;
            }
            case Sentence::Kind::Extension: {
                for (const auto& bt : assigned(s.subject)) {
                    for (Element y : b.universe()) {
                        bool some = false;
                        for (Element c : schema.base.universe()) {
                            Tuple child_a = s.subject;
                            child_a.push_back(c);
                            Tuple child_b = bt;
                            child_b.push_back(y);
                            if (assigned(child_a).count(child_b)) some = true;
                        }
                        if (!some)
                            return fail("extension: no child predicate covers a point over " +
                                        predicate_name(s.subject));
                    }
                    for (Element c : schema.base.universe()) {
                        Tuple child_a = s.subject;
                        child_a.push_back(c);
                        bool some = false;
                        for (Element y : b.universe()) {
                            Tuple child_b = bt;
                            child_b.push_back(y);
                            if (assigned(child_a).count(child_b)) some = true;
                        }
                        if (!some)
                            return fail("extension: child predicate " + predicate_name(child_a) +
                                        " unrealized over " + predicate_name(s.subject));
                    }
                }
                break;
            }
        }
    }
    if (failing_clause) failing_clause->clear();
    return true;
}

BackAndForthReport back_and_forth_check(const ExpansionSchema& schema, const FinStructure& b,
                                        const Expansion& expansion) {
    BackAndForthReport report;
    std::string clause;
    if (!satisfies(schema, b, expansion, &clause)) {
        report.ok = false;
        report.failing_clause = clause;
        return report;
    }
    bool nonempty = false;
    for (const auto& [a_tuple, realizers] : expansion.assignment)
        if (!realizers.empty()) nonempty = true;
    if (!nonempty) {
        report.ok = false;
        report.failing_clause = "the family is empty";
        return report;
    }
    for (const auto& [a_tuple, realizers] : expansion.assignment) {
        if (a_tuple.size() >= schema.tuple_len_bound) continue;
        for (const auto& b_tuple : realizers) {
            for (Element c : schema.base.universe()) {
                Tuple child_a = a_tuple;
                child_a.push_back(c);
                bool extended = false;
                for (Element d : b.universe()) {
                    Tuple child_b = b_tuple;
                    child_b.push_back(d);
                    auto it = expansion.assignment.find(child_a);
                    if (it != expansion.assignment.end() && it->second.count(child_b))
                        extended = true;
                }
                if (!extended) {
                    report.ok = false;
                    report.failing_clause = "forth extension fails at " + predicate_name(child_a);
                    return report;
                }
            }
            for (Element d : b.universe()) {
                bool extended = false;
                for (Element c : schema.base.universe()) {
                    Tuple child_a = a_tuple;
                    child_a.push_back(c);
                    Tuple child_b = b_tuple;
                    child_b.push_back(d);
                    auto it = expansion.assignment.find(child_a);
                    if (it != expansion.assignment.end() && it->second.count(child_b))
                        extended = true;
                }
                if (!extended) {
                    report.ok = false;
                    report.failing_clause =
                        "back extension fails below " + predicate_name(a_tuple);
                    return report;
                }
            }
        }
    }
    report.ok = true;
    return report;
}

}  // namespace fraisse::scott

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fraisse/vocabulary.hpp"

namespace fraisse {

using Element = std::uint32_t;
using Tuple = std::vector<Element>;

/// Finite partial map on naturals. Functional by construction (duplicate
/// sources are rejected); injectivity is a query, not an invariant, so
/// that embedding checks can reject collapsing maps instead of throwing.
class PartialMap {
public:
    PartialMap() = default;
    explicit PartialMap(std::vector<std::pair<Element, Element>> pairs);

    static PartialMap identity(const std::vector<Element>& elems);

    const std::vector<std::pair<Element, Element>>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }

    std::optional<Element> apply(Element x) const;
    bool defined_on(Element x) const { return apply(x).has_value(); }
    std::vector<Element> domain() const;
    std::vector<Element> range() const;

    bool injective() const;
    PartialMap inverse() const;  // throws if not injective
    /// g after f: (g_after_f)(x) = g(f(x)); defined where both legs are.
    static PartialMap compose(const PartialMap& g, const PartialMap& f);
    PartialMap extended(Element x, Element y) const;
    PartialMap restricted(const std::vector<Element>& dom) const;

    std::optional<Tuple> apply_tuple(const Tuple& t) const;

    bool operator==(const PartialMap&) const = default;
    auto operator<=>(const PartialMap&) const = default;

private:
    // sorted by source
    std::vector<std::pair<Element, Element>> pairs_;
};

struct Literal {
    std::string symbol;
    Tuple tuple;
    bool positive = true;

    bool operator==(const Literal&) const = default;
};

/// Finite relational structure: the carrier for members of ages, stages of
/// limit constructions, and candidate structures supplied over the CLI.
/// Only realized symbols are stored; the vocabulary may be infinite.
class FinStructure {
public:
    FinStructure() = default;
    explicit FinStructure(VocabularyPtr vocab) : vocab_(std::move(vocab)) {}

    const VocabularyPtr& vocabulary() const { return vocab_; }
    const std::vector<Element>& universe() const { return universe_; }
    std::size_t size() const { return universe_.size(); }
    bool contains(Element e) const;

    void add_element(Element e);
    void add_tuple(const std::string& symbol, const Tuple& t);
    bool has_tuple(const std::string& symbol, const Tuple& t) const;

    /// Realized symbols in name order (finitely many by construction).
    std::vector<std::string> realized_symbols() const;
    const std::set<Tuple>& relation(const std::string& symbol) const;

    bool same_content(const FinStructure& other) const;

private:
    VocabularyPtr vocab_;
    std::vector<Element> universe_;  // sorted
    std::map<std::string, std::set<Tuple>> relations_;
    static const std::set<Tuple> kEmptyRelation;
};

/// Total-domain embedding check: dom(f) = universe(A), f injective into B,
/// and every realized relation is preserved both ways (induced substructure
/// semantics). Symbols realized in neither structure cannot discriminate,
/// so the check over realized symbols decides the full vocabulary.
bool is_embedding(const PartialMap& f, const FinStructure& a, const FinStructure& b);

/// All embeddings of A into B in lexicographic order of their pair lists.
/// Brute-force oracle with sound pruning; |universe(A)| is bounded.
std::vector<PartialMap> enumerate_embeddings(const FinStructure& a, const FinStructure& b,
                                             std::size_t domain_bound = 8);

/// First embedding in the enumeration order, if any (no domain bound).
std::optional<PartialMap> find_embedding(const FinStructure& a, const FinStructure& b);
std::optional<PartialMap> find_isomorphism(const FinStructure& a, const FinStructure& b);

FinStructure substructure(const FinStructure& a, const std::vector<Element>& s);

std::vector<Literal> atomic_diagram(const FinStructure& a);

}  // namespace fraisse

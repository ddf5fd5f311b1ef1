#pragma once

#include <cstdint>
#include <map>
#include <set>

#include "fraisse/structure.hpp"

namespace fraisse::scott {

/// One sentence of the expansion theory T. TupleType is the complete
/// quantifier-free type of a tuple (universally bounding its predicate),
/// Covering says every point falls under some point predicate and every
/// point predicate is realized, Extension is the one-point extension
/// demand below a tuple predicate.
struct Sentence {
    enum class Kind { TupleType, Covering, Extension };
    Kind kind = Kind::Covering;
    Tuple subject;  // the tuple of the base structure (empty for Covering)

    struct PositionLiteral {
        std::string symbol;
        std::vector<unsigned> positions;
        bool positive = true;
    };
    std::vector<PositionLiteral> literals;                      // TupleType payload
    std::vector<std::pair<unsigned, unsigned>> equal_positions;  // repeats in the tuple
    std::vector<std::pair<unsigned, unsigned>> distinct_positions;

    /// "Pi1" for tuple types, "Pi2" for the covering/extension sentences.
    std::string quantifier_shape() const;
};

/// Predicate name for the tuple predicate of `t`.
std::string predicate_name(const Tuple& t);

struct ExpansionSchema {
    FinStructure base;
    VocabularyPtr tau_star;
    std::size_t tuple_len_bound = 0;
    std::vector<Tuple> tuples;  // all base tuples up to the bound, by length then lex
    std::vector<Sentence> sentences;
};

/// Interpretation of the tuple predicates over a candidate structure.
struct Expansion {
    std::map<Tuple, std::set<Tuple>> assignment;
};

struct ExpansionVerdict {
    bool expandable = false;
    Expansion witness;
};

/// Builds tau* and the sentence set for a small base structure.
ExpansionSchema build_schema(const FinStructure& a, std::size_t tuple_len_bound = 0);

/// Precomputed tuple types of a candidate structure, reusable across many
/// expansion checks against bases over the same symbols.
struct TupleTyping {
    std::vector<std::string> symbols;
    std::size_t max_len = 0;
    // fingerprint -> indices of tuples carrying that complete qf type,
    // grouped by tuple length
    std::vector<std::map<std::uint64_t, std::vector<std::uint32_t>>> by_length;
    // rank -> fingerprint, grouped by tuple length
    std::vector<std::vector<std::uint64_t>> fingerprint_by_rank;
};
TupleTyping type_tuples(const FinStructure& s, const std::vector<std::string>& symbols,
                        std::size_t max_len);

/// Does some expansion of b satisfy the whole theory? Decided by pruning
/// the canonical qf-type assignment to its greatest fixpoint: a valid
/// expansion exists iff the fixpoint satisfies the covering sentence.
ExpansionVerdict check_expansion(const ExpansionSchema& schema, const FinStructure& b,
                                 const TupleTyping* typing_hint = nullptr,
                                 const TupleTyping* base_typing = nullptr);

/// Direct model check of every sentence against a given expansion.
bool satisfies(const ExpansionSchema& schema, const FinStructure& b, const Expansion& expansion,
               std::string* failing_clause = nullptr);

struct BackAndForthReport {
    bool ok = false;
    std::string failing_clause;
};

/// Checks that the family {a-tuple -> b-tuple : b-tuple in P_a} is
/// nonempty and has the back-and-forth property under the expansion.
BackAndForthReport back_and_forth_check(const ExpansionSchema& schema, const FinStructure& b,
                                        const Expansion& expansion);

}  // namespace fraisse::scott

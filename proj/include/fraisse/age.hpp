#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fraisse/bignat.hpp"
#include "fraisse/structure.hpp"

namespace fraisse {

/// Canonical index of a structure plus the isomorphism from the canonical
/// member onto it.
struct Identification {
    BigNat index;
    PartialMap iso;  // member(index) -> identified structure
};

/// Structural amalgam. Convention: `d` extends `a` literally (f_prime is
/// the identity on universe(a)); new points take fresh naturals above
/// max(universe(a)).
struct Amalgam {
    FinStructure d;
    PartialMap f_prime;
    PartialMap g_prime;
};

struct AmalgamCertificate {
    BigNat index;  // d = member(index)
    FinStructure d;
    PartialMap f_prime;
    PartialMap g_prime;
};

/// Where to insert a fresh element into a level's distinguished order.
struct UPosition {
    enum class Kind { First, Below, Above, Between };
    Kind kind = Kind::First;
    Element lo = 0;
    Element hi = 0;
};

/// A one-point extension demand over realized elements: `pattern` is an age
/// member whose all-but-one points are matched onto `base` by `base_map`.
struct ExtensionGoal {
    std::vector<Element> base;
    FinStructure pattern;
    PartialMap base_map;  // pattern universe minus fresh_point -> base
    Element fresh_point = 0;
    std::string key;
};

/// Dedup + cursor state for goal emission; owned by a builder.
class GoalTracker {
public:
    bool seen(const std::string& key) const { return done_.count(key) > 0; }
    void mark(const std::string& key) { done_.insert(key); }
    std::size_t& counter(const std::string& name) { return counters_[name]; }

private:
    std::set<std::string> done_;
    std::map<std::string, std::size_t> counters_;
};

/// A computable representation of an age: total member enumerator plus a
/// total embedding decider (the pair K, E(K)). The decider must agree with
/// the brute-force oracle; that agreement is a tested invariant.
class AgeRep {
public:
    AgeRep(std::string tag, VocabularyPtr vocab) : tag_(std::move(tag)), vocab_(std::move(vocab)) {}
    virtual ~AgeRep() = default;

    const std::string& tag() const { return tag_; }
    const VocabularyPtr& vocabulary() const { return vocab_; }

    virtual FinStructure member(const BigNat& index) const = 0;
    virtual bool decide_embedding(const BigNat& i, const BigNat& j, const PartialMap& f) const = 0;

    /// Canonical index of (a structure isomorphic to) s, with the witness
    /// isomorphism. Default: scan indices below identify_horizon().
    virtual std::optional<Identification> identify(const FinStructure& s) const;

    /// Structural amalgamation over valid inputs (f: c -> a, g: c -> b
    /// embeddings). Default: free join, correct for free-amalgamation ages.
    virtual Amalgam amalgamate(const FinStructure& a, const FinStructure& b, const FinStructure& c,
                               const PartialMap& f, const PartialMap& g) const;

    /// Targeted one-point extension demands (density, saturation). Default:
    /// none; the member stream alone drives such ages. Emitters that mark
    /// satisfied demands in the tracker themselves return true from
    /// goals_prechecked, sparing the engine its own scan.
    virtual void emit_goals(const FinStructure& stage, GoalTracker& tracker,
                            std::vector<ExtensionGoal>& out, std::size_t budget) const;
    virtual bool goals_prechecked() const { return false; }

    /// Ages with structure enough to answer embedding-search queries
    /// directly override this pair; the engine otherwise runs its generic
    /// backtracking search.
    virtual bool has_embedding_search() const { return false; }
    virtual std::optional<PartialMap> find_member_embedding(const FinStructure& pattern,
                                                            const FinStructure& stage) const;

    /// Smallest convenient extension of `stage` embedding `member`; the
    /// default is the joint-embedding amalgam over the empty structure.
    virtual FinStructure extend_to_embed(const FinStructure& stage,
                                         const FinStructure& member) const;

    /// Insert a fresh element into the level's distinguished linear order.
    /// Only tower levels support this.
    virtual FinStructure append_u(const FinStructure& s, const UPosition& where) const;

    /// Membership violations of a candidate structure; empty means valid
    /// or no validator (tower levels override with the real conditions).
    virtual std::vector<std::string> membership_violations(const FinStructure& s) const;

    virtual std::size_t identify_horizon() const { return 64; }

private:
    std::string tag_;
    VocabularyPtr vocab_;
};

using AgeRepPtr = std::shared_ptr<const AgeRep>;

/// Dovetailed amalgam search per the module contract: a structural hint is
/// tried first, then (index, map, map) triples in lexicographic order with
/// indices up to `budget`.
AmalgamCertificate search_amalgam(const AgeRep& age, const BigNat& a, const BigNat& b,
                                  const BigNat& c, const PartialMap& f, const PartialMap& g,
                                  std::size_t budget);

struct AgeCheckIssue {
    std::string axiom;  // "HP" | "JEP" | "AP"
    std::string detail;
};

struct AgeCheckReport {
    std::vector<AgeCheckIssue> issues;
    std::size_t hp_checked = 0;
    std::size_t jep_checked = 0;
    std::size_t ap_checked = 0;
    bool ok() const { return issues.empty(); }
    std::string to_json_lines() const;
};

/// Bounded verification of HP/JEP/AP on the enumerated members.
AgeCheckReport check_age_axioms(const AgeRep& age, std::size_t size_bound, std::size_t index_bound,
                                std::size_t amalgam_budget = 64);

/// Canonical content key (universe + relations), used for dedup.
std::string content_key(const FinStructure& s);

}  // namespace fraisse

#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <unordered_map>

#include "fraisse/tower.hpp"

namespace fraisse {

/// The successor age K_b over a lower level: vocabulary tau_b adds V, M,
/// U_b, P, F, <_b; members stack a lower member (the M part) with finite
/// vertex/color data subject to the edge-coloring law.
class SuccessorAge : public AgeRep {
public:
    SuccessorAge(Notation b, TowerLevel lower);

    FinStructure member(const BigNat& index) const override;
    bool decide_embedding(const BigNat& i, const BigNat& j, const PartialMap& f) const override;
    std::optional<Identification> identify(const FinStructure& s) const override;
    Amalgam amalgamate(const FinStructure& a, const FinStructure& b, const FinStructure& c,
                       const PartialMap& f, const PartialMap& g) const override;
    void emit_goals(const FinStructure& stage, GoalTracker& tracker,
                    std::vector<ExtensionGoal>& out, std::size_t budget) const override;
    bool goals_prechecked() const override;
    FinStructure append_u(const FinStructure& s, const UPosition& where) const override;
    std::vector<std::string> membership_violations(const FinStructure& s) const override;

    const TowerLevel& lower() const { return lower_; }
    const std::string& v_name() const { return v_name_; }
    const std::string& m_name() const { return m_name_; }
    const std::string& u_name() const { return u_name_; }
    const std::string& p_name() const { return p_name_; }
    const std::string& f_name() const { return f_name_; }
    const std::string& order_name() const { return order_name_; }

private:
    Notation b_;
    TowerLevel lower_;
    std::string v_name_, m_name_, u_name_, p_name_, f_name_, order_name_;

    struct Parts {
        std::vector<Element> v, m, u;  // by unary marks, ascending id
    };
    Parts partition(const FinStructure& s) const;
    FinStructure strip_to_lower(const FinStructure& s, const std::vector<Element>& m_elems) const;
    std::vector<Element> lower_u_sorted(const FinStructure& s,
                                        const std::vector<Element>& m_elems) const;
    std::vector<Element> lower_u_sorted_lowvocab(const FinStructure& m_low) const;

    using FPair = std::pair<Element, Element>;
    using FMap = std::map<FPair, Element>;
    static FPair norm(Element x, Element y) { return x < y ? FPair{x, y} : FPair{y, x}; }
    FMap read_f(const FinStructure& s, const std::vector<Element>& vs) const;
    /// Strict closure of the edge-coloring law; false on contradiction.
    /// `frozen` pairs must not gain colors (the induced-substructure chain
    /// forbids coloring pairs of an existing stage). With `seed` given,
    /// only constraints reachable from the seeded pairs are re-examined
    /// (sound when the remaining pairs are already mutually closed).
    bool close_star(FMap& f, const std::vector<Element>& vs,
                    const std::function<bool(Element, Element)>& less_a,
                    const std::set<FPair>* frozen = nullptr,
                    const std::vector<FPair>* seed = nullptr) const;

    mutable std::mutex cache_mu_;
    mutable std::unordered_map<BigNat, FinStructure, BigNatHash> member_cache_;
    FinStructure member_uncached(const BigNat& index) const;

    FinStructure u_chain(std::size_t n) const;
    Element insert_color(FinStructure& dM, const UPosition& pos, Element& fresh) const;
    void complete_vertex(Element beta, const std::vector<Element>& core, FMap& fd,
                         FinStructure& dM, Element& fresh) const;
};

/// The limit age K_a for a limit notation: members assemble block copies
/// of lower-level members; the order on U_a is within-block inherited,
/// across blocks by block index.
class LimitAge : public AgeRep {
public:
    LimitAge(Notation a, std::weak_ptr<Tower> tower, std::size_t horizon);

    FinStructure member(const BigNat& index) const override;
    bool decide_embedding(const BigNat& i, const BigNat& j, const PartialMap& f) const override;
    std::optional<Identification> identify(const FinStructure& s) const override;
    Amalgam amalgamate(const FinStructure& a, const FinStructure& b, const FinStructure& c,
                       const PartialMap& f, const PartialMap& g) const override;
    FinStructure append_u(const FinStructure& s, const UPosition& where) const override;
    std::vector<std::string> membership_violations(const FinStructure& s) const override;

    const std::string& u_name() const { return u_name_; }
    const std::string& order_name() const { return order_name_; }
    std::string block_name(std::size_t n) const;
    /// n -> lower level (materialized through the tower on demand).
    const TowerLevel& block_level(std::size_t n) const;

    /// sigma as a sorted (block, lower index) list; normalized so that
    /// blocks carrying an empty lower member are dropped.
    std::vector<std::pair<std::size_t, BigNat>> decode_sigma(const BigNat& index) const;
    static BigNat encode_sigma(const std::vector<std::pair<std::size_t, BigNat>>& sigma);

    static Element block_element(std::size_t n, Element x);

private:
    Notation a_;
    std::weak_ptr<Tower> tower_;
    std::string u_name_, order_name_;
    mutable std::mutex cache_mu_;
    mutable std::unordered_map<BigNat, FinStructure, BigNatHash> member_cache_;

    std::shared_ptr<Tower> tower() const;
    std::optional<std::size_t> block_of_name(const std::string& name) const;
};

VocabularyPtr make_successor_vocab(const Notation& b, const TowerLevel& lower);

}  // namespace fraisse

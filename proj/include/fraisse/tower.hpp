#pragma once

#include <memory>

#include "fraisse/age.hpp"
#include "fraisse/engine.hpp"
#include "fraisse/notation.hpp"

namespace fraisse {

/// One level of the transfinite tower: the vocabulary, the age with its
/// embedding decider, a limit builder, and handles for the distinguished
/// symbols of the level.
struct TowerLevel {
    Notation notation = Notation::one();
    VocabularyPtr vocabulary;
    AgeRepPtr age;
    std::shared_ptr<LimitBuilder> builder;

    std::string u_name;      // U_a
    std::string order_name;  // <_a

    // successor levels only
    std::string v_name;
    std::string m_name;
    std::string p_name;
    std::string f_name;

    // limit levels only: block predicate prefix, "Qn{<n>}@<mark>"
    std::string block_prefix;
};

struct TowerConfig {
    std::size_t limit_horizon = 3;  // levels materialized eagerly per limit
    BuilderConfig builder;
};

/// The partial computable function I: notations to levels, by transfinite
/// recursion with a memo table. Levels are immutable once built.
class Tower : public std::enable_shared_from_this<Tower> {
public:
    static std::shared_ptr<Tower> create(TowerConfig cfg = {});

    /// I(a): base case for 1, successor and limit cases otherwise.
    const TowerLevel& level(const Notation& a);

    /// Already built? Lazy consumers (the limit vocabulary) follow the
    /// memo table instead of forcing construction.
    bool materialized(const std::string& notation_text) const {
        return memo_.count(notation_text) > 0;
    }

    const TowerConfig& config() const { return cfg_; }

private:
    explicit Tower(TowerConfig cfg) : cfg_(std::move(cfg)) {}
    TowerConfig cfg_;
    std::map<std::string, TowerLevel> memo_;

    TowerLevel build_base();
    TowerLevel build_successor(const TowerLevel& lower);
    TowerLevel build_limit(const Notation& a);
};

/// Membership check for the successor age over `level` (the seven
/// conditions including the edge-coloring law); returns all violations.
std::vector<std::string> validate_kb(const TowerLevel& level, const FinStructure& s);

/// Shipped age lookup: "linorders", "graphs", "k1", "linorders-defective",
/// or "tower:<notation>" resolved through the process-wide tower.
AgeRepPtr age_by_tag(const std::string& tag);
std::shared_ptr<Tower> default_tower();

}  // namespace fraisse

#include "fraisse/tower.hpp"

#include "fraisse/ages.hpp"
#include "fraisse/errors.hpp"
#include "tower_internal.hpp"

namespace fraisse {

std::shared_ptr<Tower> Tower::create(TowerConfig cfg) {
    return std::shared_ptr<Tower>(new Tower(std::move(cfg)));
}

const TowerLevel& Tower::level(const Notation& a) {
    auto it = memo_.find(a.text());
    if (it != memo_.end()) return it->second;
    TowerLevel built;
    switch (a.form()) {
        case Notation::Form::One:
            built = build_base();
            break;
        case Notation::Form::Succ:
            built = build_successor(level(a.pred()));
            break;
        case Notation::Form::Lim:
            built = build_limit(a);
            break;
    }
    auto [slot, inserted] = memo_.emplace(a.text(), std::move(built));
    return slot->second;
}

TowerLevel Tower::build_base() {
    TowerLevel level;
    level.notation = Notation::one();
    level.age = make_k1_age();
    level.vocabulary = level.age->vocabulary();
    level.u_name = k1_u_name();
    level.order_name = k1_order_name();
    level.builder = std::make_shared<LimitBuilder>(level.age, cfg_.builder);
    return level;
}

TowerLevel Tower::build_successor(const TowerLevel& lower) {
    Notation b = Notation::successor(lower.notation);
    auto age = std::make_shared<SuccessorAge>(b, lower);
    TowerLevel level;
    level.notation = b;
    level.age = age;
    level.vocabulary = age->vocabulary();
    level.u_name = age->u_name();
    level.order_name = age->order_name();
    level.v_name = age->v_name();
    level.m_name = age->m_name();
    level.p_name = age->p_name();
    level.f_name = age->f_name();
    level.builder = std::make_shared<LimitBuilder>(age, cfg_.builder);
    return level;
}

TowerLevel Tower::build_limit(const Notation& a) {
    if (a.form() != Notation::Form::Lim)
        throw NotLimit("build_limit: notation " + a.text() + " is not a limit");
    // the construction assumes successor-stage levels along the sequence
    for (std::size_t n = 0; n < cfg_.limit_horizon; ++n) {
        Notation an = a.fundamental_element(n);
        if (an.form() != Notation::Form::Succ)
            throw Error("limit sequence emits a non-successor notation at " + std::to_string(n));
        level(an);  // materialize eagerly up to the horizon
    }
    auto age = std::make_shared<LimitAge>(a, weak_from_this(), cfg_.limit_horizon);
    TowerLevel level;
    level.notation = a;
    level.age = age;
    level.vocabulary = age->vocabulary();
    level.u_name = age->u_name();
    level.order_name = age->order_name();
    level.block_prefix = "Qn{";
    level.builder = std::make_shared<LimitBuilder>(age, cfg_.builder);
    return level;
}

std::vector<std::string> validate_kb(const TowerLevel& level, const FinStructure& s) {
    if (s.vocabulary() != level.vocabulary)
        throw VocabularyMismatch("validate_kb: structure is not over the level vocabulary");
    auto successor = std::dynamic_pointer_cast<const SuccessorAge>(level.age);
    if (!successor) throw Error("validate_kb: level " + level.notation.text() +
                                " is not a successor level");
    return successor->membership_violations(s);
}

std::shared_ptr<Tower> default_tower() {
    static std::shared_ptr<Tower> tower = Tower::create();
    return tower;
}

AgeRepPtr age_by_tag(const std::string& tag) {
    if (tag == "linorders") return make_linear_orders_age();
    if (tag == "graphs") return make_graphs_age();
    if (tag == "k1") return make_k1_age();
    if (tag == "linorders-defective") return make_broken_linorders_age();
    if (tag.rfind("tower:", 0) == 0) {
        Notation a = Notation::parse(tag.substr(6));
        return default_tower()->level(a).age;
    }
    throw Error("unknown age tag: " + tag);
}

}  // namespace fraisse

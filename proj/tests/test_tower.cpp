#include <doctest.h>

#include "fraisse/ages.hpp"
#include "fraisse/engine.hpp"
#include "fraisse/errors.hpp"
#include "fraisse/rational.hpp"
#include "fraisse/tower.hpp"
#include "oracle.hpp"

using namespace fraisse;

namespace {

std::shared_ptr<Tower> tower() {
    static std::shared_ptr<Tower> t = Tower::create();
    return t;
}

/// A tau_b structure: M part carrying two ordered colors u0 <_a u1 (the
/// rationals 0 and 1), three vertices, and the given edge colors (pairs
/// into {0, 1} meaning u0/u1).
FinStructure star_example(const TowerLevel& level,
                          const std::vector<std::pair<std::pair<int, int>, int>>& edges) {
    FinStructure s(level.vocabulary);
    for (Element e = 0; e < 5; ++e) s.add_element(e);
    // M part: elements 0, 1 with colors 0/1 and 1/1
    for (Element e : {0, 1}) {
        s.add_tuple(level.m_name, Tuple{e});
        s.add_tuple(k1_u_name(), Tuple{e});
    }
    s.add_tuple(k1_color_name(Rational(0, 1)), Tuple{0});
    s.add_tuple(k1_color_name(Rational(1, 1)), Tuple{1});
    s.add_tuple(k1_order_name(), Tuple{0, 1});
    for (Element e : {2, 3, 4}) s.add_tuple(level.v_name, Tuple{e});
    for (const auto& [pair, color] : edges) {
        Element x = static_cast<Element>(pair.first + 2);
        Element y = static_cast<Element>(pair.second + 2);
        Element u = static_cast<Element>(color);
        s.add_tuple(level.f_name, Tuple{x, y, u});
        s.add_tuple(level.f_name, Tuple{y, x, u});
    }
    return s;
}

}  // namespace

TEST_CASE("base level: the rational order with named colors") {
    const TowerLevel& base = tower()->level(Notation::one());
    CHECK(base.u_name == k1_u_name());
    CHECK(base.order_name == k1_order_name());
    CHECK(base.vocabulary->lookup("Q{1/2}@1").has_value());
    CHECK(base.vocabulary->require(k1_order_name()).arity == 2);
    // growing realizes betweenness for realized pairs (density of the order)
    base.builder->grow(60);
    const FinStructure& stage = base.builder->current();
    CHECK(stage.size() >= 3);
}

TEST_CASE("the empty structure is a successor-level member") {
    const TowerLevel& level = tower()->level(Notation::parse("s(1)"));
    FinStructure empty(level.vocabulary);
    CHECK(validate_kb(level, empty).empty());
    CHECK(level.age->member(BigNat(0)).size() == 0);
}

TEST_CASE("edge-coloring law on small triples") {
    const TowerLevel& level = tower()->level(Notation::parse("s(1)"));
    // distinct pivot colors force the minimum on the opposite edge
    FinStructure good = star_example(level, {{{0, 1}, 0}, {{0, 2}, 1}, {{1, 2}, 0}});
    CHECK(validate_kb(level, good).empty());
    // taking the larger color instead violates the law
    FinStructure bad = star_example(level, {{{0, 1}, 0}, {{0, 2}, 1}, {{1, 2}, 1}});
    CHECK(!validate_kb(level, bad).empty());
    // equal pivot colors demand a strictly larger opposite color
    FinStructure equal_bad = star_example(level, {{{0, 1}, 0}, {{0, 2}, 0}, {{1, 2}, 0}});
    CHECK(!validate_kb(level, equal_bad).empty());
    FinStructure equal_good = star_example(level, {{{0, 1}, 0}, {{0, 2}, 0}, {{1, 2}, 1}});
    CHECK(validate_kb(level, equal_good).empty());
}

TEST_CASE("successor vocabulary carries marked generations") {
    const TowerLevel& two = tower()->level(Notation::parse("s(s(1))"));
    CHECK(two.vocabulary->lookup("V@s(s(1))").has_value());
    CHECK(two.vocabulary->lookup("V@s(1)").has_value());
    CHECK(two.vocabulary->lookup("U@s(1)").has_value());
    CHECK(two.vocabulary->lookup("Q{1/2}@1").has_value());
    CHECK(two.vocabulary->require("F@s(s(1))").arity == 3);
    CHECK(two.vocabulary->require("F@s(s(1))").mark == "s(s(1))");
    CHECK(two.u_name == "U@s(s(1))");
}

TEST_CASE("successor members validate and identify to themselves") {
    const TowerLevel& level = tower()->level(Notation::parse("s(1)"));
    for (std::uint64_t i = 0; i <= 40; ++i) {
        FinStructure m = level.age->member(BigNat(i));
        CHECK(validate_kb(level, m).empty());
        auto id = level.age->identify(m);
        REQUIRE(id.has_value());
        FinStructure canon = level.age->member(id->index);
        CHECK(is_embedding(id->iso, canon, m));
        CHECK(canon.size() == m.size());
    }
}

TEST_CASE("successor embedding decisions match the oracle") {
    const TowerLevel& level = tower()->level(Notation::parse("s(1)"));
    for (std::uint64_t i = 0; i <= 30; ++i) {
        FinStructure a = level.age->member(BigNat(i));
        if (a.size() > 4) continue;
        for (std::uint64_t j = 0; j <= 30; ++j) {
            FinStructure b = level.age->member(BigNat(j));
            if (b.size() > 4) continue;
            for (const auto& f : oracle::all_injective_maps(a, b)) {
                CHECK(level.age->decide_embedding(BigNat(i), BigNat(j), f) ==
                      is_embedding(f, a, b));
            }
        }
    }
}

TEST_CASE("successor growth keeps every stage lawful and total") {
    const TowerLevel& level = tower()->level(Notation::parse("s(1)"));
    LimitBuilder builder(level.age, BuilderConfig{});
    builder.grow(120);
    for (std::size_t s = 0; s < builder.stages().size(); s += 5) {
        const FinStructure& stage = builder.stages()[s].structure;
        CHECK(validate_kb(level, stage).empty());
    }
    // in the limit both colorings are total: on every stage, every vertex
    // is P-colored and every vertex pair is F-colored
    const FinStructure& last = builder.current();
    std::vector<Element> vs;
    for (Element e : last.universe())
        if (last.has_tuple(level.v_name, Tuple{e})) vs.push_back(e);
    for (Element v : vs) {
        bool has_p = false;
        for (const auto& t : last.relation(level.p_name))
            if (t[0] == v) has_p = true;
        CHECK(has_p);
    }
    for (std::size_t x = 0; x < vs.size(); ++x) {
        for (std::size_t y = x + 1; y < vs.size(); ++y) {
            bool has_f = false;
            for (const auto& t : last.relation(level.f_name))
                if (t[0] == vs[x] && t[1] == vs[y]) has_f = true;
            CHECK(has_f);
        }
    }
    // (U_b, <_b) grows toward a dense order: realized first pairs gain midpoints
    std::vector<Element> us;
    for (Element e : last.universe())
        if (last.has_tuple(level.u_name, Tuple{e}) && us.size() < 4) us.push_back(e);
    std::sort(us.begin(), us.end(), [&](Element a, Element b) {
        return last.has_tuple(level.order_name, Tuple{a, b});
    });
    for (std::size_t k = 0; k + 1 < us.size(); ++k) {
        bool mid = false;
        for (Element z : last.universe())
            if (last.has_tuple(level.order_name, Tuple{us[k], z}) &&
                last.has_tuple(level.order_name, Tuple{z, us[k + 1]}))
                mid = true;
        CHECK(mid);
    }
}

TEST_CASE("two successor applications build without error") {
    const TowerLevel& two = tower()->level(Notation::parse("s(s(1))"));
    // members stack: the M part of a level-two member is a level-one member
    FinStructure m = two.age->member(BigNat(pair_encode(BigNat(2), BigNat(2)).to_u64()));
    CHECK(validate_kb(two, m).empty());
    auto id = two.age->identify(m);
    CHECK(id.has_value());
}

TEST_CASE("limit level: assembly and the order law") {
    const TowerLevel& lim = tower()->level(Notation::parse("lim(omega)"));
    CHECK(lim.age->member(BigNat(0)).size() == 0);
    // sampled members satisfy the block order law (the validator checks it)
    for (std::uint64_t i = 1; i <= 50; ++i) {
        FinStructure m = lim.age->member(BigNat(i));
        CHECK(lim.age->membership_violations(m).empty());
        auto id = lim.age->identify(m);
        REQUIRE(id.has_value());
        CHECK(lim.age->member(id->index).size() == m.size());
    }
}

TEST_CASE("limit embedding decisions match the oracle") {
    const TowerLevel& lim = tower()->level(Notation::parse("lim(omega)"));
    for (std::uint64_t i = 0; i <= 25; ++i) {
        FinStructure a = lim.age->member(BigNat(i));
        if (a.size() > 3) continue;
        for (std::uint64_t j = 0; j <= 25; ++j) {
            FinStructure b = lim.age->member(BigNat(j));
            if (b.size() > 4) continue;
            for (const auto& f : oracle::all_injective_maps(a, b)) {
                CHECK(lim.age->decide_embedding(BigNat(i), BigNat(j), f) ==
                      is_embedding(f, a, b));
            }
        }
    }
}

TEST_CASE("the recursion is memoized") {
    const TowerLevel& a = tower()->level(Notation::parse("s(1)"));
    const TowerLevel& b = tower()->level(Notation::parse("s(1)"));
    CHECK(&a == &b);
}

TEST_CASE("a successor built over the limit level stays lawful and total") {
    const TowerLevel& level = tower()->level(Notation::parse("s(lim(omega))"));
    CHECK(level.u_name == "U@s(lim(omega))");
    for (std::uint64_t i = 0; i <= 12; ++i) {
        FinStructure m = level.age->member(BigNat(i));
        CHECK(level.age->membership_violations(m).empty());
        CHECK(level.age->identify(m).has_value());
    }
    LimitBuilder builder(level.age, BuilderConfig{});
    builder.grow(100);
    const FinStructure& stage = builder.current();
    CHECK(level.age->membership_violations(stage).empty());
    std::size_t nv = 0;
    for (Element e : stage.universe())
        if (stage.has_tuple(level.v_name, Tuple{e})) ++nv;
    // fresh colors for the completions come from limit-level insertions,
    // so a fully colored vertex set certifies that path end to end
    CHECK(nv >= 2);
    CHECK(stage.relation(level.f_name).size() == nv * (nv - 1));
}

#include <doctest.h>

#include <memory>

#include "fraisse/ages.hpp"
#include "fraisse/errors.hpp"
#include "fraisse/rational.hpp"
#include "oracle.hpp"

using namespace fraisse;

TEST_CASE("linear orders: members and embedding decisions") {
    auto age = make_linear_orders_age();
    CHECK(age->member(BigNat(0)).size() == 0);  // enumeration starts at the empty structure
    FinStructure two = age->member(BigNat(2));
    CHECK(two.size() == 2);
    CHECK(two.has_tuple("<", Tuple{0, 1}));

    // empty map embeds the empty member
    CHECK(age->decide_embedding(BigNat(0), BigNat(3), PartialMap{}));
    CHECK(age->decide_embedding(BigNat(2), BigNat(3), PartialMap({{0, 0}, {1, 2}})));
    CHECK(!age->decide_embedding(BigNat(2), BigNat(3), PartialMap({{0, 1}, {1, 0}})));
}

TEST_CASE("decide_embedding agrees with the brute-force oracle") {
    for (const auto& tag : {"linorders", "graphs", "k1"}) {
        auto age = tag == std::string("linorders") ? make_linear_orders_age()
                   : tag == std::string("graphs")  ? make_graphs_age()
                                                   : make_k1_age();
        for (std::uint64_t i = 0; i <= 40; ++i) {
            FinStructure a = age->member(BigNat(i));
            if (a.size() > 4) continue;
            for (std::uint64_t j = 0; j <= 40; ++j) {
                FinStructure b = age->member(BigNat(j));
                if (b.size() > 4) continue;
                for (const auto& f : oracle::all_injective_maps(a, b)) {
                    CHECK(age->decide_embedding(BigNat(i), BigNat(j), f) ==
                          is_embedding(f, a, b));
                }
            }
        }
    }
}

TEST_CASE("members identify to themselves") {
    for (const auto& make : {make_linear_orders_age, make_graphs_age, make_k1_age}) {
        auto age = make();
        for (std::uint64_t i = 0; i <= 40; ++i) {
            FinStructure m = age->member(BigNat(i));
            auto id = age->identify(m);
            REQUIRE(id.has_value());
            FinStructure canon = age->member(id->index);
            CHECK(is_embedding(id->iso, canon, m));
            CHECK(canon.size() == m.size());
        }
    }
}

TEST_CASE("amalgam search: joint embedding from the empty structure") {
    auto age = make_linear_orders_age();
    auto cert = search_amalgam(*age, BigNat(1), BigNat(1), BigNat(0), PartialMap{}, PartialMap{},
                               64);
    CHECK(cert.d.size() == 2);  // both singleton images fit in a two-chain
    CHECK(is_embedding(cert.f_prime, age->member(BigNat(1)), cert.d));
    CHECK(is_embedding(cert.g_prime, age->member(BigNat(1)), cert.d));
}

TEST_CASE("amalgam search: orders amalgamate over a common point") {
    auto age = make_linear_orders_age();
    // C = {c}, A = {a < c}, B = {c < b}: the amalgam realizes a < c < b
    PartialMap f({{0, 1}});  // c into the top of A
    PartialMap g({{0, 0}});  // c into the bottom of B
    auto cert = search_amalgam(*age, BigNat(2), BigNat(2), BigNat(1), f, g, 64);
    CHECK(cert.d.size() == 3);
    Element c_in_d = *PartialMap::compose(cert.f_prime, f).apply(0);
    Element a_in_d = *cert.f_prime.apply(0);
    Element b_in_d = *cert.g_prime.apply(1);
    CHECK(cert.d.has_tuple("<", Tuple{a_in_d, c_in_d}));
    CHECK(cert.d.has_tuple("<", Tuple{c_in_d, b_in_d}));
    CHECK(*PartialMap::compose(cert.g_prime, g).apply(0) == c_in_d);
}

TEST_CASE("amalgam search: identity triple accepts the structure itself") {
    auto age = make_linear_orders_age();
    PartialMap id2({{0, 0}, {1, 1}});
    auto cert = search_amalgam(*age, BigNat(2), BigNat(2), BigNat(2), id2, id2, 64);
    CHECK(cert.d.size() == 2);
    CHECK(cert.f_prime == id2);
    CHECK(cert.g_prime == id2);
}

TEST_CASE("amalgam certificates are deterministic") {
    auto age = make_graphs_age();
    PartialMap f({{0, 0}});
    PartialMap g({{0, 0}});
    auto c1 = search_amalgam(*age, BigNat(2), BigNat(3), BigNat(1), f, g, 64);
    auto c2 = search_amalgam(*age, BigNat(2), BigNat(3), BigNat(1), f, g, 64);
    CHECK(c1.index == c2.index);
    CHECK(c1.f_prime == c2.f_prime);
    CHECK(c1.g_prime == c2.g_prime);
}

TEST_CASE("amalgam search rejects non-embeddings") {
    auto age = make_linear_orders_age();
    PartialMap bad({{0, 1}, {1, 0}});
    CHECK_THROWS_AS(search_amalgam(*age, BigNat(2), BigNat(2), BigNat(2), bad, bad, 8),
                    PreconditionFailed);
}

TEST_CASE("age axioms hold for the shipped ages at small bounds") {
    auto lin = make_linear_orders_age();
    auto report = check_age_axioms(*lin, 3, 50);
    CHECK(report.ok());
    CHECK(report.hp_checked > 0);
    CHECK(report.ap_checked > 0);

    auto k1 = make_k1_age();
    auto k1_report = check_age_axioms(*k1, 2, 50);
    CHECK(k1_report.ok());
}

TEST_CASE("the defective age fails the hereditary property") {
    auto broken = make_broken_linorders_age();
    auto report = check_age_axioms(*broken, 3, 20);
    CHECK(!report.ok());
    bool hp_issue = false;
    for (const auto& issue : report.issues)
        if (issue.axiom == "HP") hp_issue = true;
    CHECK(hp_issue);
    CHECK(report.to_json_lines().find("HP") != std::string::npos);
}

TEST_CASE("K_1 members: the index coding") {
    auto age = make_k1_age();
    CHECK(age->member(BigNat(0)).size() == 0);
    // odd index 2k+1 is the singleton on the k-th rational; rational 0 is 0/1
    FinStructure zero = age->member(BigNat(1));
    REQUIRE(zero.size() == 1);
    CHECK(zero.has_tuple(k1_u_name(), Tuple{0}));
    CHECK(zero.has_tuple(k1_color_name(Rational(0, 1)), Tuple{0}));
    // colors must match exactly for singleton embeddings
    CHECK(!age->decide_embedding(BigNat(1), BigNat(3), PartialMap({{0, 0}})));
    CHECK(age->decide_embedding(BigNat(1), BigNat(1), PartialMap({{0, 0}})));
    // bitmask index {rat 0, rat 1} = mask 3 -> index 2*3+2 = 8
    FinStructure pair = age->member(BigNat(8));
    REQUIRE(pair.size() == 2);
    CHECK(pair.has_tuple(k1_order_name(), Tuple{0, 1}));
}

namespace {

/// Linear orders capped at two elements: closed under substructure with
/// joint embeddings, but the amalgam of two 2-chains over a point needs a
/// third element, so the amalgamation property genuinely fails.
class CappedOrdersAge : public AgeRep {
public:
    CappedOrdersAge()
        : AgeRep("capped-orders", [] {
              auto v = std::make_shared<Vocabulary>();
              v->add_symbol(Symbol{"<", 2, "1"});
              return v;
          }()) {}

    FinStructure member(const BigNat& index) const override {
        std::size_t n = index.fits_u64() ? std::min<std::size_t>(index.to_u64(), 2) : 2;
        FinStructure s(vocabulary());
        for (Element e = 0; e < static_cast<Element>(n); ++e) s.add_element(e);
        if (n == 2) s.add_tuple("<", Tuple{0, 1});
        return s;
    }

    bool decide_embedding(const BigNat& i, const BigNat& j, const PartialMap& f) const override {
        return is_embedding(f, member(i), member(j));
    }

    std::size_t identify_horizon() const override { return 3; }
};

}  // namespace

TEST_CASE("amalgam search reports exhaustion on a genuine AP failure") {
    CappedOrdersAge age;
    // C = one point, sitting at the top of A and at the bottom of B
    PartialMap f({{0, 1}});
    PartialMap g({{0, 0}});
    CHECK_THROWS_AS(search_amalgam(age, BigNat(2), BigNat(2), BigNat(1), f, g, 40),
                    BudgetExhausted);
    auto report = check_age_axioms(age, 2, 2, 16);
    bool ap_issue = false;
    for (const auto& issue : report.issues)
        if (issue.axiom == "AP") ap_issue = true;
    CHECK(ap_issue);
}

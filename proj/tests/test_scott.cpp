#include <doctest.h>

#include <memory>

#include "fraisse/errors.hpp"
#include "fraisse/scott.hpp"
#include "oracle.hpp"

using namespace fraisse;
namespace sc = fraisse::scott;

namespace {

VocabularyPtr small_vocab() {
    auto v = std::make_shared<Vocabulary>();
    v->add_symbol(Symbol{"R", 2, "1"});
    v->add_symbol(Symbol{"U", 1, "1"});
    return v;
}

FinStructure chain(VocabularyPtr vocab, std::vector<Element> elems) {
    FinStructure s(std::move(vocab));
    for (Element e : elems) s.add_element(e);
    for (std::size_t x = 0; x < elems.size(); ++x)
        for (std::size_t y = x + 1; y < elems.size(); ++y)
            s.add_tuple("R", Tuple{elems[x], elems[y]});
    return s;
}

sc::Expansion diagonal_expansion(const sc::ExpansionSchema& schema,
                                 const PartialMap& iso) {
    sc::Expansion out;
    for (const auto& t : schema.tuples) {
        Tuple image = *iso.apply_tuple(t);
        out.assignment[t].insert(image);
    }
    return out;
}

}  // namespace

TEST_CASE("schema of a singleton with a unary mark") {
    auto v = small_vocab();
    FinStructure a(v);
    a.add_element(0);
    a.add_tuple("U", Tuple{0});
    sc::ExpansionSchema schema = sc::build_schema(a);
    CHECK(schema.tau_star->lookup(sc::predicate_name(Tuple{0})).has_value());
    CHECK(schema.tau_star->lookup(sc::predicate_name(Tuple{0, 0})).has_value());
    // the point tuple and its repeat, their types, one covering sentence,
    // and the extension sentence below the bound
    CHECK(schema.tuples.size() == 2);
    REQUIRE(schema.sentences.size() == 4);
    CHECK(schema.sentences[0].kind == sc::Sentence::Kind::TupleType);
    CHECK(schema.sentences[2].kind == sc::Sentence::Kind::Covering);
    CHECK(schema.sentences[3].kind == sc::Sentence::Kind::Extension);
    for (const auto& s : schema.sentences) {
        CHECK((s.quantifier_shape() == "Pi1" || s.quantifier_shape() == "Pi2"));
    }
}

TEST_CASE("schema bound checks") {
    auto v = small_vocab();
    FinStructure big(v);
    for (Element e = 0; e < 6; ++e) big.add_element(e);
    CHECK_THROWS_AS(sc::build_schema(big), BoundExceeded);
    FinStructure a = chain(v, {0, 1});
    sc::ExpansionSchema schema = sc::build_schema(a);
    FinStructure huge(v);
    for (Element e = 0; e < 7; ++e) huge.add_element(e);
    CHECK_THROWS_AS(sc::check_expansion(schema, huge), BoundExceeded);
}

TEST_CASE("a structure expands over itself; the diagonal witnesses it") {
    auto v = small_vocab();
    FinStructure a = chain(v, {0, 1});
    a.add_tuple("U", Tuple{0});
    sc::ExpansionSchema schema = sc::build_schema(a);
    auto verdict = sc::check_expansion(schema, a);
    CHECK(verdict.expandable);
    CHECK(sc::satisfies(schema, a, verdict.witness));
    CHECK(sc::back_and_forth_check(schema, a, verdict.witness).ok);
    // the diagonal expansion along the identity also models the theory
    sc::Expansion diag = diagonal_expansion(schema, PartialMap::identity(a.universe()));
    CHECK(sc::satisfies(schema, a, diag));
    CHECK(sc::back_and_forth_check(schema, a, diag).ok);
}

TEST_CASE("a two-chain does not expand over a three-chain") {
    auto v = small_vocab();
    FinStructure a = chain(v, {0, 1});
    FinStructure b = chain(v, {0, 1, 2});
    sc::ExpansionSchema schema = sc::build_schema(a);
    CHECK(!sc::check_expansion(schema, b).expandable);
}

TEST_CASE("an isomorphic copy on other naturals expands") {
    auto v = small_vocab();
    FinStructure a = chain(v, {0, 1});
    FinStructure b = chain(v, {5, 9});
    sc::ExpansionSchema schema = sc::build_schema(a);
    auto verdict = sc::check_expansion(schema, b);
    CHECK(verdict.expandable);
    CHECK(sc::back_and_forth_check(schema, b, verdict.witness).ok);
}

TEST_CASE("an expansion with an empty demanded predicate fails with a clause") {
    auto v = small_vocab();
    FinStructure a = chain(v, {0, 1});
    sc::ExpansionSchema schema = sc::build_schema(a);
    sc::Expansion empty_expansion;  // every predicate empty
    auto report = sc::back_and_forth_check(schema, a, empty_expansion);
    CHECK(!report.ok);
    CHECK(!report.failing_clause.empty());
}

TEST_CASE("expandability coincides with isomorphism on a small corpus") {
    auto v = small_vocab();
    // all structures on up to 2 points over {U, R}, as labeled structures
    std::vector<FinStructure> corpus;
    for (int n = 1; n <= 2; ++n) {
        std::size_t cells = static_cast<std::size_t>(n) * n;
        for (std::size_t u = 0; u < (std::size_t{1} << n); ++u) {
            for (std::size_t r = 0; r < (std::size_t{1} << cells); ++r) {
                FinStructure s(v);
                for (Element e = 0; e < static_cast<Element>(n); ++e) s.add_element(e);
                for (Element e = 0; e < static_cast<Element>(n); ++e)
                    if ((u >> e) & 1u) s.add_tuple("U", Tuple{e});
                std::size_t cell = 0;
                for (Element x = 0; x < static_cast<Element>(n); ++x)
                    for (Element y = 0; y < static_cast<Element>(n); ++y, ++cell)
                        if ((r >> cell) & 1u) s.add_tuple("R", Tuple{x, y});
                corpus.push_back(std::move(s));
            }
        }
    }
    for (const auto& a : corpus) {
        sc::ExpansionSchema schema = sc::build_schema(a);
        for (const auto& b : corpus) {
            bool iso = oracle::naive_is_isomorphic(a, b);
            auto verdict = sc::check_expansion(schema, b);
            CHECK(verdict.expandable == iso);
            if (verdict.expandable) {
                CHECK(sc::satisfies(schema, b, verdict.witness));
                CHECK(sc::back_and_forth_check(schema, b, verdict.witness).ok);
            }
        }
    }
}

#include <doctest.h>

#include <memory>
#include <set>

#include "fraisse/errors.hpp"
#include "fraisse/serial.hpp"
#include "fraisse/structure.hpp"
#include "oracle.hpp"

using namespace fraisse;

namespace {

VocabularyPtr chain_vocab() {
    auto v = std::make_shared<Vocabulary>();
    v->add_symbol(Symbol{"<", 2, "1"});
    v->add_symbol(Symbol{"U", 1, "1"});
    return v;
}

FinStructure chain(VocabularyPtr vocab, std::vector<Element> elems) {
    FinStructure s(std::move(vocab));
    for (Element e : elems) s.add_element(e);
    for (std::size_t x = 0; x < elems.size(); ++x)
        for (std::size_t y = x + 1; y < elems.size(); ++y)
            s.add_tuple("<", Tuple{elems[x], elems[y]});
    return s;
}

}  // namespace

TEST_CASE("partial maps are functional, injectivity is a query") {
    PartialMap f({{0, 1}, {2, 3}});
    CHECK(f.injective());
    CHECK(*f.apply(0) == 1);
    CHECK(!f.defined_on(1));
    PartialMap collapse({{0, 5}, {1, 5}});
    CHECK(!collapse.injective());
    CHECK_THROWS_AS(PartialMap({{0, 1}, {0, 2}}), Error);
    CHECK(PartialMap::compose(f.inverse(), f) == PartialMap::identity({0, 2}));
}

TEST_CASE("embedding: identity on a structure into itself") {
    auto v = chain_vocab();
    FinStructure a = chain(v, {0, 1});
    CHECK(is_embedding(PartialMap::identity(a.universe()), a, a));
}

TEST_CASE("embedding: two-chain into three-chain") {
    auto v = chain_vocab();
    FinStructure a = chain(v, {0, 1});
    FinStructure b = chain(v, {0, 1, 2});
    CHECK(is_embedding(PartialMap({{0, 0}, {1, 2}}), a, b));
    CHECK(!is_embedding(PartialMap({{0, 2}, {1, 0}}), a, b));  // order reversed
    // exactly 3 of the 6 injective maps embed
    auto found = enumerate_embeddings(a, b);
    REQUIRE(found.size() == 3);
    CHECK(found[0] == PartialMap({{0, 0}, {1, 1}}));
    CHECK(found[1] == PartialMap({{0, 0}, {1, 2}}));
    CHECK(found[2] == PartialMap({{0, 1}, {1, 2}}));
    CHECK(found == oracle::naive_embeddings(a, b));
}

TEST_CASE("embedding rejects maps across vocabularies") {
    FinStructure a = chain(chain_vocab(), {0});
    FinStructure b = chain(chain_vocab(), {0});
    CHECK_THROWS_AS(is_embedding(PartialMap({{0, 0}}), a, b), VocabularyMismatch);
}

TEST_CASE("enumerate_embeddings: empty domain and antichain") {
    auto v = chain_vocab();
    FinStructure empty(v);
    FinStructure b = chain(v, {0, 1, 2});
    auto found = enumerate_embeddings(empty, b);
    REQUIRE(found.size() == 1);
    CHECK(found[0].empty());

    FinStructure antichain(v);
    antichain.add_element(0);
    antichain.add_element(1);
    FinStructure two = chain(v, {0, 1});
    CHECK(enumerate_embeddings(two, antichain).empty());

    FinStructure big(v);
    for (Element e = 0; e < 9; ++e) big.add_element(e);
    CHECK_THROWS_AS(enumerate_embeddings(big, big), BoundExceeded);
}

TEST_CASE("embedding composition closes over a generated corpus") {
    auto v = chain_vocab();
    std::vector<FinStructure> corpus = {chain(v, {0}), chain(v, {0, 1}), chain(v, {0, 1, 2}),
                                        chain(v, {0, 1, 2, 3})};
    FinStructure loose(v);
    loose.add_element(0);
    loose.add_element(1);
    loose.add_tuple("U", Tuple{0});
    corpus.push_back(loose);
    for (const auto& a : corpus)
        for (const auto& b : corpus)
            for (const auto& c : corpus)
                for (const auto& f : enumerate_embeddings(a, b))
                    for (const auto& g : enumerate_embeddings(b, c))
                        CHECK(is_embedding(PartialMap::compose(g, f), a, c));
}

TEST_CASE("substructure restriction") {
    auto v = chain_vocab();
    FinStructure a = chain(v, {0, 1, 2});
    CHECK(substructure(a, {0, 1, 2}).same_content(a));
    CHECK(substructure(a, {}).universe().empty());
    FinStructure sub = substructure(a, {0, 2});
    CHECK(sub.universe() == std::vector<Element>{0, 2});
    CHECK(sub.has_tuple("<", Tuple{0, 2}));
    CHECK(sub.relation("<").size() == 1);
    CHECK_THROWS_AS(substructure(a, {7}), NotSubset);
    // idempotent and monotone
    CHECK(substructure(sub, {0}).same_content(substructure(a, {0})));
}

TEST_CASE("atomic diagram order and content") {
    auto v = chain_vocab();
    FinStructure empty(v);
    CHECK(atomic_diagram(empty).empty());

    FinStructure one(v);
    one.add_element(0);
    one.add_tuple("U", Tuple{0});
    auto lits = atomic_diagram(one);
    REQUIRE(lits.size() == 1);
    CHECK(lits[0] == Literal{"U", {0}, true});

    FinStructure two = chain(v, {0, 1});
    auto diagram = atomic_diagram(two);
    REQUIRE(diagram.size() == 4);
    CHECK(diagram[0] == Literal{"<", {0, 0}, false});
    CHECK(diagram[1] == Literal{"<", {0, 1}, true});
    CHECK(diagram[2] == Literal{"<", {1, 0}, false});
    CHECK(diagram[3] == Literal{"<", {1, 1}, false});
}

TEST_CASE("serialization round trip") {
    auto v = chain_vocab();
    FinStructure a = chain(v, {0, 2, 5});
    a.add_tuple("U", Tuple{2});
    FinStructure back = decode_structure(encode_structure(a), v);
    CHECK(back.same_content(a));
    // standalone decode builds an ad-hoc vocabulary
    FinStructure standalone = decode_structure(encode_structure(a));
    CHECK(standalone.same_content(a));
    CHECK(standalone.vocabulary()->require("U").arity == 1);
    // DOT export mentions every element and the binary edges
    std::string dot = to_dot(a);
    CHECK(dot.find("n0") != std::string::npos);
    CHECK(dot.find("n0 -> n2") != std::string::npos);
}

TEST_CASE("vocabulary enumeration is duplicate-free and total") {
    auto v = std::make_shared<Vocabulary>();
    v->add_symbol(Symbol{"A", 1, "1"});
    v->add_symbol(Symbol{"B", 2, "1"});
    v->add_family(SymbolFamily{
        "numbered",
        [](const std::string& name) -> std::optional<Symbol> {
            if (name.size() > 1 && name[0] == 'N') return Symbol{name, 1, "1"};
            return std::nullopt;
        },
        [](std::size_t k) -> std::optional<Symbol> {
            return Symbol{"N" + std::to_string(k), 1, "1"};
        }});
    auto prefix = v->enumerate(12);
    CHECK(prefix.size() == 12);
    std::set<std::string> names;
    for (const auto& s : prefix) names.insert(s.name);
    CHECK(names.size() == 12);  // duplicate-free
    CHECK(v->lookup("N100").has_value());
    CHECK(v->require("N100").arity == 1);
    CHECK(!v->lookup("X").has_value());
    CHECK_THROWS_AS(v->require("X"), UnknownSymbol);
}

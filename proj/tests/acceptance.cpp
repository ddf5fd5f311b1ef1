// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fails. Tolerances and bounds are pinned here, not configurable.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "fraisse/ages.hpp"
#include "fraisse/diagonal.hpp"
#include "fraisse/engine.hpp"
#include "fraisse/game.hpp"
#include "fraisse/rational.hpp"
#include "fraisse/scott.hpp"
#include "fraisse/tower.hpp"
#include "oracle.hpp"

using namespace fraisse;

namespace {

int failures = 0;

void report(int number, const char* label, bool pass, double seconds,
            const std::string& detail = "") {
    std::printf("criterion %2d: %s  (%6.2fs)  %s%s%s\n", number, pass ? "PASS" : "FAIL", seconds,
                label, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Element> first_elements(const FinStructure& s, std::size_t count) {
    std::vector<Element> out;
    for (Element e : s.universe()) {
        if (out.size() >= count) break;
        out.push_back(e);
    }
    return out;
}

std::vector<Element> first_u_elements(const FinStructure& s, const std::string& u_name,
                                      std::size_t count) {
    std::vector<Element> out;
    for (Element e : s.universe()) {
        if (out.size() >= count) break;
        if (s.has_tuple(u_name, Tuple{e})) out.push_back(e);
    }
    return out;
}

// ---------------------------------------------------------------- 1
void criterion_engine_oracle() {
    auto t0 = std::chrono::steady_clock::now();
    std::size_t disagreements = 0;
    std::size_t checked = 0;
    const std::vector<std::pair<std::string, std::size_t>> plans = {
        {"linorders", 100}, {"graphs", 100}, {"k1", 120}, {"tower:s(1)", 120},
        {"tower:lim(omega)", 60}};
    for (const auto& [tag, steps] : plans) {
        AgeRepPtr age = age_by_tag(tag);
        // member-to-member decisions against the brute-force oracle
        for (std::uint64_t i = 0; i <= 30; ++i) {
            FinStructure a = age->member(BigNat(i));
            if (a.size() > 4) continue;
            for (std::uint64_t j = 0; j <= 30; ++j) {
                FinStructure b = age->member(BigNat(j));
                if (b.size() > 4) continue;
                for (const auto& f : oracle::all_injective_maps(a, b)) {
                    ++checked;
                    if (age->decide_embedding(BigNat(i), BigNat(j), f) != is_embedding(f, a, b))
                        ++disagreements;
                }
            }
        }
        // decisions against the growing limit
        LimitBuilder builder(age, BuilderConfig{});
        builder.grow(steps);
        const FinStructure& stage = builder.current();
        FinStructure window = substructure(stage, first_elements(stage, 7));
        for (std::uint64_t i = 0; i <= 30; ++i) {
            FinStructure m = age->member(BigNat(i));
            if (m.size() > 4) continue;
            for (const auto& f : oracle::all_injective_maps(m, window)) {
                ++checked;
                if (builder.decide_E_limit(BigNat(i), f) != is_embedding(f, m, stage))
                    ++disagreements;
            }
        }
    }
    report(1, "engine/oracle equivalence over five ages", disagreements == 0, seconds_since(t0),
           std::to_string(checked) + " queries, " + std::to_string(disagreements) +
               " disagreements");
}

// ---------------------------------------------------------------- 2
void criterion_rado() {
    auto t0 = std::chrono::steady_clock::now();
    LimitBuilder builder(age_by_tag("graphs"), BuilderConfig{});
    builder.grow(600);
    const FinStructure& stage = builder.current();
    auto firsts = first_elements(stage, 12);
    std::size_t missing = 0, patterns = 0;
    std::size_t n = firsts.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<Element> s_set;
        for (std::size_t k = 0; k < n; ++k)
            if ((mask >> k) & 1u) s_set.push_back(firsts[k]);
        if (s_set.size() > 3) continue;
        for (std::size_t sub = 0;; sub = (sub - mask) & mask) {
            ++patterns;
            bool found = false;
            for (Element z : stage.universe()) {
                if (std::find(s_set.begin(), s_set.end(), z) != s_set.end()) continue;
                bool ok = true;
                for (std::size_t k = 0; k < n && ok; ++k) {
                    if (!((mask >> k) & 1u)) continue;
                    bool want = (sub >> k) & 1u;
                    if (stage.has_tuple("E", Tuple{z, firsts[k]}) != want) ok = false;
                }
                if (ok) {
                    found = true;
                    break;
                }
            }
            if (!found) ++missing;
            if (sub == mask) break;
        }
    }
    report(2, "graph one-point extension property after 600 steps", missing == 0,
           seconds_since(t0),
           std::to_string(patterns) + " patterns, " + std::to_string(missing) + " missing");
}

// ---------------------------------------------------------------- 3
void criterion_dlo_shadow() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (const std::string tag : {std::string("k1"), std::string("tower:s(1)")}) {
        AgeRepPtr age = age_by_tag(tag);
        std::string u_name = tag == "k1" ? k1_u_name() : "U@s(1)";
        std::string o_name = tag == "k1" ? k1_order_name() : "<@s(1)";
        LimitBuilder builder(age, BuilderConfig{});
        builder.grow(500);
        const FinStructure& stage = builder.current();
        auto focus = first_u_elements(stage, u_name, 10);
        std::size_t missing_mid = 0, missing_ends = 0;
        for (Element x : focus) {
            for (Element y : focus) {
                if (!stage.has_tuple(o_name, Tuple{x, y})) continue;
                bool mid = false;
                for (Element z : stage.universe())
                    if (stage.has_tuple(o_name, Tuple{x, z}) &&
                        stage.has_tuple(o_name, Tuple{z, y}))
                        mid = true;
                if (!mid) ++missing_mid;
            }
            bool below = false, above = false;
            for (Element z : stage.universe()) {
                if (stage.has_tuple(o_name, Tuple{z, x})) below = true;
                if (stage.has_tuple(o_name, Tuple{x, z})) above = true;
            }
            if (!below || !above) ++missing_ends;
        }
        if (missing_mid != 0 || missing_ends != 0) ok = false;
        detail += tag + ": " + std::to_string(missing_mid) + "/" + std::to_string(missing_ends) +
                  " missing midpoints/ends; ";
    }
    report(3, "dense order without endpoints after 500 steps", ok, seconds_since(t0), detail);
}

// ---------------------------------------------------------------- 4
void criterion_star_soundness() {
    auto t0 = std::chrono::steady_clock::now();
    const TowerLevel& level = default_tower()->level(Notation::parse("s(1)"));
    LimitBuilder builder(level.age, BuilderConfig{});
    builder.grow(500);
    constexpr std::size_t kColoringLag = 450;  // the documented bound B
    std::size_t invalid_stages = 0;
    std::size_t late_colorings = 0;
    const auto& stages = builder.stages();
    for (std::size_t s = 0; s < stages.size(); ++s) {
        if (!validate_kb(level, stages[s].structure).empty()) ++invalid_stages;
    }
    // every vertex and vertex pair present at stage s is colored by s + B
    for (std::size_t s = 0; s < stages.size(); ++s) {
        std::size_t deadline = std::min(stages.size() - 1, s + kColoringLag);
        const FinStructure& now = stages[s].structure;
        const FinStructure& later = stages[deadline].structure;
        std::vector<Element> vs;
        for (Element e : now.universe())
            if (now.has_tuple("V@s(1)", Tuple{e})) vs.push_back(e);
        for (Element v : vs) {
            bool has_p = false;
            for (const auto& t : later.relation("P@s(1)"))
                if (t[0] == v) has_p = true;
            if (!has_p) ++late_colorings;
        }
        for (std::size_t x = 0; x < vs.size(); ++x)
            for (std::size_t y = x + 1; y < vs.size(); ++y) {
                bool has_f = false;
                for (const auto& t : later.relation("F@s(1)"))
                    if (t[0] == vs[x] && t[1] == vs[y]) has_f = true;
                if (!has_f) ++late_colorings;
            }
    }
    report(4, "edge law holds on every stage; colorings are total in time",
           invalid_stages == 0 && late_colorings == 0, seconds_since(t0),
           std::to_string(stages.size()) + " stages, " + std::to_string(invalid_stages) +
               " invalid, " + std::to_string(late_colorings) + " late colorings");
}

// ---------------------------------------------------------------- 5
void criterion_uniqueness() {
    auto t0 = std::chrono::steady_clock::now();
    AgeRepPtr age = age_by_tag("linorders");
    BuilderConfig first_cfg;
    first_cfg.schedule_token = 0;
    BuilderConfig second_cfg;
    second_cfg.schedule_token = 7;
    LimitBuilder first(age, first_cfg);
    LimitBuilder second(age, second_cfg);
    while (first.current().size() < 20) first.grow(4);
    while (second.current().size() < 20) second.grow(4);
    bool equivalent = bf_equivalent(first.current(), second.current(), 3);
    report(5, "two schedules are back-and-forth equivalent to depth 3",
           equivalent && first.current().size() >= 20 && second.current().size() >= 20,
           seconds_since(t0),
           "sizes " + std::to_string(first.current().size()) + " and " +
               std::to_string(second.current().size()));
}

// ---------------------------------------------------------------- 6
void criterion_homogeneity() {
    auto t0 = std::chrono::steady_clock::now();
    std::size_t disagreements = 0, checked = 0;
    for (const std::string tag :
         {std::string("linorders"), std::string("graphs"), std::string("k1")}) {
        LimitBuilder builder(age_by_tag(tag), BuilderConfig{});
        builder.grow(150);
        const FinStructure& stage = builder.current();
        auto firsts = first_elements(stage, 10);
        std::size_t n = firsts.size();
        // all injective maps with domain and range among the first ten
        std::function<void(std::size_t, std::vector<std::pair<Element, Element>>&)> rec =
            [&](std::size_t start, std::vector<std::pair<Element, Element>>& acc) {
                if (!acc.empty()) {
                    PartialMap f(acc);
                    if (f.injective()) {
                        ++checked;
                        if (builder.is_partial_iso(f) != induced_partial_iso(stage, f))
                            ++disagreements;
                    }
                }
                if (acc.size() >= 3) return;
                for (std::size_t src = start; src < n; ++src) {
                    for (std::size_t tgt = 0; tgt < n; ++tgt) {
                        acc.emplace_back(firsts[src], firsts[tgt]);
                        rec(src + 1, acc);
                        acc.pop_back();
                    }
                }
            };
        std::vector<std::pair<Element, Element>> acc;
        rec(0, acc);
    }
    report(6, "partial isomorphism decisions agree with the direct route", disagreements == 0,
           seconds_since(t0),
           std::to_string(checked) + " maps, " + std::to_string(disagreements) +
               " disagreements");
}

// ---------------------------------------------------------------- 7
void criterion_amalgamation() {
    auto t0 = std::chrono::steady_clock::now();
    const TowerLevel& level = default_tower()->level(Notation::parse("s(1)"));
    AgeCheckReport axioms = check_age_axioms(*level.age, 4, 30, 64);
    // independently validate a sample of emitted certificates
    std::size_t invalid_certs = 0;
    for (std::uint64_t a = 0; a <= 12; ++a) {
        FinStructure ma = level.age->member(BigNat(a));
        if (ma.size() > 3 || ma.size() == 0) continue;
        for (std::uint64_t c = 0; c <= 6; ++c) {
            FinStructure mc = level.age->member(BigNat(c));
            if (mc.size() >= ma.size()) continue;
            for (const auto& f : enumerate_embeddings(mc, ma)) {
                auto cert = search_amalgam(*level.age, BigNat(a), BigNat(a), BigNat(c), f, f, 64);
                if (!validate_kb(level, cert.d).empty()) ++invalid_certs;
            }
        }
    }
    report(7, "the successor age satisfies HP, JEP, AP; certificates are lawful",
           axioms.ok() && invalid_certs == 0, seconds_since(t0),
           std::to_string(axioms.hp_checked) + " HP, " + std::to_string(axioms.jep_checked) +
               " JEP, " + std::to_string(axioms.ap_checked) + " AP checks, " +
               std::to_string(axioms.issues.size()) + " issues, " +
               std::to_string(invalid_certs) + " bad certificates");
}

// ---------------------------------------------------------------- 8
void criterion_scott_surrogate() {
    auto t0 = std::chrono::steady_clock::now();
    auto vocab = std::make_shared<Vocabulary>();
    vocab->add_symbol(Symbol{"R", 2, "1"});
    vocab->add_symbol(Symbol{"U", 1, "1"});
    const std::vector<std::string> symbols{"R", "U"};

    struct Entry {
        FinStructure structure;
        std::size_t size;
        std::uint64_t canonical;
        scott::TupleTyping typing;
    };

    // canonical representatives of all structures up to isomorphism
    auto canonical_key = [](std::size_t n, std::size_t u_mask, std::size_t r_mask) {
        return (std::uint64_t{n} << 40) | (std::uint64_t{u_mask} << 32) | r_mask;
    };
    auto build = [&](std::size_t n, std::size_t u_mask, std::size_t r_mask) {
        FinStructure s(vocab);
        for (Element e = 0; e < static_cast<Element>(n); ++e) s.add_element(e);
        for (Element e = 0; e < static_cast<Element>(n); ++e)
            if ((u_mask >> e) & 1u) s.add_tuple("U", Tuple{e});
        std::size_t cell = 0;
        for (Element x = 0; x < static_cast<Element>(n); ++x)
            for (Element y = 0; y < static_cast<Element>(n); ++y, ++cell)
                if ((r_mask >> cell) & 1u) s.add_tuple("R", Tuple{x, y});
        return s;
    };
    auto canonicalize = [&](std::size_t n, std::size_t u_mask, std::size_t r_mask) {
        std::vector<Element> perm(n);
        for (std::size_t k = 0; k < n; ++k) perm[k] = static_cast<Element>(k);
        std::uint64_t best = canonical_key(n, u_mask, r_mask);
        do {
            std::size_t pu = 0, pr = 0;
            for (std::size_t e = 0; e < n; ++e)
                if ((u_mask >> e) & 1u) pu |= (std::size_t{1} << perm[e]);
            std::size_t cell = 0;
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y, ++cell)
                    if ((r_mask >> cell) & 1u)
                        pr |= (std::size_t{1} << (perm[x] * n + perm[y]));
            best = std::min(best, canonical_key(n, pu, pr));
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    };

    std::vector<Entry> candidates;  // |B| <= 4
    std::vector<std::size_t> base_indices;  // |A| <= 3 (nonempty)
    std::set<std::uint64_t> seen;
    for (std::size_t n = 0; n <= 4; ++n) {
        std::size_t cells = n * n;
        for (std::size_t u = 0; u < (std::size_t{1} << n); ++u) {
            for (std::size_t r = 0; r < (std::size_t{1} << cells); ++r) {
                std::uint64_t key = canonicalize(n, u, r);
                if (!seen.insert(key).second) continue;
                Entry entry{build(n, u, r), n, key, {}};
                entry.typing = scott::type_tuples(entry.structure, symbols, 4);
                if (n >= 1 && n <= 3) base_indices.push_back(candidates.size());
                candidates.push_back(std::move(entry));
            }
        }
    }

    std::size_t mismatches = 0, pairs = 0;
    for (std::size_t ai : base_indices) {
        const Entry& a = candidates[ai];
        scott::ExpansionSchema schema = scott::build_schema(a.structure);
        for (const Entry& b : candidates) {
            ++pairs;
            bool iso = (a.size == b.size) && (a.canonical == b.canonical);
            bool expandable =
                scott::check_expansion(schema, b.structure, &b.typing, &a.typing).expandable;
            if (expandable != iso) ++mismatches;
        }
    }
    report(8, "expandability coincides with isomorphism on the full corpus", mismatches == 0,
           seconds_since(t0),
           std::to_string(base_indices.size()) + " bases x " +
               std::to_string(candidates.size()) + " candidates = " + std::to_string(pairs) +
               " pairs, " + std::to_string(mismatches) + " mismatches");
}

// ---------------------------------------------------------------- 9
void criterion_diagonal() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(424242);
    std::size_t rounds = 100, failures_here = 0;
    for (std::size_t round = 0; round < rounds; ++round) {
        diagonal::EnumerationTrace trace;
        std::map<std::size_t, std::size_t> last_stage;
        std::size_t events = rng() % 12;
        for (std::size_t k = 0; k < events; ++k) {
            diagonal::TraceEvent event;
            event.e = rng() % 6;
            event.stage = last_stage[event.e] + 1 + rng() % 6;
            last_stage[event.e] = event.stage;
            event.i = rng() % 10;
            event.j = event.i + (rng() % 2);
            switch (rng() % 3) {
                case 0: event.map = PartialMap({{0, 0}, {1, 1}}); break;
                case 1: event.map = PartialMap({{0, 1}, {1, 0}}); break;
                default: event.map = PartialMap({{0, 0}}); break;
            }
            trace.events.push_back(std::move(event));
        }
        auto result = diagonal::run(trace, 5, 30);
        if (!diagonal::verify(result)) ++failures_here;
    }
    report(9, "the diagonal strategy wins against randomized traces", failures_here == 0,
           seconds_since(t0),
           std::to_string(rounds) + " traces, " + std::to_string(failures_here) + " losses");
}

// ---------------------------------------------------------------- 10
void criterion_tower_recursion() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    try {
        const TowerLevel& two = default_tower()->level(Notation::parse("s(s(1))"));
        if (!two.vocabulary->lookup("F@s(s(1))") || !two.vocabulary->lookup("F@s(1)")) {
            ok = false;
            detail += "missing marked generations; ";
        }
        const TowerLevel& lim = default_tower()->level(Notation::parse("lim(omega)"));
        // the order law of the limit members, read off block indices
        std::size_t law_violations = 0, sampled = 0;
        auto block_of = [&](const FinStructure& m, Element e) -> long {
            for (const auto& name : m.realized_symbols()) {
                if (name.rfind("Qn{", 0) != 0) continue;
                if (m.has_tuple(name, Tuple{e})) {
                    return std::stol(name.substr(3, name.find('}') - 3));
                }
            }
            return -1;
        };
        for (std::uint64_t i = 1; sampled < 50 && i <= 400; ++i) {
            FinStructure m = lim.age->member(BigNat(i));
            if (m.size() == 0) continue;
            ++sampled;
            std::vector<Element> us;
            for (Element e : m.universe())
                if (m.has_tuple("U@lim(omega)", Tuple{e})) us.push_back(e);
            for (Element x : us) {
                for (Element y : us) {
                    if (x == y) continue;
                    long bx = block_of(m, x), by = block_of(m, y);
                    bool expected;
                    if (bx != by) {
                        expected = bx < by;
                    } else {
                        const TowerLevel& lower =
                            default_tower()->level(Notation::parse("lim(omega)").fundamental_element(
                                static_cast<std::size_t>(bx)));
                        expected = m.has_tuple(lower.order_name, Tuple{x, y});
                    }
                    if (m.has_tuple("<@lim(omega)", Tuple{x, y}) != expected) ++law_violations;
                }
            }
        }
        if (law_violations != 0) ok = false;
        detail += std::to_string(sampled) + " members sampled, " +
                  std::to_string(law_violations) + " order-law violations";
    } catch (const std::exception& ex) {
        ok = false;
        detail += std::string("exception: ") + ex.what();
    }
    report(10, "transfinite recursion reaches s(s(1)) and lim(omega)", ok, seconds_since(t0),
           detail);
}

}  // namespace

int main() {
    criterion_engine_oracle();
    criterion_rado();
    criterion_dlo_shadow();
    criterion_star_soundness();
    criterion_uniqueness();
    criterion_homogeneity();
    criterion_amalgamation();
    criterion_scott_surrogate();
    criterion_diagonal();
    criterion_tower_recursion();
    if (failures == 0) {
        std::printf("acceptance: all criteria PASS\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failures);
    return 1;
}

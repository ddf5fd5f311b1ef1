#include "fraisse/diagonal.hpp"

#include <json.hpp>
#include <map>
#include <memory>

#include "fraisse/errors.hpp"

namespace fraisse::diagonal {

namespace {

std::string color_name(std::size_t n) { return "U{" + std::to_string(n) + "}"; }

VocabularyPtr make_diag_vocab() {
    auto vocab = std::make_shared<Vocabulary>();
    vocab->add_family(SymbolFamily{
        "colors",
        [](const std::string& name) -> std::optional<Symbol> {
            if (name.size() < 4 || name.rfind("U{", 0) != 0 || name.back() != '}')
                return std::nullopt;
            for (std::size_t k = 2; k + 1 < name.size(); ++k)
                if (name[k] < '0' || name[k] > '9') return std::nullopt;
            return Symbol{name, 1, "1"};
        },
        [](std::size_t k) -> std::optional<Symbol> { return Symbol{color_name(k), 1, "1"}; }});
    return vocab;
}

/// The age of finite structures where each element carries at most one
/// color. Small indices are pinned by the requirements; the rest is a
/// canonical listing (uncolored count paired with a set of colors).
class DiagonalAge : public AgeRep {
public:
    DiagonalAge(VocabularyPtr vocab, std::vector<FinStructure> pinned)
        : AgeRep("diagonal", std::move(vocab)), pinned_(std::move(pinned)) {}

    FinStructure member(const BigNat& index) const override {
        if (index < BigNat(pinned_.size())) {
            return pinned_[static_cast<std::size_t>(index.to_u64())];
        }
        BigNat rest = index - BigNat(pinned_.size());
        auto [uncolored, colors] = pair_decode(rest);
        if (!uncolored.fits_u64() || uncolored.to_u64() > 4096)
            throw BoundExceeded("diagonal member beyond the desk scale");
        FinStructure s(vocabulary());
        Element next = 0;
        for (std::size_t k = 0; k < uncolored.to_u64(); ++k) s.add_element(next++);
        for (std::size_t n : set_decode(colors)) {
            s.add_element(next);
            s.add_tuple(color_name(n), Tuple{next});
            ++next;
        }
        return s;
    }

    bool decide_embedding(const BigNat& i, const BigNat& j, const PartialMap& f) const override {
        FinStructure a = member(i);
        FinStructure b = member(j);
        if (f.domain() != a.universe() || !f.injective()) return false;
        for (Element e : f.range())
            if (!b.contains(e)) return false;
        return is_embedding(f, a, b);
    }

private:
    std::vector<FinStructure> pinned_;
};

}  // namespace

EnumerationTrace parse_trace(const std::string& json_text) {
    EnumerationTrace trace;
    auto doc = nlohmann::json::parse(json_text);
    std::map<std::size_t, std::size_t> last_stage;
    for (const auto& entry : doc.at("events")) {
        TraceEvent event;
        event.stage = entry.at("stage").get<std::size_t>();
        event.e = entry.at("e").get<std::size_t>();
        event.i = entry.at("i").get<std::size_t>();
        event.j = entry.at("j").get<std::size_t>();
        std::vector<std::pair<Element, Element>> pairs;
        for (const auto& p : entry.at("map"))
            pairs.emplace_back(p.at(0).get<Element>(), p.at(1).get<Element>());
        event.map = PartialMap(std::move(pairs));
        auto it = last_stage.find(event.e);
        if (it != last_stage.end() && event.stage <= it->second)
            throw Error("trace stages must be strictly increasing per requirement");
        last_stage[event.e] = event.stage;
        trace.events.push_back(std::move(event));
    }
    return trace;
}

std::string encode_trace(const EnumerationTrace& trace) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& event : trace.events) {
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto& [s, t] : event.map.pairs()) pairs.push_back({s, t});
        events.push_back({{"stage", event.stage},
                          {"e", event.e},
                          {"i", event.i},
                          {"j", event.j},
                          {"map", pairs}});
    }
    return nlohmann::json{{"events", events}}.dump(2);
}

DiagonalReport run(const EnumerationTrace& trace, std::size_t requirements, std::size_t stages) {
    const PartialMap identity2({{0, 0}, {1, 1}});
    // run long enough that every event of the finite trace is seen
    std::size_t horizon = stages;
    for (const auto& event : trace.events) horizon = std::max(horizon, event.stage + 1);

    struct State {
        bool fired = false;
        std::size_t fired_stage = 0;
        std::size_t color_given = 0;
    };
    std::vector<State> states(requirements);
    for (std::size_t s = 0; s < horizon; ++s) {
        for (const auto& event : trace.events) {
            if (event.stage != s || event.e >= requirements) continue;
            State& state = states[event.e];
            if (state.fired) continue;
            if (event.i != 2 * event.e || event.j != 2 * event.e + 1) continue;
            if (!(event.map == identity2)) continue;
            // the vow: color 0 with the first color not yet denied; the
            // diagram enumerated so far denies colors below the stage
            state.fired = true;
            state.fired_stage = s;
            state.color_given = s + 1;
        }
    }

    VocabularyPtr vocab = make_diag_vocab();
    std::vector<FinStructure> pinned(2 * requirements, FinStructure(vocab));
    DiagonalReport report;
    for (std::size_t e = 0; e < requirements; ++e) {
        FinStructure low(vocab);   // C_{2e}: universe {0, 1}
        FinStructure high(vocab);  // C_{2e+1}: universe {0, 1, 2}
        low.add_element(0);
        low.add_element(1);
        low.add_tuple(color_name(2 * e), Tuple{1});
        high.add_element(0);
        high.add_element(1);
        high.add_element(2);
        high.add_tuple(color_name(2 * e), Tuple{1});
        high.add_tuple(color_name(2 * e + 1), Tuple{2});
        if (states[e].fired) low.add_tuple(color_name(states[e].color_given), Tuple{0});
        pinned[2 * e] = low;
        pinned[2 * e + 1] = high;

        RequirementReport entry;
        entry.e = e;
        entry.pair_low = 2 * e;
        entry.fired = states[e].fired;
        entry.fired_stage = states[e].fired_stage;
        entry.identity_is_embedding = is_embedding(identity2, low, high);
        entry.trace_contains_triple = false;
        for (const auto& event : trace.events) {
            if (event.e == e && event.i == 2 * e && event.j == 2 * e + 1 &&
                event.map == identity2)
                entry.trace_contains_triple = true;
        }
        report.requirements.push_back(entry);
    }
    report.age = std::make_shared<DiagonalAge>(vocab, std::move(pinned));
    return report;
}

bool verify(const DiagonalReport& report) {
    const PartialMap identity2({{0, 0}, {1, 1}});
    for (const auto& entry : report.requirements) {
        FinStructure low = report.age->member(BigNat(entry.pair_low));
        FinStructure high = report.age->member(BigNat(entry.pair_low + 1));
        bool embeds = is_embedding(identity2, low, high);
        if (embeds == entry.trace_contains_triple) return false;
    }
    return true;
}

}  // namespace fraisse::diagonal

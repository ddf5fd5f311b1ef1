#include "fraisse/engine.hpp"

#include <algorithm>
#include <map>

#include "fraisse/errors.hpp"

namespace fraisse {

bool induced_partial_iso(const FinStructure& s, const PartialMap& f) {
    if (!f.injective()) return false;
    for (Element e : f.domain())
        if (!s.contains(e)) return false;
    for (Element e : f.range())
        if (!s.contains(e)) return false;
    const auto dom = f.domain();
    if (dom.empty()) return true;
    for (const auto& name : s.realized_symbols()) {
        unsigned arity = s.vocabulary() ? s.vocabulary()->require(name).arity
                                        : static_cast<unsigned>(s.relation(name).begin()->size());
        std::vector<std::size_t> idx(arity, 0);
        while (true) {
            Tuple t(arity);
            for (unsigned k = 0; k < arity; ++k) t[k] = dom[idx[k]];
            Tuple img = *f.apply_tuple(t);
            if (s.has_tuple(name, t) != s.has_tuple(name, img)) return false;
            unsigned pos = arity;
            while (pos > 0) {
                if (++idx[pos - 1] < dom.size()) break;
                idx[pos - 1] = 0;
                --pos;
            }
            if (pos == 0) break;
        }
    }
    return true;
}

namespace {

/// Per-stage lookup structure: unary color sets per element plus the short
/// list of realized non-unary symbols. Stages carry arbitrarily many unary
/// colors, so embedding scans go through this instead of the relation map.
struct StageIndex {
    const FinStructure* stage = nullptr;
    std::map<Element, std::vector<std::string>> unary;
    std::vector<std::pair<std::string, unsigned>> non_unary;

    explicit StageIndex(const FinStructure& s) : stage(&s) {
        for (const auto& name : s.realized_symbols()) {
            unsigned arity = s.vocabulary() ? s.vocabulary()->require(name).arity
                                            : static_cast<unsigned>(
                                                  s.relation(name).begin()->size());
            if (arity == 1) {
                for (const auto& t : s.relation(name)) unary[t[0]].push_back(name);
            } else {
                non_unary.emplace_back(name, arity);
            }
        }
        for (auto& [e, names] : unary) std::sort(names.begin(), names.end());
    }

    const std::vector<std::string>& colors(Element e) const {
        static const std::vector<std::string> kNone;
        auto it = unary.find(e);
        return it == unary.end() ? kNone : it->second;
    }
};

std::map<Element, std::vector<std::string>> unary_of(const FinStructure& s) {
    std::map<Element, std::vector<std::string>> out;
    for (const auto& name : s.realized_symbols()) {
        unsigned arity = s.vocabulary() ? s.vocabulary()->require(name).arity
                                        : static_cast<unsigned>(s.relation(name).begin()->size());
        if (arity != 1) continue;
        for (const auto& t : s.relation(name)) out[t[0]].push_back(name);
    }
    for (auto& [e, names] : out) std::sort(names.begin(), names.end());
    return out;
}

/// Is `cand` (total on pattern's universe) an embedding of `pattern` into
/// the indexed stage? Exact: unary sets compared per element, non-unary
/// relations compared over all pattern-universe tuples in both directions.
bool embeds_via(const StageIndex& idx, const FinStructure& pattern,
                const std::map<Element, std::vector<std::string>>& pattern_unary,
                const PartialMap& cand) {
    if (!cand.injective()) return false;
    static const std::vector<std::string> kNone;
    for (Element q : pattern.universe()) {
        auto it = pattern_unary.find(q);
        const auto& want = it == pattern_unary.end() ? kNone : it->second;
        if (want != idx.colors(*cand.apply(q))) return false;
    }
    // non-unary symbols realized on either side
    std::vector<std::pair<std::string, unsigned>> symbols = idx.non_unary;
    for (const auto& name : pattern.realized_symbols()) {
        unsigned arity = pattern.vocabulary()
                             ? pattern.vocabulary()->require(name).arity
                             : static_cast<unsigned>(pattern.relation(name).begin()->size());
        if (arity == 1) continue;
        bool known = false;
        for (const auto& [n, a] : symbols)
            if (n == name) known = true;
        if (!known) symbols.emplace_back(name, arity);
    }
    const auto& dom = pattern.universe();
    if (dom.empty()) return true;
    for (const auto& [name, arity] : symbols) {
        std::vector<std::size_t> pos(arity, 0);
        while (true) {
            Tuple t(arity);
            for (unsigned k = 0; k < arity; ++k) t[k] = dom[pos[k]];
            Tuple img = *cand.apply_tuple(t);
            if (pattern.has_tuple(name, t) != idx.stage->has_tuple(name, img)) return false;
            unsigned p = arity;
            while (p > 0) {
                if (++pos[p - 1] < dom.size()) break;
                pos[p - 1] = 0;
                --p;
            }
            if (p == 0) break;
        }
    }
    return true;
}

/// Partial isomorphism of the stage through the index (same semantics as
/// induced_partial_iso, cheaper on color-heavy stages).
bool partial_iso_via(const StageIndex& idx, const PartialMap& f) {
    if (!f.injective()) return false;
    const auto dom = f.domain();
    for (Element e : dom) {
        if (!idx.stage->contains(e) || !idx.stage->contains(*f.apply(e))) return false;
        if (idx.colors(e) != idx.colors(*f.apply(e))) return false;
    }
    if (dom.empty()) return true;
    for (const auto& [name, arity] : idx.non_unary) {
        std::vector<std::size_t> pos(arity, 0);
        while (true) {
            Tuple t(arity);
            for (unsigned k = 0; k < arity; ++k) t[k] = dom[pos[k]];
            Tuple img = *f.apply_tuple(t);
            if (idx.stage->has_tuple(name, t) != idx.stage->has_tuple(name, img)) return false;
            unsigned p = arity;
            while (p > 0) {
                if (++pos[p - 1] < dom.size()) break;
                pos[p - 1] = 0;
                --p;
            }
            if (p == 0) break;
        }
    }
    return true;
}

/// Backtracking embedding search of a small pattern into the indexed
/// stage, lexicographically least image first.
bool search_indexed(const StageIndex& idx, const FinStructure& pattern,
                    const std::map<Element, std::vector<std::string>>& pattern_unary,
                    std::vector<std::pair<Element, Element>>& assigned, std::size_t depth,
                    PartialMap& out) {
    const auto& dom = pattern.universe();
    if (depth == dom.size()) {
        out = PartialMap(assigned);
        return true;
    }
    Element q = dom[depth];
    static const std::vector<std::string> kNone;
    auto want_it = pattern_unary.find(q);
    const auto& want = want_it == pattern_unary.end() ? kNone : want_it->second;
    for (Element y : idx.stage->universe()) {
        bool used = false;
        for (const auto& [s, t] : assigned)
            if (t == y) used = true;
        if (used) continue;
        if (idx.colors(y) != want) continue;
        assigned.emplace_back(q, y);
        // check non-unary tuples that just became fully assigned
        PartialMap partial(assigned);
        bool ok = true;
        for (const auto& [name, arity] : idx.non_unary) {
            if (!ok) break;
            std::vector<Element> adom = partial.domain();
            std::vector<std::size_t> pos(arity, 0);
            while (ok) {
                Tuple t(arity);
                bool involves = false;
                for (unsigned k = 0; k < arity; ++k) {
                    t[k] = adom[pos[k]];
                    if (t[k] == q) involves = true;
                }
                if (involves) {
                    Tuple img = *partial.apply_tuple(t);
                    if (pattern.has_tuple(name, t) != idx.stage->has_tuple(name, img)) ok = false;
                }
                unsigned p = arity;
                while (p > 0) {
                    if (++pos[p - 1] < adom.size()) break;
                    pos[p - 1] = 0;
                    --p;
                }
                if (p == 0) break;
            }
        }
        if (ok) {
            for (const auto& name : pattern.realized_symbols()) {
                if (!ok) break;
                unsigned arity =
                    pattern.vocabulary()
                        ? pattern.vocabulary()->require(name).arity
                        : static_cast<unsigned>(pattern.relation(name).begin()->size());
                if (arity == 1) continue;
                for (const auto& t : pattern.relation(name)) {
                    if (std::find(t.begin(), t.end(), q) == t.end()) continue;
                    auto img = partial.apply_tuple(t);
                    if (img && !idx.stage->has_tuple(name, *img)) {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if (ok && search_indexed(idx, pattern, pattern_unary, assigned, depth + 1, out))
            return true;
        assigned.pop_back();
    }
    return false;
}

std::optional<PartialMap> find_embedding_indexed(const StageIndex& idx,
                                                 const FinStructure& pattern) {
    auto pattern_unary = unary_of(pattern);
    std::vector<std::pair<Element, Element>> assigned;
    PartialMap out;
    if (!search_indexed(idx, pattern, pattern_unary, assigned, 0, out)) return std::nullopt;
    if (!embeds_via(idx, pattern, pattern_unary, out))
        throw Error("internal: indexed embedding search produced a non-embedding");
    return out;
}

}  // namespace

LimitBuilder::LimitBuilder(AgeRepPtr age, BuilderConfig cfg)
    : age_(std::move(age)), cfg_(cfg) {
    if (cfg_.smoke_check) {
        AgeCheckReport smoke = check_age_axioms(*age_, cfg_.smoke_size_bound,
                                                cfg_.smoke_index_bound, cfg_.amalgam_budget);
        if (!smoke.ok())
            throw DefectiveAge("age '" + age_->tag() + "' failed the smoke check: " +
                               smoke.issues.front().axiom + ": " + smoke.issues.front().detail);
    }
    FinStructure empty(age_->vocabulary());
    auto id = age_->identify(empty);
    if (!id) throw DefectiveAge("age '" + age_->tag() + "' does not enumerate the empty structure");
    stages_.push_back({std::move(empty), id->index, id->iso});
}

void LimitBuilder::push_stage(FinStructure next) {
    auto id = age_->identify(next);
    if (!id) throw Error("stage is not recognized as a member of age '" + age_->tag() + "'");
    stages_.push_back({std::move(next), id->index, id->iso});
}

std::optional<Element> LimitBuilder::extension_witness(const PartialMap& p, Element x) const {
    const FinStructure& stage = current();
    StageIndex idx(stage);
    auto taken = p.range();
    for (Element y : stage.universe()) {
        if (std::binary_search(taken.begin(), taken.end(), y)) continue;
        if (partial_iso_via(idx, p.extended(x, y))) return y;
    }
    return std::nullopt;
}

bool LimitBuilder::realize_extension(const PartialMap& p, Element x) {
    if (extension_witness(p, x)) return false;  // already realized, no growth
    const FinStructure& stage = current();
    FinStructure side_c = substructure(stage, p.domain());
    std::vector<Element> dom_x = p.domain();
    dom_x.push_back(x);
    std::sort(dom_x.begin(), dom_x.end());
    dom_x.erase(std::unique(dom_x.begin(), dom_x.end()), dom_x.end());
    FinStructure side_b = substructure(stage, dom_x);
    Amalgam am = age_->amalgamate(stage, side_b, side_c, p, PartialMap::identity(p.domain()));
    push_stage(std::move(am.d));
    return true;
}

void LimitBuilder::run_embed_member(const BigNat& index) {
    FinStructure m = age_->member(index);
    const FinStructure& stage = current();
    if (age_->has_embedding_search()) {
        if (age_->find_member_embedding(m, stage)) return;
    } else {
        StageIndex idx(stage);
        if (find_embedding_indexed(idx, m)) return;  // the obligation already holds
    }
    push_stage(age_->extend_to_embed(stage, m));
}

void LimitBuilder::execute(const Task& task) {
    if (task.kind == Task::Kind::EmbedMember) {
        run_embed_member(task.member_index);
        return;
    }
    PartialMap p = task.iso;
    if (task.side == Task::Side::Range) p = p.inverse();
    if (p.defined_on(task.point)) return;
    realize_extension(p, task.point);
}

void LimitBuilder::scan_goals() {
    // backpressure: emit only what the queue can absorb, so that pending
    // work stays small and every task executes close to its birth stage
    std::size_t cap = cfg_.goal_batch + 4;
    if (queue_.size() >= cap) return;
    std::size_t room = std::min(cfg_.goal_batch, cap - queue_.size());
    std::vector<ExtensionGoal> goals;
    age_->emit_goals(current(), tracker_, goals, room);
    if (goals.empty()) return;
    std::rotate(goals.begin(),
                goals.begin() + static_cast<std::ptrdiff_t>(cfg_.schedule_token % goals.size()),
                goals.end());
    const FinStructure& stage = current();
    StageIndex idx(stage);
    const bool prechecked = age_->goals_prechecked();
    for (const auto& goal : goals) {
        if (tracker_.seen(goal.key)) continue;
        if (!prechecked) {
            auto pattern_unary = unary_of(goal.pattern);
            bool satisfied = false;
            for (Element y : stage.universe()) {
                PartialMap candidate = goal.base_map.extended(goal.fresh_point, y);
                if (embeds_via(idx, goal.pattern, pattern_unary, candidate)) {
                    satisfied = true;
                    break;
                }
            }
            if (satisfied) {
                tracker_.mark(goal.key);
                continue;
            }
        }
        std::optional<PartialMap> w = age_->has_embedding_search()
                                          ? age_->find_member_embedding(goal.pattern, stage)
                                          : find_embedding_indexed(idx, goal.pattern);
        if (w) {
            std::vector<std::pair<Element, Element>> pairs;
            for (Element q : goal.pattern.universe()) {
                if (q == goal.fresh_point) continue;
                pairs.emplace_back(*w->apply(q), *goal.base_map.apply(q));
            }
            Task task;
            task.kind = Task::Kind::ExtendIso;
            task.iso = PartialMap(std::move(pairs));
            task.point = *w->apply(goal.fresh_point);
            task.side = Task::Side::Domain;
            task.born_stage = stages_.size() - 1;
            queue_.push_back(std::move(task));
            tracker_.mark(goal.key);
        } else if (auto id = age_->identify(goal.pattern)) {
            if (requested_members_.insert(id->index).second) {
                Task task;
                task.kind = Task::Kind::EmbedMember;
                task.member_index = id->index;
                task.born_stage = stages_.size() - 1;
                queue_.push_back(std::move(task));
            }
            // goal key stays unmarked: retried once the pattern is realized
        }
    }
}

const FinStructure& LimitBuilder::grow(std::size_t steps) {
    for (std::size_t step = 0; step < steps; ++step) {
        std::size_t clock = steps_executed_;
        if ((clock + cfg_.schedule_token) % cfg_.inject_period == 0) {
            Task task;
            task.kind = Task::Kind::EmbedMember;
            task.member_index = next_member_;
            task.born_stage = stages_.size() - 1;
            queue_.push_back(std::move(task));
            ++next_member_;
        }
        scan_goals();
        if (queue_.empty()) {
            Task task;
            task.kind = Task::Kind::EmbedMember;
            task.member_index = next_member_;
            task.born_stage = stages_.size() - 1;
            queue_.push_back(std::move(task));
            ++next_member_;
        }
        max_queue_ = std::max(max_queue_, queue_.size());
        Task task = queue_.front();
        queue_.pop_front();
        execute(task);
        ++steps_executed_;
        std::size_t lag = (stages_.size() - 1) - task.born_stage;
        max_lag_ = std::max(max_lag_, lag);
    }
    return current();
}

bool LimitBuilder::decide_E_limit(const BigNat& i, const PartialMap& f) const {
    for (Element e : f.range()) {
        if (!current().contains(e))
            throw RangeNotBuilt("decide_E_limit: range point " + std::to_string(e) +
                                " is not realized yet");
    }
    std::size_t s = 0;
    for (; s < stages_.size(); ++s) {
        bool covered = true;
        for (Element e : f.range())
            if (!stages_[s].structure.contains(e)) covered = false;
        if (covered) break;
    }
    const StageRecord& rec = stages_[s];
    PartialMap g = PartialMap::compose(rec.witness_map.inverse(), f);
    return age_->decide_embedding(i, rec.witness_index, g);
}

bool LimitBuilder::is_partial_iso(const PartialMap& f) const {
    for (Element e : f.domain())
        if (!current().contains(e)) throw RangeNotBuilt("is_partial_iso: domain point not realized");
    for (Element e : f.range())
        if (!current().contains(e)) throw RangeNotBuilt("is_partial_iso: range point not realized");
    if (!f.injective()) return false;
    FinStructure dom_sub = substructure(current(), f.domain());
    auto id = age_->identify(dom_sub);
    if (!id) return false;
    PartialMap h = PartialMap::compose(f, id->iso);
    return decide_E_limit(id->index, h);
}

PartialMap LimitBuilder::extend_iso(const PartialMap& f, Element x, Task::Side side,
                                    std::size_t budget) {
    if (!is_partial_iso(f)) throw PreconditionFailed("extend_iso: f is not a partial isomorphism");
    if (!current().contains(x)) throw PreconditionFailed("extend_iso: point is not realized");
    PartialMap p = (side == Task::Side::Range) ? f.inverse() : f;
    if (p.defined_on(x)) return f;
    for (std::size_t attempt = 0; attempt <= budget; ++attempt) {
        if (auto y = extension_witness(p, x)) {
            PartialMap grown = p.extended(x, *y);
            return (side == Task::Side::Range) ? grown.inverse() : grown;
        }
        realize_extension(p, x);
    }
    throw BudgetExhausted("extend_iso: no witness realized within budget");
}

}  // namespace fraisse

#pragma once

#include <deque>
#include <set>
#include <unordered_set>
#include <vector>

#include "fraisse/age.hpp"

namespace fraisse {

/// A pending construction obligation. EmbedMember(i) demands an embedding
/// of member(i) into some stage; ExtendIso(p, x, side) demands the
/// one-point back-and-forth extension of the realized partial isomorphism p.
struct Task {
    enum class Kind { EmbedMember, ExtendIso };
    enum class Side { Domain, Range };

    Kind kind = Kind::EmbedMember;
    BigNat member_index;
    PartialMap iso;
    Element point = 0;
    Side side = Side::Domain;
    std::size_t born_stage = 0;
};

/// One link of the chain: the stage structure together with the witness
/// pair (i_s, f_s), f_s an isomorphism from member(i_s) onto the stage.
struct StageRecord {
    FinStructure structure;
    BigNat witness_index;
    PartialMap witness_map;
};

struct BuilderConfig {
    std::uint64_t schedule_token = 0;
    std::size_t inject_period = 4;    // EmbedMember stream injection rate
    std::size_t goal_batch = 8;       // extension goals examined per step
    std::size_t amalgam_budget = 64;  // smoke-check amalgam search budget
    std::size_t smoke_size_bound = 2;
    std::size_t smoke_index_bound = 8;
    bool smoke_check = true;
};

/// The uniform effective procedure: from an age representation with a
/// total embedding decider, build the chain of finite stages whose union
/// is the Fraisse limit, decide embeddings into the limit, and decide
/// partial isomorphism. Queue discipline is FIFO with lazy injection;
/// with batch bound G = goal_batch + 2 per step, a task born at stage s
/// is executed by stage s + (G+1)(s+1) (the documented queue bound).
class LimitBuilder {
public:
    explicit LimitBuilder(AgeRepPtr age, BuilderConfig cfg = {});

    const AgeRepPtr& age() const { return age_; }
    const BuilderConfig& config() const { return cfg_; }

    /// Executes `steps` tasks in fair order and returns the current stage.
    const FinStructure& grow(std::size_t steps);

    const FinStructure& current() const { return stages_.back().structure; }
    const std::vector<StageRecord>& stages() const { return stages_; }

    /// (i, f) in E(K, A)? Decided by pulling f back through the witness
    /// isomorphism of the first stage containing ran(f).
    bool decide_E_limit(const BigNat& i, const PartialMap& f) const;

    /// Effective homogeneity: is f a partial isomorphism of the limit?
    bool is_partial_iso(const PartialMap& f) const;

    /// One-point extension of a partial isomorphism, growing the chain if
    /// no witness is realized yet.
    PartialMap extend_iso(const PartialMap& f, Element x, Task::Side side,
                          std::size_t budget = 4);

    std::size_t steps_executed() const { return steps_executed_; }
    std::size_t max_queue_length() const { return max_queue_; }
    std::size_t max_task_lag() const { return max_lag_; }

private:
    AgeRepPtr age_;
    BuilderConfig cfg_;
    std::vector<StageRecord> stages_;
    std::deque<Task> queue_;
    GoalTracker tracker_;
    std::unordered_set<BigNat, BigNatHash> requested_members_;
    BigNat next_member_;
    std::size_t steps_executed_ = 0;
    std::size_t max_queue_ = 0;
    std::size_t max_lag_ = 0;

    void push_stage(FinStructure next);
    void execute(const Task& task);
    void run_embed_member(const BigNat& index);
    bool realize_extension(const PartialMap& p, Element x);
    void scan_goals();
    std::optional<Element> extension_witness(const PartialMap& p, Element x) const;
};

/// Induced partial isomorphism check against a single structure: f maps
/// the substructure on dom(f) isomorphically onto the substructure on
/// ran(f). The direct route used to cross-check the engine's decision.
bool induced_partial_iso(const FinStructure& s, const PartialMap& f);

}  // namespace fraisse

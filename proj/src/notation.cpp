#include "fraisse/notation.hpp"

#include <map>
#include <mutex>

#include "fraisse/errors.hpp"

namespace fraisse {

std::string OrdinalValue::to_string() const {
    if (limit_part == 0) return std::to_string(finite_part);
    std::string out = limit_part == 1 ? "w" : ("w*" + std::to_string(limit_part));
    if (finite_part != 0) out += "+" + std::to_string(finite_part);
    return out;
}

struct Notation::Node {
    Form form = Form::One;
    std::shared_ptr<const Node> pred;
    std::string seq_name;
    std::string text = "1";
    std::optional<OrdinalValue> value;
};

namespace {

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

std::map<std::string, FundamentalSequence>& registry() {
    static std::map<std::string, FundamentalSequence> r;
    return r;
}

}  // namespace

Notation Notation::one() {
    auto node = std::make_shared<Node>();
    node->form = Form::One;
    node->text = "1";
    node->value = OrdinalValue{0, 0};
    return Notation(node);
}

Notation Notation::successor(const Notation& a) {
    auto node = std::make_shared<Node>();
    node->form = Form::Succ;
    node->pred = a.node_;
    node->text = "s(" + a.text() + ")";
    if (a.ordinal_value()) {
        OrdinalValue v = *a.ordinal_value();
        ++v.finite_part;
        node->value = v;
    }
    return Notation(node);
}

Notation Notation::limit(const std::string& sequence_name) {
    const FundamentalSequence& seq = fundamental_sequence(sequence_name);
    auto node = std::make_shared<Node>();
    node->form = Form::Lim;
    node->seq_name = sequence_name;
    node->text = "lim(" + sequence_name + ")";
    node->value = seq.limit_value;
    return Notation(node);
}

Notation Notation::parse(const std::string& text) {
    ensure_default_sequences();
    if (text == "1") return one();
    if (text.rfind("s(", 0) == 0 && text.back() == ')')
        return successor(parse(text.substr(2, text.size() - 3)));
    if (text.rfind("lim(", 0) == 0 && text.back() == ')')
        return limit(text.substr(4, text.size() - 5));
    throw Error("cannot parse notation: " + text);
}

Notation::Form Notation::form() const { return node_->form; }

Notation Notation::pred() const {
    if (node_->form != Form::Succ) throw Error("pred: notation is not a successor");
    return Notation(node_->pred);
}

Notation Notation::fundamental_element(std::size_t n) const {
    if (node_->form != Form::Lim)
        throw NotLimit("fundamental_element: notation " + text() + " is not a limit");
    return fundamental_sequence(node_->seq_name).generator(n);
}

const std::string& Notation::sequence_name() const {
    if (node_->form != Form::Lim) throw NotLimit("sequence_name: notation is not a limit");
    return node_->seq_name;
}

const std::string& Notation::text() const { return node_->text; }

std::optional<OrdinalValue> Notation::ordinal_value() const { return node_->value; }

namespace {

// a <_O b, tracking whether a limit search hit the horizon
bool less_O(const Notation& a, const Notation& b, std::size_t horizon, bool& horizon_hit) {
    switch (b.form()) {
        case Notation::Form::One:
            return false;
        case Notation::Form::Succ: {
            Notation y = b.pred();
            return a == y || less_O(a, y, horizon, horizon_hit);
        }
        case Notation::Form::Lim: {
            for (std::size_t n = 0; n <= horizon; ++n) {
                Notation sn = b.fundamental_element(n);
                if (a == sn || less_O(a, sn, horizon, horizon_hit)) return true;
            }
            horizon_hit = true;
            return false;
        }
    }
    return false;
}

}  // namespace

OrdCompare compare_O(const Notation& a, const Notation& b, std::size_t horizon) {
    if (a == b) return OrdCompare::Equal;
    bool hit = false;
    if (less_O(a, b, horizon, hit)) return OrdCompare::Less;
    if (less_O(b, a, horizon, hit)) return OrdCompare::Greater;
    if (hit)
        throw HorizonExceeded("compare_O: limit search exhausted the horizon without resolving " +
                              a.text() + " vs " + b.text());
    return OrdCompare::Incomparable;
}

void register_fundamental_sequence(FundamentalSequence seq) {
    // validate a prefix: strictly increasing, successor-form outputs
    constexpr std::size_t kPrefix = 8;
    for (std::size_t n = 0; n < kPrefix; ++n) {
        Notation cur = seq.generator(n);
        if (cur.form() != Notation::Form::Succ)
            throw Error("fundamental sequence '" + seq.name +
                        "' emits a non-successor notation at position " + std::to_string(n));
        bool hit = false;
        Notation next = seq.generator(n + 1);
        if (cur == next || (!less_O(cur, next, 16, hit) && !hit))
            throw Error("fundamental sequence '" + seq.name + "' is not <_O-increasing at " +
                        std::to_string(n));
    }
    std::lock_guard<std::mutex> lock(registry_mutex());
    registry().emplace(seq.name, std::move(seq));
}

const FundamentalSequence& fundamental_sequence(const std::string& name) {
    ensure_default_sequences();
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = registry().find(name);
    if (it == registry().end()) throw Error("unregistered fundamental sequence: " + name);
    return it->second;
}

std::vector<std::string> registered_sequence_names() {
    ensure_default_sequences();
    std::lock_guard<std::mutex> lock(registry_mutex());
    std::vector<std::string> names;
    for (const auto& [name, seq] : registry()) names.push_back(name);
    return names;
}

void ensure_default_sequences() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        auto iterate = [](Notation base, std::size_t n) {
            Notation cur = std::move(base);
            for (std::size_t k = 0; k <= n; ++k) cur = Notation::successor(cur);
            return cur;
        };
        {
            // omega: n -> n+1 applications of successor to 1
            FundamentalSequence seq;
            seq.name = "omega";
            seq.generator = [iterate](std::size_t n) { return iterate(Notation::one(), n); };
            seq.limit_value = OrdinalValue{1, 0};
            std::lock_guard<std::mutex> lock(registry_mutex());
            registry().emplace(seq.name, std::move(seq));
        }
        {
            // omega + omega
            FundamentalSequence seq;
            seq.name = "omega2";
            seq.generator = [iterate](std::size_t n) {
                return iterate(Notation::limit("omega"), n);
            };
            seq.limit_value = OrdinalValue{2, 0};
            std::lock_guard<std::mutex> lock(registry_mutex());
            registry().emplace(seq.name, std::move(seq));
        }
        {
            // omega * 3
            FundamentalSequence seq;
            seq.name = "omega3";
            seq.generator = [iterate](std::size_t n) {
                return iterate(Notation::limit("omega2"), n);
            };
            seq.limit_value = OrdinalValue{3, 0};
            std::lock_guard<std::mutex> lock(registry_mutex());
            registry().emplace(seq.name, std::move(seq));
        }
    });
}

}  // namespace fraisse

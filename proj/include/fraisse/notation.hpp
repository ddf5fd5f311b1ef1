#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fraisse {

/// Small ordinal descriptor: omega * limit_part + finite_part. Enough for
/// the shipped registry (everything below omega * 4).
struct OrdinalValue {
    unsigned limit_part = 0;
    unsigned finite_part = 0;

    bool operator==(const OrdinalValue&) const = default;
    std::string to_string() const;
};

/// Desk-scale ordinal notation: 1, successor, or a limit over a registered
/// fundamental sequence. No genuine Godel numbering is attempted; a limit
/// carries a name resolved through the sequence registry.
class Notation {
public:
    enum class Form { One, Succ, Lim };

    static Notation one();
    static Notation successor(const Notation& a);
    static Notation limit(const std::string& sequence_name);
    static Notation parse(const std::string& text);

    Form form() const;
    /// Succ only.
    Notation pred() const;
    /// Lim only; returns the n-th element of the registered sequence.
    Notation fundamental_element(std::size_t n) const;
    const std::string& sequence_name() const;

    const std::string& text() const;
    std::optional<OrdinalValue> ordinal_value() const;

    bool operator==(const Notation& rhs) const { return text() == rhs.text(); }
    bool operator!=(const Notation& rhs) const = default;

private:
    struct Node;
    std::shared_ptr<const Node> node_;
    explicit Notation(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
};

enum class OrdCompare { Less, Equal, Greater, Incomparable };

/// Structural <_O comparison. Limit comparisons search the fundamental
/// sequence up to `horizon` and report HorizonExceeded when the search is
/// inconclusive rather than guessing.
OrdCompare compare_O(const Notation& a, const Notation& b, std::size_t horizon = 64);

struct FundamentalSequence {
    std::string name;
    std::function<Notation(std::size_t)> generator;
    OrdinalValue limit_value;
};

/// Append-only synchronized registry. Registration validates a prefix of
/// the sequence: strictly <_O increasing, successor-form outputs.
void register_fundamental_sequence(FundamentalSequence seq);
const FundamentalSequence& fundamental_sequence(const std::string& name);
std::vector<std::string> registered_sequence_names();

/// Registers omega, omega2, omega3 (idempotent).
void ensure_default_sequences();

}  // namespace fraisse

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fraisse {

/// A relation symbol. `mark` is the textual notation handle of the level
/// that introduced the symbol ("1", "s(1)", "lim(omega)", ...).
struct Symbol {
    std::string name;
    unsigned arity = 1;
    std::string mark = "1";

    bool operator==(const Symbol&) const = default;
};

/// An infinite family of symbols materialized on first use: a name parser
/// (total decision of family membership) and a positional generator used
/// by the vocabulary enumerator.
struct SymbolFamily {
    std::string label;
    std::function<std::optional<Symbol>(const std::string&)> parse;
    std::function<std::optional<Symbol>(std::size_t)> at;
};

/// A computable vocabulary: finitely many explicit symbols plus lazily
/// materialized families. Lookup is by canonical name; identity of a
/// vocabulary is pointer identity of the shared object.
class Vocabulary {
public:
    Vocabulary() = default;

    void add_symbol(const Symbol& s);
    void add_family(SymbolFamily family);

    std::optional<Symbol> lookup(const std::string& name) const;
    /// Lookup that throws UnknownSymbol.
    Symbol require(const std::string& name) const;
    unsigned arity(const std::string& name) const { return require(name).arity; }

    /// Duplicate-free prefix of the symbol enumeration: explicit symbols
    /// first, then a round-robin over the families.
    std::vector<Symbol> enumerate(std::size_t count) const;

    const std::vector<Symbol>& explicit_symbols() const { return explicit_; }

private:
    std::vector<Symbol> explicit_;
    std::vector<SymbolFamily> families_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::string, Symbol> cache_;
};

using VocabularyPtr = std::shared_ptr<const Vocabulary>;

}  // namespace fraisse

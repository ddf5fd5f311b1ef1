#include "fraisse/vocabulary.hpp"

#include <set>

#include "fraisse/errors.hpp"

namespace fraisse {

void Vocabulary::add_symbol(const Symbol& s) {
    explicit_.push_back(s);
}

void Vocabulary::add_family(SymbolFamily family) {
    families_.push_back(std::move(family));
}

std::optional<Symbol> Vocabulary::lookup(const std::string& name) const {
    for (const auto& s : explicit_)
        if (s.name == name) return s;
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(name);
        if (it != cache_.end()) return it->second;
    }
    for (const auto& fam : families_) {
        if (auto s = fam.parse(name)) {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            cache_.emplace(name, *s);
            return s;
        }
    }
    return std::nullopt;
}

Symbol Vocabulary::require(const std::string& name) const {
    if (auto s = lookup(name)) return *s;
    throw UnknownSymbol(name);
}

std::vector<Symbol> Vocabulary::enumerate(std::size_t count) const {
    std::vector<Symbol> out;
    std::set<std::string> seen;
    for (const auto& s : explicit_) {
        if (out.size() >= count) return out;
        if (seen.insert(s.name).second) out.push_back(s);
    }
    std::vector<std::size_t> cursor(families_.size(), 0);
    std::vector<bool> exhausted(families_.size(), false);
    bool progress = true;
    while (out.size() < count && progress) {
        progress = false;
        for (std::size_t k = 0; k < families_.size() && out.size() < count; ++k) {
            if (exhausted[k]) continue;
            auto s = families_[k].at(cursor[k]++);
            if (!s) {
                exhausted[k] = true;
                continue;
            }
            progress = true;
            if (seen.insert(s->name).second) out.push_back(*s);
        }
    }
    return out;
}

}  // namespace fraisse

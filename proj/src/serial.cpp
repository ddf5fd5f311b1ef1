#include "fraisse/serial.hpp"

#include <json.hpp>
#include <memory>
#include <set>
#include <sstream>

#include "fraisse/errors.hpp"

namespace fraisse {

using nlohmann::json;

std::string encode_structure(const FinStructure& s) {
    json out;
    out["universe"] = s.universe();
    json vocab = json::array();
    std::set<std::string> emitted;
    for (const auto& name : s.realized_symbols()) {
        if (!emitted.insert(name).second) continue;
        Symbol sym = s.vocabulary() ? s.vocabulary()->require(name)
                                    : Symbol{name, static_cast<unsigned>(
                                                       s.relation(name).begin()->size()),
                                             "1"};
        vocab.push_back({{"name", sym.name}, {"arity", sym.arity}, {"mark", sym.mark}});
    }
    out["vocabulary"] = vocab;
    json rels = json::object();
    for (const auto& name : s.realized_symbols()) {
        json tuples = json::array();
        for (const auto& t : s.relation(name)) tuples.push_back(t);
        rels[name] = tuples;
    }
    out["relations"] = rels;
    return out.dump(2);
}

namespace {

FinStructure decode_impl(const json& doc, VocabularyPtr vocab) {
    if (!vocab) {
        auto fresh = std::make_shared<Vocabulary>();
        for (const auto& entry : doc.at("vocabulary")) {
            Symbol sym{entry.at("name").get<std::string>(), entry.at("arity").get<unsigned>(),
                       entry.value("mark", std::string{"1"})};
            if (sym.arity < 1) throw Error("symbol arity must be at least 1: " + sym.name);
            fresh->add_symbol(sym);
        }
        vocab = fresh;
    }
    FinStructure s(vocab);
    for (const auto& e : doc.at("universe")) s.add_element(e.get<Element>());
    if (doc.contains("relations")) {
        for (const auto& [name, tuples] : doc.at("relations").items()) {
            for (const auto& t : tuples) {
                s.add_tuple(name, t.get<Tuple>());
            }
        }
    }
    return s;
}

}  // namespace

FinStructure decode_structure(const std::string& json_text, VocabularyPtr vocab) {
    return decode_impl(json::parse(json_text), std::move(vocab));
}

FinStructure decode_structure(const std::string& json_text) {
    return decode_impl(json::parse(json_text), nullptr);
}

std::string to_dot(const FinStructure& s, const std::string& graph_name) {
    std::ostringstream out;
    out << "digraph \"" << graph_name << "\" {\n";
    for (Element e : s.universe()) {
        std::string label = std::to_string(e);
        for (const auto& name : s.realized_symbols()) {
            if (s.vocabulary() && s.vocabulary()->require(name).arity != 1) continue;
            if (s.has_tuple(name, Tuple{e})) label += "\\n" + name;
        }
        out << "  n" << e << " [label=\"" << label << "\"];\n";
    }
    for (const auto& name : s.realized_symbols()) {
        if (s.vocabulary() && s.vocabulary()->require(name).arity != 2) continue;
        for (const auto& t : s.relation(name)) {
            if (t.size() != 2) continue;
            out << "  n" << t[0] << " -> n" << t[1] << " [label=\"" << name << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

}  // namespace fraisse

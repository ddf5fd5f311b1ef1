// Command-line surface over the library: build limit stages, run age
// checks, construct tower levels, decide expansions, and run the
// diagonalization demo. Exit codes: 0 success, 1 negative verdict or
// counterexample, 2 usage or runtime error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "fraisse/ages.hpp"
#include "fraisse/diagonal.hpp"
#include "fraisse/engine.hpp"
#include "fraisse/errors.hpp"
#include "fraisse/scott.hpp"
#include "fraisse/serial.hpp"
#include "fraisse/tower.hpp"

namespace {

using namespace fraisse;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

PartialMap parse_map(const std::string& text) {
    std::vector<std::pair<Element, Element>> pairs;
    std::istringstream in(text);
    std::string chunk;
    while (std::getline(in, chunk, ',')) {
        if (chunk.empty()) continue;
        auto colon = chunk.find(':');
        if (colon == std::string::npos) throw Error("map entries look like src:tgt");
        pairs.emplace_back(static_cast<Element>(std::stoul(chunk.substr(0, colon))),
                           static_cast<Element>(std::stoul(chunk.substr(colon + 1))));
    }
    return PartialMap(std::move(pairs));
}

struct CommonOptions {
    std::uint64_t token = 0;
    std::size_t amalgam_budget = 64;
    std::size_t goal_batch = 8;
    std::size_t inject_period = 4;
    bool verbose = false;
};

BuilderConfig builder_config(const CommonOptions& common) {
    BuilderConfig cfg;
    cfg.schedule_token = common.token;
    cfg.amalgam_budget = common.amalgam_budget;
    cfg.goal_batch = common.goal_batch;
    cfg.inject_period = common.inject_period;
    return cfg;
}

int run_age_check(const std::string& tag, std::size_t size_bound, std::size_t index_bound,
                  std::size_t budget) {
    AgeRepPtr age = age_by_tag(tag);
    AgeCheckReport report = check_age_axioms(*age, size_bound, index_bound, budget);
    std::cout << report.to_json_lines();
    return report.ok() ? 0 : 1;
}

int run_limit_build(const std::string& tag, std::size_t steps, const std::string& out,
                    const std::string& dot, const CommonOptions& common) {
    AgeRepPtr age = age_by_tag(tag);
    LimitBuilder builder(age, builder_config(common));
    builder.grow(steps);
    std::string encoded = encode_structure(builder.current());
    if (out.empty())
        std::cout << encoded << "\n";
    else
        spill(out, encoded);
    if (!dot.empty()) spill(dot, to_dot(builder.current(), age->tag()));
    if (common.verbose)
        std::cerr << "stages: " << builder.stages().size()
                  << ", universe: " << builder.current().size() << "\n";
    return 0;
}

int run_limit_homog(const std::string& tag, std::size_t steps, const std::string& map_text,
                    const CommonOptions& common) {
    AgeRepPtr age = age_by_tag(tag);
    LimitBuilder builder(age, builder_config(common));
    builder.grow(steps);
    PartialMap f = parse_map(map_text);
    bool verdict = builder.is_partial_iso(f);
    nlohmann::json out{{"partial_isomorphism", verdict}};
    std::cout << out.dump(2) << "\n";
    return verdict ? 0 : 1;
}

int run_tower_build(const std::string& notation_text, std::size_t steps, const std::string& out,
                    const std::string& dot, const CommonOptions& common) {
    Notation a = Notation::parse(notation_text);
    const TowerLevel& level = default_tower()->level(a);
    LimitBuilder builder(level.age, builder_config(common));
    builder.grow(steps);
    nlohmann::json doc;
    doc["notation"] = level.notation.text();
    if (auto value = level.notation.ordinal_value()) doc["ordinal"] = value->to_string();
    doc["u"] = level.u_name;
    doc["order"] = level.order_name;
    if (!level.v_name.empty()) {
        doc["v"] = level.v_name;
        doc["m"] = level.m_name;
        doc["p"] = level.p_name;
        doc["f"] = level.f_name;
    }
    doc["stage"] = nlohmann::json::parse(encode_structure(builder.current()));
    std::string text = doc.dump(2);
    if (out.empty())
        std::cout << text << "\n";
    else
        spill(out, text);
    if (!dot.empty()) spill(dot, to_dot(builder.current(), level.notation.text()));
    return 0;
}

int run_tower_validate(const std::string& level_path, const std::string& structure_path) {
    auto doc = nlohmann::json::parse(slurp(level_path));
    Notation a = Notation::parse(doc.at("notation").get<std::string>());
    const TowerLevel& level = default_tower()->level(a);
    FinStructure s = decode_structure(slurp(structure_path), level.vocabulary);
    std::vector<std::string> violations;
    if (a.form() == Notation::Form::Succ) {
        violations = validate_kb(level, s);
    } else {
        violations = level.age->membership_violations(s);
    }
    nlohmann::json out{{"valid", violations.empty()}, {"violations", violations}};
    std::cout << out.dump(2) << "\n";
    return violations.empty() ? 0 : 1;
}

int run_scott_check(const std::string& base_path, const std::string& candidate_path,
                    const std::string& out_path) {
    FinStructure a = decode_structure(slurp(base_path));
    FinStructure b = decode_structure(slurp(candidate_path), a.vocabulary());
    scott::ExpansionSchema schema = scott::build_schema(a);
    auto verdict = scott::check_expansion(schema, b);
    nlohmann::json witness = nlohmann::json::object();
    if (verdict.expandable) {
        for (const auto& [tuple, realizers] : verdict.witness.assignment) {
            nlohmann::json list = nlohmann::json::array();
            for (const auto& bt : realizers) list.push_back(bt);
            witness[scott::predicate_name(tuple)] = list;
        }
    }
    nlohmann::json out{{"expandable", verdict.expandable}, {"witness", witness}};
    std::string text = out.dump(2);
    if (out_path.empty())
        std::cout << text << "\n";
    else
        spill(out_path, text);
    return verdict.expandable ? 0 : 1;
}

int run_diagonal(const std::string& trace_path, std::size_t requirements, std::size_t stages,
                 const std::string& out_path) {
    diagonal::EnumerationTrace trace;
    if (!trace_path.empty()) trace = diagonal::parse_trace(slurp(trace_path));
    auto report = diagonal::run(trace, requirements, stages);
    bool verified = diagonal::verify(report);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.requirements) {
        rows.push_back({{"e", r.e},
                        {"pair", {r.pair_low, r.pair_low + 1}},
                        {"fired", r.fired},
                        {"identity_is_embedding", r.identity_is_embedding},
                        {"trace_contains_triple", r.trace_contains_triple}});
    }
    nlohmann::json out{{"verified", verified}, {"requirements", rows}};
    std::string text = out.dump(2);
    if (out_path.empty())
        std::cout << text << "\n";
    else
        spill(out_path, text);
    return verified ? 0 : 1;
}

int run_notation_cmp(const std::string& lhs, const std::string& rhs, std::size_t horizon) {
    OrdCompare cmp = compare_O(Notation::parse(lhs), Notation::parse(rhs), horizon);
    const char* text = cmp == OrdCompare::Less      ? "less"
                       : cmp == OrdCompare::Equal   ? "equal"
                       : cmp == OrdCompare::Greater ? "greater"
                                                    : "incomparable";
    std::cout << text << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"computable Fraisse limits, ordinal-notation towers, and expansion checks"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions common;
    app.add_option("--token", common.token, "schedule token (default 0, deterministic)");
    app.add_option("--budget", common.amalgam_budget, "amalgam search budget");
    app.add_flag("-v,--verbose", common.verbose, "chatter on stderr");

    auto* age_cmd = app.add_subcommand("age", "age representation checks");
    age_cmd->fallthrough();
    auto* age_check = age_cmd->add_subcommand("check", "verify HP/JEP/AP within bounds");
    std::string age_tag;
    std::size_t size_bound = 3, index_bound = 20;
    age_check->add_option("--age", age_tag, "age tag")->required();
    age_check->add_option("--size-bound", size_bound, "member size bound");
    age_check->add_option("--index-bound", index_bound, "member index bound");

    auto* limit_cmd = app.add_subcommand("limit", "limit construction");
    limit_cmd->fallthrough();
    auto* limit_build = limit_cmd->add_subcommand("build", "grow a limit approximation");
    std::string limit_tag, limit_out, limit_dot;
    std::size_t limit_steps = 100;
    limit_build->add_option("--age", limit_tag, "age tag")->required();
    limit_build->add_option("--steps", limit_steps, "tasks to execute");
    limit_build->add_option("--out", limit_out, "stage JSON path");
    limit_build->add_option("--dot", limit_dot, "DOT export path");
    auto* limit_homog = limit_cmd->add_subcommand("homog", "decide partial isomorphism");
    std::string homog_tag, homog_map;
    std::size_t homog_steps = 100;
    limit_homog->add_option("--age", homog_tag, "age tag")->required();
    limit_homog->add_option("--steps", homog_steps, "tasks to execute first");
    limit_homog->add_option("--map", homog_map, "finite map, e.g. 0:3,1:5")->required();

    auto* tower_cmd = app.add_subcommand("tower", "ordinal-notation tower");
    tower_cmd->fallthrough();
    auto* tower_build = tower_cmd->add_subcommand("build", "construct a level and grow it");
    std::string tower_notation, tower_out, tower_dot;
    std::size_t tower_steps = 100;
    tower_build->add_option("--notation", tower_notation, "notation, e.g. s(s(1))")->required();
    tower_build->add_option("--steps", tower_steps, "tasks to execute");
    tower_build->add_option("--out", tower_out, "level JSON path");
    tower_build->add_option("--dot", tower_dot, "DOT export path");
    auto* tower_validate = tower_cmd->add_subcommand("validate", "membership check at a level");
    std::string level_path, structure_path;
    tower_validate->add_option("--level", level_path, "level JSON from tower build")->required();
    tower_validate->add_option("--structure", structure_path, "structure JSON")->required();

    auto* scott_cmd = app.add_subcommand("scott", "expansion checks");
    scott_cmd->fallthrough();
    auto* scott_check = scott_cmd->add_subcommand("check", "decide expandability");
    std::string base_path, candidate_path, scott_out;
    scott_check->add_option("--base", base_path, "base structure JSON")->required();
    scott_check->add_option("--candidate", candidate_path, "candidate JSON")->required();
    scott_check->add_option("--out", scott_out, "witness JSON path");

    auto* diagonal_cmd = app.add_subcommand("diagonal", "the non-c.e. strategy demo");
    diagonal_cmd->fallthrough();
    auto* diagonal_run = diagonal_cmd->add_subcommand("run", "run against a trace");
    std::string trace_path, diagonal_out;
    std::size_t requirements = 3, diag_stages = 20;
    diagonal_run->add_option("--trace", trace_path, "trace JSON (empty trace if omitted)");
    diagonal_run->add_option("--requirements", requirements, "requirements simulated");
    diagonal_run->add_option("--stages", diag_stages, "stages simulated");
    diagonal_run->add_option("--out", diagonal_out, "report JSON path");

    auto* notation_cmd = app.add_subcommand("notation", "ordinal notations");
    notation_cmd->fallthrough();
    auto* notation_cmp = notation_cmd->add_subcommand("cmp", "compare two notations");
    std::string lhs, rhs;
    std::size_t horizon = 64;
    notation_cmp->add_option("lhs", lhs, "left notation")->required();
    notation_cmp->add_option("rhs", rhs, "right notation")->required();
    notation_cmp->add_option("--horizon", horizon, "limit search horizon");
    auto* notation_value = notation_cmd->add_subcommand("value", "ordinal value when known");
    std::string value_arg;
    notation_value->add_option("notation", value_arg, "notation text")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (age_check->parsed())
            return run_age_check(age_tag, size_bound, index_bound, common.amalgam_budget);
        if (limit_build->parsed())
            return run_limit_build(limit_tag, limit_steps, limit_out, limit_dot, common);
        if (limit_homog->parsed())
            return run_limit_homog(homog_tag, homog_steps, homog_map, common);
        if (tower_build->parsed())
            return run_tower_build(tower_notation, tower_steps, tower_out, tower_dot, common);
        if (tower_validate->parsed()) return run_tower_validate(level_path, structure_path);
        if (scott_check->parsed()) return run_scott_check(base_path, candidate_path, scott_out);
        if (diagonal_run->parsed())
            return run_diagonal(trace_path, requirements, diag_stages, diagonal_out);
        if (notation_cmp->parsed()) return run_notation_cmp(lhs, rhs, horizon);
        if (notation_value->parsed()) {
            Notation a = Notation::parse(value_arg);
            if (auto value = a.ordinal_value())
                std::cout << value->to_string() << "\n";
            else
                std::cout << "unknown\n";
            return 0;
        }
        std::cerr << app.help();
        return 2;
    } catch (const Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}

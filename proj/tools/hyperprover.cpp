// Command-line front end: decide derivability in analytic structural rule
// extensions of HFL_elw (forward saturation) and HFL_ec (irredundant backward
// search), check derivations, and expose the encodings and chain oracles.
//
// Exit codes: 0 derivable/accepted, 1 not derivable/rejected,
//             2 indeterminate (timeout), 3 usage or parse error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hyperprover/backward.hpp"
#include "hyperprover/checker.hpp"
#include "hyperprover/forward.hpp"

using namespace hyperprover;

namespace {

struct LogicOptions {
    std::string logic = "mtl";
    std::vector<std::string> rules;
    std::string rules_file;
};

void add_logic_options(CLI::App* cmd, LogicOptions& opts) {
    cmd->add_option("--logic", opts.logic,
                    "base preset: fle, flelw, flew, flec, mtl (hfle... accepted)")
        ->capture_default_str();
    cmd->add_option("--rule", opts.rules,
                    "extra analytic structural rule: com, wem, mingle, c, lw, rw, "
                    "bwk:K, bck:K, knot:N,M (repeatable)");
    cmd->add_option("--rules-file", opts.rules_file, "rule DSL file with extra schemas");
}

RuleSchema parse_rule_arg(const std::string& arg) {
    auto colon = arg.find(':');
    std::string name = arg.substr(0, colon);
    std::vector<int> params;
    if (colon != std::string::npos) {
        std::stringstream ss(arg.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) params.push_back(std::stoi(tok));
    }
    return builtin_rule(name, params);
}

Calculus build_calculus(const LogicOptions& opts) {
    Calculus calc = builtin_calculus(opts.logic);
    for (const std::string& r : opts.rules) calc.add(parse_rule_arg(r));
    if (!opts.rules_file.empty()) {
        std::ifstream in(opts.rules_file);
        if (!in) throw std::runtime_error("cannot open rules file " + opts.rules_file);
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        for (RuleSchema& r : parse_rules_file(content)) calc.add(std::move(r));
    }
    return calc;
}

Hypersequent parse_input(const std::string& text) {
    if (text.find("=>") != std::string::npos || text.find('|') != std::string::npos ||
        text.find("⇒") != std::string::npos)
        return parse_hypersequent(text);
    return Hypersequent::goal(parse_formula(text));
}

std::optional<std::chrono::steady_clock::time_point> deadline_from(double timeout_secs) {
    if (timeout_secs <= 0) {
        const char* env = std::getenv("HYPERPROVER_TIMEOUT_SECS");
        if (env) timeout_secs = std::atof(env);
    }
    if (timeout_secs <= 0) return std::nullopt;
    return std::chrono::steady_clock::now() +
           std::chrono::milliseconds(static_cast<long>(timeout_secs * 1000));
}

int exit_code(Verdict v) {
    switch (v) {
        case Verdict::Derivable: return 0;
        case Verdict::NotDerivable: return 1;
        case Verdict::Indeterminate: return 2;
    }
    return 3;
}

void dump_sequence(const std::string& path, const ControlledSequence& seq) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_controlled_sequence(out, seq);
}

void write_proof(const std::string& path, const DerivationTree& tree) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
        write_derivation_json(out, tree);
    else
        write_derivation_text(out, tree);
}

int run_prove(const LogicOptions& logic, const std::string& input, const std::string& engine,
              double timeout, bool stats, const std::string& proof_out,
              const std::string& bad_seq_out, bool full_saturation) {
    Calculus calc = build_calculus(logic);
    Hypersequent goal = parse_input(input);

    std::string chosen = engine;
    if (chosen == "auto") {
        bool lw = calc.contains("lw"), c = calc.contains("c");
        if (lw == c) {
            std::cerr << "error: engine choice is ambiguous for this calculus; "
                         "pass --engine forward|backward\n";
            return 3;
        }
        chosen = lw ? "forward" : "backward";
    }

    Verdict verdict;
    std::optional<DerivationTree> tree;
    if (chosen == "forward") {
        SaturateOptions opts;
        opts.deadline = deadline_from(timeout);
        opts.full_fixpoint = full_saturation;
        if (stats) opts.stats_stream = &std::cerr;
        ForwardResult result = decide_forward(goal, calc, opts);
        verdict = result.verdict;
        if (verdict == Verdict::Derivable) tree = extract_derivation(result.state, goal);
        if (!bad_seq_out.empty()) dump_sequence(bad_seq_out, result.state.record);
        if (stats)
            std::cout << "rounds=" << result.state.rounds.size() - 1
                      << " set_size=" << result.state.elements.size()
                      << " fixpoint=" << (result.state.fixpoint ? "yes" : "no") << "\n";
    } else if (chosen == "backward") {
        BackwardOptions opts;
        opts.deadline = deadline_from(timeout);
        BackwardResult result = decide_backward(goal, calc, opts);
        verdict = result.verdict;
        tree = result.tree;
        if (!bad_seq_out.empty()) dump_sequence(bad_seq_out, result.deepest_path);
        if (stats)
            std::cout << "nodes_expanded=" << result.stats.nodes_expanded
                      << " prunings=" << result.stats.prunings
                      << " max_branch=" << result.stats.max_branch
                      << " max_goal_size=" << result.stats.max_goal_size << "\n";
    } else {
        std::cerr << "error: unknown engine '" << chosen << "'\n";
        return 3;
    }

    std::cout << verdict_name(verdict) << "  " << goal.text() << "\n";
    if (tree && !proof_out.empty()) write_proof(proof_out, *tree);
    return exit_code(verdict);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperprover: decision procedures for hypersequent substructural logics"};
    app.require_subcommand(1);

    LogicOptions logic;
    std::string input, engine = "auto", proof_out, bad_seq_out, proof_file, chain = "lukasiewicz:3";
    double timeout = 0;
    bool stats = false, full_saturation = false, validate_only = false;
    std::uint64_t size_cap = 6, depth_cap = 4;

    CLI::App* prove = app.add_subcommand("prove", "decide derivability of a formula/hypersequent");
    add_logic_options(prove, logic);
    prove->add_option("input", input, "formula or hypersequent text")->required();
    prove->add_option("--engine", engine, "forward | backward | auto")->capture_default_str();
    prove->add_option("--timeout", timeout, "seconds (or HYPERPROVER_TIMEOUT_SECS)");
    prove->add_flag("--stats", stats, "print engine counters; saturation rounds to stderr");
    prove->add_option("--proof-output", proof_out, "write the derivation here (.json for JSON)");
    prove->add_option("--record-bad-sequence", bad_seq_out,
                      "dump the controlled bad sequence record");
    prove->add_flag("--full-saturation", full_saturation,
                    "run the forward engine to its fixpoint even after a witness appears");

    CLI::App* check = app.add_subcommand("check", "check a derivation file against a calculus");
    add_logic_options(check, logic);
    check->add_option("proof", proof_file, "derivation file (indented text or JSON)")->required();

    CLI::App* saturate_cmd = app.add_subcommand("saturate", "run forward saturation to fixpoint");
    add_logic_options(saturate_cmd, logic);
    saturate_cmd->add_option("input", input, "formula or hypersequent seeding omega")->required();
    saturate_cmd->add_option("--timeout", timeout, "seconds");
    saturate_cmd->add_option("--record-bad-sequence", bad_seq_out,
                             "dump the controlled bad sequence record");

    CLI::App* rules_cmd = app.add_subcommand("rules", "print the active rule schemas");
    add_logic_options(rules_cmd, logic);
    rules_cmd->add_flag("--validate", validate_only, "print validation reports too");

    CLI::App* encode = app.add_subcommand("encode", "print omega and the # encoding");
    encode->add_option("input", input, "formula or hypersequent")->required();

    CLI::App* oracle = app.add_subcommand("oracle", "evaluate a formula on a residuated chain");
    oracle->add_option("--chain", chain, "lukasiewicz:N or godel:N")->capture_default_str();
    oracle->add_option("input", input, "formula")->required();
    oracle->add_option("--brute-size-cap", size_cap, "")->group("");
    oracle->add_option("--brute-depth-cap", depth_cap, "")->group("");

    CLI11_PARSE(app, argc, argv);

    try {
        if (prove->parsed())
            return run_prove(logic, input, engine, timeout, stats, proof_out, bad_seq_out,
                             full_saturation);

        if (check->parsed()) {
            Calculus calc = build_calculus(logic);
            std::ifstream in(proof_file);
            if (!in) {
                std::cerr << "error: cannot open " << proof_file << "\n";
                return 3;
            }
            DerivationTree tree = read_derivation(in);
            CheckResult result = check_derivation(tree, calc);
            if (result.accepted) {
                std::cout << "ACCEPT  " << tree->conclusion.text() << "\n";
                return 0;
            }
            std::cout << "REJECT  " << result.offender->conclusion.text() << "\n  "
                      << result.reason << "\n";
            return 1;
        }

        if (saturate_cmd->parsed()) {
            Calculus calc = build_calculus(logic);
            Hypersequent seed = parse_input(input);
            OmegaSet omega = OmegaSet::closure(seed.all_formulas());
            SaturateOptions opts;
            opts.deadline = deadline_from(timeout);
            opts.stats_stream = &std::cout;
            SaturationState state = saturate(omega, calc, opts);
            if (!bad_seq_out.empty()) dump_sequence(bad_seq_out, state.record);
            std::cout << "fixpoint=" << (state.fixpoint ? "yes" : "no")
                      << " elements=" << state.elements.size() << "\n";
            return state.fixpoint ? 0 : 2;
        }

        if (rules_cmd->parsed()) {
            Calculus calc = build_calculus(logic);
            for (const RuleSchema& r : calc.schemas()) {
                std::cout << "rule " << r.name << "\n";
                for (const auto& p : r.forms[0].premises)
                    std::cout << "premise: " << p.text() << "\n";
                std::cout << "conclusion: " << r.forms[0].conclusion.text() << "\n";
                if (validate_only) {
                    ValidationReport report = validate_schema(r);
                    std::cout << "# linear_conclusion=" << (report.linear_conclusion ? "yes" : "no")
                              << " subvariable=" << (report.subvariable ? "yes" : "no")
                              << " structural=" << (report.structural ? "yes" : "no") << "\n";
                }
                std::cout << "\n";
            }
            std::cout << "# schema_size_max=" << schema_size_max(calc) << "\n";
            return 0;
        }

        if (encode->parsed()) {
            Hypersequent h = parse_input(input);
            OmegaSet omega = OmegaSet::closure(h.all_formulas());
            for (std::size_t i = 0; i < omega.size(); i++)
                std::cout << "F" << (i + 1) << " = " << omega.formula(i).text() << "\n";
            PowVector enc = encode_sharp(h, omega);
            for (std::size_t g = 0; g < enc.groups.size(); g++) {
                std::cout << (g == 0 ? std::string("empty") : "F" + std::to_string(g)) << ": ";
                if (enc.groups[g].empty()) std::cout << "{}";
                for (const NatTuple& t : enc.groups[g].tuples()) {
                    std::cout << "(";
                    for (std::size_t i = 0; i < t.size(); i++)
                        std::cout << (i ? "," : "") << t[i];
                    std::cout << ")";
                }
                std::cout << "\n";
            }
            return 0;
        }

        if (oracle->parsed()) {
            auto colon = chain.find(':');
            ChainModel model;
            std::string kind = chain.substr(0, colon);
            if (kind == "lukasiewicz")
                model.kind = ChainModel::Kind::Lukasiewicz;
            else if (kind == "godel")
                model.kind = ChainModel::Kind::Godel;
            else {
                std::cerr << "error: unknown chain kind '" << kind << "'\n";
                return 3;
            }
            if (colon != std::string::npos) model.size = std::stoi(chain.substr(colon + 1));
            ChainEval eval = eval_chain(parse_formula(input), model);
            if (eval.valid) {
                std::cout << "VALID  value 1 on " << kind << ":" << model.size << "\n";
                return 0;
            }
            std::cout << "COUNTERMODEL  value " << eval.value << "/" << eval.denom << " at";
            for (const auto& [v, val] : eval.assignment)
                std::cout << " " << v << "=" << val << "/" << eval.denom;
            std::cout << "\n";
            return 1;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}

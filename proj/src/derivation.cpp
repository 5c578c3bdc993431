#include "hyperprover/derivation.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace hyperprover {

DerivationTree make_derivation(Hypersequent conclusion, std::string rule,
                               std::vector<DerivationTree> premises, std::string digest) {
    auto node = std::make_shared<DerivationNode>();
    node->conclusion = std::move(conclusion);
    node->rule = std::move(rule);
    node->digest = std::move(digest);
    node->premises = std::move(premises);
    return node;
}

std::size_t derivation_height(const DerivationTree& t) {
    std::size_t h = 0;
    for (const DerivationTree& p : t->premises) h = std::max(h, derivation_height(p));
    return h + 1;
}

std::size_t derivation_node_count(const DerivationTree& t) {
    std::size_t n = 1;
    for (const DerivationTree& p : t->premises) n += derivation_node_count(p);
    return n;
}

namespace {

void write_text_rec(std::ostream& out, const DerivationTree& t, int depth) {
    for (int i = 0; i < depth; i++) out << "  ";
    out << t->conclusion.text() << "  [" << t->rule << "]\n";
    for (const DerivationTree& p : t->premises) write_text_rec(out, p, depth + 1);
}

nlohmann::json to_json(const DerivationTree& t) {
    nlohmann::json j;
    j["hypersequent"] = t->conclusion.text();
    j["rule"] = t->rule;
    if (!t->digest.empty()) j["digest"] = t->digest;
    j["premises"] = nlohmann::json::array();
    for (const DerivationTree& p : t->premises) j["premises"].push_back(to_json(p));
    return j;
}

DerivationTree from_json(const nlohmann::json& j) {
    std::vector<DerivationTree> premises;
    if (j.contains("premises"))
        for (const auto& p : j["premises"]) premises.push_back(from_json(p));
    return make_derivation(parse_hypersequent(j.at("hypersequent").get<std::string>()),
                           j.at("rule").get<std::string>(), std::move(premises),
                           j.value("digest", ""));
}

struct TextLine {
    int depth;
    Hypersequent h;
    std::string rule;
};

DerivationTree build_from_lines(const std::vector<TextLine>& lines, std::size_t& pos, int depth) {
    if (pos >= lines.size() || lines[pos].depth != depth)
        throw std::runtime_error("malformed derivation text near line " + std::to_string(pos + 1));
    const TextLine& line = lines[pos++];
    std::vector<DerivationTree> premises;
    while (pos < lines.size() && lines[pos].depth == depth + 1)
        premises.push_back(build_from_lines(lines, pos, depth + 1));
    if (pos < lines.size() && lines[pos].depth > depth + 1)
        throw std::runtime_error("bad indentation at line " + std::to_string(pos + 1));
    return make_derivation(line.h, line.rule, std::move(premises));
}

}  // namespace

void write_derivation_text(std::ostream& out, const DerivationTree& t) {
    write_text_rec(out, t, 0);
}

void write_derivation_json(std::ostream& out, const DerivationTree& t) {
    out << to_json(t).dump(2) << "\n";
}

DerivationTree read_derivation(std::istream& in) {
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t first = content.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw std::runtime_error("empty derivation");
    if (content[first] == '{') return from_json(nlohmann::json::parse(content));

    std::vector<TextLine> lines;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        auto nl = content.find('\n', pos);
        std::string line = content.substr(pos, nl == std::string::npos ? nl : nl - pos);
        pos = nl == std::string::npos ? content.size() + 1 : nl + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line[line.find_first_not_of(" ")] == '#') continue;
        int depth = 0;
        std::size_t i = 0;
        while (i + 1 < line.size() && line[i] == ' ' && line[i + 1] == ' ') {
            depth++;
            i += 2;
        }
        std::string body = line.substr(i);
        auto open = body.rfind('[');
        auto close = body.rfind(']');
        if (open == std::string::npos || close == std::string::npos || close < open)
            throw std::runtime_error("derivation line without [rule]: " + body);
        std::string rule = body.substr(open + 1, close - open - 1);
        std::string hyp = body.substr(0, open);
        while (!hyp.empty() && (hyp.back() == ' ' || hyp.back() == '\t')) hyp.pop_back();
        lines.push_back({depth, parse_hypersequent(hyp), rule});
    }
    std::size_t idx = 0;
    DerivationTree t = build_from_lines(lines, idx, 0);
    if (idx != lines.size()) throw std::runtime_error("trailing derivation lines");
    return t;
}

}  // namespace hyperprover

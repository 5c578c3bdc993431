#include "hyperprover/formula.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace hyperprover {

const char* formula_kind_name(FormulaKind k) noexcept {
    switch (k) {
        case FormulaKind::Var: return "var";
        case FormulaKind::Top: return "top";
        case FormulaKind::Bot: return "bot";
        case FormulaKind::One: return "one";
        case FormulaKind::Zero: return "zero";
        case FormulaKind::And: return "and";
        case FormulaKind::Or: return "or";
        case FormulaKind::Fuse: return "fuse";
        case FormulaKind::Imp: return "imp";
    }
    return "?";
}

struct Formula::Node {
    FormulaKind kind;
    std::string name;  // Var only
    const Node* lhs = nullptr;
    const Node* rhs = nullptr;
    int symbols = 1;
    std::string text;
};

namespace {

// Precedence levels used by both printer and parser: imp < or < and < fuse.
int precedence(FormulaKind k) {
    switch (k) {
        case FormulaKind::Imp: return 0;
        case FormulaKind::Or: return 1;
        case FormulaKind::And: return 2;
        case FormulaKind::Fuse: return 3;
        default: return 4;
    }
}

const char* connective_token(FormulaKind k) {
    switch (k) {
        case FormulaKind::And: return "/\\";
        case FormulaKind::Or: return "\\/";
        case FormulaKind::Fuse: return "*";
        case FormulaKind::Imp: return "->";
        default: return "";
    }
}

std::string render(FormulaKind k, const Formula::Node* l, const Formula::Node* r) {
    // imp is right-associative, the rest left-associative.
    int prec = precedence(k);
    bool right_assoc = (k == FormulaKind::Imp);
    int lp = precedence(l->kind);
    int rp = precedence(r->kind);
    bool paren_l = right_assoc ? (lp <= prec) : (lp < prec);
    bool paren_r = right_assoc ? (rp < prec) : (rp <= prec);
    std::string out;
    if (paren_l) out += "(";
    out += l->text;
    if (paren_l) out += ")";
    out += " ";
    out += connective_token(k);
    out += " ";
    if (paren_r) out += "(";
    out += r->text;
    if (paren_r) out += ")";
    return out;
}

struct NodeKey {
    FormulaKind kind;
    std::string name;
    const Formula::Node* lhs;
    const Formula::Node* rhs;
    bool operator==(const NodeKey&) const = default;
};

struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const noexcept {
        std::size_t h = static_cast<std::size_t>(k.kind);
        h = h * 1000003u ^ std::hash<std::string>{}(k.name);
        h = h * 1000003u ^ std::hash<const void*>{}(k.lhs);
        h = h * 1000003u ^ std::hash<const void*>{}(k.rhs);
        return h;
    }
};

class Interner {
public:
    const Formula::Node* get(FormulaKind kind, std::string name, const Formula::Node* l,
                             const Formula::Node* r) {
        std::lock_guard<std::mutex> lock(mu_);
        NodeKey key{kind, name, l, r};
        auto it = table_.find(key);
        if (it != table_.end()) return it->second.get();
        auto node = std::make_unique<Formula::Node>();
        node->kind = kind;
        node->name = std::move(name);
        node->lhs = l;
        node->rhs = r;
        switch (kind) {
            case FormulaKind::Var: node->symbols = 1; node->text = node->name; break;
            case FormulaKind::Top: node->symbols = 1; node->text = "top"; break;
            case FormulaKind::Bot: node->symbols = 1; node->text = "bot"; break;
            case FormulaKind::One: node->symbols = 1; node->text = "1"; break;
            case FormulaKind::Zero: node->symbols = 1; node->text = "0"; break;
            default:
                node->symbols = 1 + l->symbols + r->symbols;
                node->text = render(kind, l, r);
                break;
        }
        const Formula::Node* raw = node.get();
        table_.emplace(std::move(key), std::move(node));
        return raw;
    }

    static Interner& instance() {
        static Interner inst;
        return inst;
    }

private:
    std::mutex mu_;
    std::unordered_map<NodeKey, std::unique_ptr<Formula::Node>, NodeKeyHash> table_;
};

}  // namespace

Formula Formula::var(const std::string& name) {
    if (name.empty()) throw std::invalid_argument("empty variable name");
    return Formula(Interner::instance().get(FormulaKind::Var, name, nullptr, nullptr));
}
Formula Formula::top() { return Formula(Interner::instance().get(FormulaKind::Top, "", nullptr, nullptr)); }
Formula Formula::bot() { return Formula(Interner::instance().get(FormulaKind::Bot, "", nullptr, nullptr)); }
Formula Formula::one() { return Formula(Interner::instance().get(FormulaKind::One, "", nullptr, nullptr)); }
Formula Formula::zero() { return Formula(Interner::instance().get(FormulaKind::Zero, "", nullptr, nullptr)); }

Formula Formula::make(FormulaKind k, Formula lhs, Formula rhs) {
    assert(k == FormulaKind::And || k == FormulaKind::Or || k == FormulaKind::Fuse ||
           k == FormulaKind::Imp);
    return Formula(Interner::instance().get(k, "", lhs.node_, rhs.node_));
}

FormulaKind Formula::kind() const noexcept { return node_->kind; }
bool Formula::is_binary() const noexcept {
    return node_->kind == FormulaKind::And || node_->kind == FormulaKind::Or ||
           node_->kind == FormulaKind::Fuse || node_->kind == FormulaKind::Imp;
}
const std::string& Formula::var_name() const {
    assert(node_->kind == FormulaKind::Var);
    return node_->name;
}
Formula Formula::left() const {
    assert(is_binary());
    return Formula(node_->lhs);
}
Formula Formula::right() const {
    assert(is_binary());
    return Formula(node_->rhs);
}
int Formula::symbol_count() const noexcept { return node_->symbols; }
const std::string& Formula::text() const noexcept { return node_->text; }

std::strong_ordering Formula::operator<=>(const Formula& o) const noexcept {
    if (node_ == o.node_) return std::strong_ordering::equal;
    if (auto c = node_->symbols <=> o.node_->symbols; c != 0) return c;
    return node_->text.compare(o.node_->text) <=> 0;
}

std::size_t Formula::hash() const noexcept { return std::hash<const void*>{}(node_); }

// ── Parser ──────────────────────────────────────────────────────────────────

namespace {

struct Lexer {
    std::string_view src;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) pos++;
    }

    bool starts_with(std::string_view s) const { return src.substr(pos, s.size()) == s; }

    // Translate the Unicode aliases to their ASCII token; returns consumed bytes.
    std::size_t unicode_alias(std::string& out) const {
        struct Alias { std::string_view utf8; std::string_view ascii; };
        static const Alias aliases[] = {
            {"∧", "/\\"}, {"∨", "\\/"}, {"·", "*"},  {"→", "->"},
            {"⊤", "top"}, {"⊥", "bot"},
        };
        for (const auto& a : aliases) {
            if (src.substr(pos, a.utf8.size()) == a.utf8) {
                out = a.ascii;
                return a.utf8.size();
            }
        }
        return 0;
    }
};

class FormulaParser {
public:
    explicit FormulaParser(std::string_view text) { lex_.src = text; }

    Formula parse() {
        Formula f = parse_imp();
        lex_.skip_ws();
        if (lex_.pos != lex_.src.size())
            throw ParseError(lex_.pos, "unexpected trailing input");
        return f;
    }

private:
    Lexer lex_;

    bool eat(std::string_view tok) {
        lex_.skip_ws();
        std::string alias;
        if (std::size_t n = lex_.unicode_alias(alias); n > 0 && alias == tok) {
            lex_.pos += n;
            return true;
        }
        if (lex_.starts_with(tok)) {
            lex_.pos += tok.size();
            return true;
        }
        return false;
    }

    Formula parse_imp() {
        Formula lhs = parse_or();
        if (eat("->")) return Formula::make(FormulaKind::Imp, lhs, parse_imp());
        return lhs;
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (eat("\\/")) f = Formula::make(FormulaKind::Or, f, parse_and());
        return f;
    }

    Formula parse_and() {
        Formula f = parse_fuse();
        while (eat("/\\")) f = Formula::make(FormulaKind::And, f, parse_fuse());
        return f;
    }

    Formula parse_fuse() {
        Formula f = parse_atom();
        while (eat("*")) f = Formula::make(FormulaKind::Fuse, f, parse_atom());
        return f;
    }

    Formula parse_atom() {
        lex_.skip_ws();
        if (lex_.pos >= lex_.src.size()) throw ParseError(lex_.pos, "expected formula");
        if (eat("(")) {
            Formula f = parse_imp();
            if (!eat(")")) throw ParseError(lex_.pos, "expected ')'");
            return f;
        }
        if (eat("1")) return Formula::one();
        if (eat("0")) return Formula::zero();
        std::string alias;
        if (std::size_t n = lex_.unicode_alias(alias); n > 0) {
            if (alias == "top") { lex_.pos += n; return Formula::top(); }
            if (alias == "bot") { lex_.pos += n; return Formula::bot(); }
            throw ParseError(lex_.pos, "unexpected token");
        }
        char c = lex_.src[lex_.pos];
        if (c >= 'a' && c <= 'z') {
            std::size_t start = lex_.pos;
            while (lex_.pos < lex_.src.size() &&
                   ((lex_.src[lex_.pos] >= 'a' && lex_.src[lex_.pos] <= 'z') ||
                    (lex_.src[lex_.pos] >= '0' && lex_.src[lex_.pos] <= '9') ||
                    lex_.src[lex_.pos] == '_'))
                lex_.pos++;
            std::string id(lex_.src.substr(start, lex_.pos - start));
            if (id == "top") return Formula::top();
            if (id == "bot") return Formula::bot();
            return Formula::var(id);
        }
        throw ParseError(lex_.pos, std::string("unknown token '") + c + "'");
    }
};

}  // namespace

Formula parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

std::vector<Formula> subformulas(const Formula& f) {
    std::vector<Formula> out;
    std::vector<Formula> stack{f};
    while (!stack.empty()) {
        Formula g = stack.back();
        stack.pop_back();
        if (std::find(out.begin(), out.end(), g) != out.end()) continue;
        out.push_back(g);
        if (g.is_binary()) {
            stack.push_back(g.left());
            stack.push_back(g.right());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ── OmegaSet ────────────────────────────────────────────────────────────────

OmegaSet OmegaSet::closure(std::span<const Formula> seeds) {
    OmegaSet omega;
    for (const Formula& f : seeds)
        for (const Formula& g : subformulas(f))
            if (std::find(omega.formulas_.begin(), omega.formulas_.end(), g) ==
                omega.formulas_.end())
                omega.formulas_.push_back(g);
    std::sort(omega.formulas_.begin(), omega.formulas_.end());
    return omega;
}

bool OmegaSet::contains(const Formula& f) const noexcept {
    return std::binary_search(formulas_.begin(), formulas_.end(), f);
}

std::optional<std::size_t> OmegaSet::index_of(const Formula& f) const noexcept {
    auto it = std::lower_bound(formulas_.begin(), formulas_.end(), f);
    if (it != formulas_.end() && *it == f)
        return static_cast<std::size_t>(it - formulas_.begin());
    return std::nullopt;
}

// ── Hierarchy classifier ────────────────────────────────────────────────────
// P_0 = N_0 = Var
// P_{n+1} := 1 | bot | N_n | P_{n+1} \/ P_{n+1} | P_{n+1} * P_{n+1}
// N_{n+1} := 0 | top | P_n | N_{n+1} /\ N_{n+1} | P_{n+1} -> N_{n+1}
// P_3'    := 1 | bot | N_2 /\ 1 | P_3' \/ P_3' | P_3' * P_3'

namespace {

HierarchyClass classify_rec(const Formula& f,
                            std::map<Formula, HierarchyClass>& memo) {
    auto it = memo.find(f);
    if (it != memo.end()) return it->second;

    HierarchyClass l{}, r{};
    if (f.is_binary()) {
        l = classify_rec(f.left(), memo);
        r = classify_rec(f.right(), memo);
    }

    HierarchyClass c{};
    c.p[0] = c.n[0] = (f.kind() == FormulaKind::Var);
    for (int lvl = 1; lvl <= 3; lvl++) {
        // Direct grammar clauses at this level, then the inclusions
        // N_{lvl-1} <= P_lvl and P_{lvl-1} <= N_lvl.
        switch (f.kind()) {
            case FormulaKind::One:
            case FormulaKind::Bot:
                c.p[lvl] = true;
                break;
            case FormulaKind::Zero:
            case FormulaKind::Top:
                c.n[lvl] = true;
                break;
            case FormulaKind::Or:
            case FormulaKind::Fuse:
                c.p[lvl] = l.p[lvl] && r.p[lvl];
                break;
            case FormulaKind::And:
                c.n[lvl] = l.n[lvl] && r.n[lvl];
                break;
            case FormulaKind::Imp:
                c.n[lvl] = l.p[lvl] && r.n[lvl];
                break;
            case FormulaKind::Var:
                break;
        }
        c.p[lvl] = c.p[lvl] || c.n[lvl - 1];
        c.n[lvl] = c.n[lvl] || c.p[lvl - 1];
    }

    switch (f.kind()) {
        case FormulaKind::One:
        case FormulaKind::Bot:
            c.p3_prime = true;
            break;
        case FormulaKind::And:
            c.p3_prime = l.n[2] && f.right() == Formula::one();
            break;
        case FormulaKind::Or:
        case FormulaKind::Fuse:
            c.p3_prime = l.p3_prime && r.p3_prime;
            break;
        default:
            break;
    }

    memo.emplace(f, c);
    return c;
}

}  // namespace

HierarchyClass classify_hierarchy(const Formula& f) {
    std::map<Formula, HierarchyClass> memo;
    return classify_rec(f, memo);
}

}  // namespace hyperprover

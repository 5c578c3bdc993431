#include "hyperprover/hyperseq.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace hyperprover {

// ── FormulaMultiset ─────────────────────────────────────────────────────────

FormulaMultiset::FormulaMultiset(std::vector<Formula> occurrences) : occ_(std::move(occurrences)) {
    std::sort(occ_.begin(), occ_.end());
}

void FormulaMultiset::add(const Formula& f, std::uint32_t count) {
    auto it = std::lower_bound(occ_.begin(), occ_.end(), f);
    occ_.insert(it, count, f);
}

void FormulaMultiset::remove(const Formula& f, std::uint32_t count) {
    auto lo = std::lower_bound(occ_.begin(), occ_.end(), f);
    auto hi = std::upper_bound(lo, occ_.end(), f);
    auto n = std::min<std::ptrdiff_t>(hi - lo, count);
    occ_.erase(lo, lo + n);
}

std::uint32_t FormulaMultiset::count(const Formula& f) const noexcept {
    auto lo = std::lower_bound(occ_.begin(), occ_.end(), f);
    auto hi = std::upper_bound(lo, occ_.end(), f);
    return static_cast<std::uint32_t>(hi - lo);
}

std::vector<Formula> FormulaMultiset::support() const {
    std::vector<Formula> out;
    for (const Formula& f : occ_)
        if (out.empty() || !(out.back() == f)) out.push_back(f);
    return out;
}

bool FormulaMultiset::submultiset_of(const FormulaMultiset& o) const noexcept {
    return std::includes(o.occ_.begin(), o.occ_.end(), occ_.begin(), occ_.end());
}

bool FormulaMultiset::same_support(const FormulaMultiset& o) const noexcept {
    std::size_t i = 0, j = 0;
    while (i < occ_.size() && j < o.occ_.size()) {
        if (!(occ_[i] == o.occ_[j])) return false;
        const Formula& f = occ_[i];
        while (i < occ_.size() && occ_[i] == f) i++;
        while (j < o.occ_.size() && o.occ_[j] == f) j++;
    }
    return i == occ_.size() && j == o.occ_.size();
}

FormulaMultiset FormulaMultiset::sum(const FormulaMultiset& o) const {
    FormulaMultiset out;
    out.occ_.reserve(occ_.size() + o.occ_.size());
    std::merge(occ_.begin(), occ_.end(), o.occ_.begin(), o.occ_.end(),
               std::back_inserter(out.occ_));
    return out;
}

FormulaMultiset FormulaMultiset::pointwise_max(const FormulaMultiset& o) const {
    FormulaMultiset out = *this;
    for (const Formula& f : o.support()) {
        std::uint32_t have = out.count(f);
        std::uint32_t want = o.count(f);
        if (want > have) out.add(f, want - have);
    }
    return out;
}

FormulaMultiset FormulaMultiset::minus_truncated(const FormulaMultiset& o) const {
    FormulaMultiset out = *this;
    for (const Formula& f : o.support()) out.remove(f, o.count(f));
    return out;
}

std::strong_ordering FormulaMultiset::operator<=>(const FormulaMultiset& o) const noexcept {
    return occ_ <=> o.occ_;
}

// ── Sequent ─────────────────────────────────────────────────────────────────

int Sequent::symbol_size() const {
    int n = 1;  // the arrow
    for (const Formula& f : antecedent.occurrences()) n += f.symbol_count();
    if (antecedent.cardinality() > 1) n += static_cast<int>(antecedent.cardinality()) - 1;
    if (succedent) n += succedent->symbol_count();
    return n;
}

std::string Sequent::text() const {
    std::string out;
    const auto& occ = antecedent.occurrences();
    for (std::size_t i = 0; i < occ.size(); i++) {
        if (i > 0) out += ", ";
        out += occ[i].text();
    }
    if (!occ.empty()) out += " ";
    out += "=>";
    if (succedent) {
        out += " ";
        out += succedent->text();
    }
    return out;
}

std::strong_ordering Sequent::operator<=>(const Sequent& o) const noexcept {
    // Empty succedent sorts first, then by succedent, then antecedent.
    if (succedent.has_value() != o.succedent.has_value())
        return succedent.has_value() <=> o.succedent.has_value();
    if (succedent && o.succedent)
        if (auto c = *succedent <=> *o.succedent; c != 0) return c;
    return antecedent <=> o.antecedent;
}

// ── Hypersequent ────────────────────────────────────────────────────────────

Hypersequent::Hypersequent(std::vector<Sequent> components) : comps_(std::move(components)) {
    std::sort(comps_.begin(), comps_.end());
    rehash();
}

Hypersequent Hypersequent::single(Sequent s) { return Hypersequent({std::move(s)}); }

Hypersequent Hypersequent::goal(const Formula& f) {
    return single(Sequent{FormulaMultiset{}, f});
}

std::vector<std::pair<Sequent, std::uint32_t>> Hypersequent::distinct_components() const {
    std::vector<std::pair<Sequent, std::uint32_t>> out;
    for (const Sequent& s : comps_) {
        if (!out.empty() && out.back().first == s)
            out.back().second++;
        else
            out.emplace_back(s, 1);
    }
    return out;
}

std::uint32_t Hypersequent::multiplicity(const Sequent& s) const noexcept {
    auto lo = std::lower_bound(comps_.begin(), comps_.end(), s);
    auto hi = std::upper_bound(lo, comps_.end(), s);
    return static_cast<std::uint32_t>(hi - lo);
}

Hypersequent Hypersequent::merged_with(const Hypersequent& o) const {
    std::vector<Sequent> all;
    all.reserve(comps_.size() + o.comps_.size());
    std::merge(comps_.begin(), comps_.end(), o.comps_.begin(), o.comps_.end(),
               std::back_inserter(all));
    Hypersequent out;
    out.comps_ = std::move(all);
    out.rehash();
    return out;
}

Hypersequent Hypersequent::with_component(const Sequent& s, std::uint32_t count) const {
    Hypersequent out = *this;
    auto it = std::lower_bound(out.comps_.begin(), out.comps_.end(), s);
    out.comps_.insert(it, count, s);
    out.rehash();
    return out;
}

Hypersequent Hypersequent::without_component_at(std::size_t index) const {
    assert(index < comps_.size());
    Hypersequent out = *this;
    out.comps_.erase(out.comps_.begin() + static_cast<std::ptrdiff_t>(index));
    out.rehash();
    return out;
}

Hypersequent Hypersequent::support() const {
    std::vector<Sequent> out;
    for (const Sequent& s : comps_)
        if (out.empty() || !(out.back() == s)) out.push_back(s);
    Hypersequent h;
    h.comps_ = std::move(out);
    h.rehash();
    return h;
}

std::string Hypersequent::text() const {
    std::string out;
    for (std::size_t i = 0; i < comps_.size(); i++) {
        if (i > 0) out += " | ";
        out += comps_[i].text();
    }
    return out;
}

bool Hypersequent::is_omega_hypersequent(const OmegaSet& omega) const {
    for (const Sequent& s : comps_) {
        for (const Formula& f : s.antecedent.occurrences())
            if (!omega.contains(f)) return false;
        if (s.succedent && !omega.contains(*s.succedent)) return false;
    }
    return true;
}

std::vector<Formula> Hypersequent::all_formulas() const {
    std::vector<Formula> out;
    for (const Sequent& s : comps_) {
        for (const Formula& f : s.antecedent.occurrences()) out.push_back(f);
        if (s.succedent) out.push_back(*s.succedent);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void Hypersequent::rehash() {
    std::size_t h = comps_.size();
    int size = comps_.empty() ? 0 : static_cast<int>(comps_.size()) - 1;
    for (const Sequent& s : comps_) {
        std::size_t sh = s.succedent ? s.succedent->hash() : 0x9e3779b97f4a7c15ull;
        for (const Formula& f : s.antecedent.occurrences())
            sh = sh * 1000003u ^ f.hash();
        h = h * 0x100000001b3ull ^ sh;
        size += s.symbol_size();
    }
    hash_ = h;
    size_ = size;
}

// ── Parsing ─────────────────────────────────────────────────────────────────

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Split outside parentheses on a single-char separator.
std::vector<std::string_view> split_top(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); i++) {
        if (s[i] == '(') depth++;
        if (s[i] == ')') depth--;
        if (depth == 0 && s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    parts.push_back(s.substr(start));
    return parts;
}

}  // namespace

Sequent parse_sequent(std::string_view text) {
    // Accept the Unicode arrow as an input alias.
    std::string buf(text);
    for (std::string::size_type p; (p = buf.find("⇒")) != std::string::npos;)
        buf.replace(p, std::string("⇒").size(), "=>");
    auto arrow = buf.find("=>");
    if (arrow == std::string::npos)
        throw ParseError(0, "sequent is missing '=>'");
    std::string_view ante = trim(std::string_view(buf).substr(0, arrow));
    std::string_view succ = trim(std::string_view(buf).substr(arrow + 2));

    Sequent s;
    if (!ante.empty())
        for (std::string_view part : split_top(ante, ','))
            s.antecedent.add(parse_formula(std::string(trim(part))));
    if (!succ.empty()) s.succedent = parse_formula(std::string(succ));
    return s;
}

Hypersequent parse_hypersequent(std::string_view text) {
    text = trim(text);
    if (text.empty()) return Hypersequent{};
    std::vector<Sequent> comps;
    for (std::string_view part : split_top(text, '|'))
        comps.push_back(parse_sequent(trim(part)));
    return Hypersequent(std::move(comps));
}

// ── Quasi-orders ────────────────────────────────────────────────────────────

namespace {

bool component_embeds(const Sequent& small, const Sequent& big) {
    return small.succedent == big.succedent && small.antecedent.submultiset_of(big.antecedent);
}

}  // namespace

bool weak_reach_unchecked(const Hypersequent& g, const Hypersequent& h) noexcept {
    const auto& gc = g.components();
    const auto& hc = h.components();
    for (std::size_t i = 0; i < gc.size();) {
        bool found = false;
        for (std::size_t j = 0; j < hc.size() && !found;) {
            if (component_embeds(gc[i], hc[j])) found = true;
            std::size_t j2 = j + 1;
            while (j2 < hc.size() && hc[j2] == hc[j]) j2++;
            j = j2;
        }
        if (!found) return false;
        std::size_t i2 = i + 1;
        while (i2 < gc.size() && gc[i2] == gc[i]) i2++;
        i = i2;
    }
    return true;
}

bool weak_reach(const Hypersequent& g, const Hypersequent& h, const OmegaSet& omega) {
    if (!g.is_omega_hypersequent(omega))
        throw std::invalid_argument("weak_reach: left argument is not an omega-hypersequent");
    if (!h.is_omega_hypersequent(omega))
        throw std::invalid_argument("weak_reach: right argument is not an omega-hypersequent");
    return weak_reach_unchecked(g, h);
}

Hypersequent two_reduct(const Hypersequent& h) {
    std::vector<Sequent> comps;
    for (const auto& [s, mult] : h.distinct_components())
        for (std::uint32_t i = 0; i < std::min<std::uint32_t>(mult, 2); i++) comps.push_back(s);
    return Hypersequent(std::move(comps));
}

bool contract_reach(const Hypersequent& g, const Hypersequent& h) noexcept {
    const auto& gc = g.components();
    const auto& hc = h.components();
    for (std::size_t j = 0; j < hc.size();) {
        bool found = false;
        for (std::size_t i = 0; i < gc.size() && !found;) {
            const Sequent& gs = gc[i];
            if (gs.succedent == hc[j].succedent &&
                gs.antecedent.submultiset_of(hc[j].antecedent) &&
                gs.antecedent.same_support(hc[j].antecedent))
                found = true;
            std::size_t i2 = i + 1;
            while (i2 < gc.size() && gc[i2] == gc[i]) i2++;
            i = i2;
        }
        if (!found) return false;
        std::size_t j2 = j + 1;
        while (j2 < hc.size() && hc[j2] == hc[j]) j2++;
        j = j2;
    }
    return true;
}

// ── # encoding ──────────────────────────────────────────────────────────────

PowVector encode_sharp(const Hypersequent& h, const OmegaSet& omega) {
    PowVector v;
    v.dim = omega.size();
    v.groups.assign(omega.size() + 1, PowSet{});
    for (const auto& [s, mult] : h.distinct_components()) {
        std::size_t group = 0;
        if (s.succedent) {
            auto idx = omega.index_of(*s.succedent);
            if (!idx) throw std::invalid_argument("encode_sharp: succedent outside omega");
            group = *idx + 1;
        }
        NatTuple tuple(omega.size(), 0);
        for (const Formula& f : s.antecedent.support()) {
            auto idx = omega.index_of(f);
            if (!idx) throw std::invalid_argument("encode_sharp: antecedent formula outside omega");
            tuple[*idx] = s.antecedent.count(f);
        }
        v.groups[group].insert(std::move(tuple));
    }
    return v;
}

bool leq_majoring_vector(const PowVector& x, const PowVector& y) {
    return leq_vector(x.groups, y.groups, SetOrder::Majoring);
}

bool leq_minoring_vector(const PowVector& x, const PowVector& y) {
    return leq_vector(x.groups, y.groups, SetOrder::Minoring);
}

}  // namespace hyperprover

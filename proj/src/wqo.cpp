#include "hyperprover/wqo.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace hyperprover {

PowSet::PowSet(std::vector<NatTuple> tuples) : tuples_(std::move(tuples)) {
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
}

void PowSet::insert(NatTuple t) {
    auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
    if (it == tuples_.end() || *it != t) tuples_.insert(it, std::move(t));
}

bool leq_pointwise(const NatTuple& x, const NatTuple& y) {
    if (x.size() != y.size()) throw DimensionMismatch("tuple length mismatch");
    for (std::size_t i = 0; i < x.size(); i++)
        if (x[i] > y[i]) return false;
    return true;
}

bool leq_majoring(const PowSet& x, const PowSet& y) {
    for (const NatTuple& a : x.tuples()) {
        bool covered = false;
        for (const NatTuple& b : y.tuples())
            if (leq_pointwise(a, b)) {
                covered = true;
                break;
            }
        if (!covered) return false;
    }
    return true;
}

bool leq_minoring(const PowSet& x, const PowSet& y) {
    for (const NatTuple& b : y.tuples()) {
        bool minored = false;
        for (const NatTuple& a : x.tuples())
            if (leq_pointwise(a, b)) {
                minored = true;
                break;
            }
        if (!minored) return false;
    }
    return true;
}

bool leq_vector(std::span<const PowSet> x, std::span<const PowSet> y, SetOrder order) {
    if (x.size() != y.size()) throw DimensionMismatch("vector length mismatch");
    for (std::size_t i = 0; i < x.size(); i++) {
        bool ok = order == SetOrder::Majoring ? leq_majoring(x[i], y[i])
                                              : leq_minoring(x[i], y[i]);
        if (!ok) return false;
    }
    return true;
}

std::uint64_t norm(const NatTuple& x) {
    std::uint64_t m = 0;
    for (std::uint64_t v : x) m = std::max(m, v);
    return m;
}

std::uint64_t norm(const PowSet& x) {
    std::uint64_t m = x.size();
    for (const NatTuple& t : x.tuples()) m = std::max(m, norm(t));
    return m;
}

std::uint64_t norm(std::span<const PowSet> v) {
    std::uint64_t m = 0;
    for (const PowSet& x : v) m = std::max(m, norm(x));
    return m;
}

namespace {
constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    return a > kMax - b ? kMax : a + b;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    return a > kMax / b ? kMax : a * b;
}

std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t r = 1;
    while (exp-- > 0) {
        r = saturating_mul(r, base);
        if (r == kMax) return kMax;
    }
    return r;
}

std::uint64_t ControlFunction::apply(std::uint64_t x) const {
    switch (family_) {
        case Family::Add: return saturating_add(x, a_);
        case Family::Mul: return saturating_mul(a_, x);
        case Family::Pow: return saturating_pow(x, a_);
        case Family::ExpPow: {
            std::uint64_t e = saturating_pow(x, a_);
            return e >= 64 ? kMax : (std::uint64_t{1} << e);
        }
        case Family::Affine: return saturating_add(saturating_mul(a_, x), b_);
    }
    return x;
}

std::uint64_t ControlFunction::iterate(std::uint64_t n, std::uint64_t i) const {
    std::uint64_t v = n;
    while (i-- > 0) {
        v = apply(v);
        if (v == kMax) return kMax;
    }
    return v;
}

std::string ControlFunction::name() const {
    switch (family_) {
        case Family::Add: return "add";
        case Family::Mul: return "mul";
        case Family::Pow: return "pow";
        case Family::ExpPow: return "exppow";
        case Family::Affine: return "affine";
    }
    return "?";
}

std::optional<ControlFunction> ControlFunction::parse(const std::string& name, std::uint64_t a,
                                                      std::uint64_t b) {
    if (name == "add") return add(a);
    if (name == "mul") return mul(a);
    if (name == "pow") return pow(a);
    if (name == "exppow") return exp_pow(a);
    if (name == "affine") return affine(a, b);
    return std::nullopt;
}

BadSequenceReport verify_controlled_bad(const ControlledSequence& seq, SetOrder order) {
    BadSequenceReport report;
    for (std::size_t i = 0; i < seq.entries.size() && report.ok; i++) {
        std::uint64_t bound = seq.control.iterate(seq.start, i);
        if (norm(std::span<const PowSet>(seq.entries[i])) > bound) {
            report.ok = false;
            report.control_violation = i;
            return report;
        }
        for (std::size_t j = i + 1; j < seq.entries.size(); j++) {
            if (leq_vector(seq.entries[i], seq.entries[j], order)) {
                report.ok = false;
                report.comparable_pair = {i, j};
                return report;
            }
        }
    }
    return report;
}

void write_controlled_sequence(std::ostream& out, const ControlledSequence& seq) {
    out << "k=" << seq.tuple_len << " d=" << seq.group_count << " control="
        << seq.control.name() << " a=" << seq.control.param_a() << " b="
        << seq.control.param_b() << " n=" << seq.start << "\n";
    for (const auto& entry : seq.entries) {
        for (std::size_t g = 0; g < entry.size(); g++) {
            if (g > 0) out << ";";
            if (entry[g].empty()) {
                out << "-";
                continue;
            }
            for (const NatTuple& t : entry[g].tuples()) {
                out << "(";
                for (std::size_t i = 0; i < t.size(); i++) {
                    if (i > 0) out << ",";
                    out << t[i];
                }
                out << ")";
            }
        }
        out << "\n";
    }
}

namespace {

std::uint64_t parse_field(const std::string& header, const std::string& key) {
    auto pos = header.find(key + "=");
    if (pos == std::string::npos) throw std::runtime_error("missing header field " + key);
    return std::stoull(header.substr(pos + key.size() + 1));
}

std::string parse_field_str(const std::string& header, const std::string& key) {
    auto pos = header.find(key + "=");
    if (pos == std::string::npos) throw std::runtime_error("missing header field " + key);
    auto start = pos + key.size() + 1;
    auto end = header.find(' ', start);
    return header.substr(start, end == std::string::npos ? end : end - start);
}

}  // namespace

ControlledSequence read_controlled_sequence(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty controlled sequence");
    ControlledSequence seq;
    seq.tuple_len = parse_field(header, "k");
    seq.group_count = parse_field(header, "d");
    auto control = ControlFunction::parse(parse_field_str(header, "control"),
                                          parse_field(header, "a"), parse_field(header, "b"));
    if (!control) throw std::runtime_error("unknown control function");
    seq.control = *control;
    seq.start = parse_field(header, "n");

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<PowSet> groups;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            auto next = line.find(';', pos);
            std::string part = line.substr(pos, next == std::string::npos ? next : next - pos);
            PowSet set;
            if (part != "-") {
                std::size_t p = 0;
                while (p < part.size()) {
                    if (part[p] != '(') throw std::runtime_error("bad tuple syntax");
                    auto close = part.find(')', p);
                    if (close == std::string::npos) throw std::runtime_error("bad tuple syntax");
                    NatTuple t;
                    std::stringstream ss(part.substr(p + 1, close - p - 1));
                    std::string num;
                    while (std::getline(ss, num, ','))
                        if (!num.empty()) t.push_back(std::stoull(num));
                    set.insert(std::move(t));
                    p = close + 1;
                }
            }
            groups.push_back(std::move(set));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        seq.entries.push_back(std::move(groups));
    }
    return seq;
}

}  // namespace hyperprover

#include "pdcvis/term_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

#include "pdcvis/errors.hpp"

namespace pdcvis {

namespace {

constexpr int kA = 0, kB = 1, kAP = 2, kBP = 3, kAT = 4, kBT = 5;

// A pump slot: choosing its exponential adds this linear form to the term's
// phase. Pump exponentials carry no minus sign and no analyzer phase.
struct PumpSlot {
    CoeffMap delta;
};

CoeffMap form(std::initializer_list<std::pair<int, int>> entries) {
    CoeffMap c{};
    for (auto [var, units] : entries) c[static_cast<std::size_t>(var)] += units;
    return c;
}

std::vector<PumpSlot> pump_slots(RateKind kind) {
    switch (kind) {
    case RateKind::r2:
        return {{form({{kA, 1}, {kB, 1}})}, {form({{kAP, -1}, {kBP, -1}})}};
    case RateKind::r41:
        // Spectator-pair factors first (its own squared pump envelope), then
        // the detected pair's, matching the integrand's display order.
        return {{form({{kAT, 1}, {kBT, 1}})},
                {form({{kAT, -1}, {kBT, -1}})},
                {form({{kA, 1}, {kB, 1}})},
                {form({{kAP, -1}, {kBP, -1}})}};
    case RateKind::r42:
        return {{form({{kAT, -1}, {kBT, -1}})},
                {form({{kAP, -1}, {kBP, -1}})},
                {form({{kAT, 1}, {kB, 1}})},
                {form({{kA, 1}, {kBT, 1}})}};
    case RateKind::r43:
        return {{form({{kAT, -1}, {kBP, -1}})},
                {form({{kAP, -1}, {kBT, -1}})},
                {form({{kAT, 1}, {kB, 1}})},
                {form({{kA, 1}, {kBT, 1}})}};
    }
    throw std::invalid_argument("pump_slots: unknown rate kind");
}

// An interferometer slot: the delayed exponential adds the variable's
// coefficient, one unit of its arm's analyzer phase, and a minus sign.
struct EvolutionSlot {
    int var;
    int var_units;
    int alpha_units;
    int beta_units;
};

// Order (b, a, b', a'): arm-b factor, arm-a factor, then their conjugates.
std::vector<EvolutionSlot> evolution_slots() {
    return {
        {kB, 1, 0, 1},
        {kA, 1, 1, 0},
        {kBP, -1, 0, -1},
        {kAP, -1, -1, 0},
    };
}

// One joint-amplitude factor g (or its conjugate) inside a rate integrand.
struct GFactor {
    int signal;
    int idler;
    bool conj;
};

std::vector<GFactor> g_structure(RateKind kind) {
    switch (kind) {
    case RateKind::r2:
        return {{kA, kB, false}, {kAP, kBP, true}};
    case RateKind::r41:
        return {{kA, kB, false}, {kAP, kBP, true}, {kAT, kBT, false}, {kAT, kBT, true}};
    case RateKind::r42:
        return {{kAT, kBT, true}, {kAP, kBP, true}, {kAT, kB, false}, {kA, kBT, false}};
    case RateKind::r43:
        return {{kAT, kBP, true}, {kAP, kBT, true}, {kAT, kB, false}, {kA, kBT, false}};
    }
    throw std::invalid_argument("g_structure: unknown rate kind");
}

// Detector-resolution kernels identify the conjugate-side variables with
// their unprimed partners; the spectator pair stays distinct.
int merge_variable(int v) {
    if (v == kAP) return kA;
    if (v == kBP) return kB;
    return v;
}

struct DisjointSet {
    std::array<int, kTermVariables> parent;
    DisjointSet() { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[static_cast<std::size_t>(x)] == x
                                 ? x
                                 : parent[static_cast<std::size_t>(x)] =
                                       find(parent[static_cast<std::size_t>(x)]); }
    void unite(int x, int y) { parent[static_cast<std::size_t>(find(x))] = find(y); }
};

KernelClass classify_component(const std::vector<GFactor>& fs) {
    const bool has_filter_a = std::any_of(fs.begin(), fs.end(),
                                          [](const GFactor& f) { return f.signal == kA; });
    const bool has_filter_b = std::any_of(fs.begin(), fs.end(),
                                          [](const GFactor& f) { return f.idler == kB; });
    if (fs.size() == 2) {
        const GFactor& x = fs[0];
        const GFactor& y = fs[1];
        // |g|^2 of a single pair: one factor and one conjugate, same arguments.
        if (x.conj != y.conj && x.signal == y.signal && x.idler == y.idler) {
            if (has_filter_a && has_filter_b) return KernelClass::j_ab;
            if (has_filter_a) return KernelClass::j_a;
            if (has_filter_b) return KernelClass::j_b;
            return KernelClass::j_plain;
        }
    } else if (fs.size() == 4) {
        // The crossed pattern g*(s1,i1) g*(s2,i2) g(s1,i2) g(s2,i1) with the
        // filtered pair on one side of each conjugate factor.
        std::vector<GFactor> conj, plain;
        for (const GFactor& f : fs) (f.conj ? conj : plain).push_back(f);
        if (conj.size() == 2 && plain.size() == 2) {
            const int s1 = conj[0].signal, i1 = conj[0].idler;
            const int s2 = conj[1].signal, i2 = conj[1].idler;
            const bool crossed =
                s1 != s2 && i1 != i2 &&
                ((plain[0].signal == s1 && plain[0].idler == i2 &&
                  plain[1].signal == s2 && plain[1].idler == i1) ||
                 (plain[0].signal == s2 && plain[0].idler == i1 &&
                  plain[1].signal == s1 && plain[1].idler == i2));
            const bool one_filter_each =
                ((s1 == kA) != (s2 == kA)) && ((i1 == kB) != (i2 == kB));
            if (crossed && one_filter_each) return KernelClass::j4_exchange;
        }
    }
    throw UnclassifiedKernel("unrecognized joint-amplitude factor pattern in a kernel component");
}

KernelClass classify_kernel(RateKind kind) {
    std::vector<GFactor> merged;
    DisjointSet ds;
    for (const GFactor& f : g_structure(kind)) {
        GFactor m{merge_variable(f.signal), merge_variable(f.idler), f.conj};
        ds.unite(m.signal, m.idler);
        merged.push_back(m);
    }

    std::vector<KernelClass> components;
    for (int root = 0; root < kTermVariables; ++root) {
        if (ds.find(root) != root) continue;
        std::vector<GFactor> fs;
        for (const GFactor& f : merged)
            if (ds.find(f.signal) == root) fs.push_back(f);
        if (!fs.empty()) components.push_back(classify_component(fs));
    }
    std::sort(components.begin(), components.end());

    using KC = KernelClass;
    if (components == std::vector<KC>{KC::j_ab}) return KC::j_ab;
    if (components == std::vector<KC>{KC::j_plain, KC::j_ab}) return KC::j_times_j_ab;
    if (components == std::vector<KC>{KC::j_a, KC::j_b}) return KC::j_a_times_j_b;
    if (components == std::vector<KC>{KC::j4_exchange}) return KC::j4_exchange;
    if (components.size() == 1) return components.front();
    throw UnclassifiedKernel("kernel components do not combine into a known class");
}

double kernel_value(KernelClass k, const JIntegrals& j) {
    switch (k) {
    case KernelClass::j_plain: return j.j;
    case KernelClass::j_a: return j.j_a;
    case KernelClass::j_b: return j.j_b;
    case KernelClass::j_ab: return j.j_ab;
    case KernelClass::j_times_j_ab: return j.j * j.j_ab;
    case KernelClass::j_a_times_j_b: return j.j_a * j.j_b;
    case KernelClass::j4_exchange: return 0.5 * j.j4;  // one of the two orderings
    }
    throw std::invalid_argument("kernel_value: unknown kernel class");
}

} // namespace

TermSet enumerate_terms(RateKind kind, SetupKind setup, int t_a, int t_b) {
    const auto check_bin = [](int t, const char* name) {
        if (t < 0 || t > 2) {
            std::ostringstream msg;
            msg << name << " = " << t << " is outside the detected bins {0, 1, 2}";
            throw InvalidTimeBin(msg.str());
        }
    };
    check_bin(t_a, "t_a");
    check_bin(t_b, "t_b");

    const std::vector<PumpSlot> pumps = pump_slots(kind);
    const std::vector<EvolutionSlot> evos =
        setup == SetupKind::franson ? evolution_slots() : std::vector<EvolutionSlot>{};
    const std::size_t n_slots = pumps.size() + evos.size();

    // Detection-time phases are common to every term of the set.
    CoeffMap detection = form({{kA, -t_a}, {kAP, t_a}, {kB, -t_b}, {kBP, t_b}});

    TermSet set{kind, setup, t_a, t_b, {}};
    set.terms.reserve(std::size_t{1} << n_slots);

    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n_slots); ++mask) {
        Term term;
        term.coeff_map = detection;
        std::string pump_part, evo_part;
        for (std::size_t s = 0; s < pumps.size(); ++s) {
            const bool chosen = (mask >> s) & 1u;
            pump_part.push_back(chosen ? 'e' : '1');
            if (chosen)
                for (int v = 0; v < kTermVariables; ++v)
                    term.coeff_map[static_cast<std::size_t>(v)] +=
                        pumps[s].delta[static_cast<std::size_t>(v)];
        }
        for (std::size_t s = 0; s < evos.size(); ++s) {
            const bool chosen = (mask >> (pumps.size() + s)) & 1u;
            evo_part.push_back(chosen ? 'e' : '1');
            if (chosen) {
                const EvolutionSlot& e = evos[s];
                term.coeff_map[static_cast<std::size_t>(e.var)] += e.var_units;
                term.alpha_units += e.alpha_units;
                term.beta_units += e.beta_units;
                term.sign = -term.sign;
            }
        }
        term.label = evo_part.empty() ? pump_part : pump_part + "|" + evo_part;
        set.terms.push_back(std::move(term));
    }
    return set;
}

SurvivorReport select_stationary(const TermSet& terms) {
    SurvivorReport report;
    report.kind = terms.kind;
    report.setup = terms.setup;
    report.t_a = terms.t_a;
    report.t_b = terms.t_b;
    report.total_terms = terms.terms.size();
    report.kernel_class = classify_kernel(terms.kind);
    report.includes_conjugate = terms.kind == RateKind::r42;

    int c0 = 0, c_plus = 0, c_minus = 0;
    for (const Term& t : terms.terms) {
        const bool stationary =
            std::all_of(t.coeff_map.begin(), t.coeff_map.end(), [](int c) { return c == 0; });
        if (!stationary) continue;
        report.survivors.push_back(t);
        if (t.alpha_units == 0 && t.beta_units == 0) {
            c0 += t.sign;
        } else if (t.alpha_units == 1 && t.beta_units == 1) {
            c_plus += t.sign;
        } else if (t.alpha_units == -1 && t.beta_units == -1) {
            c_minus += t.sign;
        } else {
            std::ostringstream msg;
            msg << "survivor " << t.label << " carries analyzer phases (" << t.alpha_units
                << ", " << t.beta_units << ") outside the c0 + c1*cos(alpha+beta) family";
            throw NonRealCoefficient(msg.str());
        }
    }
    if (c_plus != c_minus) {
        std::ostringstream msg;
        msg << "survivor sum of " << to_string(terms.kind)
            << " has unbalanced conjugate phases (" << c_plus << " vs " << c_minus
            << "); the reconstructed rate would not be real";
        throw NonRealCoefficient(msg.str());
    }
    report.trig_constant = c0;
    report.trig_cosine = c_plus + c_minus;
    return report;
}

double RateExpression::value_at(double phase_sum) const {
    return constant + cosine * std::cos(phase_sum);
}

RateExpression reconstruct_rate(const SurvivorReport& report, const JIntegrals& j,
                                double intensity) {
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw std::invalid_argument("reconstruct_rate: intensity must be finite and >= 0");
    const int order = report.kind == RateKind::r2 ? 1 : 2;
    double base = std::pow(intensity, order) * kernel_value(report.kernel_class, j);
    if (report.includes_conjugate) base *= 2.0;  // report covers the term + its conjugate
    return RateExpression{base * static_cast<double>(report.trig_constant),
                          base * static_cast<double>(report.trig_cosine)};
}

std::string to_string(RateKind k) {
    switch (k) {
    case RateKind::r2: return "r2";
    case RateKind::r41: return "r41";
    case RateKind::r42: return "r42";
    case RateKind::r43: return "r43";
    }
    return "unknown";
}

std::string to_string(SetupKind s) {
    return s == SetupKind::calibration ? "calibration" : "franson";
}

std::string to_string(KernelClass k) {
    switch (k) {
    case KernelClass::j_plain: return "j";
    case KernelClass::j_a: return "j_a";
    case KernelClass::j_b: return "j_b";
    case KernelClass::j_ab: return "j_ab";
    case KernelClass::j_times_j_ab: return "j*j_ab";
    case KernelClass::j_a_times_j_b: return "j_a*j_b";
    case KernelClass::j4_exchange: return "j4";
    }
    return "unknown";
}

} // namespace pdcvis

// dpt.hpp
// Direct-product bound evaluators and the classical substate-perturbation check.
//
// The asymptotic constants of the exponents are not fixed by the theory; they
// are exposed as DPTParams::exponent_const (default 1). The case (ii) gate
// constant 270 is exact.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "dptkit/entropy.hpp"
#include "dptkit/errors.hpp"

namespace dptkit {

struct DPTParams {
    std::size_t l = 2;                  // players
    std::size_t n = 1;                  // copies
    double c = 0.0;                     // per-copy total communication (bits)
    std::vector<double> c_j;            // optional per-player split of c
    double eps = 0.0;
    double zeta = 0.1;
    double nu = 0.0;                    // 1 - quantum value
    std::vector<std::size_t> alphabet_sizes;
    std::size_t C_size = 0;
    double PrE = 1.0;
    double exponent_const = 1.0;

    void validate() const {
        if (l == 0) throw DomainError("DPTParams: need at least one player");
        if (n == 0) throw DomainError("DPTParams: n must be positive");
        if (!(c >= 0.0)) throw DomainError("DPTParams: c must be nonnegative");
        if (!c_j.empty()) {
            if (c_j.size() != l) throw DimensionError("DPTParams: c_j needs one entry per player");
            const double s = std::accumulate(c_j.begin(), c_j.end(), 0.0);
            if (std::abs(s - c) > 1e-9 * std::max(1.0, c)) throw DomainError("DPTParams: c_j does not sum to c");
        }
        if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("DPTParams: eps must lie in [0,1]");
        if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("DPTParams: zeta must lie in (0,1)");
        if (!(nu >= 0.0 && nu <= 1.0)) throw DomainError("DPTParams: nu must lie in [0,1]");
        if (!(PrE > 0.0 && PrE <= 1.0)) throw DomainError("DPTParams: PrE must lie in (0,1]");
        if (!(exponent_const >= 0.0)) throw DomainError("DPTParams: exponent_const must be nonnegative");
        if (!alphabet_sizes.empty() && alphabet_sizes.size() != l)
            throw DimensionError("DPTParams: alphabet_sizes needs one entry per player");
        for (auto a : alphabet_sizes)
            if (a == 0) throw DomainError("DPTParams: empty output alphabet");
    }
};

// log2 of the product of the output alphabet sizes.
inline double log_alphabet(const std::vector<std::size_t>& sizes) {
    double s = 0.0;
    for (auto a : sizes) {
        if (a == 0) throw DomainError("log_alphabet: empty output alphabet");
        s += std::log2(static_cast<double>(a));
    }
    return s;
}

namespace detail {
inline double positive_log_alphabet(const std::vector<std::size_t>& sizes) {
    const double la = log_alphabet(sizes);
    if (!(la > 0.0)) throw DomainError("bound needs an output alphabet product larger than 1");
    return la;
}
inline double floored_power(double base, double exponent) {
    base = std::clamp(base, 0.0, 1.0);
    if (base >= 1.0) return 1.0;
    return std::clamp(std::pow(base, std::floor(exponent)), 0.0, 1.0);
}
} // namespace detail

// delta = (|C| log2 prod|A_j| + log2(1/Pr[E])) / n
inline double delta_of(std::size_t C_size, double PrE, std::size_t n, const std::vector<std::size_t>& alphabet_sizes) {
    if (n == 0) throw DomainError("delta_of: n must be positive");
    if (!(PrE > 0.0 && PrE <= 1.0)) throw DomainError("delta_of: PrE must lie in (0,1]");
    return (static_cast<double>(C_size) * log_alphabet(alphabet_sizes) - std::log2(PrE)) / static_cast<double>(n);
}

inline double case_i_base(const DPTParams& p) {
    return 1.0 - p.nu / 2.0 + 4.0 * std::sqrt(static_cast<double>(p.l) * p.c);
}

// (1 - nu/2 + 4 sqrt(l c))^floor(k nu^2 n / (l^2 log2 prod|A_j|)), or 1 when the base is >= 1.
inline double dpt_case_i_bound(const DPTParams& p) {
    p.validate();
    if (!(p.c < 1.0)) throw DomainError("dpt_case_i_bound: requires c < 1");
    const double base = case_i_base(p);
    if (base >= 1.0) return 1.0;
    const double l = static_cast<double>(p.l);
    const double e = p.exponent_const * p.nu * p.nu * static_cast<double>(p.n) /
                     (l * l * detail::positive_log_alphabet(p.alphabet_sizes));
    return detail::floored_power(base, e);
}

inline double case_ii_gate(const DPTParams& p, double eff) {
    const double l = static_cast<double>(p.l);
    return p.zeta * p.zeta * eff / (270.0 * l * l * l);
}

// (1 - eps)^floor(k n / log2 prod|A_j|), valid when 1 <= c < zeta^2 eff / (270 l^3).
inline double dpt_case_ii_bound(const DPTParams& p, double eff) {
    p.validate();
    if (!(eff >= 1.0)) throw DomainError("dpt_case_ii_bound: eff must be >= 1");
    const double gate = case_ii_gate(p, eff);
    if (!(p.c >= 1.0 && p.c < gate))
        throw GateViolation("dpt_case_ii_bound: need 1 <= c < zeta^2 eff / (270 l^3) = " + std::to_string(gate) +
                            ", got c = " + std::to_string(p.c));
    const double e = p.exponent_const * static_cast<double>(p.n) / detail::positive_log_alphabet(p.alphabet_sizes);
    return detail::floored_power(1.0 - p.eps, e);
}

enum class RandvMode { generic, mse };

struct RandvParams {
    std::size_t t = 0;
    std::size_t n = 1;
    double c = 0.0;
    std::size_t l = 2;
    double nu = 0.0;
    double beta = 1.0;
    std::vector<std::size_t> alphabet_sizes;
    RandvMode mode = RandvMode::generic;
};

// Winning probability on a random t-subset of n copies.
//   generic: (1 - nu + beta (sqrt(l c) + l sqrt(t log2 prod|A_j| / n)))^t
//   mse:     ((1 - nu + beta (sqrt(c) + sqrt(t / n))) / 9)^t
inline double randv_bound(const RandvParams& p) {
    if (p.n == 0) throw DomainError("randv_bound: n must be positive");
    if (p.t > p.n) throw DomainError("randv_bound: t must not exceed n");
    if (!(p.nu >= 0.0 && p.nu <= 1.0)) throw DomainError("randv_bound: nu must lie in [0,1]");
    if (!(p.c >= 0.0) || !(p.beta >= 0.0)) throw DomainError("randv_bound: c and beta must be nonnegative");
    if (p.t == 0) return 1.0;
    const double frac = static_cast<double>(p.t) / static_cast<double>(p.n);
    double base;
    if (p.mode == RandvMode::mse) {
        base = (1.0 - p.nu + p.beta * (std::sqrt(p.c) + std::sqrt(frac))) / 9.0;
    } else {
        const double l = static_cast<double>(p.l);
        base = 1.0 - p.nu + p.beta * (std::sqrt(l * p.c) + l * std::sqrt(frac * log_alphabet(p.alphabet_sizes)));
    }
    base = std::clamp(base, 0.0, 1.0);
    return std::clamp(std::pow(base, static_cast<double>(p.t)), 0.0, 1.0);
}

// ------------------------------------------------------ substate perturbation

namespace detail {

struct FidelityMax {
    bool feasible = false;  // some distribution satisfies r <= cap
    double fidelity = 0.0;
    std::vector<double> witness;
};

// max sum_i sqrt(s_i r_i) over distributions r with r_i <= cap_i.
// Optimal r_i = min(cap_i, t s_i) on supp(s); leftover mass goes outside supp(s).
inline FidelityMax max_fidelity_under_cap(const std::vector<double>& s, const std::vector<double>& cap) {
    const std::size_t n = s.size();
    FidelityMax out;
    const double cap_total = std::accumulate(cap.begin(), cap.end(), 0.0);
    if (cap_total < 1.0 - 1e-12) return out;
    out.feasible = true;
    out.witness.assign(n, 0.0);

    double support_cap = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (s[i] > 0.0) support_cap += cap[i];

    if (support_cap <= 1.0) {
        for (std::size_t i = 0; i < n; ++i)
            if (s[i] > 0.0) out.witness[i] = cap[i];
        double rest = 1.0 - support_cap, rest_cap = cap_total - support_cap;
        for (std::size_t i = 0; i < n; ++i)
            if (s[i] <= 0.0 && rest_cap > 0.0) out.witness[i] = cap[i] * rest / rest_cap;
    } else {
        // g(t) = sum min(cap_i, t s_i) is piecewise linear; walk breakpoints cap_i / s_i upward.
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (s[i] > 0.0) idx.push_back(i);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return cap[a] / s[a] < cap[b] / s[b]; });
        double capped = 0.0, slope = 0.0;
        for (auto i : idx) slope += s[i];
        double t = 0.0;
        for (std::size_t k = 0; k <= idx.size(); ++k) {
            t = (1.0 - capped) / slope;
            if (k == idx.size() || t <= cap[idx[k]] / s[idx[k]]) break;
            capped += cap[idx[k]];
            slope -= s[idx[k]];
        }
        for (auto i : idx) out.witness[i] = std::min(cap[i], t * s[i]);
    }
    for (std::size_t i = 0; i < n; ++i) out.fidelity += std::sqrt(s[i] * out.witness[i]);
    out.fidelity = std::min(1.0, out.fidelity);
    return out;
}

} // namespace detail

struct SubstateReport {
    enum class Status { feasible, infeasible, hypothesis_failure };
    Status status = Status::infeasible;
    std::string detail;
    double hypothesis_distance = 0.0;  // best purified distance reachable under 2^c psi x sigma_B
    double marginal_distance = 0.0;    // purified distance between sigma_B and rho_B
    double target_distance = 0.0;      // 2 eps + delta0 + delta1
    double achieved_distance = 0.0;    // best purified distance reachable under the conclusion cap
    double cap_factor = 0.0;           // 2^{c+1} (1 + 4 / delta0^2)
    std::vector<double> witness;       // rho', row-major over (x, b)
};

inline const char* to_string(SubstateReport::Status s) {
    switch (s) {
    case SubstateReport::Status::feasible: return "feasible";
    case SubstateReport::Status::infeasible: return "infeasible";
    case SubstateReport::Status::hypothesis_failure: return "hypothesis_failure";
    }
    return "?";
}

// Classical instance of the substate perturbation statement: given
//   P(sigma', sigma_XB) <= eps with sigma' <= 2^c psi_X x sigma_B, and P(sigma_B, rho_B) <= delta1,
// look for rho' with P(rho', sigma_XB) <= 2 eps + delta0 + delta1 and
//   rho' <= 2^{c+1} (1 + 4 / delta0^2) psi_X x rho_B.
// Both existence questions maximize a concave fidelity over a capped simplex,
// which has the exact water-filling solution above.
inline SubstateReport substate_perturbation_check_classical(const JointTable& sigma_xb, const std::vector<double>& psi_x,
                                                            const std::vector<double>& rho_b, double c, double eps,
                                                            double delta0, double delta1) {
    const std::size_t nx = sigma_xb.ny(), nb = sigma_xb.nz();
    if (psi_x.size() != nx || rho_b.size() != nb) throw DimensionError("substate check: marginal sizes mismatch");
    (void)ClassicalDistribution(psi_x);
    (void)ClassicalDistribution(rho_b);
    if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("substate check: eps must lie in [0,1)");
    if (!(delta0 > 0.0)) throw DomainError("substate check: delta0 must be positive");
    if (!(delta1 >= 0.0)) throw DomainError("substate check: delta1 must be nonnegative");
    if (!std::isfinite(c)) throw DomainError("substate check: c must be finite");

    SubstateReport r;
    const std::vector<double> s(sigma_xb.cells().begin(), sigma_xb.cells().end());
    const std::vector<double> sigma_b = sigma_xb.marginal_z();
    auto cap_for = [&](double factor, const std::vector<double>& b) {
        std::vector<double> cap(nx * nb);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t k = 0; k < nb; ++k) cap[x * nb + k] = factor * psi_x[x] * b[k];
        return cap;
    };
    auto distance = [](double f) { return std::sqrt(std::max(0.0, 1.0 - f * f)); };

    const auto hyp = detail::max_fidelity_under_cap(s, cap_for(std::exp2(c), sigma_b));
    r.hypothesis_distance = hyp.feasible ? distance(hyp.fidelity) : 1.0;
    r.marginal_distance = classical_purified_distance(sigma_b, rho_b);
    r.target_distance = 2.0 * eps + delta0 + delta1;
    r.cap_factor = std::exp2(c + 1.0) * (1.0 + 4.0 / (delta0 * delta0));

    if (!hyp.feasible || r.hypothesis_distance > eps + 1e-12) {
        r.status = SubstateReport::Status::hypothesis_failure;
        r.detail = "no sigma' within eps under 2^c psi x sigma_B";
        return r;
    }
    if (r.marginal_distance > delta1 + 1e-12) {
        r.status = SubstateReport::Status::hypothesis_failure;
        r.detail = "P(sigma_B, rho_B) exceeds delta1";
        return r;
    }

    const auto concl = detail::max_fidelity_under_cap(s, cap_for(r.cap_factor, rho_b));
    if (!concl.feasible) {
        r.status = SubstateReport::Status::infeasible;
        r.detail = "cap admits no distribution";
        r.achieved_distance = 1.0;
        return r;
    }
    r.achieved_distance = distance(concl.fidelity);
    r.witness = concl.witness;
    r.status = r.achieved_distance <= r.target_distance + 1e-12 ? SubstateReport::Status::feasible
                                                                 : SubstateReport::Status::infeasible;
    return r;
}

} // namespace dptkit

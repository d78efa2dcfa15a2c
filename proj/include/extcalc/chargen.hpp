#pragma once

// Cohomology of classifying spaces and Thom spectra: polynomial rings with
// the Wu-formula action, Stiefel-Whitney data with power-series inversion for
// virtual bundles, Thom modules, smash products, and the symmetry-group
// catalog exported as module presentations over A(1).

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "extcalc/module.hpp"

namespace extcalc {

// Exponent vector over the ring's variables.
using Expo = std::vector<int>;

// A GF(2) sum of monomials, possibly inhomogeneous; kept truncated above the
// ring's degree bound.
struct Poly {
    std::set<Expo> terms;

    bool is_zero() const { return terms.empty(); }

    void toggle(const Expo& e)
    {
        auto it = terms.find(e);
        if (it != terms.end())
            terms.erase(it);
        else
            terms.insert(e);
    }

    Poly& operator+=(const Poly& o)
    {
        for (const auto& e : o.terms)
            toggle(e);
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b)
    {
        a += b;
        return a;
    }

    bool operator==(const Poly& o) const { return terms == o.terms; }
    bool operator!=(const Poly& o) const { return !(*this == o); }
};

class PolyCohomology {
public:
    struct Var {
        std::string name;
        int degree;
    };

    // sq_on_var[i][k] = Sq^k(v_i) for 0 <= k <= deg(v_i); the action on the
    // whole ring follows from the Cartan formula.
    PolyCohomology(std::vector<Var> vars, int t_max, std::vector<std::vector<Poly>> sq_on_var)
        : vars_(std::move(vars)), t_max_(t_max), sq_on_var_(std::move(sq_on_var))
    {
        if (sq_on_var_.size() != vars_.size())
            throw std::invalid_argument("PolyCohomology: one action table per variable required");
        build_monomials();
        build_sq_totals();
    }

    const std::vector<Var>& vars() const { return vars_; }
    int t_max() const { return t_max_; }

    int degree_of(const Expo& e) const
    {
        int d = 0;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            d += e[i] * vars_[i].degree;
        return d;
    }

    const std::vector<Expo>& monomials(int d) const
    {
        static const std::vector<Expo> empty;
        if (d < 0 || d > t_max_)
            return empty;
        return monos_[static_cast<std::size_t>(d)];
    }

    int dim(int d) const { return static_cast<int>(monomials(d).size()); }

    int index_of(const Expo& e) const
    {
        int d = degree_of(e);
        const auto& list = monomials(d);
        for (std::size_t k = 0; k < list.size(); ++k)
            if (list[k] == e)
                return static_cast<int>(k);
        return -1;
    }

    Expo one() const { return Expo(vars_.size(), 0); }

    Expo var_monomial(std::size_t i) const
    {
        Expo e = one();
        e[i] = 1;
        return e;
    }

    Poly monomial_poly(const Expo& e) const
    {
        Poly p;
        if (degree_of(e) <= t_max_)
            p.terms.insert(e);
        return p;
    }

    Poly multiply(const Poly& a, const Poly& b) const
    {
        Poly out;
        for (const auto& ea : a.terms)
            for (const auto& eb : b.terms) {
                Expo e(vars_.size());
                for (std::size_t i = 0; i < vars_.size(); ++i)
                    e[i] = ea[i] + eb[i];
                if (degree_of(e) <= t_max_)
                    out.toggle(e);
            }
        return out;
    }

    // Total square Sq = Sq^0 + Sq^1 + ... of a monomial (a ring map, so a
    // product over the variable totals; memoized).
    const Poly& sq_total(const Expo& e) const
    {
        auto it = sq_total_memo_.find(e);
        if (it != sq_total_memo_.end())
            return it->second;
        Poly result;
        bool is_one = true;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (e[i] > 0)
                is_one = false;
        if (is_one) {
            result.terms.insert(one());
        }
        else {
            std::size_t i = 0;
            while (e[i] == 0)
                ++i;
            Expo rest = e;
            rest[i] -= 1;
            result = multiply(sq_total_var_[i], sq_total(rest));
        }
        auto [ins, ok] = sq_total_memo_.emplace(e, std::move(result));
        (void)ok;
        return ins->second;
    }

    // Degree-homogeneous piece: Sq^k applied to a homogeneous polynomial.
    Poly sq_k(int k, const Poly& x) const
    {
        Poly out;
        for (const auto& e : x.terms) {
            int d = degree_of(e);
            for (const auto& te : sq_total(e).terms)
                if (degree_of(te) == d + k)
                    out.toggle(te);
        }
        return out;
    }

private:
    void build_monomials()
    {
        monos_.assign(static_cast<std::size_t>(t_max_) + 1, {});
        Expo cur(vars_.size(), 0);
        enumerate(0, 0, cur);
        // Graded lexicographic order, first variable weighs most.
        for (auto& list : monos_)
            std::sort(list.begin(), list.end(), [](const Expo& a, const Expo& b) { return a > b; });
    }

    void enumerate(std::size_t i, int deg, Expo& cur)
    {
        if (i == vars_.size()) {
            monos_[static_cast<std::size_t>(deg)].push_back(cur);
            return;
        }
        for (int e = 0; deg + e * vars_[i].degree <= t_max_; ++e) {
            cur[i] = e;
            enumerate(i + 1, deg + e * vars_[i].degree, cur);
        }
        cur[i] = 0;
    }

    void build_sq_totals()
    {
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            Poly total;
            if (static_cast<int>(sq_on_var_[i].size()) != vars_[i].degree + 1)
                throw std::invalid_argument("PolyCohomology: need Sq^0..Sq^deg for variable " + vars_[i].name);
            for (const auto& p : sq_on_var_[i])
                total += p;
            sq_total_var_.push_back(total);
        }
    }

    std::vector<Var> vars_;
    int t_max_;
    std::vector<std::vector<Poly>> sq_on_var_;
    std::vector<Poly> sq_total_var_;
    std::vector<std::vector<Expo>> monos_;
    mutable std::map<Expo, Poly> sq_total_memo_;
};

// Wu formula inside H^*(BO_n): Sq^i(w_j) = sum_k binom((j-i)+(k-1), k)
// w_{i-k} w_{j+k}, with w_0 = 1 and w_m = 0 for m > n.  The returned Poly is
// an exponent-vector sum over variables (w_1, ..., w_n).
inline Poly wu_sq(int i, int j, int n)
{
    if (j < 1 || j > n)
        throw std::invalid_argument("wu_sq: need 1 <= j <= n");
    if (i < 0)
        throw std::invalid_argument("wu_sq: need i >= 0");
    Poly out;
    if (i > j)
        return out;  // unstable vanishing
    for (int k = 0; k <= i; ++k) {
        if (!binom2((j - i) + (k - 1), k))
            continue;
        int a = i - k, b = j + k;
        if (a > n || b > n)
            continue;  // w_m = 0 beyond the rank
        Expo e(static_cast<std::size_t>(n), 0);
        if (a > 0)
            e[static_cast<std::size_t>(a - 1)] += 1;
        if (b > 0)
            e[static_cast<std::size_t>(b - 1)] += 1;
        out.toggle(e);
    }
    return out;
}

// H^*(BO_n) = Z/2[w_1..w_n] with the Wu action.
inline PolyCohomology bo_cohomology(int n, int t_max)
{
    if (n < 1)
        throw std::invalid_argument("bo_cohomology: n >= 1");
    std::vector<PolyCohomology::Var> vars;
    for (int j = 1; j <= n; ++j)
        vars.push_back({"w" + std::to_string(j), j});
    std::vector<std::vector<Poly>> actions;
    for (int j = 1; j <= n; ++j) {
        std::vector<Poly> col;
        for (int i = 0; i <= j; ++i)
            col.push_back(wu_sq(i, j, n));
        actions.push_back(col);
    }
    return PolyCohomology(std::move(vars), t_max, std::move(actions));
}

// H^*(BSO_n) = Z/2[w_2..w_n]: BO_n data with w_1 := 0 substituted before the
// actions are installed.
inline PolyCohomology bso_cohomology(int n, int t_max)
{
    if (n < 2)
        throw std::invalid_argument("bso_cohomology: n >= 2");
    std::vector<PolyCohomology::Var> vars;
    for (int j = 2; j <= n; ++j)
        vars.push_back({"w" + std::to_string(j), j});
    auto drop_w1 = [n](const Poly& p) {
        Poly out;
        for (const auto& e : p.terms) {
            if (e[0] > 0)
                continue;  // kill monomials containing w_1
            Expo f(e.begin() + 1, e.end());
            out.toggle(f);
        }
        (void)n;
        return out;
    };
    std::vector<std::vector<Poly>> actions;
    for (int j = 2; j <= n; ++j) {
        std::vector<Poly> col;
        for (int i = 0; i <= j; ++i)
            col.push_back(drop_w1(wu_sq(i, j, n)));
        actions.push_back(col);
    }
    return PolyCohomology(std::move(vars), t_max, std::move(actions));
}

// H^*(BU_1) (as BSO_2) = Z/2[w_2] with Sq^1(w_2) = 0, Sq^2(w_2) = w_2^2.
inline PolyCohomology bu1_cohomology(int t_max) { return bso_cohomology(2, t_max); }

// Stiefel-Whitney data of a (virtual) bundle: the dimension and the total
// class, stored degreewise with w[0] = 1.
struct SWData {
    int bundle_dim = 0;
    std::vector<Poly> w;  // w[d] is the degree-d part, up to the ring bound

    const Poly& at(int d) const
    {
        static const Poly zero;
        if (d < 0 || d >= static_cast<int>(w.size()))
            return zero;
        return w[static_cast<std::size_t>(d)];
    }
};

// Total class of the universal bundle: w_i = the i-th ring variable when
// present (BSO rings simply have no w_1).
inline SWData universal_sw(const PolyCohomology& ring, int bundle_dim)
{
    SWData sw;
    sw.bundle_dim = bundle_dim;
    sw.w.assign(static_cast<std::size_t>(ring.t_max()) + 1, Poly());
    sw.w[0].terms.insert(ring.one());
    for (std::size_t i = 0; i < ring.vars().size(); ++i) {
        int d = ring.vars()[i].degree;
        if (d <= ring.t_max())
            sw.w[static_cast<std::size_t>(d)] += ring.monomial_poly(ring.var_monomial(i));
    }
    return sw;
}

// Degreewise power-series inverse of the total class, exact mod 2:
// wbar_d = sum_{k>=1} w_k wbar_{d-k}.
inline SWData invert_total_class(const PolyCohomology& ring, const SWData& sw, int t_max)
{
    if (sw.at(0).terms.size() != 1)
        throw std::invalid_argument("invert_total_class: total class must start with 1");
    SWData out;
    out.bundle_dim = -sw.bundle_dim;
    out.w.assign(static_cast<std::size_t>(t_max) + 1, Poly());
    out.w[0] = sw.at(0);
    for (int d = 1; d <= t_max; ++d) {
        Poly acc;
        for (int k = 1; k <= d; ++k)
            acc += ring.multiply(sw.at(k), out.w[static_cast<std::size_t>(d - k)]);
        out.w[static_cast<std::size_t>(d)] = acc;
    }
    return out;
}

struct ThomModule {
    PolyCohomology base;
    SWData sw;
    int shift;  // degree of the Thom class
    ModulePresentation exported;
};

inline std::string expo_name(const PolyCohomology& ring, const Expo& e)
{
    std::string s;
    for (std::size_t i = 0; i < ring.vars().size(); ++i) {
        if (e[i] == 0)
            continue;
        s += ring.vars()[i].name;
        if (e[i] > 1)
            s += "^" + std::to_string(e[i]);
    }
    return s.empty() ? "1" : s;
}

// The Thom module of a bundle with the given SW data: free of rank one over
// the base on a class U in degree `shift`, with
// Sq^k(xU) = sum_{i+j=k} Sq^i(x) wbar_j U.  Exported over the chosen
// subalgebra with basis {monomial * U}; the presentation is exact through its
// window and marked as a truncation beyond it.
inline ThomModule thom_module(PolyCohomology base, SWData sw, int shift, const AlgebraPtr& alg,
                              const std::string& label)
{
    int t_lo = shift, t_hi = base.t_max() + shift;
    ModulePresentation m(alg, t_lo, t_hi, label);
    for (int t = t_lo; t <= t_hi; ++t)
        for (const auto& e : base.monomials(t - shift))
            m.add_generator(expo_name(base, e) + "U", t);
    for (int g = 0; g < static_cast<int>(alg->generators().size()); ++g) {
        int k = alg->generators()[static_cast<std::size_t>(g)].degree;
        if (alg->kind() != AlgebraKind::A)
            throw std::invalid_argument("thom_module: export is over an A(n) subalgebra");
        for (int t = t_lo; t + k <= t_hi; ++t) {
            int d = t - shift;
            const auto& src = base.monomials(d);
            const auto& dst = base.monomials(d + k);
            if (src.empty() || dst.empty())
                continue;
            F2Matrix mat(dst.size(), src.size());
            for (std::size_t col = 0; col < src.size(); ++col) {
                Poly x = base.monomial_poly(src[col]);
                Poly img;
                for (int i = 0; i <= k; ++i)
                    img += base.multiply(base.sq_k(i, x), sw.at(k - i));
                for (const auto& e : img.terms) {
                    if (base.degree_of(e) != d + k)
                        throw std::logic_error("thom_module: inhomogeneous action");
                    mat.set(static_cast<std::size_t>(base.index_of(e)), col);
                }
            }
            m.set_act(g, t, std::move(mat));
        }
    }
    m.set_trusted_tmax(t_hi);
    return ThomModule{std::move(base), std::move(sw), shift, std::move(m)};
}

// Smash product: the tensor of the exports, Thom class U(x)U.
inline ModulePresentation smash(const ThomModule& a, const ThomModule& b)
{
    return tensor(a.exported, b.exported);
}

// Catalog of the symmetry-group spectra.  CLI labels with their table codes:
//   mspin (s=0), pin- (+1), pin+ (-1), pinc~- (+2), pinc~+ (-2),
//   g+ (+3), g- (-3), g0 (+4), spinc (c0), pinc (c1).
inline const std::vector<std::pair<std::string, std::string>>& catalog_entries()
{
    static const std::vector<std::pair<std::string, std::string>> entries = {
        {"mspin", "S^0"},
        {"pin-", "S^-1 MO(1)"},
        {"pin+", "S^1 MTO(1)"},
        {"pinc~-", "S^-2 MO(2)"},
        {"pinc~+", "S^2 MTO(2)"},
        {"g+", "S^-3 MO(3)"},
        {"g-", "S^3 MTO(3)"},
        {"g0", "S^-3 MSO(3)"},
        {"spinc", "S^-2 MU(1)"},
        {"pinc", "S^-3 MU(1)^MO(1)"},
    };
    return entries;
}

// The truncated A(1)-module of the listed Thom spectrum, suspended so the
// bottom class sits in degree 0, exact through t_hi.
inline ModulePresentation catalog(const std::string& label, int t_hi = 12)
{
    AlgebraPtr a1 = subalgebra(AlgebraKind::A, 1);
    auto mo = [&](int n, int t) {
        auto ring = bo_cohomology(n, t);
        auto sw = universal_sw(ring, n);
        return thom_module(std::move(ring), std::move(sw), n, a1, "MO(" + std::to_string(n) + ")");
    };
    auto mto = [&](int n, int t) {
        auto ring = bo_cohomology(n, t);
        auto sw = invert_total_class(ring, universal_sw(ring, n), t);
        return thom_module(std::move(ring), std::move(sw), -n, a1, "MTO(" + std::to_string(n) + ")");
    };

    ModulePresentation out;
    if (label == "mspin") {
        out = trivial_module(a1, t_hi);
    }
    else if (label == "pin-") {
        out = mo(1, t_hi + 1).exported.suspend(-1);
    }
    else if (label == "pin+") {
        out = mto(1, t_hi + 1).exported.suspend(1);
    }
    else if (label == "pinc~-") {
        out = mo(2, t_hi + 2).exported.suspend(-2);
    }
    else if (label == "pinc~+") {
        out = mto(2, t_hi + 2).exported.suspend(2);
    }
    else if (label == "g+") {
        out = mo(3, t_hi + 3).exported.suspend(-3);
    }
    else if (label == "g-") {
        out = mto(3, t_hi + 3).exported.suspend(3);
    }
    else if (label == "g0") {
        auto ring = bso_cohomology(3, t_hi + 3);
        auto sw = universal_sw(ring, 3);
        out = thom_module(std::move(ring), std::move(sw), 3, a1, "MSO(3)").exported.suspend(-3);
    }
    else if (label == "spinc") {
        auto ring = bu1_cohomology(t_hi + 2);
        auto sw = universal_sw(ring, 2);
        out = thom_module(std::move(ring), std::move(sw), 2, a1, "MU(1)").exported.suspend(-2);
    }
    else if (label == "pinc") {
        auto mu1 = [&](int t) {
            auto ring = bu1_cohomology(t);
            auto sw = universal_sw(ring, 2);
            return thom_module(std::move(ring), std::move(sw), 2, a1, "MU(1)");
        };
        out = smash(mu1(t_hi + 2), mo(1, t_hi + 2)).suspend(-3);
    }
    else {
        throw std::invalid_argument("unknown catalog label '" + label + "'");
    }
    if (out.t_max() > t_hi)
        out = out.truncate(t_hi);
    out.set_label(label);
    return out;
}

}  // namespace extcalc

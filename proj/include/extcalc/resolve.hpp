#pragma once

// Minimal free resolutions over a finite subalgebra in a bounded window,
// Ext^{s,t} read off the generators, h0/h1 products from differential
// coefficients, and Ext chart assembly.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "extcalc/f2.hpp"
#include "extcalc/module.hpp"
#include "extcalc/steenrod.hpp"

namespace extcalc {

struct WindowEscapeError : std::runtime_error {
    explicit WindowEscapeError(const std::string& what) : std::runtime_error(what) {}
};

struct CoverageError : std::runtime_error {
    explicit CoverageError(const std::string& what) : std::runtime_error(what) {}
};

// A free module over the subalgebra with one summand per listed generator
// degree.  The basis in internal degree t is the list of pairs
// (generator, algebra basis element), generators ascending.
class FreeModule {
public:
    explicit FreeModule(AlgebraPtr alg) : alg_(std::move(alg)) {}

    const AlgebraPtr& algebra() const { return alg_; }
    int gen_count() const { return static_cast<int>(gen_degrees_.size()); }
    int gen_degree(int g) const { return gen_degrees_.at(static_cast<std::size_t>(g)); }
    const std::vector<int>& gen_degrees() const { return gen_degrees_; }

    int add_generator(int degree)
    {
        gen_degrees_.push_back(degree);
        basis_cache_.clear();
        return gen_count() - 1;
    }

    struct BasisEntry {
        int gen;
        int alg_index;  // global basis index in the subalgebra
    };

    const std::vector<BasisEntry>& basis_at(int t) const
    {
        auto it = basis_cache_.find(t);
        if (it != basis_cache_.end())
            return it->second;
        std::vector<BasisEntry> out;
        for (int g = 0; g < gen_count(); ++g) {
            int d = t - gen_degrees_[static_cast<std::size_t>(g)];
            for (int k = 0; k < alg_->dim_at(d); ++k)
                out.push_back({g, alg_->index_at(d, k)});
        }
        auto [ins, ok] = basis_cache_.emplace(t, std::move(out));
        (void)ok;
        return ins->second;
    }

    int dim_at(int t) const { return static_cast<int>(basis_at(t).size()); }

    int position_of(int t, int gen, int alg_index) const
    {
        const auto& b = basis_at(t);
        for (std::size_t k = 0; k < b.size(); ++k)
            if (b[k].gen == gen && b[k].alg_index == alg_index)
                return static_cast<int>(k);
        return -1;
    }

    // The element 1 * e_g in degree gen_degree(g).
    F2Vector unit_vector(int g) const
    {
        int t = gen_degree(g);
        F2Vector v(static_cast<std::size_t>(dim_at(t)));
        int pos = position_of(t, g, alg_->unit_index());
        v.set(static_cast<std::size_t>(pos));
        return v;
    }

    // Left multiplication by the algebra basis element `b` from degree t.
    F2Vector mult_basis(int b, int t, const F2Vector& x) const
    {
        int db = alg_->degree_of(b);
        const auto& src = basis_at(t);
        const auto& dst = basis_at(t + db);
        F2Vector out(dst.size());
        for (auto pos : x.support()) {
            const BasisEntry& e = src[pos];
            const F2Vector& prod = alg_->mult(b, e.alg_index);
            if (prod.size() == 0)
                continue;
            int dprod = db + alg_->degree_of(e.alg_index);
            for (auto slot : prod.support()) {
                int target = position_of(t + db, e.gen, alg_->index_at(dprod, static_cast<int>(slot)));
                out.flip(static_cast<std::size_t>(target));
            }
        }
        return out;
    }

private:
    AlgebraPtr alg_;
    std::vector<int> gen_degrees_;
    mutable std::map<int, std::vector<BasisEntry>> basis_cache_;
};

struct ResolutionGenerator {
    int s;
    int t;
    int index;  // position among the generators of P_s (ascending degree)
};

class FreeResolution {
public:
    FreeResolution() = default;

    // Hand-built resolutions (planted test fixtures, imported data).
    FreeResolution(ModulePresentation m, int s_max, int t_cap)
        : module_(std::move(m)), s_max_(s_max), t_cap_(t_cap)
    {
    }

    void add_stage(FreeModule p, std::vector<F2Vector> images)
    {
        if (images.size() != static_cast<std::size_t>(p.gen_count()))
            throw std::invalid_argument("add_stage: one image per generator required");
        p_.push_back(std::move(p));
        diff_.push_back(std::move(images));
    }

    const ModulePresentation& module() const { return module_; }
    int s_max() const { return s_max_; }
    int t_cap() const { return t_cap_; }

    const FreeModule& p(int s) const { return p_.at(static_cast<std::size_t>(s)); }

    // Image of generator g of P_s: an element of P_{s-1} (s >= 1) or of the
    // module (s == 0), in internal degree gen_degree(g).
    const F2Vector& diff(int s, int g) const { return diff_.at(static_cast<std::size_t>(s)).at(static_cast<std::size_t>(g)); }

    bool complete(int s, int t) const { return s <= s_max_ && t <= t_cap_; }

    // Differential of P_s at internal degree t, as a matrix into P_{s-1}
    // (or into the module when s == 0).
    F2Matrix differential_matrix(int s, int t) const
    {
        const FreeModule& ps = p(s);
        const auto& basis = ps.basis_at(t);
        std::size_t target_dim = s == 0 ? static_cast<std::size_t>(module_.dim(t))
                                        : static_cast<std::size_t>(p(s - 1).dim_at(t));
        F2Matrix m(target_dim, basis.size());
        for (std::size_t col = 0; col < basis.size(); ++col) {
            const auto& e = basis[col];
            int tg = ps.gen_degree(e.gen);
            if (s == 0) {
                F2Matrix action = module_.act_basis(e.alg_index, tg);
                m.set_col(col, action.apply(diff(0, e.gen)));
            }
            else {
                m.set_col(col, p(s - 1).mult_basis(e.alg_index, tg, diff(s, e.gen)));
            }
        }
        return m;
    }

    std::vector<ResolutionGenerator> generators() const
    {
        std::vector<ResolutionGenerator> out;
        for (int s = 0; s <= s_max_; ++s)
            for (int g = 0; g < p(s).gen_count(); ++g)
                out.push_back({s, p(s).gen_degree(g), g});
        return out;
    }

    int ext_dim(int s, int t) const
    {
        if (s < 0 || s > s_max_)
            return 0;
        int n = 0;
        for (int g = 0; g < p(s).gen_count(); ++g)
            if (p(s).gen_degree(g) == t)
                ++n;
        return n;
    }

    // Generator indices of P_s in internal degree t.
    std::vector<int> gens_at(int s, int t) const
    {
        std::vector<int> out;
        for (int g = 0; g < p(s).gen_count(); ++g)
            if (p(s).gen_degree(g) == t)
                out.push_back(g);
        return out;
    }

    friend FreeResolution minimal_resolution(const ModulePresentation& m, int s_max, int t_cap);

private:
    ModulePresentation module_;
    int s_max_ = 0, t_cap_ = 0;
    std::vector<FreeModule> p_;
    std::vector<std::vector<F2Vector>> diff_;
};

// Build the minimal free resolution filtration by filtration.  At each stage,
// working degree-ascending, new free generators are adjoined on a basis of
// the current kernel modulo the algebra-positive span of the generators
// already chosen; generator order follows the deterministic kernel basis.
inline FreeResolution minimal_resolution(const ModulePresentation& m, int s_max, int t_cap)
{
    if (t_cap > m.trusted_tmax())
        throw WindowEscapeError("resolution to internal degree " + std::to_string(t_cap) +
                                " needs module data above trusted degree " + std::to_string(m.trusted_tmax()));
    FreeResolution res;
    res.module_ = m;
    res.s_max_ = s_max;
    res.t_cap_ = t_cap;
    const AlgebraPtr& alg = m.algebra();
    auto ideal = alg->ideal_basis();

    for (int s = 0; s <= s_max; ++s) {
        FreeModule ps(alg);
        std::vector<F2Vector> images;
        // Algebra-positive span of already-chosen generators, per degree.
        std::map<int, EchelonBasis> span;
        auto span_at = [&](int t) -> EchelonBasis& {
            auto it = span.find(t);
            if (it == span.end()) {
                std::size_t w = s == 0 ? static_cast<std::size_t>(m.dim(t))
                                       : static_cast<std::size_t>(res.p_[static_cast<std::size_t>(s - 1)].dim_at(t));
                it = span.emplace(t, EchelonBasis(w)).first;
            }
            return it->second;
        };
        auto note_generator = [&](int t, const F2Vector& v) {
            // Fold all positive algebra multiples of v into the span.
            for (int b : ideal) {
                int db = alg->degree_of(b);
                if (t + db > t_cap)
                    continue;
                F2Vector w = s == 0 ? m.act_basis(b, t).apply(v)
                                    : res.p_[static_cast<std::size_t>(s - 1)].mult_basis(b, t, v);
                if (!w.is_zero())
                    span_at(t + db).insert(w);
            }
            span_at(t).insert(v);
        };

        int lo = s == 0 ? m.bottom_degree() : (res.p_[static_cast<std::size_t>(s - 1)].gen_count() > 0
                                                   ? res.p_[static_cast<std::size_t>(s - 1)].gen_degrees().front()
                                                   : t_cap + 1);
        for (int t = lo; t <= t_cap; ++t) {
            std::vector<F2Vector> candidates;
            if (s == 0) {
                if (m.dim(t) == 0)
                    continue;
                // I(B)*M at degree t.
                EchelonBasis& sp = span_at(t);
                for (int b : ideal) {
                    int db = alg->degree_of(b);
                    int src = t - db;
                    if (m.dim(src) == 0)
                        continue;
                    F2Matrix act = m.act_basis(b, src);
                    for (std::size_t j = 0; j < act.cols(); ++j) {
                        F2Vector col = act.col(j);
                        if (!col.is_zero())
                            sp.insert(col);
                    }
                }
                for (auto f : sp.free_indices()) {
                    F2Vector v(static_cast<std::size_t>(m.dim(t)));
                    v.set(f);
                    candidates.push_back(std::move(v));
                }
            }
            else {
                const FreeModule& prev = res.p_[static_cast<std::size_t>(s - 1)];
                if (prev.dim_at(t) == 0)
                    continue;
                F2Matrix d_prev = res.differential_matrix(s - 1, t);
                candidates = kernel_basis(d_prev);
            }
            for (const auto& k : candidates) {
                if (span_at(t).contains(k))
                    continue;
                ps.add_generator(t);
                images.push_back(k);
                // Make the new generator's multiples visible to later degrees
                // (and the vector itself to later candidates at degree t).
                note_generator(t, k);
            }
        }
        res.p_.push_back(std::move(ps));
        res.diff_.push_back(std::move(images));
    }
    return res;
}

struct MinimalityReport {
    bool ok = true;
    std::string witness;
};

// Minimality: every differential entry lies in the augmentation ideal, i.e.
// no generator image carries a unit coefficient.
inline MinimalityReport check_minimality(const FreeResolution& res)
{
    const AlgebraPtr& alg = res.module().algebra();
    for (int s = 1; s <= res.s_max(); ++s) {
        for (int g = 0; g < res.p(s).gen_count(); ++g) {
            int t = res.p(s).gen_degree(g);
            const auto& basis = res.p(s - 1).basis_at(t);
            for (auto pos : res.diff(s, g).support()) {
                if (alg->degree_of(basis[pos].alg_index) == 0)
                    return {false, "differential of generator (s=" + std::to_string(s) + ", t=" + std::to_string(t) +
                                       ") has a unit coefficient on generator " + std::to_string(basis[pos].gen) +
                                       " of the previous stage"};
            }
        }
    }
    return {true, ""};
}

struct ExactnessReport {
    bool ok = true;
    std::string message;
};

// d o d = 0 and im = ker in every internal degree where data is complete.
inline ExactnessReport verify_exactness(const FreeResolution& res)
{
    for (int s = 1; s <= res.s_max(); ++s) {
        for (int t = res.module().bottom_degree(); t <= res.t_cap(); ++t) {
            if (res.p(s).dim_at(t) == 0 && res.p(s - 1).dim_at(t) == 0)
                continue;
            F2Matrix d_s = res.differential_matrix(s, t);
            F2Matrix d_prev = res.differential_matrix(s - 1, t);
            F2Matrix comp = d_prev.compose(d_s);
            for (std::size_t i = 0; i < comp.rows(); ++i)
                if (!comp.row(i).is_zero())
                    return {false, "d o d != 0 at (s=" + std::to_string(s) + ", t=" + std::to_string(t) + ")"};
            std::size_t ker_dim = d_prev.cols() - rank(d_prev);
            if (rank(d_s) != ker_dim)
                return {false, "im != ker at (s=" + std::to_string(s - 1) + ", t=" + std::to_string(t) +
                                   "): rank " + std::to_string(rank(d_s)) + " vs kernel dim " + std::to_string(ker_dim)};
        }
    }
    // Surjectivity of the augmentation.
    for (int t = res.module().bottom_degree(); t <= std::min(res.t_cap(), res.module().t_max()); ++t) {
        if (res.module().dim(t) == 0)
            continue;
        F2Matrix d0 = res.differential_matrix(0, t);
        if (rank(d0) != static_cast<std::size_t>(res.module().dim(t)))
            return {false, "augmentation not surjective in degree " + std::to_string(t)};
    }
    return {true, ""};
}

// The h_i-multiple of the dual class of generator g at (s, t), read off the
// differential: for each generator g' of P_{s+1} in degree t + 2^i, the
// coefficient of Sq^{2^i} * g in d(g') gives the pairing.  Returns the
// (possibly empty) list of generator indices of the sum class at (s+1, t+2^i).
inline std::vector<int> h_product(const FreeResolution& res, int i, int s, int g)
{
    if (i != 0 && i != 1)
        throw std::invalid_argument("h_product: i must be 0 or 1");
    const AlgebraPtr& alg = res.module().algebra();
    int opdeg = 1 << i;
    int hi_index = alg->index_of(SteenrodElement::sq(opdeg));
    std::vector<int> out;
    if (hi_index < 0)
        return out;  // no element of that degree in this algebra (e.g. h1 over E(n))
    if (s + 1 > res.s_max())
        throw CoverageError("h_product: filtration " + std::to_string(s + 1) + " beyond s_max");
    int t = res.p(s).gen_degree(g);
    for (int g2 = 0; g2 < res.p(s + 1).gen_count(); ++g2) {
        if (res.p(s + 1).gen_degree(g2) != t + opdeg)
            continue;
        int pos = res.p(s).position_of(t + opdeg, g, hi_index);
        if (pos >= 0 && res.diff(s + 1, g2).get(static_cast<std::size_t>(pos)))
            out.push_back(g2);
    }
    return out;
}

struct ChartClass {
    int stem;
    int filtration;
    int index;  // within the (stem, filtration) cell
};

struct ExtChart {
    std::string algebra;
    std::string module;
    int max_stem = 0;
    int max_filtration = 0;
    std::vector<ChartClass> classes;
    std::vector<std::pair<int, int>> h0;  // class id pairs
    std::vector<std::pair<int, int>> h1;

    int find(int stem, int filtration, int index) const
    {
        for (std::size_t k = 0; k < classes.size(); ++k)
            if (classes[k].stem == stem && classes[k].filtration == filtration && classes[k].index == index)
                return static_cast<int>(k);
        return -1;
    }

    int cell_dim(int stem, int filtration) const
    {
        int n = 0;
        for (const auto& c : classes)
            if (c.stem == stem && c.filtration == filtration)
                ++n;
        return n;
    }

    // Rank of the h-map between two cells, from the edge lists.
    int h_rank(int i, int stem, int filtration) const
    {
        const auto& edges = i == 0 ? h0 : h1;
        int src_dim = cell_dim(stem, filtration);
        int dst_dim = cell_dim(stem + i, filtration + 1);
        if (src_dim == 0 || dst_dim == 0)
            return 0;
        F2Matrix m(static_cast<std::size_t>(dst_dim), static_cast<std::size_t>(src_dim));
        for (const auto& [a, b] : edges) {
            const ChartClass& ca = classes[static_cast<std::size_t>(a)];
            const ChartClass& cb = classes[static_cast<std::size_t>(b)];
            if (ca.stem == stem && ca.filtration == filtration)
                m.set(static_cast<std::size_t>(cb.index), static_cast<std::size_t>(ca.index));
        }
        return static_cast<int>(rank(m));
    }
};

// One chart class per resolution generator with stem <= max_stem; h-edges
// installed via h_product.  Refuses when the resolution window cannot cover
// the requested region.
inline ExtChart ext_chart(const FreeResolution& res, int max_stem)
{
    ExtChart chart;
    chart.algebra = res.module().algebra()->label();
    chart.module = res.module().label();
    chart.max_stem = max_stem;
    chart.max_filtration = res.s_max();
    if (max_stem + res.s_max() > res.t_cap())
        throw CoverageError("chart window (max_stem " + std::to_string(max_stem) + ", max_filtration " +
                            std::to_string(res.s_max()) + ") needs internal degrees up to " +
                            std::to_string(max_stem + res.s_max()) + " but the resolution is capped at " +
                            std::to_string(res.t_cap()));

    // (s, gen) -> class id, cells ordered by (stem, filtration, gen order).
    std::map<std::pair<int, int>, int> id_of;
    for (int s = 0; s <= res.s_max(); ++s) {
        for (int g = 0; g < res.p(s).gen_count(); ++g) {
            int t = res.p(s).gen_degree(g);
            int stem = t - s;
            if (stem > max_stem)
                continue;
            int cell_index = 0;
            for (int g2 = 0; g2 < g; ++g2)
                if (res.p(s).gen_degree(g2) == t)
                    ++cell_index;
            id_of[{s, g}] = static_cast<int>(chart.classes.size());
            chart.classes.push_back({stem, s, cell_index});
        }
    }
    for (const auto& [key, id] : id_of) {
        auto [s, g] = key;
        if (s + 1 > res.s_max())
            continue;
        for (int i : {0, 1}) {
            int stem = chart.classes[static_cast<std::size_t>(id)].stem;
            if (stem + i > max_stem)
                continue;  // edge would leave the window
            for (int g2 : h_product(res, i, s, g)) {
                auto it = id_of.find({s + 1, g2});
                if (it == id_of.end())
                    continue;
                (i == 0 ? chart.h0 : chart.h1).emplace_back(id, it->second);
            }
        }
    }
    return chart;
}

}  // namespace extcalc

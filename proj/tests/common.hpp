#pragma once

// Shared helpers for the test suites: data-file loading, chart fixtures, and
// a graded-module isomorphism search used to compare figure fixtures.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "extcalc/adams.hpp"
#include "extcalc/chargen.hpp"
#include "extcalc/chart_io.hpp"
#include "extcalc/module.hpp"
#include "extcalc/resolve.hpp"

namespace testutil {

using namespace extcalc;

inline std::string data_path(const std::string& rel)
{
#ifdef EXTCALC_DATA_DIR
    return std::string(EXTCALC_DATA_DIR) + "/" + rel;
#else
    return "data/" + rel;
#endif
}

inline ModulePresentation load_module(const std::string& rel, const std::string& label = "")
{
    std::ifstream in(data_path(rel));
    if (!in)
        throw std::runtime_error("missing data file " + data_path(rel));
    std::stringstream ss;
    ss << in.rdbuf();
    std::string name = label;
    if (name.empty()) {
        name = rel;
        auto slash = name.find_last_of('/');
        if (slash != std::string::npos)
            name = name.substr(slash + 1);
        auto dot = name.rfind('.');
        if (dot != std::string::npos)
            name = name.substr(0, dot);
    }
    return parse_cell_diagram(ss.str(), name);
}

// Resolve with a window that respects the module's trusted range.
inline ExtChart chart_of(const ModulePresentation& m, int max_stem, int s_max)
{
    int t_cap = std::min(max_stem + s_max, m.trusted_tmax());
    int s_eff = std::min(s_max, t_cap - max_stem);
    FreeResolution res = minimal_resolution(m, s_eff, t_cap);
    return ext_chart(res, max_stem);
}

// Hand-typed chart fixture: cell dimensions plus h0/h1 ranks per position.
class ChartFixture {
public:
    ChartFixture(std::string algebra, std::string module, int max_stem, int max_filtration)
        : algebra_(std::move(algebra)), module_(std::move(module)), max_stem_(max_stem), max_filt_(max_filtration)
    {
    }

    // A cell of the given dimension with full h0/h1 ranks declared explicitly.
    ChartFixture& cell(int stem, int s, int dim = 1)
    {
        dims_[{stem, s}] = dim;
        return *this;
    }

    // A tower: cells of dimension 1 from s_lo to the top, h0-linked.
    ChartFixture& tower(int stem, int s_lo)
    {
        for (int s = s_lo; s <= max_filt_; ++s) {
            dims_[{stem, s}] += 1;
            if (s > s_lo)
                h0_[{stem, s - 1}] += 1;
        }
        return *this;
    }

    // An h0-chain of the given length (cells s_lo .. s_lo+len-1).
    ChartFixture& chain(int stem, int s_lo, int len)
    {
        for (int s = s_lo; s < s_lo + len; ++s) {
            dims_[{stem, s}] += 1;
            if (s > s_lo)
                h0_[{stem, s - 1}] += 1;
        }
        return *this;
    }

    ChartFixture& h0(int stem, int s, int rank = 1)
    {
        h0_[{stem, s}] += rank;
        return *this;
    }

    ChartFixture& h1(int stem, int s, int rank = 1)
    {
        h1_[{stem, s}] += rank;
        return *this;
    }

    // Realize as an ExtChart whose edges produce exactly the declared ranks.
    ExtChart chart() const
    {
        ExtChart c;
        c.algebra = algebra_;
        c.module = module_;
        c.max_stem = max_stem_;
        c.max_filtration = max_filt_;
        std::map<std::pair<int, int>, std::vector<int>> ids;
        for (const auto& [pos, d] : dims_)
            for (int k = 0; k < d; ++k) {
                ids[pos].push_back(static_cast<int>(c.classes.size()));
                c.classes.push_back({pos.first, pos.second, k});
            }
        auto wire = [&](const std::map<std::pair<int, int>, int>& ranks, int dstem,
                        std::vector<std::pair<int, int>>& edges) {
            for (const auto& [pos, r] : ranks) {
                auto src = ids.find(pos);
                auto dst = ids.find({pos.first + dstem, pos.second + 1});
                if (src == ids.end() || dst == ids.end())
                    throw std::logic_error("ChartFixture: edge rank declared between missing cells");
                for (int k = 0; k < r; ++k)
                    edges.emplace_back(src->second.at(static_cast<std::size_t>(k)),
                                       dst->second.at(static_cast<std::size_t>(k)));
            }
        };
        wire(h0_, 0, c.h0);
        wire(h1_, 1, c.h1);
        return c;
    }

private:
    std::string algebra_, module_;
    int max_stem_, max_filt_;
    std::map<std::pair<int, int>, int> dims_;
    std::map<std::pair<int, int>, int> h0_, h1_;
};

// Graded-module isomorphism over a degree range: searches for degreewise
// invertible maps commuting with every generator action, with constraint
// propagation from lower degrees.  Feasible because fixture dimensions are
// tiny.
class GradedIso {
public:
    GradedIso(const ModulePresentation& a, const ModulePresentation& b, int lo, int hi)
        : a_(a), b_(b), lo_(lo), hi_(hi)
    {
    }

    bool exists()
    {
        for (int t = lo_; t <= hi_; ++t)
            if (a_.dim(t) != b_.dim(t))
                return false;
        std::map<int, F2Matrix> phi;
        return search(lo_, phi);
    }

private:
    bool search(int t, std::map<int, F2Matrix>& phi)
    {
        if (t > hi_)
            return check_all(phi);
        std::size_t d = static_cast<std::size_t>(a_.dim(t));
        if (d == 0) {
            phi[t] = F2Matrix(0, 0);
            return search(t + 1, phi);
        }
        // Constraints: phi_t(act_a(v)) = act_b(phi_{t-dg}(v)) for actions
        // arriving from below within [lo, hi].
        std::vector<std::pair<F2Vector, F2Vector>> constraints;  // (x, phi_t x required)
        const auto& gens = a_.algebra()->generators();
        for (int g = 0; g < static_cast<int>(gens.size()); ++g) {
            int dg = gens[static_cast<std::size_t>(g)].degree;
            int src = t - dg;
            if (src < lo_ || a_.dim(src) == 0)
                continue;
            F2Matrix acta = a_.act(g, src);
            F2Matrix actb = b_.act(g, src);
            for (int j = 0; j < a_.dim(src); ++j) {
                F2Vector x = acta.col(static_cast<std::size_t>(j));
                F2Vector ej(static_cast<std::size_t>(a_.dim(src)));
                ej.set(static_cast<std::size_t>(j));
                F2Vector y = actb.apply(phi.at(src).apply(ej));
                constraints.emplace_back(x, y);
            }
        }
        // Solve the affine system column-space style: phi_t is d x d; treat as
        // d^2 unknowns.  Small, so enumerate the solution space directly.
        std::vector<F2Vector> hom_basis;
        F2Vector particular(d * d);
        if (!solve_affine(constraints, d, particular, hom_basis))
            return false;
        std::size_t free_dim = hom_basis.size();
        if (free_dim > 22)
            throw std::runtime_error("GradedIso: search space too large");
        for (std::uint64_t mask = 0; mask < (1ull << free_dim); ++mask) {
            F2Vector flat = particular;
            for (std::size_t k = 0; k < free_dim; ++k)
                if ((mask >> k) & 1)
                    flat ^= hom_basis[k];
            F2Matrix cand(d, d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    if (flat.get(i * d + j))
                        cand.set(i, j);
            if (rank(cand) != d)
                continue;
            phi[t] = cand;
            if (search(t + 1, phi))
                return true;
        }
        phi.erase(t);
        return false;
    }

    static bool solve_affine(const std::vector<std::pair<F2Vector, F2Vector>>& constraints, std::size_t d,
                             F2Vector& particular, std::vector<F2Vector>& hom_basis)
    {
        // Unknown M (d x d), constraints M*x = y.  Row (i, c): sum_j M[i][j]
        // x[j] = y[i].
        std::size_t unknowns = d * d;
        std::vector<F2Vector> rows;
        std::vector<bool> rhs;
        for (const auto& [x, y] : constraints) {
            for (std::size_t i = 0; i < d; ++i) {
                F2Vector row(unknowns);
                for (std::size_t j = 0; j < x.size(); ++j)
                    if (x.get(j))
                        row.set(i * d + j);
                rows.push_back(std::move(row));
                rhs.push_back(y.get(i));
            }
        }
        F2Matrix sys(rows.size(), unknowns + 1);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (auto idx : rows[r].support())
                sys.set(r, idx);
            if (rhs[r])
                sys.set(r, unknowns);
        }
        RrefResult rr = rref(sys);
        particular = F2Vector(unknowns);
        for (std::size_t r = 0; r < rr.pivots.size(); ++r) {
            if (rr.pivots[r] == unknowns)
                return false;
            if (rr.reduced.get(r, unknowns))
                particular.set(rr.pivots[r]);
        }
        // Kernel of the coefficient part.
        F2Matrix coeff(rows.size(), unknowns);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (auto idx : rows[r].support())
                coeff.set(r, idx);
        hom_basis = kernel_basis(coeff);
        return true;
    }

    bool check_all(const std::map<int, F2Matrix>& phi) const
    {
        const auto& gens = a_.algebra()->generators();
        for (int g = 0; g < static_cast<int>(gens.size()); ++g) {
            int dg = gens[static_cast<std::size_t>(g)].degree;
            for (int t = lo_; t + dg <= hi_; ++t) {
                if (a_.dim(t) == 0)
                    continue;
                F2Matrix lhs = phi.at(t + dg).compose(a_.act(g, t));
                F2Matrix rhs = b_.act(g, t).compose(phi.at(t));
                if (lhs != rhs)
                    return false;
            }
        }
        return true;
    }

    const ModulePresentation& a_;
    const ModulePresentation& b_;
    int lo_, hi_;
};

inline bool modules_isomorphic(const ModulePresentation& a, const ModulePresentation& b, int lo, int hi)
{
    if (a.algebra()->label() != b.algebra()->label())
        return false;
    return GradedIso(a, b, lo, hi).exists();
}

}  // namespace testutil

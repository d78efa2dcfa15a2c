#pragma once

// Bounded-degree graded modules over a finite subalgebra, presented by named
// generators and action matrices for the algebra generators.  Includes the
// cell-diagram file format, constructors (suspension, sum, tensor,
// truncation, restriction, coinduced quotient) and semantic validation.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "extcalc/f2.hpp"
#include "extcalc/steenrod.hpp"

namespace extcalc {

// Degree bound marking "this presentation is the whole module"; anything
// smaller means data above that degree was cut and downstream queries that
// would need it must refuse.
constexpr int kTotalModule = 1 << 28;

class ModulePresentation {
public:
    ModulePresentation() = default;

    ModulePresentation(AlgebraPtr alg, int t_min, int t_max, std::string label = "")
        : alg_(std::move(alg)), t_min_(t_min), t_max_(t_max), trusted_(kTotalModule), label_(std::move(label))
    {
        if (t_max_ < t_min_)
            throw std::invalid_argument("ModulePresentation: empty degree window");
        names_.assign(static_cast<std::size_t>(t_max_ - t_min_ + 1), {});
        int ng = static_cast<int>(alg_->generators().size());
        action_.assign(static_cast<std::size_t>(ng), {});
    }

    const AlgebraPtr& algebra() const { return alg_; }
    int t_min() const { return t_min_; }
    int t_max() const { return t_max_; }
    int trusted_tmax() const { return trusted_; }
    void set_trusted_tmax(int t) { trusted_ = t; }
    const std::string& label() const { return label_; }
    void set_label(std::string l) { label_ = std::move(l); }

    bool in_window(int t) const { return t >= t_min_ && t <= t_max_; }

    int dim(int t) const { return in_window(t) ? static_cast<int>(names_[idx(t)].size()) : 0; }

    int total_dim() const
    {
        int n = 0;
        for (int t = t_min_; t <= t_max_; ++t)
            n += dim(t);
        return n;
    }

    const std::vector<std::string>& names(int t) const
    {
        static const std::vector<std::string> empty;
        return in_window(t) ? names_[idx(t)] : empty;
    }

    // Lowest degree with a nonzero cell, or t_max+1 for the zero module.
    int bottom_degree() const
    {
        for (int t = t_min_; t <= t_max_; ++t)
            if (dim(t) > 0)
                return t;
        return t_max_ + 1;
    }

    int add_generator(const std::string& name, int t)
    {
        if (!in_window(t))
            throw std::invalid_argument("generator '" + name + "' at degree " + std::to_string(t) +
                                        " outside window [" + std::to_string(t_min_) + ", " + std::to_string(t_max_) + "]");
        names_[idx(t)].push_back(name);
        return static_cast<int>(names_[idx(t)].size()) - 1;
    }

    // Action matrix of algebra generator g at source degree t; shape
    // dim(t + deg g) x dim(t).  Unset matrices are zero, as are matrices in
    // or out of degrees outside the window.
    const F2Matrix& act(int g, int t) const
    {
        int dg = alg_->generators().at(static_cast<std::size_t>(g)).degree;
        if (!in_window(t) || !in_window(t + dg)) {
            auto key = std::make_pair(g, t);
            auto it = oob_.find(key);
            if (it == oob_.end())
                it = oob_.emplace(key, F2Matrix(static_cast<std::size_t>(dim(t + dg)),
                                                static_cast<std::size_t>(dim(t)))).first;
            return it->second;
        }
        ensure_matrix(g, t);
        return action_[static_cast<std::size_t>(g)][idx(t)];
    }

    void set_act(int g, int t, F2Matrix m)
    {
        int dg = alg_->generators().at(static_cast<std::size_t>(g)).degree;
        if (m.cols() != static_cast<std::size_t>(dim(t)) || m.rows() != static_cast<std::size_t>(dim(t + dg)))
            throw std::invalid_argument("set_act: matrix shape mismatch");
        ensure_matrix(g, t);
        action_[static_cast<std::size_t>(g)][idx(t)] = std::move(m);
    }

    void set_act_entry(int g, int t, int from_index, int to_index)
    {
        int dg = alg_->generators().at(static_cast<std::size_t>(g)).degree;
        ensure_matrix(g, t);
        F2Matrix& m = action_[static_cast<std::size_t>(g)][idx(t)];
        if (m.rows() != static_cast<std::size_t>(dim(t + dg)) || m.cols() != static_cast<std::size_t>(dim(t)))
            m = F2Matrix(static_cast<std::size_t>(dim(t + dg)), static_cast<std::size_t>(dim(t)));
        m.set(static_cast<std::size_t>(to_index), static_cast<std::size_t>(from_index));
    }

    // Composite action of a word over generator indices (leftmost letter acts
    // last), as a matrix from degree t.
    F2Matrix act_word(const GenWord& w, int t) const
    {
        int d = t;
        for (auto it = w.rbegin(); it != w.rend(); ++it)
            d += alg_->generators()[static_cast<std::size_t>(*it)].degree;
        F2Matrix out = F2Matrix::identity(static_cast<std::size_t>(dim(t)));
        int cur = t;
        for (auto it = w.rbegin(); it != w.rend(); ++it) {
            out = act(*it, cur).compose(out);
            cur += alg_->generators()[static_cast<std::size_t>(*it)].degree;
        }
        (void)d;
        return out;
    }

    // Action of an arbitrary element of the subalgebra, via its expression in
    // the canonical basis as sums of generator words.
    F2Matrix act_element(const SteenrodElement& e, int t) const
    {
        auto coords = alg_->coordinates(e);
        if (!coords)
            throw std::invalid_argument("act_element: element not in " + alg_->label() + ": " + e.to_string());
        int d = e.degree();
        F2Matrix out(static_cast<std::size_t>(dim(t + d)), static_cast<std::size_t>(dim(t)));
        if (e.is_zero())
            return out;
        for (auto slot : coords->support()) {
            int bidx = alg_->index_at(d, static_cast<int>(slot));
            for (const auto& w : alg_->expression(bidx))
                out ^= act_word(w, t);
        }
        return out;
    }

    F2Matrix act_basis(int alg_index, int t) const
    {
        int d = alg_->degree_of(alg_index);
        F2Matrix out(static_cast<std::size_t>(dim(t + d)), static_cast<std::size_t>(dim(t)));
        for (const auto& w : alg_->expression(alg_index))
            out ^= act_word(w, t);
        return out;
    }

    struct ValidationReport {
        bool ok = true;
        std::string message;
    };

    // Semantic well-definedness: any two words in the algebra generators with
    // equal admissible reductions must act identically wherever both actions
    // are visible in the window.  Word degrees run to the algebra's top
    // degree, capped at `word_cap` (the cap still covers every Adem relation
    // among the generators of A(2) and A(3)).
    ValidationReport validate(int word_cap = 16) const
    {
        int cap = std::min(alg_->top_degree(), word_cap);
        std::map<SteenrodElement, std::pair<GenWord, std::vector<F2Matrix>>> seen;
        GenWord word;
        std::vector<F2Matrix> mats = identity_family();
        ValidationReport rep;
        validate_dfs(word, mats, 0, cap, seen, rep);
        return rep;
    }

    ModulePresentation suspend(int r) const
    {
        ModulePresentation out(alg_, t_min_ + r, t_max_ + r, label_.empty() ? "" : label_);
        out.names_ = names_;
        out.action_ = action_;
        out.trusted_ = trusted_ >= kTotalModule ? kTotalModule : trusted_ + r;
        return out;
    }

    ModulePresentation truncate(int t_cap) const
    {
        if (t_cap > t_max_)
            throw std::invalid_argument("truncate: cap above window");
        if (t_cap >= t_max_)
            return *this;
        ModulePresentation out(alg_, t_min_, t_cap, label_);
        bool cut = false;
        for (int t = t_min_; t <= t_cap; ++t) {
            for (const auto& n : names(t))
                out.add_generator(n, t);
        }
        for (int t = t_cap + 1; t <= t_max_; ++t)
            if (dim(t) > 0)
                cut = true;
        for (int g = 0; g < static_cast<int>(alg_->generators().size()); ++g) {
            int dg = alg_->generators()[static_cast<std::size_t>(g)].degree;
            for (int t = t_min_; t <= t_cap; ++t) {
                if (t + dg <= t_cap)
                    out.set_act(g, t, act(g, t));
                else if (dim(t) > 0 && dim(t + dg) > 0) {
                    const F2Matrix& m = act(g, t);
                    for (std::size_t i = 0; i < m.rows(); ++i)
                        if (!m.row(i).is_zero())
                            cut = true;
                }
            }
        }
        out.trusted_ = cut ? std::min(trusted_, t_cap) : trusted_;
        return out;
    }

    friend ModulePresentation direct_sum(const ModulePresentation& a, const ModulePresentation& b)
    {
        if (a.alg_->label() != b.alg_->label())
            throw std::invalid_argument("direct_sum: different algebras");
        int lo = std::min(a.t_min_, b.t_min_), hi = std::max(a.t_max_, b.t_max_);
        ModulePresentation out(a.alg_, lo, hi, a.label_ + "+" + b.label_);
        out.trusted_ = std::min(a.trusted_, b.trusted_);
        std::set<std::string> used;
        for (int t = lo; t <= hi; ++t) {
            for (const auto& n : a.names(t)) {
                std::string nm = n;
                while (used.count(nm))
                    nm += "'";
                used.insert(nm);
                out.add_generator(nm, t);
            }
            for (const auto& n : b.names(t)) {
                std::string nm = n;
                while (used.count(nm))
                    nm += "'";
                used.insert(nm);
                out.add_generator(nm, t);
            }
        }
        for (int g = 0; g < static_cast<int>(a.alg_->generators().size()); ++g) {
            int dg = a.alg_->generators()[static_cast<std::size_t>(g)].degree;
            for (int t = lo; t <= hi; ++t) {
                if (out.dim(t) == 0 || out.dim(t + dg) == 0)
                    continue;
                F2Matrix m(static_cast<std::size_t>(out.dim(t + dg)), static_cast<std::size_t>(out.dim(t)));
                const F2Matrix& ma = a.act(g, t);
                for (std::size_t i = 0; i < ma.rows(); ++i)
                    for (std::size_t j = 0; j < ma.cols(); ++j)
                        if (ma.get(i, j))
                            m.set(i, j);
                const F2Matrix& mb = b.act(g, t);
                std::size_t ro = static_cast<std::size_t>(a.dim(t + dg));
                std::size_t co = static_cast<std::size_t>(a.dim(t));
                for (std::size_t i = 0; i < mb.rows(); ++i)
                    for (std::size_t j = 0; j < mb.cols(); ++j)
                        if (mb.get(i, j))
                            m.set(ro + i, co + j);
                out.set_act(g, t, std::move(m));
            }
        }
        return out;
    }

    // Tensor over GF(2) with the diagonal action through the coproduct.
    friend ModulePresentation tensor(const ModulePresentation& a, const ModulePresentation& b)
    {
        if (a.alg_->label() != b.alg_->label())
            throw std::invalid_argument("tensor: different algebras");
        const auto& alg = *a.alg_;
        int lo = a.t_min_ + b.t_min_, hi = a.t_max_ + b.t_max_;
        ModulePresentation out(a.alg_, lo, hi, a.label_ + "(x)" + b.label_);
        out.trusted_ = std::min({kTotalModule,
                                 a.trusted_ >= kTotalModule ? kTotalModule : a.trusted_ + b.t_min_,
                                 b.trusted_ >= kTotalModule ? kTotalModule : b.trusted_ + a.t_min_});
        // Basis at degree t: pairs (x in degree ta, y in degree t-ta), ta
        // ascending, then (i, j) lexicographic.
        struct Pair {
            int ta, i, j;
        };
        std::map<int, std::vector<Pair>> table;
        for (int t = lo; t <= hi; ++t) {
            for (int ta = a.t_min_; ta <= a.t_max_; ++ta) {
                int tb = t - ta;
                if (tb < b.t_min_ || tb > b.t_max_)
                    continue;
                for (int i = 0; i < a.dim(ta); ++i)
                    for (int j = 0; j < b.dim(tb); ++j) {
                        table[t].push_back({ta, i, j});
                        out.add_generator(a.names(ta)[static_cast<std::size_t>(i)] + "(x)" +
                                              b.names(t - ta)[static_cast<std::size_t>(j)],
                                          t);
                    }
            }
        }
        auto index_of = [&table](int t, int ta, int i, int j) -> int {
            const auto& v = table.at(t);
            for (std::size_t k = 0; k < v.size(); ++k)
                if (v[k].ta == ta && v[k].i == i && v[k].j == j)
                    return static_cast<int>(k);
            throw std::logic_error("tensor: basis index lookup failed");
        };
        for (int g = 0; g < static_cast<int>(alg.generators().size()); ++g) {
            int dg = alg.generators()[static_cast<std::size_t>(g)].degree;
            auto legs = coproduct_of_generator(alg, g);
            for (int t = lo; t <= hi; ++t) {
                if (out.dim(t) == 0 || out.dim(t + dg) == 0)
                    continue;
                F2Matrix m(static_cast<std::size_t>(out.dim(t + dg)), static_cast<std::size_t>(out.dim(t)));
                const auto& src = table.at(t);
                for (std::size_t col = 0; col < src.size(); ++col) {
                    const Pair& p = src[col];
                    for (const auto& [u, v] : legs) {
                        int du = u.degree(), dv = v.degree();
                        if (p.ta + du > a.t_max_ || t - p.ta + dv > b.t_max_)
                            continue;
                        F2Matrix ua = a.act_element(u, p.ta);
                        F2Matrix vb = b.act_element(v, t - p.ta);
                        F2Vector ux = ua.col(static_cast<std::size_t>(p.i));
                        F2Vector vx = vb.col(static_cast<std::size_t>(p.j));
                        for (auto i2 : ux.support())
                            for (auto j2 : vx.support())
                                m.flip_entry(static_cast<std::size_t>(index_of(t + dg, p.ta + du,
                                                                               static_cast<int>(i2), static_cast<int>(j2))),
                                             col);
                    }
                }
                out.set_act(g, t, std::move(m));
            }
        }
        return out;
    }

    // Restriction along an inclusion of subalgebras.
    ModulePresentation restrict_to(const AlgebraPtr& sub) const
    {
        if (!alg_->contains_subalgebra(*sub))
            throw std::invalid_argument("restrict_to: " + sub->label() + " is not contained in " + alg_->label());
        ModulePresentation out(sub, t_min_, t_max_, label_.empty() ? "" : label_ + "|" + sub->label());
        out.names_ = names_;
        out.trusted_ = trusted_;
        for (int g = 0; g < static_cast<int>(sub->generators().size()); ++g) {
            const auto& gen = sub->generators()[static_cast<std::size_t>(g)];
            for (int t = t_min_; t <= t_max_; ++t) {
                if (out.dim(t) == 0 || out.dim(t + gen.degree) == 0)
                    continue;
                out.set_act(g, t, act_element(gen.element, t));
            }
        }
        return out;
    }

    // The A(1)-style submodule generated by given vectors (degree, coords).
    ModulePresentation submodule(const std::vector<std::pair<int, F2Vector>>& gens_in) const
    {
        std::map<int, EchelonBasis> span;
        for (int t = t_min_; t <= t_max_; ++t)
            span.emplace(t, EchelonBasis(static_cast<std::size_t>(dim(t))));
        std::vector<std::pair<int, F2Vector>> frontier;
        for (const auto& [t, v] : gens_in)
            if (span.at(t).insert(v))
                frontier.push_back({t, v});
        while (!frontier.empty()) {
            std::vector<std::pair<int, F2Vector>> next;
            for (const auto& [t, v] : frontier) {
                for (int g = 0; g < static_cast<int>(alg_->generators().size()); ++g) {
                    int dg = alg_->generators()[static_cast<std::size_t>(g)].degree;
                    if (t + dg > t_max_)
                        continue;
                    F2Vector w = act(g, t).apply(v);
                    if (!w.is_zero() && span.at(t + dg).insert(w))
                        next.push_back({t + dg, w});
                }
            }
            frontier = std::move(next);
        }
        // Canonical basis per degree: echelon rows sorted by pivot.
        std::map<int, std::vector<F2Vector>> rows;
        for (int t = t_min_; t <= t_max_; ++t) {
            EchelonBasis& eb = span.at(t);
            rows[t] = {};
            for (std::size_t k = 0; k < eb.pivots().size(); ++k)
                rows[t].push_back(eb.row(k));
            std::sort(rows[t].begin(), rows[t].end(),
                      [](const F2Vector& x, const F2Vector& y) { return x.first_set() < y.first_set(); });
        }
        ModulePresentation out(alg_, t_min_, t_max_, label_ + ".sub");
        out.trusted_ = trusted_;
        for (int t = t_min_; t <= t_max_; ++t)
            for (std::size_t k = 0; k < rows[t].size(); ++k)
                out.add_generator("s" + std::to_string(t) + "_" + std::to_string(k), t);
        for (int g = 0; g < static_cast<int>(alg_->generators().size()); ++g) {
            int dg = alg_->generators()[static_cast<std::size_t>(g)].degree;
            for (int t = t_min_; t <= t_max_; ++t) {
                if (out.dim(t) == 0 || out.dim(t + dg) == 0)
                    continue;
                F2Matrix m(static_cast<std::size_t>(out.dim(t + dg)), static_cast<std::size_t>(out.dim(t)));
                F2Matrix basis_target(static_cast<std::size_t>(dim(t + dg)), static_cast<std::size_t>(rows[t + dg].size()));
                for (std::size_t k = 0; k < rows[t + dg].size(); ++k)
                    basis_target.set_col(k, rows[t + dg][k]);
                for (std::size_t j = 0; j < rows[t].size(); ++j) {
                    F2Vector img = act(g, t).apply(rows[t][j]);
                    auto sol = solve(basis_target, img);
                    if (!sol)
                        throw std::logic_error("submodule: closure failure");
                    m.set_col(j, *sol);
                }
                out.set_act(g, t, std::move(m));
            }
        }
        return out;
    }

    std::string to_cell_diagram() const
    {
        std::ostringstream os;
        os << "algebra " << alg_->label() << "\n";
        os << "range " << t_min_ << " " << t_max_ << "\n";
        for (int t = t_min_; t <= t_max_; ++t)
            for (const auto& n : names(t))
                os << "gen " << n << " " << t << "\n";
        for (int g = 0; g < static_cast<int>(alg_->generators().size()); ++g) {
            int dg = alg_->generators()[static_cast<std::size_t>(g)].degree;
            for (int t = t_min_; t <= t_max_; ++t) {
                const F2Matrix& m = act(g, t);
                for (std::size_t j = 0; j < m.cols(); ++j) {
                    F2Vector c = m.col(j);
                    if (c.is_zero())
                        continue;
                    os << "sq" << dg << " " << names(t)[j] << " =";
                    bool first = true;
                    for (auto i : c.support()) {
                        os << (first ? " " : " + ") << names(t + dg)[i];
                        first = false;
                    }
                    os << "\n";
                }
            }
        }
        return os.str();
    }

private:
    std::size_t idx(int t) const { return static_cast<std::size_t>(t - t_min_); }

    void ensure_matrix(int g, int t) const
    {
        auto& vec = action_[static_cast<std::size_t>(g)];
        if (vec.empty())
            vec.assign(static_cast<std::size_t>(t_max_ - t_min_ + 1), F2Matrix());
        int dg = alg_->generators().at(static_cast<std::size_t>(g)).degree;
        F2Matrix& m = vec[idx(t)];
        std::size_t want_r = static_cast<std::size_t>(dim(t + dg));
        std::size_t want_c = static_cast<std::size_t>(dim(t));
        if (m.rows() != want_r || m.cols() != want_c)
            m = F2Matrix(want_r, want_c);
    }

    std::vector<F2Matrix> identity_family() const
    {
        std::vector<F2Matrix> out;
        for (int t = t_min_; t <= t_max_; ++t)
            out.push_back(F2Matrix::identity(static_cast<std::size_t>(dim(t))));
        return out;
    }

    static std::vector<std::pair<SteenrodElement, SteenrodElement>> coproduct_of_generator(const SubalgebraSpec& alg,
                                                                                           int g)
    {
        std::vector<std::pair<SteenrodElement, SteenrodElement>> legs;
        const auto& gen = alg.generators()[static_cast<std::size_t>(g)];
        if (alg.kind() == AlgebraKind::A) {
            int k = gen.degree;
            for (int a = 0; a <= k; ++a)
                legs.emplace_back(a == 0 ? SteenrodElement::unit() : SteenrodElement::sq(a),
                                  a == k ? SteenrodElement::unit() : SteenrodElement::sq(k - a));
        }
        else {
            // Milnor primitives: psi(Q_i) = Q_i (x) 1 + 1 (x) Q_i.
            legs.emplace_back(gen.element, SteenrodElement::unit());
            legs.emplace_back(SteenrodElement::unit(), gen.element);
        }
        return legs;
    }

    void validate_dfs(GenWord& word, const std::vector<F2Matrix>& mats, int wdeg, int cap,
                      std::map<SteenrodElement, std::pair<GenWord, std::vector<F2Matrix>>>& seen,
                      ValidationReport& rep) const
    {
        if (!rep.ok)
            return;
        if (!word.empty()) {
            // Reduce the word as an element of the ambient Steenrod algebra.
            SteenrodElement red = SteenrodElement::unit();
            for (int gi : word)
                red = multiply(red, alg_->generators()[static_cast<std::size_t>(gi)].element, alg_->degree_cap());
            auto it = seen.find(red);
            if (it == seen.end()) {
                seen.emplace(red, std::make_pair(word, mats));
            }
            else {
                for (int t = t_min_; t <= t_max_; ++t) {
                    if (t + wdeg > t_max_)
                        break;
                    const F2Matrix& m1 = mats[idx(t)];
                    const F2Matrix& m2 = it->second.second[idx(t)];
                    if (m1 != m2) {
                        for (std::size_t j = 0; j < m1.cols(); ++j) {
                            if (m1.col(j) != m2.col(j)) {
                                rep.ok = false;
                                rep.message = "words " + word_label(word) + " and " + word_label(it->second.first) +
                                              " reduce to the same element but act differently on generator '" +
                                              names(t)[j] + "' (degree " + std::to_string(t) + ")";
                                return;
                            }
                        }
                    }
                }
            }
            if (red.is_zero()) {
                for (int t = t_min_; t <= t_max_; ++t) {
                    if (t + wdeg > t_max_)
                        break;
                    const F2Matrix& m1 = mats[idx(t)];
                    for (std::size_t j = 0; j < m1.cols(); ++j) {
                        if (!m1.col(j).is_zero()) {
                            rep.ok = false;
                            rep.message = "word " + word_label(word) +
                                          " reduces to zero but acts nontrivially on generator '" + names(t)[j] +
                                          "' (degree " + std::to_string(t) + ")";
                            return;
                        }
                    }
                }
            }
        }
        for (int g = 0; g < static_cast<int>(alg_->generators().size()); ++g) {
            int dg = alg_->generators()[static_cast<std::size_t>(g)].degree;
            if (wdeg + dg > cap)
                continue;
            std::vector<F2Matrix> next;
            next.reserve(mats.size());
            for (int t = t_min_; t <= t_max_; ++t) {
                int mid = t + wdeg;
                if (mid + dg <= t_max_ && mid >= t_min_)
                    next.push_back(act(g, mid).compose(mats[idx(t)]));
                else
                    next.push_back(F2Matrix(static_cast<std::size_t>(dim(mid + dg)), static_cast<std::size_t>(dim(t))));
            }
            word.insert(word.begin(), g);
            validate_dfs(word, next, wdeg + dg, cap, seen, rep);
            word.erase(word.begin());
            if (!rep.ok)
                return;
        }
    }

    std::string word_label(const GenWord& w) const
    {
        if (w.empty())
            return "1";
        std::string s;
        for (int gi : w)
            s += alg_->generators()[static_cast<std::size_t>(gi)].label + ".";
        s.pop_back();
        return s;
    }

    AlgebraPtr alg_;
    int t_min_ = 0, t_max_ = -1;
    int trusted_ = kTotalModule;
    std::string label_;
    std::vector<std::vector<std::string>> names_;
    mutable std::vector<std::vector<F2Matrix>> action_;
    mutable std::map<std::pair<int, int>, F2Matrix> oob_;
};

struct CellDiagramError : std::runtime_error {
    CellDiagramError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_no(line)
    {
    }
    int line_no;
};

// Line-oriented module files:
//   algebra A(1)
//   range <t_min> <t_max>
//   gen <name> <degree>
//   sq1 <name> = <name> [+ <name>]*     (sq2/sq4/sq8 when the algebra has them)
// '#' starts a comment; omitted actions are zero; sums are order-insensitive.
// An optional `truncated` line marks the file as a window of a larger module,
// so queries needing data above the range refuse instead of treating the
// missing cells as zero.
inline ModulePresentation parse_cell_diagram(const std::string& text, const std::string& label = "",
                                             bool run_validate = true)
{
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool truncated = false;

    AlgebraPtr alg;
    std::optional<std::pair<int, int>> range;
    std::vector<std::tuple<std::string, int, int>> gens;              // name, degree, line
    std::vector<std::tuple<int, std::string, std::vector<std::string>, int>> actions;  // op degree, src, targets, line
    std::map<std::string, int> gen_degree;

    auto valid_name = [](const std::string& s) {
        if (s.empty())
            return false;
        for (char c : s)
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
                return false;
        return true;
    };

    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head))
            continue;
        if (head == "algebra") {
            std::string lbl;
            if (!(ls >> lbl))
                throw CellDiagramError(line_no, "expected algebra label");
            try {
                alg = parse_algebra_label(lbl);
            }
            catch (const std::exception& e) {
                throw CellDiagramError(line_no, e.what());
            }
        }
        else if (head == "range") {
            int lo, hi;
            if (!(ls >> lo >> hi))
                throw CellDiagramError(line_no, "expected 'range <t_min> <t_max>'");
            range = {lo, hi};
        }
        else if (head == "truncated") {
            truncated = true;
        }
        else if (head == "gen") {
            std::string name;
            int d;
            if (!(ls >> name >> d))
                throw CellDiagramError(line_no, "expected 'gen <name> <degree>'");
            if (!valid_name(name))
                throw CellDiagramError(line_no, "invalid generator name '" + name + "'");
            if (gen_degree.count(name))
                throw CellDiagramError(line_no, "duplicate generator name '" + name + "'");
            gen_degree[name] = d;
            gens.emplace_back(name, d, line_no);
        }
        else if (head.size() > 2 && head.substr(0, 2) == "sq") {
            int opdeg = 0;
            try {
                opdeg = std::stoi(head.substr(2));
            }
            catch (...) {
                throw CellDiagramError(line_no, "unknown directive '" + head + "'");
            }
            std::string src, eq, tok;
            if (!(ls >> src >> eq) || eq != "=")
                throw CellDiagramError(line_no, "expected '" + head + " <name> = <sum>'");
            std::vector<std::string> targets;
            bool expect_name = true;
            while (ls >> tok) {
                if (tok == "+") {
                    if (expect_name)
                        throw CellDiagramError(line_no, "misplaced '+'");
                    expect_name = true;
                    continue;
                }
                if (!expect_name)
                    throw CellDiagramError(line_no, "missing '+' between summands");
                targets.push_back(tok);
                expect_name = false;
            }
            if (targets.empty() || expect_name)
                throw CellDiagramError(line_no, "empty right-hand side");
            actions.emplace_back(opdeg, src, targets, line_no);
        }
        else {
            throw CellDiagramError(line_no, "unknown directive '" + head + "'");
        }
    }

    if (!alg)
        throw CellDiagramError(line_no, "missing required 'algebra' header");
    if (!range)
        throw CellDiagramError(line_no, "missing required 'range' header");

    ModulePresentation m(alg, range->first, range->second, label);
    std::map<std::string, std::pair<int, int>> where;  // name -> (degree, index)
    for (const auto& [name, d, ln] : gens) {
        if (d < range->first || d > range->second)
            throw CellDiagramError(ln, "generator '" + name + "' outside declared range");
        where[name] = {d, m.add_generator(name, d)};
    }
    for (const auto& [opdeg, src, targets, ln] : actions) {
        int g = -1;
        for (int k = 0; k < static_cast<int>(alg->generators().size()); ++k)
            if (alg->generators()[static_cast<std::size_t>(k)].degree == opdeg &&
                alg->kind() == AlgebraKind::A)
                g = k;
        if (g < 0)
            throw CellDiagramError(ln, "operation sq" + std::to_string(opdeg) + " is not a generator of " +
                                           alg->label());
        auto sit = where.find(src);
        if (sit == where.end())
            throw CellDiagramError(ln, "unknown generator '" + src + "'");
        auto [sd, sidx] = sit->second;
        std::set<std::string> seen_targets;
        for (const auto& tname : targets) {
            auto tit = where.find(tname);
            if (tit == where.end())
                throw CellDiagramError(ln, "unknown generator '" + tname + "'");
            auto [td, tidx] = tit->second;
            if (td != sd + opdeg)
                throw CellDiagramError(ln, "degree mismatch: sq" + std::to_string(opdeg) + " " + src +
                                               " lands in degree " + std::to_string(sd + opdeg) + " but '" + tname +
                                               "' has degree " + std::to_string(td));
            if (!seen_targets.insert(tname).second)
                throw CellDiagramError(ln, "duplicate summand '" + tname + "'");
            m.set_act_entry(g, sd, sidx, tidx);
        }
    }
    if (truncated)
        m.set_trusted_tmax(range->second);
    if (run_validate) {
        auto rep = m.validate();
        if (!rep.ok)
            throw std::runtime_error("module validation failed: " + rep.message);
    }
    return m;
}

// C // B = C (x)_B Z/2: the quotient of the regular module by the left ideal
// C * I(B), with the induced left C-action.  Basis vectors are coset leaders.
inline ModulePresentation coinduced_quotient(const AlgebraPtr& big, const AlgebraPtr& small)
{
    const SubalgebraSpec& C = *big;
    const SubalgebraSpec& B = *small;
    if (!C.contains_subalgebra(B))
        throw std::invalid_argument("coinduced_quotient: " + B.label() + " is not a subalgebra of " + C.label());

    // Degreewise span of { c * b : c in C, b in I(B) }.
    std::map<int, EchelonBasis> ideal;
    for (int d = 0; d <= C.top_degree(); ++d)
        ideal.emplace(d, EchelonBasis(static_cast<std::size_t>(C.dim_at(d))));
    for (int bi : B.ideal_basis()) {
        SteenrodElement be = B.basis_element(bi);
        for (int ci = 0; ci < C.dim(); ++ci) {
            int d = C.degree_of(ci) + be.degree();
            if (d > C.top_degree())
                continue;
            SteenrodElement prod = multiply(C.basis_element(ci), be, C.degree_cap());
            auto coords = C.coordinates(prod);
            if (!coords)
                throw std::logic_error("coinduced_quotient: product escaped the algebra");
            if (!coords->is_zero())
                ideal.at(d).insert(*coords);
        }
    }

    // Coset leaders: the C-basis elements at non-pivot indices.
    std::map<int, std::vector<std::size_t>> leaders;
    for (int d = 0; d <= C.top_degree(); ++d)
        leaders[d] = ideal.at(d).free_indices();

    int top = 0;
    for (int d = 0; d <= C.top_degree(); ++d)
        if (!leaders[d].empty())
            top = d;
    ModulePresentation out(big, 0, top, C.label() + "//" + B.label());
    for (int d = 0; d <= top; ++d) {
        for (auto slot : leaders[d]) {
            std::string nm = C.basis_element(C.index_at(d, static_cast<int>(slot))).to_string();
            std::string clean;
            for (char c : nm)
                if (c != ' ')
                    clean += c;
            out.add_generator(clean, d);
        }
    }
    for (int g = 0; g < static_cast<int>(C.generators().size()); ++g) {
        const auto& gen = C.generators()[static_cast<std::size_t>(g)];
        for (int d = 0; d + gen.degree <= top; ++d) {
            if (out.dim(d) == 0 || out.dim(d + gen.degree) == 0)
                continue;
            F2Matrix m(static_cast<std::size_t>(out.dim(d + gen.degree)), static_cast<std::size_t>(out.dim(d)));
            auto gcoords = C.coordinates(gen.element);
            for (std::size_t j = 0; j < leaders[d].size(); ++j) {
                int cidx = C.index_at(d, static_cast<int>(leaders[d][j]));
                // g * leader, reduced modulo the ideal; the remainder is
                // supported on coset leaders.
                F2Vector img(static_cast<std::size_t>(C.dim_at(d + gen.degree)));
                for (auto gslot : gcoords->support()) {
                    int gidx = C.index_at(gen.degree, static_cast<int>(gslot));
                    img ^= C.mult(gidx, cidx);
                }
                F2Vector red = ideal.at(d + gen.degree).reduce(img);
                for (std::size_t k = 0; k < leaders[d + gen.degree].size(); ++k)
                    if (red.get(leaders[d + gen.degree][k]))
                        m.set(k, j);
            }
            out.set_act(g, d, std::move(m));
        }
    }
    return out;
}

// The regular module: B acting on itself by left multiplication.
inline ModulePresentation regular_module(const AlgebraPtr& alg)
{
    const SubalgebraSpec& B = *alg;
    ModulePresentation out(alg, 0, B.top_degree(), B.label());
    for (int d = 0; d <= B.top_degree(); ++d)
        for (int k = 0; k < B.dim_at(d); ++k) {
            std::string nm = B.basis_element(B.index_at(d, k)).to_string();
            std::string clean;
            for (char c : nm)
                if (c != ' ')
                    clean += c;
            out.add_generator(clean, d);
        }
    for (int g = 0; g < static_cast<int>(B.generators().size()); ++g) {
        const auto& gen = B.generators()[static_cast<std::size_t>(g)];
        auto gcoords = B.coordinates(gen.element);
        for (int d = 0; d + gen.degree <= B.top_degree(); ++d) {
            if (out.dim(d) == 0 || out.dim(d + gen.degree) == 0)
                continue;
            F2Matrix m(static_cast<std::size_t>(out.dim(d + gen.degree)), static_cast<std::size_t>(out.dim(d)));
            for (int j = 0; j < B.dim_at(d); ++j) {
                F2Vector img(static_cast<std::size_t>(B.dim_at(d + gen.degree)));
                for (auto gslot : gcoords->support())
                    img ^= B.mult(B.index_at(gen.degree, static_cast<int>(gslot)), B.index_at(d, j));
                for (auto i : img.support())
                    m.set(i, static_cast<std::size_t>(j));
            }
            out.set_act(g, d, std::move(m));
        }
    }
    return out;
}

// The trivial one-dimensional module in degree zero.
inline ModulePresentation trivial_module(const AlgebraPtr& alg, int window_hi = 0)
{
    ModulePresentation out(alg, 0, window_hi, "Z/2");
    out.add_generator("x", 0);
    return out;
}

struct ShortExactSequence {
    ModulePresentation sub, total, quotient;
    // inclusion[t]: dim_total(t) x dim_sub(t); projection[t]: dim_quot(t) x dim_total(t)
    std::map<int, F2Matrix> inclusion, projection;

    struct Report {
        bool ok = true;
        std::string message;
    };

    Report check() const
    {
        Report rep;
        auto fail = [&rep](const std::string& msg) {
            rep.ok = false;
            rep.message = msg;
        };
        int lo = total.t_min(), hi = total.t_max();
        for (int t = lo; t <= hi && rep.ok; ++t) {
            F2Matrix inc = incl_at(t), prj = proj_at(t);
            if (rank(inc) != static_cast<std::size_t>(sub.dim(t)))
                return fail("inclusion not injective in degree " + std::to_string(t)), rep;
            if (rank(prj) != static_cast<std::size_t>(quotient.dim(t)))
                return fail("projection not surjective in degree " + std::to_string(t)), rep;
            F2Matrix comp = prj.compose(inc);
            for (std::size_t i = 0; i < comp.rows(); ++i)
                if (!comp.row(i).is_zero())
                    return fail("projection o inclusion nonzero in degree " + std::to_string(t)), rep;
            if (sub.dim(t) + quotient.dim(t) != total.dim(t))
                return fail("dimension count fails exactness in degree " + std::to_string(t)), rep;
        }
        const auto& gens = total.algebra()->generators();
        for (int g = 0; g < static_cast<int>(gens.size()) && rep.ok; ++g) {
            int dg = gens[static_cast<std::size_t>(g)].degree;
            for (int t = lo; t + dg <= hi; ++t) {
                F2Matrix lhs = incl_at(t + dg).compose(sub.act(g, t));
                F2Matrix rhs = total.act(g, t).compose(incl_at(t));
                if (lhs != rhs)
                    return fail("inclusion does not commute with " + gens[static_cast<std::size_t>(g)].label +
                                " in degree " + std::to_string(t)),
                           rep;
                F2Matrix lhs2 = proj_at(t + dg).compose(total.act(g, t));
                F2Matrix rhs2 = quotient.act(g, t).compose(proj_at(t));
                if (lhs2 != rhs2)
                    return fail("projection does not commute with " + gens[static_cast<std::size_t>(g)].label +
                                " in degree " + std::to_string(t)),
                           rep;
            }
        }
        return rep;
    }

private:
    F2Matrix incl_at(int t) const
    {
        auto it = inclusion.find(t);
        if (it != inclusion.end())
            return it->second;
        return F2Matrix(static_cast<std::size_t>(total.dim(t)), static_cast<std::size_t>(sub.dim(t)));
    }
    F2Matrix proj_at(int t) const
    {
        auto it = projection.find(t);
        if (it != projection.end())
            return it->second;
        return F2Matrix(static_cast<std::size_t>(quotient.dim(t)), static_cast<std::size_t>(total.dim(t)));
    }
};

}  // namespace extcalc

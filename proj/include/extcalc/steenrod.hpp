#pragma once

// The mod-2 Steenrod algebra in bounded degree: admissible monomials, Adem
// reduction, Hopf structure, Milnor primitives, and the finite subalgebras
// A(n) and E(n).

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "extcalc/f2.hpp"

namespace extcalc {

// Every Steenrod computation is bounded; exceeding the cap throws rather than
// silently truncating.
constexpr int kDefaultDegreeCap = 64;

// binom(m, n) mod 2, extended to negative m via the power-series convention
// (1+x)^m over GF(2).
inline bool binom2(long m, long n)
{
    if (n < 0)
        return false;
    if (m < 0)
        return binom2(n - m - 1, n);
    return (static_cast<unsigned long>(m) & static_cast<unsigned long>(n)) == static_cast<unsigned long>(n);
}

// A word Sq^{i1}...Sq^{ik}; the empty word is Sq^0 = 1.
using SqWord = std::vector<int>;

inline int word_degree(const SqWord& w)
{
    int d = 0;
    for (int i : w)
        d += i;
    return d;
}

inline bool is_admissible(const SqWord& w)
{
    for (std::size_t j = 0; j + 1 < w.size(); ++j)
        if (w[j] < 2 * w[j + 1])
            return false;
    return true;
}

inline std::string word_to_string(const SqWord& w)
{
    if (w.empty())
        return "1";
    std::string s;
    for (int i : w)
        s += "Sq" + std::to_string(i);
    return s;
}

// A degree-homogeneous GF(2)-sum of admissible monomials.
class SteenrodElement {
public:
    SteenrodElement() = default;
    explicit SteenrodElement(int degree) : degree_(degree) {}

    static SteenrodElement unit()
    {
        SteenrodElement e(0);
        e.terms_.insert(SqWord{});
        return e;
    }

    static SteenrodElement sq(int k)
    {
        if (k < 0)
            throw std::invalid_argument("sq: exponent must be >= 0");
        if (k == 0)
            return unit();
        SteenrodElement e(k);
        e.terms_.insert(SqWord{k});
        return e;
    }

    static SteenrodElement monomial(const SqWord& w)
    {
        if (!is_admissible(w))
            throw std::invalid_argument("SteenrodElement::monomial: word not admissible: " + word_to_string(w));
        SteenrodElement e(word_degree(w));
        e.terms_.insert(w);
        return e;
    }

    int degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    const std::set<SqWord>& terms() const { return terms_; }

    void toggle(const SqWord& w)
    {
        auto it = terms_.find(w);
        if (it != terms_.end())
            terms_.erase(it);
        else
            terms_.insert(w);
    }

    SteenrodElement& operator+=(const SteenrodElement& o)
    {
        if (!o.is_zero() && !is_zero() && o.degree_ != degree_)
            throw std::invalid_argument("SteenrodElement: degree mismatch in sum");
        if (is_zero())
            degree_ = o.degree_;
        for (const auto& w : o.terms_)
            toggle(w);
        return *this;
    }

    friend SteenrodElement operator+(SteenrodElement a, const SteenrodElement& b)
    {
        a += b;
        return a;
    }

    bool operator==(const SteenrodElement& o) const
    {
        if (terms_.empty() && o.terms_.empty())
            return true;
        return degree_ == o.degree_ && terms_ == o.terms_;
    }
    bool operator!=(const SteenrodElement& o) const { return !(*this == o); }
    bool operator<(const SteenrodElement& o) const
    {
        if (degree_ != o.degree_)
            return degree_ < o.degree_;
        return terms_ < o.terms_;
    }

    std::string to_string() const
    {
        if (terms_.empty())
            return "0";
        std::string s;
        for (const auto& w : terms_) {
            if (!s.empty())
                s += " + ";
            s += word_to_string(w);
        }
        return s;
    }

private:
    int degree_ = 0;
    std::set<SqWord> terms_;
};

enum class AdemStrategy { Leftmost, Rightmost };

// Admissible-basis expansion of Sq^{w1}...Sq^{wk} by repeatedly rewriting an
// inadmissible adjacent pair with the Adem relation.  The reduction is
// confluent, so the strategy only matters for the confluence tests.
inline SteenrodElement adem_reduce(const SqWord& word, int degree_cap = kDefaultDegreeCap,
                                   AdemStrategy strategy = AdemStrategy::Leftmost)
{
    for (int i : word)
        if (i < 1)
            throw std::invalid_argument("adem_reduce: word entries must be >= 1");
    int deg = word_degree(word);
    if (deg > degree_cap)
        throw std::domain_error("adem_reduce: degree " + std::to_string(deg) + " exceeds cap " +
                                std::to_string(degree_cap));

    SteenrodElement result(deg);
    // Pending terms with GF(2) multiplicity; set semantics make cancellation
    // automatic.
    std::set<SqWord> pending;
    auto toggle_pending = [&pending](const SqWord& w) {
        auto it = pending.find(w);
        if (it != pending.end())
            pending.erase(it);
        else
            pending.insert(w);
    };
    toggle_pending(word);

    while (!pending.empty()) {
        SqWord w = *pending.begin();
        pending.erase(pending.begin());

        std::size_t bad = w.size();
        if (strategy == AdemStrategy::Leftmost) {
            for (std::size_t j = 0; j + 1 < w.size(); ++j)
                if (w[j] < 2 * w[j + 1]) {
                    bad = j;
                    break;
                }
        }
        else {
            for (std::size_t j = w.size() >= 2 ? w.size() - 2 : 0; j + 1 < w.size(); --j) {
                if (w[j] < 2 * w[j + 1]) {
                    bad = j;
                    break;
                }
                if (j == 0)
                    break;
            }
        }
        if (bad == w.size()) {
            result.toggle(w);
            continue;
        }

        int a = w[bad], b = w[bad + 1];
        for (int c = 0; c <= a / 2; ++c) {
            if (!binom2(b - c - 1, a - 2 * c))
                continue;
            SqWord nw(w.begin(), w.begin() + static_cast<long>(bad));
            nw.push_back(a + b - c);
            if (c > 0)
                nw.push_back(c);
            nw.insert(nw.end(), w.begin() + static_cast<long>(bad) + 2, w.end());
            toggle_pending(nw);
        }
    }
    return result;
}

inline SteenrodElement multiply(const SteenrodElement& x, const SteenrodElement& y,
                                int degree_cap = kDefaultDegreeCap)
{
    if (x.is_zero() || y.is_zero())
        return SteenrodElement(x.degree() + y.degree());
    SteenrodElement out(x.degree() + y.degree());
    for (const auto& wx : x.terms()) {
        for (const auto& wy : y.terms()) {
            SqWord w = wx;
            w.insert(w.end(), wy.begin(), wy.end());
            out += adem_reduce(w, degree_cap);
        }
    }
    return out;
}

// A GF(2)-sum of two-sided tensors of admissible monomials.
class TensorElement {
public:
    using Term = std::pair<SqWord, SqWord>;

    void toggle(const Term& t)
    {
        auto it = terms_.find(t);
        if (it != terms_.end())
            terms_.erase(it);
        else
            terms_.insert(t);
    }

    TensorElement& operator+=(const TensorElement& o)
    {
        for (const auto& t : o.terms_)
            toggle(t);
        return *this;
    }

    bool is_zero() const { return terms_.empty(); }
    const std::set<Term>& terms() const { return terms_; }
    bool operator==(const TensorElement& o) const { return terms_ == o.terms_; }

private:
    std::set<Term> terms_;
};

// psi(Sq^k) = sum_{i+j=k} Sq^i (x) Sq^j, extended multiplicatively; both legs
// are returned in admissible form.
inline TensorElement coproduct(const SteenrodElement& x, int degree_cap = kDefaultDegreeCap)
{
    TensorElement out;
    for (const auto& w : x.terms()) {
        // Splittings of each factor, folded left to right.
        std::vector<TensorElement::Term> partial = {{SqWord{}, SqWord{}}};
        for (int k : w) {
            std::vector<TensorElement::Term> next;
            for (const auto& [la, lb] : partial) {
                for (int i = 0; i <= k; ++i) {
                    SqWord a = la, b = lb;
                    if (i > 0)
                        a.push_back(i);
                    if (k - i > 0)
                        b.push_back(k - i);
                    next.emplace_back(std::move(a), std::move(b));
                }
            }
            partial = std::move(next);
        }
        for (const auto& [wa, wb] : partial) {
            SteenrodElement ea = adem_reduce(wa.empty() ? SqWord{} : wa, degree_cap);
            if (wa.empty())
                ea = SteenrodElement::unit();
            SteenrodElement eb = adem_reduce(wb.empty() ? SqWord{} : wb, degree_cap);
            if (wb.empty())
                eb = SteenrodElement::unit();
            for (const auto& ta : ea.terms())
                for (const auto& tb : eb.terms())
                    out.toggle({ta, tb});
        }
    }
    return out;
}

// chi(Sq^k) from the inductive identity sum_{i=0}^{k} Sq^i chi(Sq^{k-i}) = 0.
inline SteenrodElement antipode(int k, int degree_cap = kDefaultDegreeCap)
{
    if (k < 0)
        throw std::invalid_argument("antipode: k must be >= 0");
    static std::map<int, SteenrodElement> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(k);
    if (it != cache.end())
        return it->second;
    // Ascending fill so dependencies are always present.
    for (int j = 0; j <= k; ++j) {
        if (cache.count(j))
            continue;
        if (j == 0) {
            cache[0] = SteenrodElement::unit();
            continue;
        }
        SteenrodElement c(j);
        for (int i = 1; i <= j; ++i)
            c += multiply(SteenrodElement::sq(i), cache[j - i], degree_cap);
        cache[j] = c;
    }
    return cache[k];
}

// Q_0 = Sq^1, Q_i = Sq^{2^i} Q_{i-1} + Q_{i-1} Sq^{2^i}; degree 2^{i+1} - 1.
inline SteenrodElement milnor_q(int i, int degree_cap = kDefaultDegreeCap)
{
    if (i < 0 || i > 3)
        throw std::invalid_argument("milnor_q: supported range is 0 <= i <= 3");
    SteenrodElement q = SteenrodElement::sq(1);
    for (int j = 1; j <= i; ++j) {
        SteenrodElement s = SteenrodElement::sq(1 << j);
        q = multiply(s, q, degree_cap) + multiply(q, s, degree_cap);
    }
    return q;
}

enum class AlgebraKind { A, E };

// Words over generator indices; [i1, i2, ...] means gen_{i1} * gen_{i2} * ...
using GenWord = std::vector<int>;

struct AlgebraGenerator {
    std::string label;
    int degree;
    SteenrodElement element;
};

// A finite subalgebra of the Steenrod algebra: A(n) generated by
// Sq^1..Sq^{2^n}, or the exterior algebra E(n) on Q_0..Q_n.  Carries a
// canonical basis, a multiplication table, and for each basis element an
// expression as a GF(2)-sum of words in the generators (used to transport
// algebra elements onto module action matrices).
class SubalgebraSpec {
public:
    SubalgebraSpec(AlgebraKind kind, int n) : kind_(kind), n_(n)
    {
        if (kind == AlgebraKind::A && (n < 0 || n > 3))
            throw std::invalid_argument("subalgebra: A(n) supported for 0 <= n <= 3");
        if (kind == AlgebraKind::E && (n < 0 || n > 2))
            throw std::invalid_argument("subalgebra: E(n) supported for 0 <= n <= 2");
        top_degree_ = compute_top_degree(kind, n);
        cap_ = std::max(2 * top_degree_, kDefaultDegreeCap);
        if (kind == AlgebraKind::A) {
            for (int i = 0; i <= n; ++i) {
                int d = 1 << i;
                gens_.push_back({"Sq" + std::to_string(d), d, SteenrodElement::sq(d)});
            }
        }
        else {
            for (int i = 0; i <= n; ++i)
                gens_.push_back({"Q" + std::to_string(i), (1 << (i + 1)) - 1, milnor_q(i, cap_)});
        }
        build_basis();
        build_mult_table();
    }

    AlgebraKind kind() const { return kind_; }
    int n() const { return n_; }
    std::string label() const
    {
        return (kind_ == AlgebraKind::A ? std::string("A(") : std::string("E(")) + std::to_string(n_) + ")";
    }
    int top_degree() const { return top_degree_; }
    int degree_cap() const { return cap_; }

    const std::vector<AlgebraGenerator>& generators() const { return gens_; }

    int dim() const { return static_cast<int>(basis_.size()); }
    int dim_at(int d) const
    {
        if (d < 0 || d > top_degree_)
            return 0;
        return static_cast<int>(by_degree_[static_cast<std::size_t>(d)].size());
    }
    // Global index of the k-th basis element in degree d.
    int index_at(int d, int k) const { return by_degree_.at(static_cast<std::size_t>(d)).at(static_cast<std::size_t>(k)); }
    int degree_of(int idx) const { return basis_.at(static_cast<std::size_t>(idx)).degree(); }
    // Position within its degree block.
    int slot_of(int idx) const { return slot_.at(static_cast<std::size_t>(idx)); }
    const SteenrodElement& basis_element(int idx) const { return basis_.at(static_cast<std::size_t>(idx)); }
    const std::vector<GenWord>& expression(int idx) const { return expr_.at(static_cast<std::size_t>(idx)); }

    // Augmentation-ideal basis: all positive-degree basis elements.
    std::vector<int> ideal_basis() const
    {
        std::vector<int> out;
        for (int i = 0; i < dim(); ++i)
            if (degree_of(i) > 0)
                out.push_back(i);
        return out;
    }

    // Coordinates of e within its degree block; nullopt if e is not in the
    // subalgebra.  The zero element yields the zero vector of that degree.
    std::optional<F2Vector> coordinates(const SteenrodElement& e) const
    {
        int d = e.degree();
        if (d < 0 || d > top_degree_)
            return e.is_zero() ? std::optional<F2Vector>(F2Vector(0)) : std::nullopt;
        const auto& block = by_degree_[static_cast<std::size_t>(d)];
        F2Vector target = monomial_coords(e, d);
        F2Matrix m(target.size(), block.size());
        for (std::size_t j = 0; j < block.size(); ++j)
            m.set_col(j, monomial_coords(basis_[static_cast<std::size_t>(block[j])], d));
        return solve(m, target);
    }

    bool contains(const SteenrodElement& e) const { return coordinates(e).has_value(); }

    // Basis index of an element that is exactly a basis element; -1 otherwise.
    int index_of(const SteenrodElement& e) const
    {
        auto c = coordinates(e);
        if (!c)
            return -1;
        auto sup = c->support();
        if (sup.size() != 1)
            return -1;
        return by_degree_[static_cast<std::size_t>(e.degree())][sup[0]];
    }

    // Product of basis elements i, j expressed in basis coordinates of degree
    // d_i + d_j (the empty vector when the product degree exceeds the top).
    const F2Vector& mult(int i, int j) const { return table_.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j)); }

    // The unique basis element equal to 1.
    int unit_index() const { return by_degree_[0][0]; }

    // True if other's basis lies in our span (as subalgebras of A).
    bool contains_subalgebra(const SubalgebraSpec& other) const
    {
        for (int i = 0; i < other.dim(); ++i)
            if (!contains(other.basis_element(i)))
                return false;
        return true;
    }

private:
    static int compute_top_degree(AlgebraKind kind, int n)
    {
        if (kind == AlgebraKind::A) {
            // Milnor: top = sum_{i=1}^{n+1} (2^{n+2-i} - 1)(2^i - 1).
            int top = 0;
            for (int i = 1; i <= n + 1; ++i)
                top += ((1 << (n + 2 - i)) - 1) * ((1 << i) - 1);
            return top;
        }
        int top = 0;
        for (int i = 0; i <= n; ++i)
            top += (1 << (i + 1)) - 1;
        return top;
    }

    // Admissible monomials of degree d in deg-lex order (shared coordinate
    // frame for span computations).
    const std::vector<SqWord>& monomials_of_degree(int d) const
    {
        auto it = monomial_table_.find(d);
        if (it != monomial_table_.end())
            return it->second;
        std::vector<SqWord> list;
        SqWord cur;
        enumerate_admissible(d, kDefaultDegreeCap * 4, cur, list);
        std::sort(list.begin(), list.end());
        auto [ins, ok] = monomial_table_.emplace(d, std::move(list));
        (void)ok;
        return ins->second;
    }

    static void enumerate_admissible(int remaining, int max_first, SqWord& cur, std::vector<SqWord>& out)
    {
        if (remaining == 0) {
            out.push_back(cur);
            return;
        }
        int hi = std::min(remaining, max_first);
        for (int i = hi; i >= 1; --i) {
            // next entry j must satisfy i >= 2j
            cur.push_back(i);
            enumerate_admissible(remaining - i, i / 2, cur, out);
            cur.pop_back();
        }
    }

    F2Vector monomial_coords(const SteenrodElement& e, int d) const
    {
        const auto& monos = monomials_of_degree(d);
        F2Vector v(monos.size());
        for (const auto& w : e.terms()) {
            auto it = std::lower_bound(monos.begin(), monos.end(), w);
            if (it == monos.end() || *it != w)
                throw std::logic_error("monomial_coords: term outside admissible table");
            v.set(static_cast<std::size_t>(it - monos.begin()));
        }
        return v;
    }

    void build_basis()
    {
        // Span closure of words in the generators, degreewise, with each
        // echelon row carrying its defining GF(2)-sum of generator words.
        struct Row {
            F2Vector coords;
            std::vector<GenWord> words;
        };
        std::map<int, std::vector<Row>> span;  // echelon rows per degree
        auto reduce_row = [&](int d, Row r) -> Row {
            auto& rows = span[d];
            for (auto& er : rows) {
                long p = er.coords.first_set();
                if (p >= 0 && r.coords.get(static_cast<std::size_t>(p))) {
                    r.coords ^= er.coords;
                    for (const auto& w : er.words)
                        r.words.push_back(w);
                }
            }
            return r;
        };

        struct WorkItem {
            SteenrodElement elt;
            GenWord word;
        };
        std::vector<WorkItem> frontier;
        {
            Row unit{monomial_coords(SteenrodElement::unit(), 0), {GenWord{}}};
            span[0].push_back(unit);
            frontier.push_back({SteenrodElement::unit(), GenWord{}});
        }
        while (!frontier.empty()) {
            std::vector<WorkItem> next;
            for (const auto& item : frontier) {
                for (int gi = 0; gi < static_cast<int>(gens_.size()); ++gi) {
                    int nd = item.elt.degree() + gens_[static_cast<std::size_t>(gi)].degree;
                    if (nd > top_degree_)
                        continue;
                    SteenrodElement prod = multiply(gens_[static_cast<std::size_t>(gi)].element, item.elt, cap_);
                    if (prod.is_zero())
                        continue;
                    GenWord w;
                    w.push_back(gi);
                    w.insert(w.end(), item.word.begin(), item.word.end());
                    Row r{monomial_coords(prod, nd), {w}};
                    r = reduce_row(nd, std::move(r));
                    if (r.coords.is_zero())
                        continue;
                    span[nd].push_back(r);
                    next.push_back({prod, w});
                }
            }
            frontier = std::move(next);
        }

        // Canonical basis: full rref per degree with expression tracking.
        by_degree_.assign(static_cast<std::size_t>(top_degree_) + 1, {});
        for (int d = 0; d <= top_degree_; ++d) {
            auto it = span.find(d);
            if (it == span.end())
                continue;
            auto rows = it->second;
            // Back-eliminate into reduced form; rows already have distinct
            // pivots only if inserted in echelon fashion, which reduce_row
            // guarantees.  Sort by pivot then clear above.
            std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
                return a.coords.first_set() < b.coords.first_set();
            });
            for (std::size_t i = rows.size(); i-- > 0;) {
                long p = rows[i].coords.first_set();
                for (std::size_t k = 0; k < i; ++k) {
                    if (rows[k].coords.get(static_cast<std::size_t>(p))) {
                        rows[k].coords ^= rows[i].coords;
                        for (const auto& w : rows[i].words)
                            rows[k].words.push_back(w);
                    }
                }
            }
            const auto& monos = monomials_of_degree(d);
            for (const auto& r : rows) {
                SteenrodElement e(d);
                for (auto idx : r.coords.support())
                    e.toggle(monos[idx]);
                // Normalize the word multiset mod 2.
                std::map<GenWord, int> cnt;
                for (const auto& w : r.words)
                    cnt[w] ^= 1;
                std::vector<GenWord> words;
                for (const auto& [w, c] : cnt)
                    if (c)
                        words.push_back(w);
                int idx = static_cast<int>(basis_.size());
                basis_.push_back(std::move(e));
                expr_.push_back(std::move(words));
                slot_.push_back(static_cast<int>(by_degree_[static_cast<std::size_t>(d)].size()));
                by_degree_[static_cast<std::size_t>(d)].push_back(idx);
            }
        }
    }

    void build_mult_table()
    {
        int nb = dim();
        table_.assign(static_cast<std::size_t>(nb), {});
        for (int i = 0; i < nb; ++i) {
            table_[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(nb), F2Vector(0));
            for (int j = 0; j < nb; ++j) {
                int d = degree_of(i) + degree_of(j);
                if (d > top_degree_)
                    continue;
                SteenrodElement p = multiply(basis_element(i), basis_element(j), cap_);
                auto c = coordinates(p);
                if (!c)
                    throw std::logic_error("subalgebra: basis not closed under multiplication");
                table_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = *c;
            }
        }
    }

    AlgebraKind kind_;
    int n_;
    int top_degree_;
    int cap_;
    std::vector<AlgebraGenerator> gens_;
    std::vector<SteenrodElement> basis_;
    std::vector<std::vector<GenWord>> expr_;
    std::vector<int> slot_;
    std::vector<std::vector<int>> by_degree_;
    std::vector<std::vector<F2Vector>> table_;
    mutable std::map<int, std::vector<SqWord>> monomial_table_;
};

using AlgebraPtr = std::shared_ptr<const SubalgebraSpec>;

// Memoized construction; specs are immutable and shared.
inline AlgebraPtr subalgebra(AlgebraKind kind, int n)
{
    static std::map<std::pair<int, int>, AlgebraPtr> registry;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(kind == AlgebraKind::A ? 0 : 1, n);
    auto it = registry.find(key);
    if (it != registry.end())
        return it->second;
    auto spec = std::make_shared<const SubalgebraSpec>(kind, n);
    registry[key] = spec;
    return spec;
}

inline AlgebraPtr parse_algebra_label(const std::string& s)
{
    if (s.size() == 4 && (s[0] == 'A' || s[0] == 'E') && s[1] == '(' && s[3] == ')' && s[2] >= '0' && s[2] <= '9')
        return subalgebra(s[0] == 'A' ? AlgebraKind::A : AlgebraKind::E, s[2] - '0');
    throw std::invalid_argument("unknown algebra label: " + s);
}

}  // namespace extcalc

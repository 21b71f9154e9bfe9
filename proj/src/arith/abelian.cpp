#include "nt/abelian.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace nt {

i128 AbelianGroupStructure::order() const
{
    i128 o = 1;
    for (i128 d : divisors) o *= d;
    return o;
}

int AbelianGroupStructure::rank(i128 p) const
{
    int r = 0;
    for (i128 d : divisors)
        if (d % p == 0) ++r;
    return r;
}

int AbelianGroupStructure::vp(i128 p) const
{
    int v = 0;
    for (i128 d : divisors)
        while (d % p == 0) { d /= p; ++v; }
    return v;
}

AbelianGroupStructure AbelianGroupStructure::p_part(i128 p) const
{
    AbelianGroupStructure g;
    for (i128 d : divisors) {
        i128 q = 1;
        while (d % p == 0) { d /= p; q *= p; }
        if (q > 1) g.divisors.push_back(q);
    }
    return g;
}

std::string AbelianGroupStructure::str() const
{
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < divisors.size(); ++i) {
        if (i) os << ',';
        os << to_string(divisors[i]);
    }
    os << ']';
    return os.str();
}

AbelianGroupStructure AbelianGroupStructure::from_cyclic(const std::vector<i128>& orders)
{
    /* Split each factor into prime powers, then rebuild the chain. */
    std::vector<std::pair<i128, std::vector<i128>>> byp;
    for (i128 n : orders) {
        if (n <= 0) throw std::invalid_argument("from_cyclic: orders must be positive");
        i128 m = n;
        for (i128 p = 2; p * p <= m; ++p) {
            if (m % p) continue;
            i128 q = 1;
            while (m % p == 0) { m /= p; q *= p; }
            auto it = std::find_if(byp.begin(), byp.end(), [&](auto& e) { return e.first == p; });
            if (it == byp.end()) byp.push_back({p, {q}}); else it->second.push_back(q);
        }
        if (m > 1) {
            auto it = std::find_if(byp.begin(), byp.end(), [&](auto& e) { return e.first == m; });
            if (it == byp.end()) byp.push_back({m, {m}}); else it->second.push_back(m);
        }
    }
    size_t len = 0;
    for (auto& e : byp) {
        std::sort(e.second.rbegin(), e.second.rend());
        len = std::max(len, e.second.size());
    }
    AbelianGroupStructure g;
    for (size_t i = 0; i < len; ++i) {
        i128 d = 1;
        for (auto& e : byp)
            if (i < e.second.size()) d *= e.second[i];
        g.divisors.push_back(d);
    }
    return g;
}

AbelianGroupStructure AbelianGroupStructure::parse(const std::string& s)
{
    size_t a = s.find('['), b = s.find(']');
    if (a == std::string::npos || b == std::string::npos || b < a)
        throw std::invalid_argument("structure must be bracketed: " + s);
    std::vector<i128> v;
    std::string cur;
    for (size_t i = a + 1; i <= b; ++i) {
        char c = s[i];
        if (c == ',' || c == ']') {
            if (!cur.empty()) v.push_back(parse_i128(cur));
            else if (c == ',') throw std::invalid_argument("empty entry in " + s);
            cur.clear();
        } else if (c != ' ') {
            cur.push_back(c);
        }
    }
    AbelianGroupStructure g;
    for (i128 d : v)
        if (d != 1) g.divisors.push_back(d);
    for (size_t i = 1; i < g.divisors.size(); ++i)
        if (g.divisors[i - 1] % g.divisors[i] != 0)
            throw std::invalid_argument("not a divisor chain: " + s);
    return g;
}

namespace {

void col_addmul(ZMatrix& A, size_t dst, size_t src, const mpz_class& c)
{
    for (auto& row : A) row[dst] += c * row[src];
}

void row_addmul(ZMatrix& A, size_t dst, size_t src, const mpz_class& c)
{
    for (size_t j = 0; j < A[dst].size(); ++j) A[dst][j] += c * A[src][j];
}

void col_swap(ZMatrix& A, size_t i, size_t j)
{
    for (auto& row : A) std::swap(row[i], row[j]);
}

} // namespace

SmithForm::SmithForm(ZMatrix R, std::size_t k) : k_(k)
{
    Q_.assign(k, std::vector<mpz_class>(k, 0));
    Qinv_.assign(k, std::vector<mpz_class>(k, 0));
    for (size_t i = 0; i < k; ++i) Q_[i][i] = Qinv_[i][i] = 1;
    for (auto& row : R)
        if (row.size() != k) throw std::invalid_argument("SmithForm: row length mismatch");

    /* column operation on R mirrored on Q (columns) and Qinv (rows) */
    auto cop_add = [&](size_t dst, size_t src, const mpz_class& c) {
        col_addmul(R, dst, src, c);
        col_addmul(Q_, dst, src, c);
        row_addmul(Qinv_, src, dst, -c);
    };
    auto cop_swap = [&](size_t i, size_t j) {
        if (i == j) return;
        col_swap(R, i, j);
        col_swap(Q_, i, j);
        std::swap(Qinv_[i], Qinv_[j]);
    };

    const size_t r = R.size();
    size_t t = 0;
    for (; t < std::min(r, k); ++t) {
        for (;;) {
            /* smallest nonzero entry of the trailing block */
            size_t pi = r, pj = k;
            for (size_t i = t; i < r; ++i)
                for (size_t j = t; j < k; ++j)
                    if (sgn(R[i][j]) != 0 &&
                        (pi == r || mpz_cmpabs(R[i][j].get_mpz_t(), R[pi][pj].get_mpz_t()) < 0)) { pi = i; pj = j; }
            if (pi == r) goto done;
            std::swap(R[t], R[pi]);
            cop_swap(t, pj);
            bool dirty = false;
            for (size_t i = t + 1; i < r; ++i) {
                if (sgn(R[i][t]) == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), R[i][t].get_mpz_t(), R[t][t].get_mpz_t());
                row_addmul(R, i, t, -q);
                if (sgn(R[i][t]) != 0) dirty = true;
            }
            for (size_t j = t + 1; j < k; ++j) {
                if (sgn(R[t][j]) == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), R[t][j].get_mpz_t(), R[t][t].get_mpz_t());
                cop_add(j, t, -q);
                if (sgn(R[t][j]) != 0) dirty = true;
            }
            if (dirty) continue;
            /* pivot must divide the whole trailing block */
            bool fixed = false;
            for (size_t i = t + 1; i < r && !fixed; ++i)
                for (size_t j = t + 1; j < k; ++j)
                    if (!mpz_divisible_p(R[i][j].get_mpz_t(), R[t][t].get_mpz_t())) {
                        row_addmul(R, t, i, 1);
                        fixed = true;
                        break;
                    }
            if (!fixed) break;
        }
    }
done:
    diag_.assign(k, 0);
    for (size_t i = 0; i < std::min(r, k); ++i) diag_[i] = abs(R[i][i]);
}

bool SmithForm::finite() const
{
    for (auto& d : diag_)
        if (sgn(d) == 0) return false;
    return true;
}

FiniteAbelianQuotient::FiniteAbelianQuotient(const ZMatrix& relations, std::size_t k) : k_(k)
{
    SmithForm S(relations, k);
    if (!S.finite()) throw std::runtime_error("presented group is infinite");
    const auto& d = S.diagonal();
    /* SNF diagonal is increasing under divisibility; the chain is reversed */
    for (size_t i = k; i-- > 0;) {
        if (d[i] == 1) continue;
        structure_.divisors.push_back(to_i128(d[i]));
        cols_.push_back(i);
        std::vector<mpz_class> qc(k);
        for (size_t r = 0; r < k; ++r) qc[r] = S.Q()[r][i];
        qcols_.push_back(std::move(qc));
        gens_.push_back(S.Qinv()[i]);
    }
}

std::vector<i128> FiniteAbelianQuotient::coords(const std::vector<mpz_class>& x) const
{
    if (x.size() != k_) throw std::invalid_argument("coords: length mismatch");
    std::vector<i128> out(cols_.size());
    for (size_t c = 0; c < cols_.size(); ++c) {
        mpz_class s = 0;
        for (size_t r = 0; r < k_; ++r)
            if (sgn(x[r]) != 0) s += x[r] * qcols_[c][r];
        mpz_class dm = to_mpz(structure_.divisors[c]);
        mpz_fdiv_r(s.get_mpz_t(), s.get_mpz_t(), dm.get_mpz_t());
        out[c] = to_i128(s);
    }
    return out;
}

std::vector<i128> FiniteAbelianQuotient::coords(const std::vector<i128>& x) const
{
    std::vector<mpz_class> z(x.size());
    for (size_t i = 0; i < x.size(); ++i) z[i] = to_mpz(x[i]);
    return coords(z);
}

} // namespace nt

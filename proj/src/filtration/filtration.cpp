#include "nt/filtration.hpp"

#include <algorithm>
#include <random>
#include <thread>

namespace nt {

namespace {

using Row = std::vector<mpz_class>;

ZMatrix transpose(const ZMatrix& A, std::size_t cols)
{
    ZMatrix T(cols, Row(A.size()));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) T[j][i] = A[i][j];
    return T;
}

ZMatrix identity(std::size_t g, const mpz_class& s = 1)
{
    ZMatrix I(g, Row(g, 0));
    for (std::size_t i = 0; i < g; ++i) I[i][i] = s;
    return I;
}

ZMatrix matmul(const ZMatrix& A, const ZMatrix& B, std::size_t inner, std::size_t cols, const mpz_class& mod)
{
    ZMatrix C(A.size(), Row(cols, 0));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t k = 0; k < inner; ++k) {
            if (A[i][k] == 0) continue;
            for (std::size_t j = 0; j < cols; ++j) C[i][j] += A[i][k] * B[k][j];
        }
    if (mod != 0)
        for (auto& r : C)
            for (auto& x : r) mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
    return C;
}

void axpy(Row& dst, const mpz_class& q, const Row& src)
{
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] -= q * src[j];
}

/* Hermite echelon on the first ncols columns (row operations act on whole rows).
 * Pivots positive, entries above pivots reduced into [0, pivot). Returns the rank. */
std::size_t echelon(ZMatrix& A, std::size_t ncols)
{
    const std::size_t n = A.size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < ncols && r < n; ++c) {
        for (;;) {
            std::size_t piv = n;
            for (std::size_t i = r; i < n; ++i)
                if (A[i][c] != 0 && (piv == n || mpz_cmpabs(A[i][c].get_mpz_t(), A[piv][c].get_mpz_t()) < 0)) piv = i;
            if (piv == n) break;
            std::swap(A[r], A[piv]);
            bool done = true;
            for (std::size_t i = r + 1; i < n; ++i) {
                if (A[i][c] == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), A[i][c].get_mpz_t(), A[r][c].get_mpz_t());
                axpy(A[i], q, A[r]);
                if (A[i][c] != 0) done = false;
            }
            if (done) break;
        }
        if (A[r][c] == 0) continue;
        if (A[r][c] < 0)
            for (auto& x : A[r]) x = -x;
        for (std::size_t i = 0; i < r; ++i) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), A[i][c].get_mpz_t(), A[r][c].get_mpz_t());
            if (q != 0) axpy(A[i], q, A[r]);
        }
        ++r;
    }
    return r;
}

/* Working data for a module in row convention: x -> x*S, zero lattice L. */
struct Ctx {
    i128 p = 0;
    std::size_t g = 0;
    ZMatrix R;        /* relation rows */
    ZMatrix S;        /* action rows */
    mpz_class e = 1;  /* exponent of M */
    ZMatrix L;        /* HNF of the relation lattice */
    i128 order = 1;
    AbelianGroupStructure structure;
};

/* Canonical HNF basis (g x g) of the lattice spanned by rows plus e*Z^g. */
ZMatrix lattice(const ZMatrix& rows, std::size_t g, const mpz_class& e)
{
    ZMatrix A;
    A.reserve(rows.size() + g);
    for (auto& r : rows) {
        Row x(r.begin(), r.begin() + g);
        for (auto& v : x) mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), e.get_mpz_t());
        A.push_back(std::move(x));
    }
    for (auto& r : identity(g, e)) A.push_back(r);
    std::size_t rk = echelon(A, g);
    A.resize(rk);
    return A;
}

i128 index_of(const ZMatrix& lat, std::size_t g)
{
    if (g == 0) return 1;
    mpz_class d = 1;
    for (std::size_t i = 0; i < g; ++i) d *= lat[i][i];
    return to_i128(d);
}

Ctx make_ctx(const FinitePModule& M)
{
    Ctx c;
    c.p = M.p;
    c.g = M.ngens();
    if (M.sigma.size() != c.g) throw module_error("sigma must be g x g");
    for (auto& r : M.sigma)
        if (r.size() != c.g) throw module_error("sigma must be g x g");
    if (M.relations.size() != c.g) throw module_error("relations must have g rows");
    const std::size_t nrel = c.g ? M.relations[0].size() : 0;
    for (auto& r : M.relations)
        if (r.size() != nrel) throw module_error("ragged relation matrix");
    c.R = transpose(M.relations, nrel);
    c.S = transpose(M.sigma, c.g);
    if (c.g == 0) return c;
    try {
        FiniteAbelianQuotient Q(c.R, c.g);
        c.structure = Q.structure();
    } catch (const std::exception&) {
        throw infinite_group_error("presented group is infinite");
    }
    c.order = c.structure.order();
    c.e = c.structure.trivial() ? mpz_class(1) : to_mpz(c.structure.divisors[0]);
    c.L = lattice(c.R, c.g, c.e);
    return c;
}

/* {x : x*Phi in K} for a lattice K containing L; Phi g x g. */
ZMatrix preimage(const Ctx& c, const ZMatrix& Phi, const ZMatrix& K)
{
    const std::size_t g = c.g, n = g + K.size();
    ZMatrix A(n, Row(g + n, 0));
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) A[i][j] = Phi[i][j];
        A[i][g + i] = 1;
    }
    for (std::size_t i = 0; i < K.size(); ++i) {
        for (std::size_t j = 0; j < g; ++j) A[g + i][j] = K[i][j];
        A[g + i][g + g + i] = 1;
    }
    std::size_t rk = echelon(A, g);
    ZMatrix xs;
    for (std::size_t i = rk; i < n; ++i) xs.emplace_back(A[i].begin() + g, A[i].begin() + 2 * g);
    for (auto& r : c.L) xs.push_back(r);
    return lattice(xs, g, c.e);
}

i128 sub_order(const Ctx& c, const ZMatrix& K) { return c.order / index_of(K, c.g); }

ZMatrix minus_identity(const Ctx& c)
{
    ZMatrix T = c.S;
    for (std::size_t i = 0; i < c.g; ++i) T[i][i] -= 1;
    return T;
}

int logp(i128 n, i128 p)
{
    int k = 0;
    while (n > 1) {
        if (n % p != 0) return -1;
        n /= p;
        ++k;
    }
    return k;
}

bool in_lattice(const Ctx& c, const Row& x, const ZMatrix& K)
{
    /* K is upper triangular with positive pivots */
    Row v = x;
    for (std::size_t i = 0; i < c.g; ++i) {
        if (v[i] % K[i][i] != 0) return false;
        mpz_class q = v[i] / K[i][i];
        axpy(v, q, K[i]);
    }
    return true;
}

void check_action(const Ctx& c)
{
    for (auto& r : c.R) {
        ZMatrix img = matmul(ZMatrix{r}, c.S, c.g, c.g, c.e);
        if (!in_lattice(c, img[0], c.L)) throw module_error("sigma does not preserve the relations");
    }
    ZMatrix P = identity(c.g);
    for (i128 k = 0; k < c.p; ++k) P = matmul(P, c.S, c.g, c.g, c.e);
    for (std::size_t i = 0; i < c.g; ++i) {
        P[i][i] -= 1;
        if (!in_lattice(c, P[i], c.L)) throw module_error("sigma^p is not the identity");
    }
}

} // namespace

FinitePModule make_module(i128 p, const AbelianGroupStructure& g, const ZMatrix& sigma_rows, int N)
{
    FinitePModule M;
    M.p = p;
    M.N = N;
    const std::size_t k = g.divisors.size();
    for (std::size_t i = 0; i < k; ++i) M.gens.push_back("g" + std::to_string(i + 1));
    M.relations = ZMatrix(k, Row(k, 0));
    for (std::size_t i = 0; i < k; ++i) M.relations[i][i] = to_mpz(g.divisors[i]);
    M.sigma = transpose(sigma_rows, k);
    return M;
}

void validate_module(const FinitePModule& M)
{
    if (M.p < 2 || !is_prime((u128)M.p)) throw module_error("p must be prime");
    Ctx c = make_ctx(M);
    if (logp(c.order, c.p) < 0) throw module_error("presented group is not a p-group");
    if (c.g) check_action(c);
}

i128 module_order(const FinitePModule& M) { return make_ctx(M).order; }

AbelianGroupStructure module_structure(const FinitePModule& M) { return make_ctx(M).structure; }

Subgroup fixed_subgroup(const FinitePModule& M)
{
    Ctx c = make_ctx(M);
    if (c.g == 0) return {};
    Subgroup s;
    s.basis = preimage(c, minus_identity(c), c.L);
    s.order = sub_order(c, s.basis);
    return s;
}

int FiltrationResult::log_order() const { return logp(chain.back(), p); }

FiltrationResult filtration(const FinitePModule& M, int N, FiltrationMethod method)
{
    validate_module(M);
    Ctx c = make_ctx(M);
    FiltrationResult r;
    r.p = c.p;
    r.chain.push_back(1);
    r.subgroups.push_back({c.L, 1});
    const ZMatrix T = c.g ? minus_identity(c) : ZMatrix{};
    ZMatrix P = T;
    const int cap = logp(c.order, c.p) + 1;
    while (r.chain.back() != c.order) {
        if ((int)r.chain.size() > cap) throw module_error("filtration did not stabilize");
        ZMatrix K = method == FiltrationMethod::iterated ? preimage(c, T, r.subgroups.back().basis)
                                                          : preimage(c, P, c.L);
        i128 o = sub_order(c, K);
        if (o == r.chain.back()) throw module_error("filtration stalled below M");
        r.chain.push_back(o);
        r.subgroups.push_back({K, o});
        P = matmul(P, T, c.g, c.g, c.e);
    }
    r.m = (int)r.chain.size() - 1;

    const int first = r.m >= 1 ? logp(r.chain[1], c.p) : 0;
    if (N == 0) N = first + 1;
    if (first != N - 1)
        throw inconsistent_n_error("#M_1 = " + to_string(r.m >= 1 ? r.chain[1] : (i128)1) + " is not p^(N-1) for N=" +
                                   std::to_string(N));
    r.N = N;
    for (int i = 0; i < r.m; ++i) {
        int k = logp(r.chain[i + 1] / r.chain[i], c.p);
        if (k < 0 || k > N - 1) throw module_error("quotient M_{i+1}/M_i exceeds p^(N-1)");
        r.t.push_back(N - 1 - k);
    }
    r.t.push_back(N - 1);
    return r;
}

bool filtrations_agree(const FinitePModule& M)
{
    FiltrationResult a = filtration(M, 0, FiltrationMethod::iterated);
    FiltrationResult b = filtration(M, 0, FiltrationMethod::direct);
    if (a.chain != b.chain) return false;
    for (std::size_t i = 0; i < a.subgroups.size(); ++i)
        if (a.subgroups[i].basis != b.subgroups[i].basis) return false;
    return true;
}

namespace {
int t_at(const std::vector<int>& t, int N, std::size_t i) { return i < t.size() ? t[i] : N - 1; }
} // namespace

std::pair<int, int> rank_from_t(i128 p, int N, const std::vector<int>& t)
{
    int s = 0;
    for (i128 i = 1; i <= p - 2; ++i) s += t_at(t, N, (std::size_t)i);
    const int rank = (int)(p - 1) * (N - 1) - s;
    return {rank, rank - (N - 1)};
}

std::vector<int> pr_ranks(i128 p, int N, const std::vector<int>& t)
{
    std::vector<int> out;
    for (std::size_t r = 1;; ++r) {
        int v = 0;
        for (std::size_t i = (r - 1) * (std::size_t)(p - 1); i < r * (std::size_t)(p - 1); ++i) v += N - 1 - t_at(t, N, i);
        if (v == 0) break;
        out.push_back(v);
    }
    return out;
}

bool order_identity_check(const FiltrationResult& r)
{
    i128 x = 1;
    for (int i = 0; i < r.m; ++i)
        for (int k = 0; k < r.N - 1 - r.t[i]; ++k) x *= r.p;
    return x == r.chain.back();
}

FinitePModule from_quadratic(const Discriminant& d, const ClassGroupConfig& cfg)
{
    ClassGroup G = class_group(d, cfg);
    AbelianGroupStructure two = G.structure.p_part(2);
    const std::size_t k = two.divisors.size();
    return make_module(2, two, identity(k, -1), d.N);
}

FinitePModule group_ring_module(i128 p, const std::vector<std::pair<int, int>>& summands, int N)
{
    const std::size_t P = (std::size_t)p;
    const std::size_t g = P * summands.size();
    FinitePModule M;
    M.p = p;
    M.N = N;
    M.sigma = ZMatrix(g, Row(g, 0));
    std::vector<Row> rels;
    for (std::size_t s = 0; s < summands.size(); ++s) {
        auto [a, b] = summands[s];
        if (a < 1 || b < 1 || b > (int)p) throw module_error("summand exponents out of range");
        const std::size_t o = s * P;
        for (std::size_t j = 0; j < P; ++j) {
            M.gens.push_back("x^" + std::to_string(j) + "." + std::to_string(s + 1));
            M.sigma[o + (j + 1) % P][o + j] = 1;
            Row r(g, 0);
            mpz_ui_pow_ui(r[o + j].get_mpz_t(), (unsigned long)p, (unsigned long)a);
            rels.push_back(std::move(r));
        }
        /* (x-1)^b reduced mod x^p - 1, times x^j */
        Row c(P, 0);
        for (int k = 0; k <= b; ++k) {
            mpz_class binom;
            mpz_bin_uiui(binom.get_mpz_t(), (unsigned long)b, (unsigned long)k);
            if ((b - k) % 2) binom = -binom;
            c[(std::size_t)k % P] += binom;
        }
        for (std::size_t j = 0; j < P; ++j) {
            Row r(g, 0);
            for (std::size_t k = 0; k < P; ++k) r[o + (k + j) % P] = c[k];
            rels.push_back(std::move(r));
        }
    }
    M.relations = transpose(rels, g);
    return M;
}

FinitePModule synthesize(i128 p, int N, std::uint64_t seed, const SynthProfile& prof)
{
    if (N < 2) throw std::invalid_argument("synthesize: N >= 2 required");
    std::mt19937_64 rng(seed);
    const int maxb = prof.max_b > 0 ? std::min<int>(prof.max_b, (int)p) : (int)p;
    std::uniform_int_distribution<int> ns(1, N - 1), da(1, std::max(1, prof.max_a)), db(1, maxb);
    for (int att = 0; att < prof.attempts; ++att) {
        std::vector<std::pair<int, int>> sm(ns(rng));
        for (auto& x : sm) x = {da(rng), db(rng)};
        FinitePModule M = group_ring_module(p, sm, N);
        Ctx c = make_ctx(M);
        const int lo = logp(c.order, p);
        if (lo < 0 || lo > prof.max_log_order) continue;
        if (logp(sub_order(c, preimage(c, minus_identity(c), c.L)), p) != N - 1) continue;
        return M;
    }
    throw synthesis_error("synthesize: no module with #M^G = p^(N-1) after " + std::to_string(prof.attempts) +
                          " attempts");
}

DeltaHistogram monte_carlo(i128 p, int N, std::uint64_t samples, std::uint64_t seed, const SynthProfile& prof,
                           unsigned workers)
{
    workers = std::max(1u, workers);
    std::vector<DeltaHistogram> parts(workers);
    auto run = [&](unsigned w) {
        DeltaHistogram& h = parts[w];
        for (std::uint64_t k = w; k < samples; k += workers) {
            ++h.samples;
            FinitePModule M;
            try {
                M = synthesize(p, N, seed + k, prof);
            } catch (const synthesis_error&) {
                ++h.failures;
                continue;
            }
            FiltrationResult r = filtration(M, N);
            if (!filtrations_agree(M)) ++h.disagreements;
            if (!order_identity_check(r)) ++h.identity_failures;
            ++h.Delta[r.Delta()];
            ++h.delta[module_structure(M).rank(p) - (N - 1)];
        }
    };
    std::vector<std::thread> th;
    for (unsigned w = 1; w < workers; ++w) th.emplace_back(run, w);
    run(0);
    for (auto& t : th) t.join();
    DeltaHistogram out;
    out.p = p;
    out.N = N;
    for (auto& h : parts) {
        out.samples += h.samples;
        out.failures += h.failures;
        out.disagreements += h.disagreements;
        out.identity_failures += h.identity_failures;
        for (auto& [k, v] : h.Delta) out.Delta[k] += v;
        for (auto& [k, v] : h.delta) out.delta[k] += v;
    }
    return out;
}

} // namespace nt

#include "nt/pram.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

namespace nt {

namespace {

/* arithmetic in Z/p^M, p^M < 2^62 */
struct LocalMod {
    u64 p, P, mask = 0;
    int M;
    bool pow2;

    LocalMod(i128 p_, int M_) : p((u64)p_), P(1), M(M_), pow2(p_ == 2)
    {
        for (int i = 0; i < M; ++i) P *= p;
        mask = P - 1;
    }
    u64 reduce(i128 x) const { return (u64)pmod<i128>(x, (i128)P); }
    u64 mul(u64 a, u64 b) const
    {
        if (pow2) return a * b & mask;
        if (P < ((u64)1 << 32)) return a * b % P;
        return (u64)((u128)a * b % P);
    }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + P - b; }
    int val(u64 x) const
    {
        if (x == 0) return M;
        if (pow2) return __builtin_ctzll(x);
        int v = 0;
        while (x % p == 0) {
            x /= p;
            ++v;
        }
        return v;
    }
    u64 inv(u64 a) const
    {
        if (pow2) {
            u64 x = a; /* Newton: correct to 3 bits, doubling */
            for (int i = 0; i < 6; ++i) x *= 2 - a * x;
            return x & mask;
        }
        i128 u, v;
        if (xgcd<i128>((i128)a, (i128)P, u, v) != 1) throw std::logic_error("LocalMod::inv: not a unit");
        return (u64)pmod<i128>(u, (i128)P);
    }
};

/* Smith form of Z^cols / <rows> over Z/p^M. Returns the exponents of the
 * nontrivial invariants, or nothing when a column survives (group not killed by p^(M-1)). */
std::optional<std::vector<int>> local_snf(const std::vector<std::vector<i128>>& rows, std::size_t cols, i128 p, int M)
{
    const LocalMod L(p, M);
    std::vector<std::vector<u64>> A;
    for (auto& r : rows) {
        std::vector<u64> x(cols);
        for (std::size_t j = 0; j < cols; ++j) x[j] = L.reduce(r[j]);
        A.push_back(std::move(x));
    }
    std::vector<int> out;
    const std::size_t R = A.size();
    for (std::size_t t = 0; t < cols; ++t) {
        int best = M;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = t; i < R && best > 0; ++i)
            for (std::size_t j = t; j < cols; ++j)
                if (A[i][j] != 0) {
                    const int v = L.val(A[i][j]);
                    if (v < best) {
                        best = v; bi = i; bj = j;
                        if (v == 0) break;
                    }
                }
        if (best == M) return std::nullopt;
        std::swap(A[t], A[bi]);
        if (bj != t)
            for (auto& r : A) std::swap(r[t], r[bj]);
        u64 pv = 1;
        for (int i = 0; i < best; ++i) pv *= L.p;
        const u64 u = L.inv(A[t][t] / pv);
        for (std::size_t j = t; j < cols; ++j) A[t][j] = L.mul(A[t][j], u);
        for (std::size_t i = t + 1; i < R; ++i) {
            if (A[i][t] == 0) continue;
            const u64 q = A[i][t] / pv;
            for (std::size_t j = t; j < cols; ++j)
                if (A[t][j]) A[i][j] = L.sub(A[i][j], L.mul(q, A[t][j]));
        }
        /* every A[t][j] is divisible by p^best, so column operations clear row t
         * without touching the rows below */
        for (std::size_t j = t + 1; j < cols; ++j) A[t][j] = 0;
        if (best > 0) out.push_back(best);
    }
    return out;
}

AbelianGroupStructure from_exponents(i128 p, const std::vector<int>& ex)
{
    std::vector<i128> c;
    for (int e : ex) c.push_back((i128)ipow((u128)p, (unsigned)e));
    return AbelianGroupStructure::from_cyclic(c);
}

i128 p_power_part(i128 x, i128 p)
{
    i128 q = 1;
    while (x % p == 0) {
        x /= p;
        q *= p;
    }
    return q;
}

} // namespace

class RayEngine {
  public:
    RayEngine(const Discriminant& d, i128 p, const ClassGroupConfig& cg) : d_(d), p_(p)
    {
        if (!is_prime((u128)p)) throw std::invalid_argument("ray_class_group: p must be prime");
        ClassGroup G = d.D < 0 ? class_group_imaginary_p(d, p, cg) : ordinary_class_group_real(d, cg);
        std::vector<i128> cyc;
        for (std::size_t i = 0; i < G.generators.size(); ++i) {
            const i128 di = G.structure.divisors[i];
            const i128 q = p_power_part(di, p);
            if (q == 1) continue;
            const QuadForm g = G.pow(G.generators[i], (u128)(di / q));
            exps_.push_back(valuation((u128)q, (u128)p));
            gens_.push_back(principal_power(d, g, (u128)q, p));
            cyc.push_back(q);
        }
        cl_p_ = AbelianGroupStructure::from_cyclic(cyc);
        h_p_ = cl_p_.order();
        units_.push_back({-1, 0});
        if (d.D == -3 || d.D == -4) units_.push_back({0, 1});
        if (d.D > 0) {
            const FundamentalUnit e = fundamental_unit(d.m);
            if (d.D % 2 != 0)
                units_.push_back({(e.x - e.y) / 2, e.y});
            else
                units_.push_back({e.x / 2, e.y});
        }
    }

    const AbelianGroupStructure& class_p() const { return cl_p_; }

    RayClassGroup level(int n) const
    {
        RayClassGroup out;
        out.D = d_;
        out.p = p_;
        out.n = n;
        out.h_p = h_p_;
        if (n == 0) {
            out.structure = cl_p_;
            out.order_identity = true;
            return out;
        }
        ResidueRing R(d_, p_, n);
        const std::size_t k = R.u1_rank(), s = gens_.size(), cols = k + s;
        std::vector<std::vector<i128>> rows;
        for (auto& r : R.u1_relations_small()) {
            std::vector<i128> row(cols, 0);
            for (std::size_t j = 0; j < k; ++j) row[j] = r[j];
            rows.push_back(row);
        }
        const std::size_t n_u1 = rows.size();
        for (auto& u : units_) {
            auto dl = R.dlog_p(R.from_omega(u.first, u.second));
            std::vector<i128> row(cols, 0);
            std::copy(dl.begin(), dl.end(), row.begin());
            rows.push_back(row);
        }
        const std::size_t n_units = rows.size();
        for (std::size_t i = 0; i < s; ++i) {
            auto dl = R.dlog_p(R.from_omega(gens_[i].u, gens_[i].v));
            std::vector<i128> row(cols, 0);
            for (std::size_t j = 0; j < k; ++j) row[j] = -dl[j];
            row[k + i] = (i128)ipow((u128)p_, (unsigned)exps_[i]);
            rows.push_back(row);
        }

        const int M = n + valuation((u128)h_p_, (u128)p_) + 1;
        auto solve = [&](std::size_t nrows, std::size_t ncols) {
            std::vector<std::vector<i128>> sub(rows.begin(), rows.begin() + (long)nrows);
            for (auto& r : sub) r.resize(ncols);
            if (M * std::log2((double)p_) < 62) {
                auto ex = local_snf(sub, ncols, p_, M);
                if (!ex) throw std::logic_error("ray_class_group: presentation is not a finite p-group");
                return from_exponents(p_, *ex);
            }
            ZMatrix Z;
            for (auto& r : sub) {
                std::vector<mpz_class> zr;
                for (auto x : r) zr.push_back(to_mpz(x));
                Z.push_back(zr);
            }
            return FiniteAbelianQuotient(Z, ncols).structure();
        };
        out.units_p = k ? solve(n_u1, k) : AbelianGroupStructure{};
        const AbelianGroupStructure uq = k ? solve(n_units, k) : AbelianGroupStructure{};
        out.unit_quotient = uq.order();
        out.structure = cols ? solve(rows.size(), cols) : AbelianGroupStructure{};
        out.order_identity = out.structure.order() == out.unit_quotient * h_p_;
        if (!out.order_identity) throw std::logic_error("ray_class_group: order identity failed");
        return out;
    }

  private:
    Discriminant d_;
    i128 p_;
    AbelianGroupStructure cl_p_;
    i128 h_p_ = 1;
    std::vector<int> exps_;
    std::vector<PrincipalPower> gens_;
    std::vector<std::pair<mpz_class, mpz_class>> units_;
};

RayClassGroup ray_class_group(const Discriminant& d, i128 p, int n, const PramConfig& cfg)
{
    if (n < 0) throw std::invalid_argument("ray_class_group: n >= 0 required");
    return RayEngine(d, p, cfg.cg).level(n);
}

namespace {

AbelianGroupStructure drop_largest(const AbelianGroupStructure& g, int r)
{
    std::vector<i128> c;
    for (std::size_t i = (std::size_t)r; i < g.divisors.size(); ++i) c.push_back(g.divisors[i]);
    return AbelianGroupStructure::from_cyclic(c);
}

int default_n_max(i128 p) { return p == 2 ? 32 : (p == 3 ? 16 : 8); }

double log_sqrt(i128 D) { return 0.5 * std::log(std::fabs((double)D)); }

} // namespace

TorsionReport tor_report(const Discriminant& d, i128 p, const PramConfig& cfg)
{
    RayEngine E(d, p, cfg.cg);
    const int r = d.D < 0 ? 2 : 1;
    const int n_max = cfg.n_max > 0 ? cfg.n_max : default_n_max(p);
    /* levels n, n+1, n+2: v_p grows by r at each step, the candidate torsion
     * is unchanged, and its exponent is below the r free factors at level n */
    std::vector<RayClassGroup> win;
    auto separated = [&](const AbelianGroupStructure& g) {
        if ((int)g.divisors.size() < r) return false;
        return (int)g.divisors.size() == r || g.divisors[(std::size_t)r - 1] > g.divisors[(std::size_t)r];
    };
    for (int attempt = 0; attempt < 2; ++attempt) {
        const int limit = attempt == 0 ? n_max : 2 * n_max;
        for (int n = win.empty() ? 1 : win.back().n + 1; n <= limit; ++n) {
            try {
                win.push_back(E.level(n));
            } catch (const budget_error&) {
                break;
            }
            if (win.size() > 3) win.erase(win.begin());
            if (win.size() < 3) continue;
            const auto t0 = drop_largest(win[0].structure, r);
            bool ok = separated(win[0].structure);
            for (std::size_t i = 1; i < 3 && ok; ++i)
                ok = win[i].structure.vp(p) - win[i - 1].structure.vp(p) == r &&
                     drop_largest(win[i].structure, r).divisors == t0.divisors;
            if (ok) {
                TorsionReport rep;
                rep.D = d;
                rep.p = p;
                rep.tor_structure = t0;
                rep.vp = t0.vp(p);
                rep.w_order = w_group(d, p);
                rep.c_tilde = std::log((double)t0.order()) / log_sqrt(d.D);
                rep.stabilized_level = win[0].n;
                rep.ray_structure = win[0].structure;
                return rep;
            }
        }
    }
    throw stabilization_error("tor_report: no stabilization for D=" + to_string(d.D) + " p=" + to_string(p));
}

i128 w_group(const Discriminant& d, i128 p)
{
    const i128 m = d.m;
    if (p == 2) {
        if (m == -1) return 1;
        const i128 r = pmod<i128>(m, 8);
        return (r == 1 || r == 7) ? 2 : 1;
    }
    if (p == 3) {
        if (m == -3) return 1;
        if (m % 3 == 0 && pmod<i128>(-m / 3, 3) == 1) return 3;
        return 1;
    }
    return 1;
}

i128 ktilde_index(i128 D, i128 p, const PramConfig& cfg)
{
    const Discriminant d = discriminant_from_value(-abs128(D));
    const ClassGroup G = class_group_imaginary_p(d, p, cfg.cg);
    const i128 hp = G.structure.p_part(p).order();
    const TorsionReport t = tor_report(d, p, cfg);
    const i128 num = hp * t.w_order, den = t.tor_structure.order();
    if (num % den != 0) throw std::logic_error("ktilde_index: non-integral index");
    return num / den;
}

SClassGroup s_class_group(const Discriminant& d, i128 p, const ClassGroupConfig& cfg)
{
    SClassGroup out;
    out.D = d;
    out.p = p;
    const ClassGroup G = class_group(d, cfg);
    const Splitting sp = splitting_type(d, p);
    out.s_count = sp == Splitting::split ? 2 : 1;
    std::vector<QuadForm> cls;
    if (sp != Splitting::inert) {
        auto f = prime_form(d.D, p);
        if (!f) throw std::logic_error("s_class_group: no prime form above p");
        cls.push_back(*f);
    }
    out.structure = (cls.empty() ? G.structure : G.quotient_structure(cls)).p_part(p);
    return out;
}

ReflectionResult reflection_check(const Discriminant& d, i128 p, const PramConfig& cfg)
{
    ReflectionResult r;
    r.rk_T = tor_report(d, p, cfg).tor_structure.rank(p);
    const SClassGroup S = s_class_group(d, p, cfg.cg);
    r.rk_S = S.structure.rank(p);
    r.s_count = S.s_count;
    r.holds = r.rk_T == r.rk_S + r.s_count - 1;
    return r;
}

RankInequalityReport rank_inequalities(const Discriminant& d, i128 p, const PramConfig& cfg)
{
    RankInequalityReport r;
    r.rk_T = tor_report(d, p, cfg).tor_structure.rank(p);
    const ClassGroup G = d.D < 0 ? class_group_imaginary_p(d, p, cfg.cg) : ordinary_class_group_real(d, cfg.cg);
    r.rk_Cl = G.structure.rank(p);
    r.r1 = d.D < 0 ? 0 : 2;
    r.r2 = d.D < 0 ? 1 : 0;
    r.s_count = splitting_type(d, p) == Splitting::split ? 2 : 1;
    r.upper_holds = r.rk_T <= r.rk_Cl + r.r1 + r.r2 - 1 + r.s_count;
    r.lower_holds = r.rk_Cl <= r.rk_T + r.r2 + 1;
    return r;
}

int vptor_at(const Discriminant& d, i128 p, int n, const ClassGroupConfig& cfg)
{
    if (n < 1) throw std::invalid_argument("vptor_at: n >= 1 required");
    const RayClassGroup G = RayEngine(d, p, cfg).level(n);
    const int largest = G.structure.divisors.empty() ? 0 : valuation((u128)G.structure.divisors.front(), (u128)p);
    return G.structure.vp(p) - largest - (n - 1);
}

std::vector<TorScanRecord> tor_scan(i128 p, std::uint64_t minAbs, std::uint64_t maxAbs, int n, unsigned workers,
                                    const ClassGroupConfig& cfg)
{
    if (minAbs < 3 || maxAbs < minAbs) throw std::invalid_argument("tor_scan: need 3 <= minAbs <= maxAbs");
    if (n <= 0) n = p == 2 ? 20 : 8;
    std::vector<i128> Ds;
    for (std::uint64_t a = minAbs; a <= maxAbs; ++a)
        if (is_fundamental(-(i128)a)) Ds.push_back(-(i128)a);
    std::vector<TorScanRecord> all(Ds.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(64);
            if (i >= Ds.size()) return;
            for (std::size_t j = i; j < std::min(Ds.size(), i + 64); ++j) {
                TorScanRecord& rec = all[j];
                rec.D = Ds[j];
                rec.m = Ds[j] % 4 == 0 ? Ds[j] / 4 : Ds[j];
                try {
                    rec.vptor = vptor_at(discriminant_from_value(Ds[j]), p, n, cfg);
                    rec.cp = rec.vptor * std::log((double)p) / log_sqrt(Ds[j]);
                } catch (const std::exception& e) {
                    rec.error = e.what();
                }
            }
        }
    };
    workers = std::max(1u, workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> th;
        for (unsigned w = 0; w < workers; ++w) th.emplace_back(work);
        for (auto& t : th) t.join();
    }
    std::vector<TorScanRecord> out;
    int vp = 0;
    for (auto& rec : all) {
        if (!rec.error.empty()) {
            out.push_back(rec);
            continue;
        }
        vp = std::max(vp, rec.vptor);
        if (rec.vptor >= vp) out.push_back(rec);
    }
    return out;
}

std::vector<FamilyRow> tor_family(i128 p, int count, int n, const ClassGroupConfig& cfg)
{
    std::vector<FamilyRow> out;
    i128 m = 1;
    int factors = 0;
    for (i128 l = 3; (int)out.size() < count; l += 2) {
        if (!is_prime((u128)l)) continue;
        m *= (l % 4 == 1 ? l : -l);
        if (++factors < 2) continue; /* the printed table starts at two prime factors */
        FamilyRow row;
        row.m = m;
        try {
            const Discriminant d = discriminant_from_value(m);
            row.cl_res = class_group(d, cfg).structure;
            row.cl_ord = d.D < 0 ? row.cl_res : ordinary_class_group_real(d, cfg).structure;
            const RayClassGroup G = RayEngine(d, p, cfg).level(n);
            row.tor = drop_largest(G.structure, m < 0 ? 2 : 1);
            row.tor_order = row.tor.order();
            row.cp = std::log((double)row.tor_order) / log_sqrt(m);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        out.push_back(row);
    }
    return out;
}

} // namespace nt

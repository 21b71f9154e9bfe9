#include "nt/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nt {

double BoundParams::gamma_p() const { return std::log((double)(p - 1) / 2.0) - 1.0; }

double log_sqrt_disc(double f, i128 p)
{
    if (f < 1) throw std::invalid_argument("log_sqrt_disc: f >= 1 required");
    return 0.5 * (double)(p - 1) * std::log(f);
}

double X_of_N_expanded(double N, const BoundParams& bp, double Delta)
{
    const long double lp = std::log((long double)bp.p), e = bp.eps_eff(), h = (long double)(bp.p - 1) / 2;
    const long double n = N, ln = std::log(n);
    return (double)(n * lp + Delta * lp - e * h * n * ln - lp - e * n * bp.O1);
}

double X_of_N(double N, const BoundParams& bp, double Delta)
{
    if (N < 2) throw std::invalid_argument("X_of_N: N >= 2 required");
    const double lp = std::log((double)bp.p), e = bp.eps_eff(), h = (double)(bp.p - 1) / 2;
    const double X = N * (-e * h * std::log(N) + (Delta / N) * lp + (1.0 - 1.0 / N) * lp - e * bp.O1);
    const double Y = X_of_N_expanded(N, bp, Delta);
    if (std::fabs(X - Y) > 1e-12 * std::max(std::fabs(X), 1.0))
        throw std::logic_error("X_of_N: factored and expanded forms disagree");
    return X;
}

namespace {

long double X0ld(long double N, const BoundParams& bp)
{
    const long double e = bp.eps_eff(), h = (long double)(bp.p - 1) / 2;
    return -e * h * N * std::log(N) + N * ((long double)(bp.p - 1) * std::log((long double)bp.p) - e * bp.O1);
}

} // namespace

double X0_of_N(double N, const BoundParams& bp)
{
    if (N < 1) throw std::invalid_argument("X0_of_N: N >= 1 required");
    return (double)X0ld(N, bp);
}

N0Result find_N0(const BoundParams& bp)
{
    const double e = bp.eps_eff();
    if (!(e > 0)) throw std::invalid_argument("find_N0: eps > 0 required");
    const double lp = std::log((double)bp.p);
    N0Result r;
    const double logN0 = 2.0 * lp / e - 1.0 - 2.0 * bp.O1 / (double)(bp.p - 1);
    r.N0 = std::exp(logN0);
    r.X0max = e * (double)(bp.p - 1) / 2.0 * r.N0;

    /* golden section over u = log N; X0(e^u) = e^u (A - B u), compared through
     * log X0(e^c) - log X0(e^d) so that the flat top stays resolvable */
    const long double A = (long double)(bp.p - 1) * std::log((long double)bp.p) - (long double)e * bp.O1;
    const long double B = (long double)e * (bp.p - 1) / 2;
    auto greater = [&](long double c, long double d) {
        const long double xc = A - B * c, xd = A - B * d;
        if (xc <= 0 || xd <= 0) return X0ld(std::exp(c), bp) > X0ld(std::exp(d), bp);
        return (c - d) + std::log1p(B * (d - c) / xd) > 0;
    };
    const long double g = (std::sqrt(5.0L) - 1) / 2;
    long double a = std::min(0.0, logN0 - 10), b = std::max(logN0, 0.0) * 2 + 10;
    long double c = b - g * (b - a), d = a + g * (b - a);
    for (int it = 0; it < 400 && b - a > 1e-15L; ++it) {
        if (greater(c, d)) {
            b = d; d = c;
            c = b - g * (b - a);
        } else {
            a = c; c = d;
            d = a + g * (b - a);
        }
    }
    r.N0_search = (double)std::exp((a + b) / 2);
    r.rel_error = std::fabs(r.N0_search / r.N0 - 1.0);
    return r;
}

double Y0_lower(double N, const BoundParams& bp, double delta, double c_p)
{
    if (N < 2) throw std::invalid_argument("Y0_lower: N >= 2 required");
    if (!(c_p > 0)) throw std::invalid_argument("Y0_lower: c_p > 0 required");
    const double lp = std::log((double)bp.p), e = bp.eps_eff(), q = (double)(bp.p - 1);
    const double g2 = std::log(c_p) + 2 * std::log(q) - 2; /* gamma''_p */
    const double ln = std::log(N);
    return (N - 1 + delta) * lp - e * q * N * ln - e * q / 2 * N * g2 - e * q / 2 * ln - e * bp.O1;
}

double log_h_eps_threshold(double log_absD, i128 p, double N, double eps)
{
    return eps * 0.5 * log_absD - (N - 1) * std::log((double)p);
}

double h_eps_threshold(double absD, i128 p, int N, double eps)
{
    if (absD < 3) throw std::invalid_argument("h_eps_threshold: |D| >= 3 required");
    return std::exp(log_h_eps_threshold(std::log(absD), p, N, eps));
}

StirlingValue stirling_log_factorial(double N)
{
    if (N < 1) throw std::invalid_argument("stirling_log_factorial: N >= 1 required");
    StirlingValue s;
    if (N <= 1e6 && N == std::floor(N)) {
        long double acc = 0;
        for (long k = 2; k <= (long)N; ++k) acc += std::log((long double)k);
        s.value = (double)acc;
        s.error = 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, s.value);
        return s;
    }
    const long double n = N;
    const long double pi = 3.14159265358979323846264338327950288L;
    long double v = n * std::log(n) - n + 0.5L * std::log(2 * pi * n) + 1 / (12 * n) - 1 / (360 * n * n * n);
    s.value = (double)v;
    s.error = (double)(1 / (1260 * n * n * n * n * n)) + 4 * std::numeric_limits<double>::epsilon() * std::fabs(s.value);
    return s;
}

std::vector<BoundReport> bound_table(const BoundParams& bp, const std::vector<double>& Ns, double Delta, double delta,
                                     double c_p)
{
    std::vector<BoundReport> out;
    for (double N : Ns) {
        BoundReport r;
        r.N = N;
        r.X = X_of_N(N, bp, Delta);
        r.X0 = X0_of_N(N, bp);
        r.Y0_lower = Y0_lower(N, bp, delta, c_p);
        r.logC_required = r.X;
        out.push_back(r);
    }
    return out;
}

EnvelopeReport envelope_report(const std::vector<EnvelopeInput>& in, i128 p, double eps, EnvelopeQuantity q)
{
    EnvelopeReport rep;
    rep.p = p;
    rep.eps = eps;
    rep.quantity = q;
    rep.envelope = -std::numeric_limits<double>::infinity();
    for (auto& x : in) {
        EnvelopeRow r;
        r.D = x.D;
        r.quantity = x.quantity;
        r.log_quantity = std::log((double)x.quantity);
        r.log_sqrt_disc = 0.5 * std::log((double)abs128(x.D));
        r.excess = r.log_quantity - eps * r.log_sqrt_disc;
        rep.envelope = std::max(rep.envelope, r.excess);
        r.envelope = rep.envelope;
        r.C = r.log_quantity / r.log_sqrt_disc;
        rep.rows.push_back(r);
    }
    return rep;
}

std::vector<EnvelopeInput> envelope_inputs(const std::vector<ScanRecord>& recs, i128 p)
{
    std::vector<EnvelopeInput> out;
    for (auto& r : recs) {
        i128 q = r.h_p;
        if (q == 0) {
            q = 1;
            for (i128 h = r.h; h % p == 0; h /= p) q *= p;
        }
        out.push_back({r.D, q});
    }
    return out;
}

std::string to_string(EnvelopeQuantity q) { return q == EnvelopeQuantity::torsion ? "torsion" : "class_p_part"; }

} // namespace nt

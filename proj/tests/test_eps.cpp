#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "nt/bounds.hpp"

using namespace nt;

namespace {

/* first line of the X(N) identity, the unspecified terms collected in O1 */
double X_direct(double N, double p, double eps, double O1, double Delta)
{
    const double lp = std::log(p);
    return N * lp + Delta * lp - eps * (p - 1) / 2 * N * std::log(N) - lp - eps * N * O1;
}

} // namespace

TEST_CASE("log sqrt of cyclic discriminants")
{
    CHECK(log_sqrt_disc(7, 3) == doctest::Approx(std::log(7.0)));
    CHECK(log_sqrt_disc(1983163, 3) == doctest::Approx(14.5002).epsilon(1e-5));
    CHECK(log_sqrt_disc(1000, 2) == doctest::Approx(0.5 * std::log(1000.0)));
}

TEST_CASE("X(N) in both forms")
{
    BoundParams bp;
    bp.p = 3;
    bp.eps = 0.1;
    CHECK(X_of_N(10, bp, 0) == doctest::Approx(X_of_N_expanded(10, bp, 0)).epsilon(1e-12));
    bp.eps = 1e-12;
    CHECK(X_of_N(50, bp, 0) == doctest::Approx(49 * std::log(3.0)).epsilon(1e-9));
    bp.eps = 0.05;
    const double a = X_of_N(100, bp, 3);
    bp.eps = 0.06;
    CHECK(X_of_N(100, bp, 3) < a);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0, 1);
    const int ps[] = {2, 3, 5, 7, 11, 13};
    for (int it = 0; it < 10000; ++it) {
        BoundParams q;
        q.p = ps[rng() % 6];
        q.eps = 0.001 + U(rng);
        q.O1 = 10 * U(rng) - 5;
        const double N = 2 + std::floor(std::exp(U(rng) * 20));
        const double Delta = std::floor(U(rng) * (double)(q.p - 1) * (N - 1));
        const double x = X_of_N(N, q, Delta);
        const double y = X_direct(N, (double)q.p, q.eps, q.O1, Delta);
        REQUIRE(std::fabs(x - y) <= 1e-11 * std::max(1.0, std::fabs(y)));
    }
}

TEST_CASE("X0 and its maximum")
{
    BoundParams bp;
    bp.p = 7;
    bp.eps = 0.1;
    CHECK(X0_of_N(1, bp) == doctest::Approx(6 * std::log(7.0)));
    CHECK(X0_of_N(1e30, bp) < 0);
    const N0Result r = find_N0(bp);
    CHECK(std::fabs(r.N0 / 2.935394e16 - 1) < 0.002);
    CHECK(std::fabs(r.X0max / 8.8e15 - 1) < 0.005);
    CHECK(r.rel_error < 1e-9);
    CHECK(X0_of_N(r.N0 * 1.1, bp) < r.X0max);
    CHECK(X0_of_N(r.N0 * 0.9, bp) < r.X0max);
    CHECK(X0_of_N(r.N0, bp) == doctest::Approx(r.X0max).epsilon(1e-9));

    BoundParams one;
    one.p = 5;
    one.eps = 2 * std::log(5.0);
    CHECK(find_N0(one).N0 == doctest::Approx(1.0));
    for (int p : {3, 5, 11}) {
        for (double eps : {0.05, 0.2, 0.5}) {
            BoundParams q;
            q.p = p;
            q.eps = eps;
            CHECK(find_N0(q).rel_error < 1e-9);
        }
    }
}

TEST_CASE("lower bound Y0")
{
    BoundParams bp;
    bp.p = 3;
    bp.eps = 50;
    CHECK(Y0_lower(100, bp, 0, 1) < -1e4);
    bp.eps = 0.05;
    CHECK(std::isfinite(Y0_lower(100, bp, 0, 1)));
    for (int p : {3, 5, 7}) {
        for (double N : {10.0, 100.0, 1e4, 1e8}) {
            BoundParams q;
            q.p = p;
            q.eps = 0.1;
            const double delta = (double)(p - 2) * (N - 1);
            CHECK(X_of_N(N, q, delta) >= Y0_lower(N, q, delta, 1.0));
        }
    }
}

TEST_CASE("h_eps threshold")
{
    const double absD = 1e6;
    const double eps = 2 * 3 * std::log(3.0) / std::log(absD);
    CHECK(h_eps_threshold(absD, 3, 4, eps) == doctest::Approx(1.0));
    CHECK(h_eps_threshold(absD, 3, 1, 0.1) == doctest::Approx(std::pow(1e3, 0.1)));
    double prev = 0;
    for (double d = 3; d < 1e12; d *= 3.7) {
        const double h = h_eps_threshold(d, 3, 3, 0.2);
        CHECK(h > prev);
        prev = h;
    }
}

TEST_CASE("h_eps along the conductor family")
{
    /* log h_eps(f_N) - log h_eps(f_{N-1}) = eps log l_N - log p, increasing in N */
    const auto seq = primes_in_class(3, 10000).primes;
    double logf = 0, prev_inc = -std::numeric_limits<double>::infinity(), prev = 0;
    for (std::size_t N = 1; N <= seq.size(); ++N) {
        logf += std::log((double)seq[N - 1]);
        const double cur = log_h_eps_threshold(2 * logf, 3, (double)N, 0.01);
        if (N > 1) {
            const double inc = cur - prev;
            REQUIRE(inc >= prev_inc - 1e-9);
            prev_inc = inc;
        }
        prev = cur;
    }
}

TEST_CASE("Stirling")
{
    CHECK(stirling_log_factorial(1).value == 0.0);
    CHECK(stirling_log_factorial(10).value == doctest::Approx(std::log(3628800.0)).epsilon(1e-12));
    for (double N : {20.0, 100.0, 1000.0, 123456.0, 1e6}) {
        const StirlingValue d = stirling_log_factorial(N);
        const StirlingValue s = stirling_log_factorial(N + 0.5);
        /* lgamma as an independent reference */
        CHECK(std::fabs(d.value - std::lgamma(N + 1)) <= d.error + 1e-9 * d.value);
        CHECK(std::fabs(s.value - std::lgamma(N + 1.5)) <= s.error + 1e-9 * s.value);
    }
}

TEST_CASE("envelope reports")
{
    CHECK(std::isinf(envelope_report({}, 3, 0.05, EnvelopeQuantity::class_p_part).envelope));
    const std::vector<EnvelopeInput> in = {{-23, 3}, {-199, 9}, {-983, 27}, {-3671, 81}};
    const auto rep = envelope_report(in, 3, 0.05, EnvelopeQuantity::class_p_part);
    REQUIRE(rep.rows.size() == 4);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].envelope >= rep.rows[i - 1].envelope);
    CHECK(rep.rows[3].C == doctest::Approx(1.07074359).epsilon(1e-8));
    CHECK(rep.rows[3].envelope == doctest::Approx(std::log(81.0) - 0.05 * 0.5 * std::log(3671.0)));
}

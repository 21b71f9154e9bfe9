#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "nt/quadclass.hpp"
#include "oracles.hpp"

using namespace nt;
using oracle::i64;

namespace {

std::vector<i64> fundamentals(i64 lo, i64 hi)
{
    std::vector<i64> out;
    for (i64 D = lo; D <= hi; ++D)
        if (oracle::fundamental(D)) out.push_back(D);
    return out;
}

oracle::Lattice lattice_of(const oracle::Quad& K, const QuadForm& f)
{
    return oracle::form_ideal(K, (i64)f.a, (i64)f.b);
}

/* proper equivalence by searching SL2(Z) matrices with small entries */
bool properly_equivalent(const QuadForm& f, const QuadForm& g, i64 bound)
{
    auto val = [](const QuadForm& q, i64 x, i64 y) { return (i64)q.a * x * x + (i64)q.b * x * y + (i64)q.c * y * y; };
    auto match = [&](i64 al, i64 be, i64 ga, i64 de) {
        const i64 b = 2 * (i64)f.a * al * be + (i64)f.b * (al * de + be * ga) + 2 * (i64)f.c * ga * de;
        return b == (i64)g.b && val(f, be, de) == (i64)g.c;
    };
    for (i64 al = -bound; al <= bound; ++al)
        for (i64 ga = -bound; ga <= bound; ++ga) {
            if (std::gcd(al, ga) != 1 || val(f, al, ga) != (i64)g.a) continue;
            for (i64 be = -bound; be <= bound; ++be) {
                if (al != 0) {
                    if ((1 + be * ga) % al != 0) continue;
                    if (match(al, be, ga, (1 + be * ga) / al)) return true;
                } else if (be * ga == -1) {
                    for (i64 de = -bound; de <= bound; ++de)
                        if (match(al, be, ga, de)) return true;
                }
            }
        }
    return false;
}

} // namespace

TEST_CASE("fundamental discriminants")
{
    CHECK(fundamental_discriminant(-15).D == -15);
    CHECK(fundamental_discriminant(-15).N == 2);
    CHECK(fundamental_discriminant(105).D == 105);
    CHECK(fundamental_discriminant(105).N == 3);
    CHECK(fundamental_discriminant(-5).D == -20);
    CHECK(fundamental_discriminant(-5).N == 2);
    CHECK_THROWS(fundamental_discriminant(12));
    CHECK_THROWS(fundamental_discriminant(1));
    for (i64 D = -5000; D <= 5000; ++D) REQUIRE(is_fundamental(D) == oracle::fundamental(D));
}

TEST_CASE("reduction")
{
    CHECK(reduce({1, 1, 6}) == QuadForm{1, 1, 6});
    CHECK(reduce({6, 1, 1}) == QuadForm{1, 1, 6});
    const QuadForm f{3, 7, -2};
    const QuadForm g = reduce(f);
    CHECK(g.disc() == 73);
    CHECK(is_reduced_real<i128>(g, 8));
    CHECK(properly_equivalent(f, g, 12));
    std::mt19937_64 rng(3);
    for (int it = 0; it < 300; ++it) {
        const i64 a = 1 + rng() % 40, b = (i64)(rng() % 81) - 40, c = 1 + rng() % 40;
        const QuadForm h{a, b, c};
        if (h.disc() >= 0 || std::gcd(std::gcd(a, b < 0 ? -b : b), c) != 1) continue;
        const QuadForm r = reduce(h);
        REQUIRE(r.disc() == h.disc());
        REQUIRE(std::abs((i64)r.b) <= (i64)r.a);
        REQUIRE(r.a <= r.c);
        REQUIRE(properly_equivalent(h, r, 45));
    }
}

TEST_CASE("composition is the ideal product")
{
    std::mt19937_64 rng(5);
    for (i64 D : {-23LL, -15015LL, -3299LL, -20LL, 73LL, 105LL, 221LL, 1001LL, 4849845LL}) {
        const oracle::Quad K(D);
        auto random_form = [&]() {
            for (;;) {
                const i64 a = 1 + rng() % 60;
                for (i64 b = -a + 1; b <= a; ++b) {
                    if ((b * b - D) % (4 * a) != 0) continue;
                    const i64 c = (b * b - D) / (4 * a);
                    if (std::gcd(std::gcd(a, b < 0 ? -b : b), c < 0 ? -c : c) != 1) continue;
                    if (rng() % 3 == 0) return QuadForm{a, b, c};
                }
            }
        };
        for (int it = 0; it < 60; ++it) {
            const QuadForm f = random_form(), g = random_form();
            i128 d1 = 1;
            const QuadForm h = compose_raw(f, g, &d1);
            REQUIRE(h.disc() == (i128)D);
            oracle::Lattice L = lattice_of(K, h);
            L = oracle::Lattice{L.a * (i64)d1, L.b * (i64)d1, L.c * (i64)d1};
            REQUIRE(L == oracle::ideal_mul(K, lattice_of(K, f), lattice_of(K, g)));
        }
    }
}

TEST_CASE("group laws on reduced classes")
{
    for (i64 D : fundamentals(-2000, -3)) {
        const auto forms = reduced_forms_imag(D);
        const QuadForm e = identity_form<i128>(D);
        for (auto& f : forms) {
            REQUIRE(compose(e, f) == f);
            REQUIRE(compose(f, inverse_form(f)) == e);
            for (auto& g : forms) {
                const QuadForm fg = compose(f, g);
                REQUIRE(fg == compose(g, f));
                if (forms.size() <= 12)
                    for (auto& k : forms) REQUIRE(compose(fg, k) == compose(f, compose(g, k)));
            }
        }
    }
    const QuadForm f{2, 1, 3};
    CHECK(compose(f, f) == QuadForm{2, -1, 3});
}

TEST_CASE("class numbers match reduced-form enumeration")
{
    const auto h = oracle::reduced_form_counts(30000);
    for (i64 D : fundamentals(-30000, -3)) {
        const ClassGroup G = class_group_imaginary(discriminant_from_value(D));
        REQUIRE(G.structure.order() == (i128)h[(std::size_t)-D]);
    }
    CHECK(class_group_imaginary(discriminant_from_value(-23)).structure.str() == "[3]");
    CHECK(class_group_imaginary(discriminant_from_value(-3)).structure.order() == 1);
    CHECK(class_group_imaginary(discriminant_from_value(-47)).structure.order() == 5);
    CHECK(class_group_imaginary(fundamental_discriminant(-15015)).structure.str() == "[12,2,2,2]");
    CHECK(class_group_imaginary(fundamental_discriminant(-255255)).structure.str() == "[16,2,2,2,2]");
}

TEST_CASE("class group structure matches element orders")
{
    for (i64 D : fundamentals(-4000, -3)) {
        const auto forms = reduced_forms_imag(D);
        const QuadForm e = identity_form<i128>(D);
        auto orders = oracle::element_orders(
            forms, e, [](const QuadForm& x, const QuadForm& y) { return compose(x, y); },
            [](const QuadForm& x, const QuadForm& y) { return x == y; });
        REQUIRE(class_group_imaginary(discriminant_from_value(D)).structure == oracle::structure_from_orders(orders));
    }
}

TEST_CASE("BSGS agrees with enumeration")
{
    ClassGroupConfig cfg;
    cfg.enumeration_cap = 0;
    const auto h = oracle::reduced_form_counts(102000);
    int n = 0;
    for (i64 D : fundamentals(-102000, -100000)) {
        const ClassGroup G = class_group_imaginary(discriminant_from_value(D), cfg);
        REQUIRE(G.method == "bsgs");
        REQUIRE(G.structure.order() == (i128)h[(std::size_t)-D]);
        REQUIRE(G.structure == class_group_imaginary(discriminant_from_value(D)).structure);
        ++n;
    }
    CHECK(n > 500);
    cfg.bsgs_cap = 10;
    CHECK_THROWS_AS(class_group_imaginary(discriminant_from_value(-23), cfg), budget_error);
}

TEST_CASE("real class groups")
{
    CHECK(narrow_class_group_real(fundamental_discriminant(105)).structure.str() == "[2,2]");
    CHECK(ordinary_class_group_real(fundamental_discriminant(105)).structure.str() == "[2]");
    CHECK(narrow_class_group_real(fundamental_discriminant(221)).structure.str() == "[4]");
    CHECK(ordinary_class_group_real(fundamental_discriminant(221)).structure.str() == "[2]");
    CHECK(narrow_class_group_real(fundamental_discriminant(5)).structure.trivial());
    CHECK(ordinary_class_group_real(fundamental_discriminant(5)).structure.trivial());
    CHECK(narrow_class_group_real(fundamental_discriminant(4849845)).structure.str() == "[4,2,2,2,2,2]");
    /* only fields whose unit the brute-force search reaches */
    int checked = 0;
    for (i64 D : fundamentals(5, 6000)) {
        oracle::Unit u;
        try {
            u = oracle::fundamental_unit(D, 20000);
        } catch (const std::runtime_error&) {
            continue;
        }
        const Discriminant d = discriminant_from_value(D);
        const i128 hn = narrow_class_group_real(d).structure.order();
        const i128 ho = ordinary_class_group_real(d).structure.order();
        REQUIRE(hn == (u.norm == -1 ? ho : 2 * ho));
        ++checked;
    }
    CHECK(checked > 800);
}

TEST_CASE("p-parts")
{
    CHECK(p_part(AbelianGroupStructure::parse("[39,3,3,3,3]"), 3).str() == "[3,3,3,3,3]");
    CHECK(p_part(AbelianGroupStructure::parse("[12,2,2,2]"), 2).str() == "[4,2,2,2]");
    CHECK(p_part(AbelianGroupStructure::parse("[12,2,2,2]"), 7).trivial());
    const auto g = class_group_imaginary_p(fundamental_discriminant(-15015), 2);
    CHECK(g.structure.str() == "[4,2,2,2]");
}

TEST_CASE("genus theory")
{
    auto gd = genus_delta(fundamental_discriminant(-255255));
    CHECK(gd.N == 6);
    CHECK(gd.delta2 == 3);
    gd = genus_delta(fundamental_discriminant(-15));
    CHECK(gd.N == 2);
    CHECK(gd.delta2 == 0);
    gd = genus_delta(fundamental_discriminant(4849845));
    CHECK(gd.N == 7);
    CHECK(gd.delta2 == 1);
    for (i64 D : fundamentals(-10000, 10000)) {
        const Discriminant d = discriminant_from_value(D);
        REQUIRE(genus_delta(d).two_rank == d.N - 1);
    }
    /* Delta = v_2 of the order of the group of squares */
    for (i64 D : fundamentals(-3000, -3)) {
        const auto forms = reduced_forms_imag(D);
        std::set<std::pair<i128, i128>> sq;
        for (auto& f : forms) sq.insert(form_key(compose(f, f)));
        int v = 0;
        for (std::size_t n = sq.size(); n % 2 == 0; n /= 2) ++v;
        REQUIRE(genus_delta(discriminant_from_value(D)).delta2 == v);
    }
}

TEST_CASE("scan of local maxima")
{
    ScanStatistic st;
    st.kind = StatKind::genus;
    st.eps = 0.05;
    auto recs = scan_local_maxima(3, 500, st);
    REQUIRE(recs.size() >= 3);
    CHECK(recs[0].D == -3);
    CHECK(recs[0].stat == doctest::Approx(0.9729084349).epsilon(1e-10));
    CHECK(recs[1].D == -23);
    CHECK(recs[1].stat == doctest::Approx(2.7738186179).epsilon(1e-10));
    CHECK(recs[2].D == -47);
    CHECK(recs[2].stat == doctest::Approx(4.5411678851).epsilon(1e-10));

    st.kind = StatKind::p_exponent;
    st.p = 3;
    recs = scan_local_maxima(3, 4000, st);
    REQUIRE(recs.size() == 4);
    const i128 Ds[] = {-23, -199, -983, -3671};
    const double Cs[] = {0.70075861, 0.83019008, 0.95661699, 1.07074359};
    for (int i = 0; i < 4; ++i) {
        CHECK(recs[i].D == Ds[i]);
        CHECK(std::abs(recs[i].stat - Cs[i]) < 1e-6);
    }
    st.p = 2;
    recs = scan_local_maxima(3, 100, st);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].D == -15);
    CHECK(recs[1].D == -39);
    CHECK(recs[2].D == -95);
}

TEST_CASE("scan against a direct running maximum")
{
    const auto h = oracle::reduced_form_counts(20000);
    for (double eps : {0.05, 0.1}) {
        ScanStatistic st;
        st.kind = StatKind::raw;
        st.eps = eps;
        const auto recs = scan_local_maxima(3, 20000, st);
        std::vector<i64> want;
        double best = -1;
        for (i64 a = 3; a <= 20000; ++a) {
            if (!oracle::fundamental(-a)) continue;
            const double C = (double)h[(std::size_t)a] / std::pow(std::sqrt((double)a), eps);
            if (C > best) {
                best = C;
                want.push_back(-a);
            }
        }
        REQUIRE(recs.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) REQUIRE(recs[i].D == (i128)want[i]);
    }
}

TEST_CASE("prime discriminant report")
{
    CHECK(prime_disc_report({}).all_prime);
    ScanStatistic st;
    st.kind = StatKind::genus;
    st.eps = 0.05;
    CHECK(prime_disc_report(scan_local_maxima(3, 100000, st)).all_prime);
    st.kind = StatKind::raw;
    const auto rep = prime_disc_report(scan_local_maxima(3, 100000, st));
    CHECK_FALSE(rep.all_prime);
    REQUIRE_FALSE(rep.violations.empty());
    CHECK(rep.violations.front() == -15);
}

TEST_CASE("normic search")
{
    const auto rows = normic_search(2, 3, 2, 1, 45);
    REQUIRE_FALSE(rows.empty());
    for (auto& r : rows) {
        CHECK(r.error.empty());
        CHECK(r.h % r.h_p == 0);
        CHECK(r.a * r.a + abs128(r.m) * r.b * r.b == 4 * 256); /* 4 q^(p^rho) */
    }
    const auto rows3 = normic_search(3, 2, 2, 1, 90);
    bool big = false;
    for (auto& r : rows3) big = big || r.h_p >= 3;
    CHECK(big);
}

TEST_CASE("c_kp")
{
    CHECK(c_kp(1, -23) == 0.0);
    CHECK(c_kp(81, -3671) == doctest::Approx(1.07074359).epsilon(1e-8));
    const double v = 32 * std::log(2.0) / std::log(std::sqrt(73786976290585731943.0));
    CHECK(v == doctest::Approx(0.969696).epsilon(1e-6));
    CHECK(c_kp((i128)1 << 32, parse_i128("73786976290585731943")) == doctest::Approx(v));
}

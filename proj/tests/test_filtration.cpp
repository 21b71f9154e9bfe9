#include "doctest.h"

#include <functional>

#include "nt/filtration.hpp"
#include "oracles.hpp"

using namespace nt;
using oracle::i64;

namespace {

ZMatrix zm(const std::vector<std::vector<long>>& a)
{
    ZMatrix z;
    for (auto& r : a) {
        std::vector<mpz_class> row;
        for (long x : r) row.push_back(x);
        z.push_back(row);
    }
    return z;
}

/* Orders of ker (1 - sigma)^i on Z^g / relations, by enumerating the box
 * prod Z/box_j and merging along the relation columns. */
std::vector<i64> brute_chain(const FinitePModule& M, const std::vector<i64>& box, int steps)
{
    const std::size_t g = M.ngens();
    i64 size = 1;
    for (i64 b : box) size *= b;
    auto decode = [&](i64 c) {
        std::vector<i64> v(g);
        for (std::size_t j = 0; j < g; ++j) {
            v[j] = c % box[j];
            c /= box[j];
        }
        return v;
    };
    auto encode = [&](const std::vector<i64>& v) {
        i64 c = 0, m = 1;
        for (std::size_t j = 0; j < g; ++j) {
            c += (((v[j] % box[j]) + box[j]) % box[j]) * m;
            m *= box[j];
        }
        return c;
    };
    std::vector<i64> parent(size);
    for (i64 i = 0; i < size; ++i) parent[i] = i;
    std::function<i64(i64)> find = [&](i64 x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    const std::size_t r = M.relations.empty() ? 0 : M.relations[0].size();
    for (std::size_t col = 0; col < r; ++col)
        for (i64 c = 0; c < size; ++c) {
            auto v = decode(c);
            for (std::size_t j = 0; j < g; ++j) v[j] += M.relations[j][col].get_si();
            parent[find(c)] = find(encode(v));
        }
    auto step = [&](const std::vector<i64>& v) {
        std::vector<i64> w(g, 0);
        for (std::size_t i = 0; i < g; ++i) {
            i64 s = 0;
            for (std::size_t j = 0; j < g; ++j) s += M.sigma[i][j].get_si() * v[j];
            w[i] = v[i] - s;
        }
        return w;
    };
    std::vector<i64> out{1};
    for (int s = 1; s <= steps; ++s) {
        i64 cnt = 0;
        for (i64 c = 0; c < size; ++c) {
            if (find(c) != c) continue;
            auto v = decode(c);
            for (int i = 0; i < s; ++i) v = step(v);
            cnt += find(encode(v)) == find(0);
        }
        out.push_back(cnt);
    }
    return out;
}

} // namespace

TEST_CASE("module orders")
{
    CHECK(module_order(make_module(3, AbelianGroupStructure::from_cyclic({3, 3}), zm({{1, 0}, {0, 1}}))) == 9);
    CHECK(module_order(make_module(2, AbelianGroupStructure::from_cyclic({4, 2, 2, 2}),
                                   zm({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}))) == 32);
    FinitePModule E;
    E.p = 5;
    CHECK(module_order(E) == 1);
    FinitePModule inf;
    inf.p = 2;
    inf.gens = {"g"};
    inf.relations = zm({{0}});
    inf.sigma = zm({{1}});
    CHECK_THROWS_AS(module_order(inf), infinite_group_error);
}

TEST_CASE("fixed subgroups")
{
    const auto g33 = AbelianGroupStructure::from_cyclic({3, 3});
    CHECK(fixed_subgroup(make_module(3, g33, zm({{1, 0}, {0, 1}}))).order == 9);
    /* companion matrix of x^2 + x + 1 */
    const ZMatrix comp = zm({{0, 1}, {-1, -1}});
    CHECK(fixed_subgroup(make_module(3, g33, comp)).order == 3);
    CHECK(oracle::kernel_chain({3, 3}, {{0, 1}, {-1, -1}}, 1)[1] == 3);
    const FinitePModule Q = from_quadratic(fundamental_discriminant(-15015));
    CHECK(module_structure(Q).str() == "[4,2,2,2]");
    CHECK(fixed_subgroup(Q).order == 16);
}

TEST_CASE("filtration of small modules")
{
    const auto g33 = AbelianGroupStructure::from_cyclic({3, 3});
    auto r = filtration(make_module(3, g33, zm({{1, 0}, {0, 1}}), 3), 3);
    CHECK(r.chain == std::vector<i128>{1, 9});
    CHECK(r.m == 1);
    CHECK(r.t == std::vector<int>{0, 2});
    CHECK(order_identity_check(r));

    r = filtration(make_module(3, g33, zm({{0, 1}, {-1, -1}}), 2), 2);
    CHECK(r.chain == std::vector<i128>{1, 3, 9});
    CHECK(r.m == 2);
    CHECK(r.t == std::vector<int>{0, 0, 1});
    CHECK(order_identity_check(r));

    /* Z[x]/(x^3 - 1, 3, (x - 1)^2) */
    r = filtration(group_ring_module(3, {{1, 2}}));
    CHECK(r.chain == std::vector<i128>{1, 3, 9});
    CHECK(r.m == 2);

    CHECK_THROWS_AS(filtration(make_module(3, g33, zm({{1, 0}, {0, 1}})), 2), inconsistent_n_error);
}

TEST_CASE("filtration matches brute-force kernels")
{
    struct Case {
        std::vector<i64> d;
        std::vector<std::vector<i64>> sigma;
        i128 p;
    };
    const std::vector<Case> cases = {
        {{3, 3}, {{0, 1}, {-1, -1}}, 3},
        {{4, 2}, {{-1, 0}, {0, -1}}, 2},
        {{9, 3}, {{1, 1}, {0, 1}}, 3},
        {{9, 9}, {{0, 1}, {-1, -1}}, 3},
        {{8, 4, 2}, {{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}}, 2},
        {{5, 5, 5}, {{1, 1, 0}, {0, 1, 1}, {0, 0, 1}}, 5},
    };
    for (auto& c : cases) {
        std::vector<std::vector<long>> rows;
        std::vector<i128> cyc;
        for (auto& r : c.sigma) rows.push_back(std::vector<long>(r.begin(), r.end()));
        for (i64 x : c.d) cyc.push_back(x);
        /* keep generators in the given order */
        FinitePModule M;
        M.p = c.p;
        const std::size_t k = c.d.size();
        for (std::size_t i = 0; i < k; ++i) M.gens.push_back("g" + std::to_string(i));
        M.relations = ZMatrix(k, std::vector<mpz_class>(k, 0));
        M.sigma = ZMatrix(k, std::vector<mpz_class>(k, 0));
        for (std::size_t i = 0; i < k; ++i) {
            M.relations[i][i] = (long)c.d[i];
            for (std::size_t j = 0; j < k; ++j) M.sigma[j][i] = (long)c.sigma[i][j];
        }
        const auto r = filtration(M);
        const auto want = oracle::kernel_chain(c.d, c.sigma, r.m);
        REQUIRE(want.size() == r.chain.size());
        for (std::size_t i = 0; i < want.size(); ++i) CHECK(r.chain[i] == (i128)want[i]);
        CHECK(filtrations_agree(M));
        CHECK(order_identity_check(r));
    }
}

TEST_CASE("synthesized modules against brute force")
{
    int checked = 0;
    for (i128 p : {2, 3}) {
        for (int N = 2; N <= 3; ++N)
            for (std::uint64_t seed = 0; seed < 60; ++seed) {
                SynthProfile prof;
                prof.max_a = p == 2 ? 2 : 1;
                prof.max_log_order = 6;
                const FinitePModule M = synthesize(p, N, seed, prof);
                std::vector<i64> box;
                for (std::size_t j = 0; j < M.ngens(); ++j) {
                    i64 b = 0;
                    for (std::size_t col = 0; col < M.relations[j].size(); ++col) {
                        bool pure = M.relations[j][col] != 0;
                        for (std::size_t i = 0; i < M.ngens() && pure; ++i)
                            if (i != j && M.relations[i][col] != 0) pure = false;
                        if (pure) b = M.relations[j][col].get_si();
                    }
                    REQUIRE(b > 0);
                    box.push_back(b);
                }
                i64 size = 1;
                for (i64 b : box) size *= b;
                if (size > 5000) continue;
                const auto r = filtration(M, N);
                const auto want = brute_chain(M, box, r.m);
                for (std::size_t i = 0; i < want.size(); ++i) REQUIRE(r.chain[i] == (i128)want[i]);
                REQUIRE(filtrations_agree(M));
                REQUIRE(order_identity_check(r));
                REQUIRE(fixed_subgroup(M).order == ipow((u128)p, N - 1));
                ++checked;
            }
    }
    CHECK(checked > 100);
}

TEST_CASE("quotient orders decrease")
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const FinitePModule M = synthesize(3, 3, seed);
        const auto r = filtration(M, 3);
        for (int i = 1; i < r.m; ++i)
            REQUIRE(r.chain[i + 1] / r.chain[i] <= r.chain[i] / r.chain[i - 1]);
        for (std::size_t i = 1; i < r.t.size(); ++i) REQUIRE(r.t[i] >= r.t[i - 1]);
    }
}

TEST_CASE("ranks from t")
{
    CHECK(rank_from_t(2, 6, {0, 3, 5}).first == 5);
    CHECK(rank_from_t(3, 4, {0, 0, 3}) == std::pair<int, int>{6, 3});
    CHECK(rank_from_t(3, 2, {0, 0, 1}) == std::pair<int, int>{2, 1});
    CHECK(pr_ranks(3, 4, {0, 0, 1, 3}) == std::vector<int>{6, 2});
    CHECK(pr_ranks(2, 3, {0, 1, 2}) == std::vector<int>{2, 1});
    /* Z/4 x Z/2 with inversion: 2-rank 2, 4-rank 1 */
    const FinitePModule M = make_module(2, AbelianGroupStructure::from_cyclic({4, 2}), zm({{-1, 0}, {0, -1}}), 3);
    const auto r = filtration(M, 3);
    CHECK(pr_ranks(2, 3, r.t) == std::vector<int>{2, 1});
}

TEST_CASE("quadratic modules")
{
    auto r = filtration(from_quadratic(fundamental_discriminant(-15)));
    CHECK(r.chain == std::vector<i128>{1, 2});
    CHECK(r.Delta() == 0);
    r = filtration(from_quadratic(fundamental_discriminant(-255255)));
    CHECK(r.Delta() == 3);
    r = filtration(from_quadratic(fundamental_discriminant(105)));
    CHECK(r.Delta() == 0);
    r = filtration(from_quadratic(fundamental_discriminant(-15015)));
    CHECK(r.chain.back() == 32);
    CHECK(r.t == std::vector<int>{0, 3, 4});
    CHECK(order_identity_check(r));
    const auto h = oracle::reduced_form_counts(5000);
    for (i64 D = -5000; D <= -3; ++D) {
        if (!oracle::fundamental(D)) continue;
        const Discriminant d = discriminant_from_value(D);
        const auto q = filtration(from_quadratic(d), d.N);
        REQUIRE(rank_from_t(2, q.N, q.t).first == d.N - 1);
        REQUIRE(order_identity_check(q));
        int v = 0;
        for (auto x = h[(std::size_t)-D]; x % 2 == 0; x /= 2) ++v;
        REQUIRE(q.Delta() == v - (d.N - 1));
    }
}

TEST_CASE("monte carlo histogram is deterministic")
{
    const auto a = monte_carlo(3, 3, 300, 42, {}, 1);
    const auto b = monte_carlo(3, 3, 300, 42, {}, 3);
    CHECK(a.Delta == b.Delta);
    CHECK(a.delta == b.delta);
    CHECK(a.disagreements == 0);
    CHECK(a.identity_failures == 0);
}

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nt/abelian.hpp"
#include "nt/quadclass.hpp"

namespace nt {

/* Finite p-group Z^g / <relations> with an automorphism sigma of order dividing p.
 * Column convention: each column of `relations` is a relation, column j of
 * `sigma` is the image of generator j. */
struct FinitePModule {
    i128 p = 0;
    std::vector<std::string> gens;
    ZMatrix relations; /* g x r */
    ZMatrix sigma;     /* g x g */
    int N = 0;         /* declared ramified-prime count, 0 when unknown */

    std::size_t ngens() const { return gens.size(); }
};

struct module_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct infinite_group_error : module_error {
    using module_error::module_error;
};
struct inconsistent_n_error : std::domain_error {
    using std::domain_error::domain_error;
};

/* Cyclic decomposition with the given action, rows of sigma_rows being images
 * of the generators (transposed into the column convention). */
FinitePModule make_module(i128 p, const AbelianGroupStructure& g, const ZMatrix& sigma_rows, int N = 0);
/* Throws module_error unless M is a finite p-group with a well-defined sigma, sigma^p = 1. */
void validate_module(const FinitePModule& M);

i128 module_order(const FinitePModule& M);
AbelianGroupStructure module_structure(const FinitePModule& M);

/* Subgroup of M as a lattice L with relations <= L <= Z^g (rows). */
struct Subgroup {
    ZMatrix basis;
    i128 order = 1;
};
Subgroup fixed_subgroup(const FinitePModule& M);

enum class FiltrationMethod { iterated, direct };

struct FiltrationResult {
    i128 p = 0;
    int N = 0;
    std::vector<i128> chain; /* #M_0 = 1, #M_1, ..., #M_m */
    int m = 0;
    std::vector<int> t;      /* t_0 .. t_m, t_m = N-1 */
    std::vector<Subgroup> subgroups;

    int log_order() const;   /* v_p(#M) */
    int Delta() const { return log_order() - (N - 1); }
};

/* N = 0 infers N from #M_1. */
FiltrationResult filtration(const FinitePModule& M, int N = 0, FiltrationMethod method = FiltrationMethod::iterated);
/* Both methods give the same lattices M_i. */
bool filtrations_agree(const FinitePModule& M);

/* (p-rank, delta) */
std::pair<int, int> rank_from_t(i128 p, int N, const std::vector<int>& t);
/* p^r-ranks for r = 1 .. until zero; missing t_i count as N-1. */
std::vector<int> pr_ranks(i128 p, int N, const std::vector<int>& t);
bool order_identity_check(const FiltrationResult& r);

/* 2-part of the restricted class group, sigma acting as inversion, N = omega(D). */
FinitePModule from_quadratic(const Discriminant& d, const ClassGroupConfig& cfg = {});

/* Direct sum of Z[x]/(x^p - 1, p^a, (x-1)^b), sigma = multiplication by x. */
FinitePModule group_ring_module(i128 p, const std::vector<std::pair<int, int>>& summands, int N = 0);

struct SynthProfile {
    int max_a = 2;         /* p-power exponent of a summand */
    int max_b = 0;         /* (x-1)-power, 0 means p */
    int max_log_order = 8; /* reject #M > p^max_log_order */
    int attempts = 2000;
};

struct synthesis_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Deterministic in seed; #M^G = p^(N-1). */
FinitePModule synthesize(i128 p, int N, std::uint64_t seed, const SynthProfile& prof = {});

struct DeltaHistogram {
    i128 p = 0;
    int N = 0;
    std::uint64_t samples = 0;
    std::uint64_t failures = 0;      /* synthesis gave up */
    std::uint64_t disagreements = 0; /* iterated vs direct */
    std::uint64_t identity_failures = 0;
    std::map<int, std::uint64_t> Delta;
    std::map<int, std::uint64_t> delta;
};

DeltaHistogram monte_carlo(i128 p, int N, std::uint64_t samples, std::uint64_t seed,
                           const SynthProfile& prof = {}, unsigned workers = 1);

} // namespace nt

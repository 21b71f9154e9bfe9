#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nt/abelian.hpp"
#include "nt/quadclass.hpp"

namespace nt {

enum class Splitting { split, inert, ramified };
Splitting splitting_type(const Discriminant& d, i128 p);
std::string to_string(Splitting s);

/* O/p^n for a quadratic order, elements a + b*theta with theta = omega - r,
 * theta^2 = s*theta + t. theta is a uniformizer when p ramifies, omega otherwise. */
class ResidueRing {
  public:
    struct Elt {
        u128 a = 0, b = 0;
        bool operator==(const Elt&) const = default;
    };

    ResidueRing(const Discriminant& d, i128 p, int n);

    i128 p() const { return p_; }
    int n() const { return n_; }
    u128 modulus() const { return mod_; }
    Splitting splitting() const { return split_; }

    Elt one() const { return {1 % mod_, 0}; }
    Elt from_omega(const mpz_class& u, const mpz_class& v) const; /* u + v*omega */
    Elt mul(const Elt& x, const Elt& y) const;
    Elt pow(Elt x, u128 e) const;
    bool is_unit(const Elt& x) const;
    std::vector<Elt> elements() const; /* all of O/p^n, for brute-force oracles */

    /* principal units 1 + rad, presented on layered generators */
    std::size_t u1_rank() const { return gens_.size(); }
    ZMatrix u1_relations() const;
    const std::vector<std::vector<i128>>& u1_relations_small() const { return rels_; }
    /* coordinates of the principal-unit component of a unit */
    std::vector<i128> dlog_p(const Elt& x) const;
    /* (O/rad)^x as cyclic factors */
    std::vector<i128> residue_field_units() const;

  private:
    std::vector<i128> digits(Elt y) const;
    u128 mulmod(u128 a, u128 b) const;
    Elt inverse(const Elt& x) const;

    i128 p_;
    int n_;
    u128 mod_;
    Splitting split_;
    u128 s_ = 0, t_ = 0, r_ = 0; /* reduced mod p^n */
    int layers_ = 0;              /* rad^layers = 0 */
    struct Gen {
        int layer;
        bool theta; /* generator 1 + p^j*theta, else 1 + p^j */
        int j;
        Elt g;
        std::vector<Elt> inv_pow; /* g^{-c}, c = 0..p-1 */
    };
    std::vector<Gen> gens_;
    std::vector<std::vector<i128>> rels_;
    bool pow2_ = false;
    u64 mask_ = 0;
    u128 tproj_ = 1, tinv_ = 1, expo_ = 1; /* projection to 1 + rad */
};

/* (O/p^n O)^x */
AbelianGroupStructure residue_units(const Discriminant& d, i128 p, int n);
/* Brute-force order of the p-power torsion of prod_{P|p} K_P^x, read off the
 * residue unit groups at a stable level. */
i128 local_mu_order(const Discriminant& d, i128 p);

struct FundamentalUnit {
    mpz_class x, y; /* eps = (x + y sqrt(D)) / 2, D the field discriminant */
    int norm = 1;
};
/* m > 1 squarefree */
FundamentalUnit fundamental_unit(i128 m, std::uint64_t max_steps = 100000000);

/* Generator of a principal power: ideal(f)^e = (alpha), alpha = u + v*omega.
 * ideal(f) must be coprime to p when used for ray classes; see lift_coprime. */
struct PrincipalPower {
    QuadForm form;      /* the ideal representative actually powered */
    mpz_class u, v;
};
PrincipalPower principal_power(const Discriminant& d, const QuadForm& f, u128 e, i128 avoid_p = 0,
                               std::uint64_t max_bits = (1ull << 28));

struct RayClassGroup {
    Discriminant D;
    i128 p = 0;
    int n = 0;
    AbelianGroupStructure structure;  /* Cl_{p^n} (x) Z_p */
    AbelianGroupStructure units_p;    /* p-part of (O/p^n)^x */
    i128 unit_quotient = 1;           /* #(p-part of (O/p^n)^x / image of units) */
    i128 h_p = 1;                     /* p-part of the ordinary class number */
    bool order_identity = false;      /* #structure = unit_quotient * h_p */
};

class RayEngine; /* caches class group data across levels */

struct PramConfig {
    ClassGroupConfig cg;
    int n_max = 0; /* 0: 32 for p=2, 16 for p=3, 8 otherwise */
};

RayClassGroup ray_class_group(const Discriminant& d, i128 p, int n, const PramConfig& cfg = {});

struct TorsionReport {
    Discriminant D;
    i128 p = 0;
    AbelianGroupStructure tor_structure;
    int vp = 0;
    i128 w_order = 1;
    double c_tilde = 0;
    int stabilized_level = 0;
    AbelianGroupStructure ray_structure; /* at the stabilized level */
};

struct stabilization_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

TorsionReport tor_report(const Discriminant& d, i128 p, const PramConfig& cfg = {});

i128 w_group(const Discriminant& d, i128 p);

/* [K~ cap H : K] = #Cl_p * #W / #T for the imaginary field of discriminant -|D|. */
i128 ktilde_index(i128 D, i128 p, const PramConfig& cfg = {});

struct SClassGroup {
    Discriminant D;
    i128 p = 0;
    AbelianGroupStructure structure; /* p-part of Cl^res / <classes of primes above p> */
    int s_count = 0;
};
SClassGroup s_class_group(const Discriminant& d, i128 p, const ClassGroupConfig& cfg = {});

struct ReflectionResult {
    int rk_T = 0, rk_S = 0, s_count = 0;
    bool holds = false;
};
ReflectionResult reflection_check(const Discriminant& d, i128 p = 2, const PramConfig& cfg = {});

struct RankInequalityReport {
    int rk_T = 0, rk_Cl = 0, r1 = 0, r2 = 0, s_count = 0;
    bool upper_holds = false; /* rk T <= rk Cl + r1 + r2 - 1 + #S */
    bool lower_holds = false; /* rk Cl <= rk T + r2 + 1 */
};
RankInequalityReport rank_inequalities(const Discriminant& d, i128 p, const PramConfig& cfg = {});

struct TorScanRecord {
    i128 D = 0;  /* negative field discriminant */
    i128 m = 0;
    int vptor = 0;
    double cp = 0;
    std::string error;
};

/* The tor-scan program: fundamental -maxAbs <= D <= -minAbs, vptor =
 * v_p(#Cl_{p^n} / d_1) - (n-1); emits ties of the running maximum. n = 0 selects 20 (p=2), 8 otherwise. */
std::vector<TorScanRecord> tor_scan(i128 p, std::uint64_t minAbs, std::uint64_t maxAbs, int n = 0,
                                    unsigned workers = 1, const ClassGroupConfig& cfg = {});
/* vptor for one field at level n */
int vptor_at(const Discriminant& d, i128 p, int n, const ClassGroupConfig& cfg = {});

struct FamilyRow {
    i128 m = 0;
    AbelianGroupStructure cl_res, cl_ord;
    AbelianGroupStructure tor;
    i128 tor_order = 1;
    double cp = 0;
    std::string error;
};
/* m = prod over the first `count` odd primes of (-1)^((l-1)/2) l, torsion read at level n. */
std::vector<FamilyRow> tor_family(i128 p, int count, int n = 12, const ClassGroupConfig& cfg = {});

} // namespace nt

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "nt/abelian.hpp"
#include "nt/arith.hpp"
#include "nt/forms.hpp"

namespace nt {

struct Discriminant {
    i128 D = 0; /* fundamental discriminant */
    i128 m = 0; /* squarefree radicand */
    int N = 0;  /* number of distinct primes dividing D */

    bool imaginary() const { return D < 0; }
    bool operator==(const Discriminant&) const = default;
};

Discriminant fundamental_discriminant(i128 m);
/* From a discriminant value; throws std::invalid_argument if not fundamental. */
Discriminant discriminant_from_value(i128 D);
bool is_fundamental(i128 D);

struct ClassGroupConfig {
    i128 enumeration_cap = 10000000;      /* |D| bound for reduced-form enumeration */
    i128 bsgs_cap = 10000000000000LL;     /* 10^13 */
    std::uint32_t euler_bound = 65536;    /* primes below this in the L(1,chi) product */
};

/* Reads NT_ENUM_CAP / NT_BSGS_CAP from the environment when set. */
ClassGroupConfig class_group_config_from_env();

/* One Sylow subgroup with discrete logarithms. Elements are canonical
 * reduced forms (for real discriminants: the canonical form of the cycle). */
struct SylowPart {
    i128 p = 0;
    int e = 0;                               /* order p^e of the (narrow) Sylow group */
    std::vector<QuadForm> raw_gens;
    ZMatrix relations;                       /* rows over raw_gens */
    bool tabled = true;                      /* false: cyclic of prime order, no table */
    std::unordered_map<FormKey, std::uint32_t, FormKeyHash> index;
    std::vector<std::vector<std::int32_t>> coords; /* raw coords per indexed element */
};

class ClassGroup {
  public:
    Discriminant disc;
    AbelianGroupStructure structure;   /* the represented group, chain form */
    std::vector<QuadForm> generators;  /* generators[i] has order structure.divisors[i] */
    i128 order_full = 0;               /* order of the represented group */
    i128 ambient_order = 0;            /* order of the group the tables live in */
    bool grh = false;                  /* true when the order came from BSGS */
    std::string method;
    std::optional<i128> only_p;        /* set when only one Sylow subgroup was built */

    /* Coordinates of the class of f w.r.t. `generators`. Requires f to lie in
     * the represented subgroup when only_p is set. */
    std::vector<i128> dlog(const QuadForm& f) const;
    QuadForm element(const std::vector<i128>& coords) const;
    QuadForm canonical(const QuadForm& f) const;
    QuadForm mul(const QuadForm& f, const QuadForm& g) const;
    QuadForm pow(const QuadForm& f, u128 e) const;
    QuadForm one() const;

    /* Quotient by the subgroup generated by the given classes. */
    AbelianGroupStructure quotient_structure(const std::vector<QuadForm>& classes) const;

    /* internal state */
    std::vector<SylowPart> sylows;
    std::vector<ZMatrix> extra_rows;              /* per Sylow, relations beyond the table's */
    std::vector<FiniteAbelianQuotient> quotients; /* per Sylow, after extra relations */
    std::function<QuadForm(const QuadForm&, const QuadForm&)> mul_fn;
    std::function<QuadForm(const QuadForm&)> canon_fn;
};

/* Reduced forms of a negative discriminant, ordered by (a, b). */
std::vector<QuadForm> reduced_forms_imag(i128 D);
i128 class_number_imag(i128 D, const ClassGroupConfig& cfg = {});

ClassGroup class_group_imaginary(const Discriminant& d, const ClassGroupConfig& cfg = {});
/* Only the p-Sylow subgroup (cheaper). */
ClassGroup class_group_imaginary_p(const Discriminant& d, i128 p, const ClassGroupConfig& cfg = {});

/* Real fields: narrow (restricted) and ordinary class groups. */
struct RealCycles {
    i128 D = 0;
    i128 sqrtD = 0;
    std::vector<QuadForm> reduced;                    /* all reduced forms */
    std::unordered_map<FormKey, std::int32_t, FormKeyHash> cycle_of;
    std::vector<QuadForm> canon;                      /* per cycle: minimal form */
    std::vector<std::int32_t> length;                 /* per cycle length */
};
RealCycles real_cycles(i128 D, const ClassGroupConfig& cfg = {});

ClassGroup narrow_class_group_real(const Discriminant& d, const ClassGroupConfig& cfg = {});
ClassGroup ordinary_class_group_real(const Discriminant& d, const ClassGroupConfig& cfg = {});
ClassGroup narrow_class_group_real_p(const Discriminant& d, i128 p, const ClassGroupConfig& cfg = {});

/* Restricted-sense class group for either sign. */
ClassGroup class_group(const Discriminant& d, const ClassGroupConfig& cfg = {});

AbelianGroupStructure p_part(const AbelianGroupStructure& g, i128 p);

struct GenusDelta {
    int N = 0;
    int delta2 = 0;
    int two_rank = 0;
};
GenusDelta genus_delta(const Discriminant& d, const ClassGroupConfig& cfg = {});

/* Class numbers h(D) for every fundamental -maxAbs <= D < 0 by a single sweep
 * over reduced forms; entry |D| holds h, 0 for non-fundamental |D|. */
std::vector<std::uint32_t> class_numbers_imag_upto(std::uint32_t maxAbs, unsigned workers = 1);

double c_kp(i128 h_p, i128 D);

enum class StatKind { genus, raw, p_exponent };

struct ScanStatistic {
    StatKind kind = StatKind::genus;
    double eps = 0.05;
    i128 p = 2;
};

struct ScanRecord {
    i128 D = 0;
    i128 h = 0;
    i128 h_p = 0;    /* p-part of h, p_exponent scans only */
    int N = 0;
    double stat = 0;
    bool prime_disc = false;
    std::optional<AbelianGroupStructure> structure;
    std::string error; /* per-row failure, empty when fine */
};

/* Ascending |D| over fundamental imaginary discriminants in [minAbs, maxAbs]. */
std::vector<ScanRecord> scan_local_maxima(std::uint32_t minAbs, std::uint32_t maxAbs,
                                          const ScanStatistic& st, unsigned workers = 1);

struct PrimeDiscReport {
    bool all_prime = true;
    std::vector<i128> violations;
};
PrimeDiscReport prime_disc_report(const std::vector<ScanRecord>& recs);

struct NormicRow {
    i128 a = 0, b = 0, m = 0;
    i128 D = 0;      /* field discriminant (negative) */
    i128 h = 0, h_p = 0;
    double C = 0;
    AbelianGroupStructure hp_structure;
    std::string error;
};
std::vector<NormicRow> normic_search(i128 p, int rho, i128 q, i128 a_min, i128 a_max,
                                     const ClassGroupConfig& cfg = {});

} // namespace nt

namespace nt {

/* Reduced form attached to a prime ideal of norm l (l split or ramified). */
std::optional<QuadForm> prime_form(i128 D, i128 l);
u64 sqrt_mod_prime(u64 a, u64 p); /* a must be a square mod p */

} // namespace nt

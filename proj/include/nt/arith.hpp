#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nt/int128.hpp"

namespace nt {

/* Raised when factorization or a class group method exceeds its budget. */
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool is_prime(u128 n);

struct FactorConfig {
    u64 trial_bound = 1000000;
    u64 rho_iterations = 50000000; /* per cofactor, summed over restarts */
};

struct Factorization {
    u128 value = 1;
    std::vector<std::pair<u128, int>> factors;

    int omega() const { return (int)factors.size(); }
    std::string str() const;
};

Factorization factor(u128 n, const FactorConfig& cfg = {});

/* n = core * cofactor^2 with core squarefree and of the sign of n. */
std::pair<i128, u128> squarefree_core(i128 n, const FactorConfig& cfg = {});
bool is_squarefree(i128 n, const FactorConfig& cfg = {});

int kronecker(i128 a, i128 n);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 b, u64 e, u64 m);
u64 invmod(u64 a, u64 m); /* throws std::domain_error if not invertible */

std::vector<std::uint32_t> primes_up_to(std::uint32_t n);

/* Smallest-prime-factor table, used to factor many small integers quickly. */
class SmallFactorTable {
  public:
    explicit SmallFactorTable(std::uint32_t limit);
    std::uint32_t limit() const { return limit_; }
    /* distinct primes with exponents; n must be in [1, limit] */
    void factor(std::uint32_t n, std::vector<std::pair<std::uint32_t, int>>& out) const;
    std::uint32_t spf(std::uint32_t n) const { return spf_[n]; }

  private:
    std::uint32_t limit_;
    std::vector<std::uint32_t> spf_;
};

struct PrimeClassSequence {
    u64 p = 0;
    std::vector<u64> primes;
};

PrimeClassSequence primes_in_class(u64 p, std::size_t count);
u64 pi_class_count(u64 x, u64 p);

struct MVReport {
    bool holds = true;
    u64 checked = 0;
    std::optional<u64> first_violation_k;
    std::string which; /* "lower" or "pi" */
};

MVReport mv_bounds_hold(u64 k_max, u64 p);

} // namespace nt

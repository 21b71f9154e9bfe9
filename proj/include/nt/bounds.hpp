#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nt/quadclass.hpp"

namespace nt {

struct BoundParams {
    i128 p = 3;
    double eps = 0.1;
    double O1 = 0.0;          /* aggregate of the unspecified O(1) terms */
    std::optional<double> c;  /* (c + eps) variants */

    double eps_eff() const { return c ? *c + eps : eps; }
    double gamma_p() const;   /* log((p-1)/2) - 1 */
};

struct BoundReport {
    double N = 0;
    double X = 0, X0 = 0, Y0_lower = 0;
    double logC_required = 0;
};

double log_sqrt_disc(double f, i128 p);

/* Factored form N*[...]; throws std::logic_error if the expanded form disagrees beyond 1e-12 |X|. */
double X_of_N(double N, const BoundParams& bp, double Delta);
/* Expanded first line of the same identity. */
double X_of_N_expanded(double N, const BoundParams& bp, double Delta);
double X0_of_N(double N, const BoundParams& bp);

struct N0Result {
    double N0 = 0, X0max = 0;
    double N0_search = 0;     /* golden-section value */
    double rel_error = 0;     /* |N0_search / N0 - 1| */
};
N0Result find_N0(const BoundParams& bp);

/* Lower bound for log C_eps with the gamma''_p terms kept; c_p is the constant of
 * l_k < c_p ((p-1)k) log((p-1)k). */
double Y0_lower(double N, const BoundParams& bp, double delta, double c_p);

double h_eps_threshold(double absD, i128 p, int N, double eps);
double log_h_eps_threshold(double log_absD, i128 p, double N, double eps);

struct StirlingValue {
    double value = 0;
    double error = 0; /* absolute error bound */
};
/* log(N!): direct sum for N <= 10^6, Stirling series beyond. */
StirlingValue stirling_log_factorial(double N);

std::vector<BoundReport> bound_table(const BoundParams& bp, const std::vector<double>& Ns, double Delta,
                                     double delta, double c_p);

enum class EnvelopeQuantity { class_p_part, torsion };

struct EnvelopeInput {
    i128 D = 0;
    i128 quantity = 0; /* #(Cl (x) Z_p) or #T */
};

struct EnvelopeRow {
    i128 D = 0;
    i128 quantity = 0;
    double log_quantity = 0;
    double log_sqrt_disc = 0;
    double excess = 0;   /* log(quantity) - eps log sqrt|D| */
    double envelope = 0; /* running max of excess: the implied log C */
    double C = 0;        /* log(quantity) / log sqrt|D| */
};

struct EnvelopeReport {
    i128 p = 0;
    double eps = 0;
    EnvelopeQuantity quantity = EnvelopeQuantity::class_p_part;
    std::vector<EnvelopeRow> rows;
    double envelope = 0; /* -inf when rows is empty */
};

EnvelopeReport envelope_report(const std::vector<EnvelopeInput>& in, i128 p, double eps, EnvelopeQuantity q);
/* p_exponent scan records carry h_p; others use the p-part of h. */
std::vector<EnvelopeInput> envelope_inputs(const std::vector<ScanRecord>& recs, i128 p);

std::string to_string(EnvelopeQuantity q);

} // namespace nt

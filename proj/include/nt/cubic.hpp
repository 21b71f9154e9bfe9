#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nt/abelian.hpp"
#include "nt/arith.hpp"

namespace nt {

/* Integer polynomial, coefficients from the leading term down. */
using Poly = std::vector<i128>;

std::string poly_str(const Poly& P); /* PARI style: x^3+x^2-2*x-1 */
int poly_degree(const Poly& P);

struct CubicField {
    i128 f = 0;
    int e = 0;     /* v_3(f) */
    i128 a = 0, b = 0; /* 4f = a^2 + 27 b^2 after sign normalization */
    Poly poly;     /* monic cubic */
};

bool is_cubic_conductor(i128 f);
std::vector<CubicField> cubic_polynomials(i128 f);

mpz_class cubic_discriminant(const Poly& P);
bool cubic_irreducible(const Poly& P);
/* Field discriminant equals f^2; throws std::domain_error on reducible input. */
bool discriminant_filter(const CubicField& F);

i128 ambiguous_number(i128 f, i128 p);
std::pair<int, int> rank_window(int N, int p);

/* ---------------------------------------------------------------- fixtures */

struct fixture_parse_error : std::runtime_error {
    std::size_t line = 0, column = 0;
    fixture_parse_error(const std::string& msg, std::size_t line, std::size_t column);
};

struct Fixture {
    i128 p = 0;
    i128 f = 0;            /* conductor (cyclic fields of degree p) */
    i128 m = 0;            /* radicand for quadratic rows, 0 otherwise */
    bool f_inferred = false;
    int N = 0;             /* omega of the conductor / discriminant */
    std::optional<int> N_printed;
    Poly poly;
    AbelianGroupStructure cl;          /* Cl, or Clres for quadratic rows */
    std::optional<AbelianGroupStructure> cl_ord;
    std::string cl_split;              /* text after "Cl=[..]=", kept verbatim */
    std::optional<AbelianGroupStructure> tor;
    std::optional<i128> tor_order;
    std::optional<double> cp;
    bool starred = false;
    bool star_convention = false; /* the source table marks rows with '*' */
    std::string source;
    std::size_t line = 0;

    bool quadratic() const { return m != 0; }
    /* log of the square root of |D|: ((p-1)/2) log f, or (1/2) log |D| */
    double log_sqrt_disc() const;
};

/* One line of the class-table grammar. Context p/f apply to lines without them. */
Fixture parse_fixture_line(const std::string& text, i128 p_context = 0, i128 f_context = 0);

std::vector<Fixture> parse_fixture_stream(std::istream& in, const std::string& source = "<stream>");
std::vector<Fixture> load_fixture_file(const std::string& path);
/* All *.txt under fixtures/p<val>/ and fixtures/tor/, sorted by path. */
std::vector<Fixture> load_fixture_dir(const std::string& root);

struct FixtureReport {
    bool ok = true;
    int delta = 0, Delta = 0;
    std::vector<std::string> failures;
    std::vector<std::string> notes; /* star-convention and split mismatches */
};

FixtureReport validate_fixture(const Fixture& fx);
/* (delta, Delta); throws std::domain_error if either is negative */
std::pair<int, int> delta_from_fixture(const Fixture& fx);

/* Generic key=value row ("D=-23 h=3 hp=3 C=0.70"); wrapped lines joined by the caller. */
struct TableRow {
    std::vector<std::pair<std::string, std::string>> fields;
    std::optional<std::string> get(const std::string& key) const;
};
TableRow parse_table_row(const std::string& text);
/* Rows of a table file; lines without '=' or starting with "(" are skipped,
 * indented lines are appended to the previous row. */
std::vector<TableRow> load_table_file(const std::string& path);

} // namespace nt

#include "nt/pram.hpp"

#include <stdexcept>

namespace nt {

FundamentalUnit fundamental_unit(i128 m, std::uint64_t max_steps)
{
    if (m < 2 || squarefree_core(m).first != m) throw std::invalid_argument("fundamental_unit: m > 1 squarefree required");
    const Discriminant d = fundamental_discriminant(m);
    const mpz_class D = to_mpz(d.D);
    const mpz_class b0 = d.D % 2 == 0 ? 0 : 1;
    mpz_class sq;
    mpz_sqrt(sq.get_mpz_t(), D.get_mpz_t());
    /* omega = (b0 + sqrt D)/2 = (P + sqrt D)/Q */
    mpz_class P = b0, Q = 2;
    mpz_class h1 = 1, h2 = 0, k1 = 0, k2 = 1; /* h_{-1}, h_{-2}, k_{-1}, k_{-2} */
    const mpz_class Nw = (b0 * b0 - D) / 4;
    for (std::uint64_t step = 0; step < max_steps; ++step) {
        mpz_class a;
        if (Q > 0)
            mpz_fdiv_q(a.get_mpz_t(), mpz_class(P + sq).get_mpz_t(), Q.get_mpz_t());
        else
            mpz_fdiv_q(a.get_mpz_t(), mpz_class(P + sq + 1).get_mpz_t(), Q.get_mpz_t());
        const mpz_class h = a * h1 + h2, k = a * k1 + k2;
        h2 = h1; h1 = h;
        k2 = k1; k1 = k;
        /* N(h - k omega) */
        const mpz_class N = h * h - b0 * h * k + Nw * k * k;
        if (N == 1 || N == -1) {
            FundamentalUnit u;
            u.x = 2 * h - k * b0;
            u.y = k;
            u.norm = N == 1 ? 1 : -1;
            if (u.x * u.x - D * u.y * u.y != 4 * N) throw std::logic_error("fundamental_unit: norm check failed");
            return u;
        }
        P = a * Q - P;
        Q = (D - P * P) / Q;
    }
    throw budget_error("fundamental_unit: regulator exceeds the step budget");
}

namespace {

/* gamma = (X + Y sqrt D) / Z */
struct Mult {
    mpz_class X = 1, Y = 0, Z = 1;

    void normalize()
    {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), X.get_mpz_t(), Y.get_mpz_t());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), Z.get_mpz_t());
        if (Z < 0) g = -g;
        if (g != 1) {
            X /= g; Y /= g; Z /= g;
        }
    }
    std::size_t bits() const
    {
        return mpz_sizeinbase(X.get_mpz_t(), 2) + mpz_sizeinbase(Y.get_mpz_t(), 2) + mpz_sizeinbase(Z.get_mpz_t(), 2);
    }
};

Mult mult_mul(const Mult& u, const Mult& v, const mpz_class& D)
{
    Mult r;
    r.X = u.X * v.X + D * u.Y * v.Y;
    r.Y = u.X * v.Y + u.Y * v.X;
    r.Z = u.Z * v.Z;
    r.normalize();
    return r;
}

/* ideal(a,b,c) = (theta/c) ideal(c,-b,a), theta = (-b + sqrt D)/2 */
void swap_step(Mult& g, const QuadForm& f, const mpz_class& D)
{
    const mpz_class b = to_mpz(f.b), c = to_mpz(f.c);
    Mult r;
    r.X = -b * g.X + D * g.Y;
    r.Y = g.X - b * g.Y;
    r.Z = 2 * c * g.Z;
    r.normalize();
    g = r;
}

struct Tracked {
    QuadForm f;
    Mult g; /* ideal(original)^k = g * ideal(f) */
};

class Powerer {
  public:
    Powerer(const Discriminant& d, std::uint64_t max_bits)
        : D_(d.D), Dz_(to_mpz(d.D)), max_bits_(max_bits)
    {
        if (D_ > 0) sqrtD_ = (i128)isqrt((u128)D_);
    }

    Tracked reduce(Tracked t) const
    {
        if (D_ < 0) {
            auto normalize = [](QuadForm& g) {
                if (-g.a < g.b && g.b <= g.a) return;
                i128 k = fdiv<i128>(g.a - g.b, 2 * g.a);
                g.c = g.c + k * (g.b + g.a * k);
                g.b = g.b + 2 * g.a * k;
            };
            normalize(t.f);
            while (t.f.a > t.f.c || (t.f.a == t.f.c && t.f.b < 0)) {
                swap_step(t.g, t.f, Dz_);
                t.f = {t.f.c, -t.f.b, t.f.a};
                normalize(t.f);
            }
        } else {
            std::uint64_t guard = 0;
            while (!is_reduced_real(t.f, sqrtD_)) {
                rho(t);
                if (++guard > 100000) throw std::logic_error("principal_power: reduction does not terminate");
            }
        }
        check(t.g);
        return t;
    }

    Tracked mul(const Tracked& x, const Tracked& y) const
    {
        i128 d1 = 1;
        Tracked r;
        r.f = compose_raw(x.f, y.f, &d1);
        r.g = mult_mul(x.g, y.g, Dz_);
        r.g.X *= to_mpz(d1);
        r.g.Y *= to_mpz(d1);
        r.g.normalize();
        return reduce(r);
    }

    void rho(Tracked& t) const
    {
        swap_step(t.g, t.f, Dz_);
        t.f = rho_real(t.f, D_, sqrtD_);
    }

    /* walk the cycle of a reduced indefinite form to one with |a| = 1 */
    void to_principal(Tracked& t) const
    {
        const QuadForm start = t.f;
        std::uint64_t steps = 0;
        while (t.f.a != 1 && t.f.a != -1) {
            rho(t);
            check(t.g);
            if (t.f == start || ++steps > 100000000ULL) throw std::domain_error("principal_power: ideal is not principal");
        }
    }

    void check(const Mult& g) const
    {
        if (g.bits() > max_bits_) throw budget_error("principal_power: generator exceeds the bit budget");
    }

    i128 D_, sqrtD_ = 0;
    mpz_class Dz_;
    std::uint64_t max_bits_;
};

QuadForm lift_coprime(const QuadForm& f, i128 p, Mult& g, const mpz_class& D)
{
    if (p == 0 || f.a % p != 0) return f;
    const i128 k = f.c % p == 0 ? 1 : 0;
    /* translate by k, then swap */
    QuadForm t{f.a, f.b - 2 * f.a * k, f.a * k * k - f.b * k + f.c};
    swap_step(g, t, D);
    QuadForm r{t.c, -t.b, t.a};
    if (r.a % p == 0) throw std::logic_error("lift_coprime: lifted form still divisible by p");
    return r;
}

} // namespace

PrincipalPower principal_power(const Discriminant& d, const QuadForm& f0, u128 e, i128 avoid_p, std::uint64_t max_bits)
{
    if (f0.disc() != d.D) throw std::invalid_argument("principal_power: discriminant mismatch");
    const mpz_class Dz = to_mpz(d.D);
    Mult lift;
    const QuadForm f = lift_coprime(f0, avoid_p, lift, Dz);
    (void)lift; /* the lift only changes the representative, not the class */

    Powerer P(d, max_bits);
    const i128 b0 = pmod<i128>(d.D, 2);
    Tracked acc{identity_form<i128>(d.D), Mult{}};
    Tracked base{f, Mult{}};
    u128 k = e;
    while (k) {
        if (k & 1) acc = P.mul(acc, base);
        k >>= 1;
        if (k) base = P.mul(base, base);
    }
    if (d.D < 0) {
        if (acc.f.a != 1) throw std::domain_error("principal_power: ideal is not principal");
    } else {
        P.to_principal(acc);
    }
    /* ideal(f)^e = gamma * ideal(acc.f) and ideal(acc.f) = O */
    const Mult& g = acc.g;
    mpz_class U = b0 ? g.X - g.Y : g.X, V = 2 * g.Y;
    if (!mpz_divisible_p(U.get_mpz_t(), g.Z.get_mpz_t()) || !mpz_divisible_p(V.get_mpz_t(), g.Z.get_mpz_t()))
        throw std::logic_error("principal_power: generator is not integral");
    PrincipalPower out;
    out.form = f;
    out.u = U / g.Z;
    out.v = V / g.Z;

    const mpz_class A = to_mpz(b0);
    const mpz_class B = b0 ? mpz_class((Dz - 1) / 4) : mpz_class(Dz / 4);
    const mpz_class N = out.u * out.u + A * out.u * out.v - B * out.v * out.v;
    mpz_class Na;
    mpz_pow_ui(Na.get_mpz_t(), to_mpz(abs128(f.a)).get_mpz_t(), (unsigned long)e);
    if (N != Na && N != -Na) throw std::logic_error("principal_power: norm check failed");
    return out;
}

} // namespace nt

#include "nt/cubic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace nt {

fixture_parse_error::fixture_parse_error(const std::string& msg, std::size_t line_, std::size_t column_)
    : std::runtime_error("line " + std::to_string(line_) + ", column " + std::to_string(column_) + ": " + msg),
      line(line_), column(column_)
{
}

double Fixture::log_sqrt_disc() const
{
    if (quadratic()) {
        i128 D = pmod<i128>(m, 4) == 1 ? m : 4 * m;
        return 0.5 * std::log((double)abs128(D));
    }
    return 0.5 * (double)(p - 1) * std::log((double)f);
}

namespace {

std::string trim(const std::string& s)
{
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct KeyHit {
    std::string key;
    size_t start;     /* position of the key */
    size_t value;     /* first character after '=' */
};

const char* const kKeys[] = {"Structure of Tor", "#Tor", "Clres", "Clord", "Cl", "Cp", "N", "P", "f", "m", "p"};

std::vector<KeyHit> scan_keys(const std::string& s)
{
    std::vector<KeyHit> hits;
    for (size_t i = 0; i < s.size(); ++i) {
        for (const char* k : kKeys) {
            const size_t len = std::char_traits<char>::length(k);
            if (s.compare(i, len, k) != 0) continue;
            if (len == 1 && i > 0 && !std::isspace((unsigned char)s[i - 1])) continue;
            if (len > 1 && i > 0 && std::isalpha((unsigned char)s[i - 1])) continue;
            size_t j = i + len;
            while (j < s.size() && s[j] == ' ') ++j;
            if (j >= s.size() || s[j] != '=') continue;
            hits.push_back({k, i, j + 1});
            i = j;
            break;
        }
    }
    return hits;
}

i128 parse_int_at(const std::string& v, size_t line, size_t col)
{
    std::string t = trim(v);
    if (!t.empty() && t[0] == '+') t = t.substr(1);
    try {
        return parse_i128(t);
    } catch (const std::exception&) {
        throw fixture_parse_error("expected an integer, got '" + v + "'", line, col);
    }
}

/* "[6,6,3,3]" at the start of v; returns the structure and the index past ']' */
AbelianGroupStructure parse_bracket(const std::string& v, size_t& pos, size_t line, size_t col)
{
    while (pos < v.size() && v[pos] == ' ') ++pos;
    if (pos >= v.size() || v[pos] != '[') throw fixture_parse_error("expected '['", line, col + pos);
    size_t close = v.find(']', pos);
    if (close == std::string::npos) throw fixture_parse_error("unterminated '['", line, col + pos);
    std::vector<i128> d;
    std::string inner = v.substr(pos + 1, close - pos - 1);
    std::stringstream ss(inner);
    std::string item;
    size_t off = pos + 1;
    while (std::getline(ss, item, ',')) {
        std::string t = trim(item);
        if (t.empty()) {
            if (inner.find_first_not_of(' ') == std::string::npos) break;
            throw fixture_parse_error("empty entry in list", line, col + off);
        }
        d.push_back(parse_int_at(t, line, col + off));
        if (d.back() < 1) throw fixture_parse_error("non-positive invariant", line, col + off);
        off += item.size() + 1;
    }
    pos = close + 1;
    std::vector<i128> chain;
    for (i128 x : d)
        if (x != 1) chain.push_back(x);
    for (size_t i = 1; i < chain.size(); ++i)
        if (chain[i - 1] % chain[i] != 0) throw fixture_parse_error("invariants do not form a divisor chain", line, col);
    return AbelianGroupStructure{chain};
}

Poly parse_poly(const std::string& text, size_t line, size_t col)
{
    std::string s;
    for (char c : text)
        if (!std::isspace((unsigned char)c)) s += c;
    if (s.empty()) throw fixture_parse_error("empty polynomial", line, col);
    std::map<int, i128> terms;
    size_t i = 0;
    while (i < s.size()) {
        const size_t t0 = i;
        i128 sign = 1;
        if (s[i] == '+' || s[i] == '-') { sign = s[i] == '-' ? -1 : 1; ++i; }
        size_t d0 = i;
        while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
        i128 coef = 1;
        bool have_coef = i > d0;
        if (have_coef) coef = parse_int_at(s.substr(d0, i - d0), line, col + d0);
        int ex = 0;
        if (i < s.size() && s[i] == '*') {
            ++i;
            if (i >= s.size() || s[i] != 'x') throw fixture_parse_error("expected 'x' after '*'", line, col + i);
        }
        if (i < s.size() && s[i] == 'x') {
            ++i;
            ex = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                size_t e0 = i;
                while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
                if (i == e0) throw fixture_parse_error("expected exponent", line, col + i);
                ex = std::stoi(s.substr(e0, i - e0));
            }
        } else if (!have_coef) {
            throw fixture_parse_error("unexpected character '" + std::string(1, s[t0]) + "' in polynomial", line, col + t0);
        }
        if (i < s.size() && s[i] != '+' && s[i] != '-')
            throw fixture_parse_error("unexpected character '" + std::string(1, s[i]) + "' in polynomial", line, col + i);
        terms[ex] += sign * coef;
    }
    int deg = terms.rbegin()->first;
    Poly P(deg + 1, 0);
    for (auto& [e, c] : terms) P[deg - e] = c;
    return P;
}

i128 infer_cubic_conductor(const Poly& P)
{
    if (P.size() != 4 || P[0] != 1) return 0;
    if (P[1] == 1 || P[1] == -1) return 1 - 3 * P[2];
    if (P[1] == 0) return -3 * P[2];
    return 0;
}

int omega_of(i128 n) { return factor((u128)abs128(n)).omega(); }

struct Partial {
    Fixture fx;
    std::string poly_text;
    size_t poly_col = 0;
    bool have_cl = false;
};

void apply_keys(Partial& pt, const std::string& s, const std::vector<KeyHit>& hits, size_t lineno)
{
    for (size_t h = 0; h < hits.size(); ++h) {
        const auto& k = hits[h];
        size_t end = h + 1 < hits.size() ? hits[h + 1].start : s.size();
        std::string v = s.substr(k.value, end - k.value);
        const size_t col = k.value + 1;
        Fixture& fx = pt.fx;
        if (k.key == "p") {
            fx.p = parse_int_at(v, lineno, col);
        } else if (k.key == "f") {
            std::string t = trim(v);
            size_t eq = t.find('=');
            fx.f = parse_int_at(t.substr(0, eq), lineno, col);
            if (eq != std::string::npos) {
                i128 prod = 1;
                std::stringstream ss(t.substr(eq + 1));
                std::string q;
                while (std::getline(ss, q, '*')) prod *= parse_int_at(q, lineno, col + eq + 1);
                if (prod != fx.f) throw fixture_parse_error("conductor factorization does not multiply out", lineno, col);
            }
        } else if (k.key == "N") {
            fx.N_printed = (int)parse_int_at(v, lineno, col);
        } else if (k.key == "m") {
            fx.m = parse_int_at(v, lineno, col);
        } else if (k.key == "P") {
            pt.poly_text = v;
            pt.poly_col = col;
        } else if (k.key == "Cl" || k.key == "Clres") {
            size_t pos = 0;
            fx.cl = parse_bracket(v, pos, lineno, col);
            std::string rest = trim(v.substr(pos));
            if (!rest.empty() && rest.back() == '*') {
                fx.starred = true;
                rest = trim(rest.substr(0, rest.size() - 1));
            }
            if (!rest.empty() && rest[0] == '=') fx.cl_split = trim(rest.substr(1));
            else if (!rest.empty()) throw fixture_parse_error("trailing text after class group: '" + rest + "'", lineno, col + pos);
            pt.have_cl = true;
        } else if (k.key == "Clord") {
            size_t pos = 0;
            fx.cl_ord = parse_bracket(v, pos, lineno, col);
        } else if (k.key == "Structure of Tor") {
            size_t pos = 0;
            fx.tor = parse_bracket(v, pos, lineno, col);
        } else if (k.key == "#Tor") {
            fx.tor_order = parse_int_at(v, lineno, col);
        } else if (k.key == "Cp") {
            try {
                fx.cp = std::stod(trim(v));
            } catch (const std::exception&) {
                throw fixture_parse_error("expected a decimal after Cp=", lineno, col);
            }
        }
    }
}

void finish(Partial& pt, size_t lineno)
{
    Fixture& fx = pt.fx;
    if (!pt.poly_text.empty()) fx.poly = parse_poly(pt.poly_text, lineno, pt.poly_col);
    if (fx.m != 0) {
        i128 D = pmod<i128>(fx.m, 4) == 1 ? fx.m : 4 * fx.m;
        fx.N = omega_of(D);
        return;
    }
    if (fx.f == 0 && !fx.poly.empty() && fx.p == 3) {
        fx.f = infer_cubic_conductor(fx.poly);
        fx.f_inferred = fx.f != 0;
    }
    if (fx.f > 0) fx.N = omega_of(fx.f);
}

bool skip_line(const std::string& t)
{
    if (t.empty()) return true;
    if (t[0] == '(') return true;
    if (t[0] == '#' && t.rfind("#Tor", 0) != 0) return true;
    return false;
}

} // namespace

Fixture parse_fixture_line(const std::string& text, i128 p_context, i128 f_context)
{
    Partial pt;
    pt.fx.p = p_context;
    auto hits = scan_keys(text);
    if (hits.empty()) throw fixture_parse_error("no key=value field found", 1, 1);
    if (!trim(text.substr(0, hits[0].start)).empty())
        throw fixture_parse_error("unexpected text before first field", 1, 1);
    apply_keys(pt, text, hits, 1);
    if (pt.fx.f == 0 && pt.fx.m == 0 && !pt.poly_text.empty()) pt.fx.f = f_context;
    finish(pt, 1);
    pt.fx.line = 1;
    return pt.fx;
}

std::vector<Fixture> parse_fixture_stream(std::istream& in, const std::string& source)
{
    std::vector<Fixture> out;
    std::optional<Partial> cur;
    i128 p_ctx = 0, f_ctx = 0;
    std::string line;
    size_t lineno = 0, cur_line = 0;

    auto close = [&]() {
        if (!cur) return;
        finish(*cur, cur_line);
        if (!cur->have_cl) throw fixture_parse_error("record without class group", cur_line, 1);
        cur->fx.source = source;
        cur->fx.line = cur_line;
        out.push_back(std::move(cur->fx));
        cur.reset();
    };

    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (skip_line(t)) continue;
        auto hits = scan_keys(line);
        const std::string prefix = trim(line.substr(0, hits.empty() ? line.size() : hits[0].start));
        if (!prefix.empty()) {
            if ((prefix[0] == '+' || prefix[0] == '-') && cur && !cur->poly_text.empty() && !cur->have_cl) {
                cur->poly_text += prefix;
            } else {
                throw fixture_parse_error("unrecognized text '" + prefix + "'", lineno, line.find(prefix) + 1);
            }
        }
        if (hits.empty()) continue;

        auto has = [&](const char* k) {
            return std::any_of(hits.begin(), hits.end(), [&](const KeyHit& h) { return h.key == k; });
        };
        const bool header = has("p");
        const bool starts = has("f") || has("m") || has("P");
        if (header) {
            close();
            Partial tmp;
            apply_keys(tmp, line, hits, lineno);
            p_ctx = tmp.fx.p;
            f_ctx = tmp.fx.f;
            if (!has("P") && !has("m") && !has("Cl")) continue;
        }
        if (starts) {
            close();
            cur.emplace();
            cur->fx.p = p_ctx;
            cur_line = lineno;
            apply_keys(*cur, line, hits, lineno);
            if (cur->fx.f == 0 && cur->fx.m == 0) cur->fx.f = f_ctx;
            if (cur->fx.p == 0) throw fixture_parse_error("record before any p= header", lineno, 1);
            continue;
        }
        if (!cur) throw fixture_parse_error("field outside any record", lineno, hits[0].start + 1);
        apply_keys(*cur, line, hits, lineno);
    }
    close();
    const bool stars = std::any_of(out.begin(), out.end(), [](const Fixture& f) { return f.starred; });
    for (auto& f : out) f.star_convention = stars;
    return out;
}

std::vector<Fixture> load_fixture_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture file " + path);
    return parse_fixture_stream(in, path);
}

std::vector<Fixture> load_fixture_dir(const std::string& root)
{
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (auto& sub : fs::directory_iterator(root)) {
        if (!sub.is_directory()) continue;
        const std::string name = sub.path().filename().string();
        const bool pdir = name.size() > 1 && name[0] == 'p' &&
                          std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit((unsigned char)c); });
        if (!pdir && name != "tor") continue;
        for (auto& f : fs::directory_iterator(sub.path()))
            if (f.path().extension() == ".txt") files.push_back(f.path().string());
    }
    std::sort(files.begin(), files.end());
    std::vector<Fixture> all;
    for (auto& f : files) {
        auto v = load_fixture_file(f);
        all.insert(all.end(), v.begin(), v.end());
    }
    return all;
}

namespace {

/* order of q modulo p, i.e. the residue degree of q in Q(mu_p) */
int residue_degree(i128 q, i128 p)
{
    if (p == 2) return 1;
    i128 x = pmod<i128>(q, p);
    int k = 1;
    i128 y = x;
    while (y != 1) {
        y = y * x % p;
        ++k;
    }
    return k;
}

/* "[13]x[3,3,3,3,3]" -> product of orders, nullopt if not of that shape */
std::optional<i128> split_order(const std::string& s)
{
    i128 total = 1;
    size_t pos = 0;
    bool any = false;
    while (pos < s.size()) {
        if (s[pos] == 'x' || s[pos] == ' ') { ++pos; continue; }
        if (s[pos] != '[') return std::nullopt;
        try {
            total *= parse_bracket(s, pos, 0, 0).order();
        } catch (const std::exception&) {
            return std::nullopt;
        }
        any = true;
    }
    if (!any) return std::nullopt;
    return total;
}

} // namespace

FixtureReport validate_fixture(const Fixture& fx)
{
    FixtureReport rep;
    auto fail = [&](const std::string& s) { rep.ok = false; rep.failures.push_back(s); };
    const i128 p = fx.p;
    if (p < 2 || !is_prime((u128)p)) { fail("p is not prime"); return rep; }
    if (!fx.quadratic() && fx.f <= 0) { fail("conductor unknown"); return rep; }
    const int N = fx.N;
    if (fx.N_printed && *fx.N_printed != N)
        fail("printed N=" + std::to_string(*fx.N_printed) + " but omega(f)=" + std::to_string(N));

    if (!fx.quadratic()) {
        for (auto& [q, k] : factor((u128)fx.f).factors) {
            if ((i128)q == p) {
                if (k != 2 || p == 2) fail("bad power of p in the conductor");
            } else if (k != 1 || (i128)(q % (u128)p) != 1) {
                fail("conductor prime " + to_string(q) + " is not 1 mod p or not simple");
            }
        }
        if (poly_degree(fx.poly) != (int)p) fail("polynomial degree differs from p");
        else if (fx.poly[0] != 1) fail("polynomial is not monic");
        else if (p == 3) {
            CubicField F;
            F.f = fx.f;
            F.poly = fx.poly;
            try {
                if (!discriminant_filter(F)) fail("polynomial discriminant is not f^2 times a square");
            } catch (const std::exception& e) {
                fail(e.what());
            }
        }
    }

    const AbelianGroupStructure Gp = fx.cl.p_part(p);
    const int rk = Gp.rank(p), v = Gp.vp(p);
    auto [lo, hi] = rank_window(N, (int)p);
    if (rk < lo || rk > hi)
        fail("p-rank " + std::to_string(rk) + " outside [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
    if (v < N - 1) fail("p^(N-1) does not divide the p-class number");
    for (auto& [q, k] : factor((u128)fx.cl.order()).factors) {
        if ((i128)q == p) continue;
        const int dim = fx.cl.rank((i128)q);
        const int fq = residue_degree((i128)q, p);
        if (dim % fq != 0)
            fail(to_string(q) + "-rank " + std::to_string(dim) + " is not a multiple of the residue degree " +
                 std::to_string(fq));
    }
    rep.delta = rk - (N - 1);
    rep.Delta = v - (N - 1);
    if (rep.delta < 0 || rep.Delta < rep.delta) fail("delta/Delta inconsistent");

    if (fx.cl_ord) {
        i128 r = fx.cl.order() / fx.cl_ord->order();
        if (fx.cl.order() % fx.cl_ord->order() != 0 || (r != 1 && r != 2))
            fail("narrow class number is not h or 2h");
    }
    if (fx.tor && fx.tor_order && fx.tor->order() != *fx.tor_order) fail("#Tor differs from the order of Tor");
    if (fx.cp) {
        if (!fx.tor_order) fail("Cp printed without #Tor");
        else {
            const double c = std::log((double)*fx.tor_order) / fx.log_sqrt_disc();
            if (std::fabs(c - *fx.cp) > 1e-6 * std::fabs(*fx.cp))
                fail("Cp recomputed as " + std::to_string(c));
        }
    }

    const bool expect_star = p == 2 ? rep.Delta > 0 : rep.delta > 0;
    if (fx.star_convention && fx.starred != expect_star)
        rep.notes.push_back(std::string("star marker ") + (fx.starred ? "present" : "absent") +
                            " but delta=" + std::to_string(rep.delta) + ", Delta=" + std::to_string(rep.Delta));
    if (!fx.cl_split.empty()) {
        auto so = split_order(fx.cl_split);
        if (so && *so != fx.cl.order())
            rep.notes.push_back("decomposition " + fx.cl_split + " has order " + to_string(*so) + ", not " +
                                to_string(fx.cl.order()));
    }
    return rep;
}

std::pair<int, int> delta_from_fixture(const Fixture& fx)
{
    const AbelianGroupStructure Gp = fx.cl.p_part(fx.p);
    const int d = Gp.rank(fx.p) - (fx.N - 1);
    const int D = Gp.vp(fx.p) - (fx.N - 1);
    if (d < 0 || D < 0) throw std::domain_error("Chevalley violation: negative delta for f=" + to_string(fx.f));
    return {d, D};
}

/* ---------------------------------------------------------------- key=value tables */

std::optional<std::string> TableRow::get(const std::string& key) const
{
    for (auto& [k, v] : fields)
        if (k == key) return v;
    return std::nullopt;
}

TableRow parse_table_row(const std::string& text)
{
    TableRow row;
    std::vector<std::pair<size_t, size_t>> keys; /* key start, '=' position */
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '=') continue;
        size_t j = i;
        while (j > 0 && text[j - 1] == ' ') --j;
        size_t k = j;
        while (k > 0 && (std::isalnum((unsigned char)text[k - 1]) || text[k - 1] == '#')) --k;
        if (k == j) continue;
        if (k > 0 && text[k - 1] != ' ' && text[k - 1] != ',') continue;
        keys.emplace_back(k, i);
    }
    for (size_t n = 0; n < keys.size(); ++n) {
        auto [ks, eq] = keys[n];
        size_t end = n + 1 < keys.size() ? keys[n + 1].first : text.size();
        std::string key = trim(text.substr(ks, eq - ks));
        std::string val = trim(text.substr(eq + 1, end - eq - 1));
        if (!val.empty() && val.back() == ',') val.pop_back();
        row.fields.emplace_back(key, val);
    }
    return row;
}

std::vector<TableRow> load_table_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open table file " + path);
    std::vector<std::string> joined;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '(') continue;
        if (std::isspace((unsigned char)line[0]) && !joined.empty() && t.find('=') != std::string::npos &&
            joined.back().find('=') != std::string::npos) {
            joined.back() += " " + t;
            continue;
        }
        joined.push_back(t);
    }
    std::vector<TableRow> rows;
    for (auto& j : joined)
        if (j.find('=') != std::string::npos) rows.push_back(parse_table_row(j));
    return rows;
}

} // namespace nt

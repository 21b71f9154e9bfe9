#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nt/arith.hpp"
#include "nt/bounds.hpp"
#include "nt/cubic.hpp"
#include "nt/filtration.hpp"
#include "nt/pram.hpp"
#include "nt/quadclass.hpp"

using namespace nt;

namespace {

using Cell = std::variant<std::string, i128, double, bool>;

struct Table {
    std::vector<std::string> cols;
    std::vector<std::vector<Cell>> rows;
    bool failed = false;
    void add(std::vector<Cell> r) { rows.push_back(std::move(r)); }
};

std::string fmt_double(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.20g", x);
    return buf;
}

std::string csv_cell(const Cell& c)
{
    if (auto s = std::get_if<std::string>(&c)) {
        if (s->find_first_of(",\"\n") == std::string::npos) return *s;
        std::string q = "\"";
        for (char ch : *s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    if (auto v = std::get_if<i128>(&c)) return to_string(*v);
    if (auto d = std::get_if<double>(&c)) return fmt_double(*d);
    return std::get<bool>(c) ? "true" : "false";
}

nlohmann::json json_cell(const Cell& c)
{
    if (auto s = std::get_if<std::string>(&c)) return *s;
    if (auto v = std::get_if<i128>(&c)) {
        if (*v >= INT64_MIN && *v <= INT64_MAX) return (std::int64_t)*v;
        return to_string(*v);
    }
    if (auto d = std::get_if<double>(&c)) return *d;
    return std::get<bool>(c);
}

struct Output {
    std::string format = "csv";
    std::string path;
};

void emit(const Table& t, const Output& o, const std::string& command, const std::map<std::string, std::string>& cfg)
{
    std::ofstream file;
    if (!o.path.empty()) {
        file.open(o.path);
        if (!file) throw std::runtime_error("cannot open " + o.path);
    }
    std::ostream& out = o.path.empty() ? std::cout : file;
    if (o.format == "json") {
        nlohmann::json j;
        j["tool"] = "ntk";
        j["version"] = NT_VERSION;
        j["command"] = command;
        j["config"] = cfg;
        j["columns"] = t.cols;
        j["rows"] = nlohmann::json::array();
        for (auto& r : t.rows) {
            nlohmann::json row = nlohmann::json::object();
            for (std::size_t i = 0; i < r.size() && i < t.cols.size(); ++i) row[t.cols[i]] = json_cell(r[i]);
            j["rows"].push_back(row);
        }
        out << j.dump(2) << "\n";
        return;
    }
    out << "# ntk " << NT_VERSION << " " << command << "\n";
    for (auto& [k, v] : cfg) out << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < t.cols.size(); ++i) out << (i ? "," : "") << t.cols[i];
    out << "\n";
    for (auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_cell(r[i]);
        out << "\n";
    }
}

std::map<std::string, std::string> config_of(CLI::App* sub)
{
    std::map<std::string, std::string> cfg;
    for (const CLI::Option* opt : sub->get_options()) {
        std::string name = opt->get_name();
        if (name.empty() || name == "--help" || name == "-h") continue;
        while (!name.empty() && name.front() == '-') name.erase(0, 1);
        std::string v;
        if (opt->count()) {
            for (auto& r : opt->results()) v += (v.empty() ? "" : " ") + r;
        } else {
            v = opt->get_default_str();
        }
        cfg[name] = v;
    }
    const ClassGroupConfig cg = class_group_config_from_env();
    cfg["enum_cap"] = to_string(cg.enumeration_cap);
    cfg["bsgs_cap"] = to_string(cg.bsgs_cap);
    return cfg;
}

i128 arg_i128(const std::string& s)
{
    try {
        return parse_i128(s);
    } catch (const std::exception&) {
        throw CLI::ValidationError("integer", "cannot parse '" + s + "'");
    }
}

std::string chain(const std::vector<int>& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "]";
}

std::string chain(const std::vector<i128>& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
    return s + "]";
}

std::string fixture_dir_default()
{
    if (const char* e = std::getenv("NT_FIXTURE_DIR")) return e;
    return NT_FIXTURE_DIR;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Class groups, cyclic fields and p-ramification experiments"};
    app.set_version_flag("--version", std::string("ntk ") + NT_VERSION);
    app.require_subcommand(1);

    Output out;
    auto common = [&](CLI::App* s) {
        s->add_option("--format", out.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        s->add_option("--output,-o", out.path, "output file (default stdout)");
    };
    unsigned workers = 1;
    auto with_workers = [&](CLI::App* s) { s->add_option("--workers", workers)->check(CLI::Range(1u, 256u))->capture_default_str(); };

    std::string p_s = "2", eps_s, min_s, max_s, f_s, D_s;
    double eps = 0.05, o1 = 0, c_p = 1;
    std::uint64_t count = 20, samples = 1000, seed = 1;
    int n_level = 0, N_param = 3, rho = 1, delta_param = 0;
    std::string stat = "genus", path, summands, q_s = "0", amin_s = "1", amax_s = "1000";
    std::vector<double> Ns;

    auto* primes = app.add_subcommand("primes", "primes l = 1 mod p, optionally the Montgomery-Vaughan check");
    std::uint64_t mv_kmax = 0;
    primes->add_option("--p", p_s)->capture_default_str();
    primes->add_option("--count", count)->capture_default_str();
    primes->add_option("--mv-kmax", mv_kmax, "check both bounds for k <= K instead")->capture_default_str();
    common(primes);

    auto* qscan = app.add_subcommand("quad-scan", "class groups of imaginary fundamental discriminants");
    qscan->add_option("--min-d", min_s)->default_str("3");
    qscan->add_option("--max-d", max_s)->required();
    common(qscan);

    auto* qmax = app.add_subcommand("quad-maxima", "successive maxima of a class number statistic");
    qmax->add_option("--stat", stat)->check(CLI::IsMember({"genus", "raw", "p_exponent"}))->capture_default_str();
    qmax->add_option("--eps", eps)->capture_default_str();
    qmax->add_option("--p", p_s)->capture_default_str();
    qmax->add_option("--min-d", min_s)->default_str("3");
    qmax->add_option("--max-d", max_s)->required();
    common(qmax);
    with_workers(qmax);

    auto* cenum = app.add_subcommand("cubic-enum", "cyclic cubic polynomials of conductor f");
    cenum->add_option("--f", f_s)->required();
    common(cenum);

    auto* cval = app.add_subcommand("cubic-validate", "arithmetic checks of one fixture table");
    cval->add_option("--file", path)->required()->check(CLI::ExistingFile);
    common(cval);

    auto* frun = app.add_subcommand("filtration-run", "filtration of a module");
    frun->add_option("--D", D_s, "quadratic discriminant (2-part, sigma = -1)");
    frun->add_option("--p", p_s)->capture_default_str();
    frun->add_option("--summands", summands, "group ring summands a:b;a:b for Z[x]/(p^a, (x-1)^b)");
    frun->add_option("--N", N_param, "number of ramified primes (0 infers)")->capture_default_str();
    common(frun);

    auto* fmc = app.add_subcommand("filtration-mc", "Monte Carlo over synthesized modules");
    fmc->add_option("--p", p_s)->capture_default_str();
    fmc->add_option("--N", N_param)->capture_default_str();
    fmc->add_option("--samples", samples)->capture_default_str();
    fmc->add_option("--seed", seed)->capture_default_str();
    common(fmc);
    with_workers(fmc);

    auto* tscan = app.add_subcommand("tor-scan", "vptor successive maxima over imaginary fields");
    tscan->add_option("--p", p_s)->capture_default_str();
    tscan->add_option("--min-d", min_s)->required();
    tscan->add_option("--max-d", max_s)->required();
    tscan->add_option("--n", n_level, "ray level (0: 20 for p=2, 8 otherwise)")->capture_default_str();
    common(tscan);
    with_workers(tscan);

    auto* tfam = app.add_subcommand("tor-family", "torsion along m = prod (-1)^((l-1)/2) l");
    int fam_n = 12;
    tfam->add_option("--p", p_s)->capture_default_str();
    tfam->add_option("--count", count)->capture_default_str();
    tfam->add_option("--n", fam_n)->capture_default_str();
    common(tfam);

    auto* trep = app.add_subcommand("tor-report", "stabilized torsion group of one field");
    trep->add_option("--D", D_s, "discriminant or radicand")->required();
    trep->add_option("--p", p_s)->capture_default_str();
    common(trep);

    auto* refl = app.add_subcommand("reflection-check", "rank identity for imaginary fields, p = 2");
    refl->add_option("--max-d", max_s)->required();
    common(refl);

    auto* normic = app.add_subcommand("normic-search", "class groups along normic families");
    normic->add_option("--p", p_s)->capture_default_str();
    normic->add_option("--rho", rho)->capture_default_str();
    normic->add_option("--q", q_s)->capture_default_str();
    normic->add_option("--a-min", amin_s)->capture_default_str();
    normic->add_option("--a-max", amax_s)->capture_default_str();
    common(normic);

    auto* bnds = app.add_subcommand("bounds", "X(N), X0(N), N0 and the lower bound Y0");
    bnds->add_option("--p", p_s)->capture_default_str();
    bnds->add_option("--eps", eps)->capture_default_str();
    bnds->add_option("--o1", o1)->capture_default_str();
    bnds->add_option("--delta", delta_param, "Delta (upper form) and delta (lower form)")->capture_default_str();
    bnds->add_option("--c-p", c_p)->capture_default_str();
    bnds->add_option("--N", Ns, "levels to tabulate");
    common(bnds);

    auto* fchk = app.add_subcommand("fixtures-check", "parse and validate every fixture table");
    std::string fdir = fixture_dir_default();
    fchk->add_option("--dir", fdir)->capture_default_str();
    common(fchk);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();
    const ClassGroupConfig cg = class_group_config_from_env();
    Table t;
    try {
        const i128 p = arg_i128(p_s);
        if (p < 2 || !is_prime((u128)p)) throw std::invalid_argument("--p must be a prime");
        if (cmd == "primes") {
            if (mv_kmax) {
                const MVReport r = mv_bounds_hold(mv_kmax, (u64)p);
                t.cols = {"p", "k_max", "checked", "holds", "first_violation", "which"};
                t.add({p, (i128)mv_kmax, (i128)r.checked, r.holds,
                       r.first_violation_k ? to_string((i128)*r.first_violation_k) : std::string(), r.which});
                t.failed = !r.holds;
            } else {
                const auto seq = primes_in_class((u64)p, count);
                t.cols = {"k", "l"};
                for (std::size_t i = 0; i < seq.primes.size(); ++i) t.add({(i128)(i + 1), (i128)seq.primes[i]});
            }
        } else if (cmd == "quad-scan") {
            const i128 lo = arg_i128(min_s.empty() ? "3" : min_s), hi = arg_i128(max_s);
            t.cols = {"D", "h", "structure", "two_rank", "N", "method", "error"};
            for (i128 a = lo; a <= hi; ++a) {
                if (!is_fundamental(-a)) continue;
                try {
                    const Discriminant d = discriminant_from_value(-a);
                    const ClassGroup G = class_group_imaginary(d, cg);
                    t.add({-a, G.order_full, G.structure.str(), (i128)G.structure.rank(2), (i128)d.N, G.method, std::string()});
                } catch (const budget_error& e) {
                    t.add({-a, (i128)0, std::string(), (i128)0, (i128)0, std::string(), std::string(e.what())});
                }
            }
        } else if (cmd == "quad-maxima") {
            ScanStatistic st;
            st.kind = stat == "genus" ? StatKind::genus : (stat == "raw" ? StatKind::raw : StatKind::p_exponent);
            st.eps = eps;
            st.p = p;
            const i128 lo = arg_i128(min_s.empty() ? "3" : min_s), hi = arg_i128(max_s);
            if (hi > (i128)UINT32_MAX) throw budget_error("quad-maxima: --max-d beyond 2^32");
            const auto recs = scan_local_maxima((std::uint32_t)lo, (std::uint32_t)hi, st, workers);
            t.cols = {"D", "h", "h_p", "N", "C", "prime_disc", "error"};
            for (auto& r : recs) t.add({r.D, r.h, r.h_p, (i128)r.N, r.stat, r.prime_disc, r.error});
        } else if (cmd == "cubic-enum") {
            const i128 f = arg_i128(f_s);
            t.cols = {"f", "a", "b", "polynomial", "discriminant"};
            for (auto& F : cubic_polynomials(f))
                t.add({F.f, F.a, F.b, poly_str(F.poly), cubic_discriminant(F.poly).get_str()});
        } else if (cmd == "cubic-validate" || cmd == "fixtures-check") {
            const auto fx = cmd == "cubic-validate" ? load_fixture_file(path) : load_fixture_dir(fdir);
            t.cols = {"source", "line", "p", "f", "m", "ok", "delta", "Delta", "failures", "notes"};
            for (auto& x : fx) {
                const FixtureReport r = validate_fixture(x);
                std::string fails, notes;
                for (auto& s : r.failures) fails += (fails.empty() ? "" : "; ") + s;
                for (auto& s : r.notes) notes += (notes.empty() ? "" : "; ") + s;
                t.add({x.source, (i128)x.line, x.p, x.f, x.m, r.ok, (i128)r.delta, (i128)r.Delta, fails, notes});
                if (!r.ok) t.failed = true;
            }
        } else if (cmd == "filtration-run") {
            FinitePModule M;
            if (!D_s.empty()) {
                M = from_quadratic(discriminant_from_value(arg_i128(D_s)), cg);
            } else {
                if (summands.empty()) throw CLI::ValidationError("filtration-run", "--D or --summands required");
                std::vector<std::pair<int, int>> sm;
                std::stringstream ss(summands);
                std::string item;
                while (std::getline(ss, item, ';')) {
                    const auto c = item.find(':');
                    if (c == std::string::npos) throw CLI::ValidationError("--summands", "expected a:b");
                    sm.push_back({std::stoi(item.substr(0, c)), std::stoi(item.substr(c + 1))});
                }
                M = group_ring_module(p, sm, N_param);
            }
            const FiltrationResult it = filtration(M, 0, FiltrationMethod::iterated);
            const bool agree = filtrations_agree(M);
            const auto rd = rank_from_t(M.p, it.N, it.t);
            t.cols = {"p", "N", "structure", "chain", "m", "t", "Delta", "rank", "delta", "pr_ranks", "methods_agree",
                      "order_identity"};
            t.add({M.p, (i128)it.N, module_structure(M).str(), chain(it.chain), (i128)it.m, chain(it.t),
                   (i128)it.Delta(), (i128)rd.first, (i128)rd.second, chain(pr_ranks(M.p, it.N, it.t)), agree,
                   order_identity_check(it)});
            t.failed = !agree || !order_identity_check(it);
        } else if (cmd == "filtration-mc") {
            const DeltaHistogram h = monte_carlo(p, N_param, samples, seed, {}, workers);
            t.cols = {"kind", "value", "count"};
            for (auto& [k, v] : h.Delta) t.add({std::string("Delta"), (i128)k, (i128)v});
            for (auto& [k, v] : h.delta) t.add({std::string("delta"), (i128)k, (i128)v});
            t.add({std::string("failures"), (i128)0, (i128)h.failures});
            t.add({std::string("disagreements"), (i128)0, (i128)h.disagreements});
            t.add({std::string("identity_failures"), (i128)0, (i128)h.identity_failures});
            t.failed = h.disagreements || h.identity_failures;
        } else if (cmd == "tor-scan") {
            const auto recs = tor_scan(p, (std::uint64_t)arg_i128(min_s), (std::uint64_t)arg_i128(max_s), n_level,
                                       workers, cg);
            t.cols = {"D", "m", "vptor", "Cp", "error"};
            for (auto& r : recs) t.add({r.D, r.m, (i128)r.vptor, r.cp, r.error});
        } else if (cmd == "tor-family") {
            const auto rows = tor_family(p, (int)count, fam_n, cg);
            t.cols = {"m", "Clres", "Clord", "Tor", "tor_order", "Cp", "error"};
            for (auto& r : rows) t.add({r.m, r.cl_res.str(), r.cl_ord.str(), r.tor.str(), r.tor_order, r.cp, r.error});
        } else if (cmd == "tor-report") {
            const i128 x = arg_i128(D_s);
            const Discriminant d = is_fundamental(x) ? discriminant_from_value(x) : fundamental_discriminant(x);
            const TorsionReport r = tor_report(d, p, PramConfig{cg, 0});
            t.cols = {"D", "p", "n_stable", "T_structure", "vp", "W", "c_tilde"};
            t.add({d.D, p, (i128)r.stabilized_level, r.tor_structure.str(), (i128)r.vp, r.w_order, r.c_tilde});
        } else if (cmd == "reflection-check") {
            const i128 hi = arg_i128(max_s);
            t.cols = {"D", "rk_T", "rk_S", "s_count", "holds"};
            for (i128 a = 3; a <= hi; ++a) {
                if (!is_fundamental(-a)) continue;
                const ReflectionResult r = reflection_check(discriminant_from_value(-a), 2, PramConfig{cg, 0});
                t.add({-a, (i128)r.rk_T, (i128)r.rk_S, (i128)r.s_count, r.holds});
                if (!r.holds) t.failed = true;
            }
        } else if (cmd == "normic-search") {
            const auto rows = normic_search(p, rho, arg_i128(q_s), arg_i128(amin_s), arg_i128(amax_s), cg);
            t.cols = {"a", "b", "m", "D", "h", "h_p", "C", "structure", "error"};
            for (auto& r : rows) t.add({r.a, r.b, r.m, r.D, r.h, r.h_p, r.C, r.hp_structure.str(), r.error});
        } else if (cmd == "bounds") {
            BoundParams bp;
            bp.p = p;
            bp.eps = eps;
            bp.O1 = o1;
            const N0Result n0 = find_N0(bp);
            if (Ns.empty()) Ns = {10, 100, 1000, 10000, n0.N0};
            t.cols = {"N", "X", "X0", "Y0_lower", "N0", "X0max", "N0_search_rel_error"};
            for (const BoundReport& r : bound_table(bp, Ns, delta_param, delta_param, c_p))
                t.add({r.N, r.X, r.X0, r.Y0_lower, n0.N0, n0.X0max, n0.rel_error});
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "ntk: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ntk: " << e.what() << "\n";
        return 2;
    } catch (const budget_error& e) {
        std::cerr << "ntk: budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "ntk: " << e.what() << "\n";
        return 1;
    }
    emit(t, out, cmd, config_of(sub));
    return t.failed ? 1 : 0;
}

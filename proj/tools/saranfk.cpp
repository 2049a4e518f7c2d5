// saranfk: evaluate special functions, verify the identity registry and
// render reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "saranfk/measures.hpp"
#include "saranfk/qkernels.hpp"
#include "saranfk/registry.hpp"
#include "saranfk/report.hpp"
#include "saranfk/series.hpp"

using namespace saranfk;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// "1.5", "-2e-3", "0.3+0.1i", "-0.2i", "(0.3,0.1)".
Complex parse_complex(const std::string& s) {
    static const std::regex pair(R"(\(\s*([^,]+?)\s*,\s*([^)]+?)\s*\))");
    static const std::regex rect(
        R"(([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?(?:([+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)i)?)");
    std::smatch m;
    try {
        if (std::regex_match(s, m, pair)) return {std::stod(m[1]), std::stod(m[2])};
        if (!s.empty() && std::regex_match(s, m, rect) && (m[1].matched || m[2].matched)) {
            const double re = m[1].matched ? std::stod(m[1]) : 0.0;
            double im = 0.0;
            if (m[2].matched) {
                const std::string t = m[2];
                im = (t == "+" || t == "-") ? (t == "+" ? 1.0 : -1.0) : std::stod(t);
            }
            return {re, im};
        }
        // a pure imaginary without sign, e.g. "0.5i"
        if (s.size() > 1 && s.back() == 'i') return {0.0, std::stod(s.substr(0, s.size() - 1))};
    } catch (const std::exception&) {
    }
    throw UsageError("cannot read '" + s + "' as a complex number");
}

std::vector<Complex> parse_list(const std::string& s) {
    std::vector<Complex> out;
    if (s.empty()) return out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_complex(item));
    return out;
}

std::string show(Complex z) {
    char buf[80];
    if (z.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.16g", z.real());
    } else {
        std::snprintf(buf, sizeof buf, "%.16g%+.16gi", z.real(), z.imag());
    }
    return buf;
}

/// --name value pairs left over after the subcommand options.
class NamedArgs {
public:
    explicit NamedArgs(const std::vector<std::string>& raw) {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            std::string k = raw[i];
            if (k.rfind("--", 0) != 0) throw UsageError("unexpected argument '" + k + "'");
            k = k.substr(2);
            if (auto eq = k.find('='); eq != std::string::npos) {
                args_[k.substr(0, eq)] = k.substr(eq + 1);
            } else {
                if (i + 1 >= raw.size()) throw UsageError("--" + k + " needs a value");
                args_[k] = raw[++i];
            }
        }
    }

    const std::string& text(const std::string& k) const {
        auto it = args_.find(k);
        if (it == args_.end()) throw UsageError("missing --" + k);
        used_.insert(k);
        return it->second;
    }
    std::string text_or(const std::string& k, const std::string& fallback) const {
        return args_.count(k) ? text(k) : fallback;
    }
    Complex c(const std::string& k) const { return parse_complex(text(k)); }
    std::vector<Complex> list(const std::string& k) const { return parse_list(text(k)); }
    std::vector<Complex> list_or_empty(const std::string& k) const {
        return args_.count(k) ? list(k) : std::vector<Complex>{};
    }
    double real(const std::string& k, double fallback) const {
        if (!args_.count(k)) return fallback;
        const Complex v = c(k);
        if (v.imag() != 0.0) throw UsageError("--" + k + " must be real");
        return v.real();
    }
    int integer(const std::string& k) const {
        const double v = real(k, std::nan(""));
        if (std::isnan(v) || v != std::floor(v)) throw UsageError("--" + k + " must be an integer");
        return static_cast<int>(v);
    }
    void check_all_used() const {
        for (const auto& [k, v] : args_) {
            if (!used_.count(k)) throw UsageError("unknown option --" + k);
        }
    }

private:
    std::map<std::string, std::string> args_;
    mutable std::set<std::string> used_;
};

FkParams fk_params(const NamedArgs& a) {
    return {a.c("alpha1"), a.c("alpha2"), a.c("beta1"), a.c("beta2"), a.c("gamma1"), a.c("gamma2"), a.c("gamma3")};
}

struct EvalOut {
    Complex value;
    std::optional<SeriesResult> series;
};

EvalOut evaluate(const std::string& fn, const NamedArgs& a) {
    const double tol = a.real("tol", kDefaultSeriesTol);
    auto qctx = [&] { return QContext(a.real("q", 0.5)); };
    auto series = [](SeriesResult r) { return EvalOut{r.value, r}; };

    if (fn == "2f1") return series(gauss_2f1(a.c("a"), a.c("b"), a.c("c"), a.c("z"), tol));
    if (fn == "pfq") return series(phi_pfq(a.list("a"), a.list_or_empty("b"), a.c("z"), tol));
    if (fn == "f2") {
        return series(appell_f2(a.c("a"), a.c("b1"), a.c("b2"), a.c("c1"), a.c("c2"), a.c("x"), a.c("y"), tol));
    }
    if (fn == "fk") {
        const FkParams p = fk_params(a);
        const std::string form = a.text_or("form", "triple");
        if (form == "triple") return series(saran_fk_triple(p, a.c("x"), a.c("y"), a.c("z"), tol));
        if (form == "reexpand") return series(saran_fk_reexpand(p, a.c("x"), a.c("y"), a.c("z"), tol));
        throw UsageError("--form must be triple or reexpand");
    }
    if (fn == "fk_L") return series(fk_L(a.c("a1"), a.c("a2"), a.list("b"), a.list("c"), a.list("z"), tol));
    if (fn == "phik") {
        const FkParams p = fk_params(a);
        const QContext ctx = qctx();
        const std::string form = a.text_or("form", "both");
        if (form == "both") return series(phi_k_q(p, a.c("x"), a.c("y"), a.c("z"), ctx, tol));
        if (form == "triple") return series(phi_k_q_triple(p, a.c("x"), a.c("y"), a.c("z"), ctx, tol));
        if (form == "reexpand") return series(phi_k_q_reexpand(p, a.c("x"), a.c("y"), a.c("z"), ctx, tol));
        throw UsageError("--form must be both, triple or reexpand");
    }
    if (fn == "rphis") return series(rphis(a.list("a"), a.list_or_empty("b"), a.c("z"), qctx(), tol));
    if (fn == "phi3") {
        Phi3Spec s;
        const std::pair<const char*, std::vector<Complex>*> groups[] = {
            {"a", &s.a}, {"b", &s.b}, {"b1", &s.b1}, {"b2", &s.b2}, {"c", &s.c},   {"c1", &s.c1}, {"c2", &s.c2},
            {"e", &s.e}, {"g", &s.g}, {"g1", &s.g1}, {"g2", &s.g2}, {"h", &s.h}, {"h1", &s.h1}, {"h2", &s.h2}};
        for (auto [name, v] : groups) *v = a.list_or_empty(name);
        return series(phi3(s, a.c("x"), a.c("y"), a.c("z"), qctx(), tol));
    }
    if (fn == "qgamma") return {q_gamma(a.c("x"), qctx()), std::nullopt};
    if (fn == "qbeta") return {q_beta(a.c("x"), a.c("y"), qctx()), std::nullopt};
    if (fn == "measure-moment") {
        const std::string kind = a.text_or("kind", "dirichlet");
        MeasureSpec spec;
        if (kind == "dirichlet") {
            spec = MeasureSpec::dirichlet(a.c("alpha"), a.c("beta"));
        } else if (kind == "hypergeometric") {
            spec = MeasureSpec::hypergeometric(a.c("alpha"), a.c("beta"), a.c("gamma"), a.c("eta"));
        } else {
            throw UsageError("--kind must be dirichlet or hypergeometric");
        }
        const int ell = a.integer("ell");
        const int order = static_cast<int>(a.real("order", default_quadrature_order()));
        return {integrate_measure([ell](double t) { return Complex(std::pow(t, ell)); }, spec, order), std::nullopt};
    }
    if (fn == "q-moment") {
        const std::string kind = a.text_or("kind", "q-dirichlet");
        QMeasureSpec spec;
        if (kind == "q-dirichlet") {
            spec = QMeasureSpec::q_dirichlet(a.c("alpha"), a.c("beta"));
        } else if (kind == "q-hypergeometric") {
            spec = QMeasureSpec::q_hypergeometric(a.c("alpha"), a.c("beta"), a.c("gamma"), a.c("eta"));
        } else {
            throw UsageError("--kind must be q-dirichlet or q-hypergeometric");
        }
        return {q_moment(spec, a.integer("ell"), qctx()), std::nullopt};
    }
    throw UsageError("unknown function '" + fn + "'");
}

int cmd_eval(const std::string& fn, const std::vector<std::string>& raw) {
    const NamedArgs args(raw);
    const EvalOut r = evaluate(fn, args);
    args.check_all_used();
    std::cout << "value: " << show(r.value) << '\n';
    if (r.series) {
        std::cout << "terms_used: " << r.series->terms_used << '\n'
                  << "converged: " << (r.series->converged ? "true" : "false") << '\n';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", r.series->est_trunc_error);
        std::cout << "est_trunc_error: " << buf << '\n';
        if (r.series->cross_check_residual) {
            std::snprintf(buf, sizeof buf, "%.3e", *r.series->cross_check_residual);
            std::cout << "cross_check_residual: " << buf << '\n';
        }
    }
    return 0;
}

struct VerifyArgs {
    std::string identities = "all";
    std::uint64_t seed = 42;
    int samples = 0;
    std::optional<double> tol;
    std::vector<double> q;
    std::string format = "json";
    std::string output;
};

std::vector<const IdentityCase*> select(const std::string& spec) {
    std::vector<const IdentityCase*> out;
    if (spec == "all") {
        for (const auto& c : builtin_registry()) out.push_back(&c);
        return out;
    }
    std::set<std::string> wanted;
    std::stringstream in(spec);
    std::string id;
    while (std::getline(in, id, ',')) {
        if (id.empty()) continue;
        try {
            lookup(id);
        } catch (const RangeError&) {
            throw UsageError("unknown identity '" + id + "'");
        }
        wanted.insert(id);
    }
    if (wanted.empty()) throw UsageError("no identities selected");
    for (const auto& c : builtin_registry()) {
        if (wanted.count(c.id)) out.push_back(&c);
    }
    return out;
}

void emit(const VerifyArgs& v, const std::function<void(std::ostream&)>& write) {
    if (v.output.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream f(v.output);
    if (!f) throw UsageError("cannot open " + v.output + " for writing");
    write(f);
}

int cmd_verify(const VerifyArgs& v) {
    const ReportFormat fmt = parse_report_format(v.format);
    const auto cases = select(v.identities);
    if (v.samples < 0) throw UsageError("--samples must be non-negative");
    for (double q : v.q) {
        if (!(q > 0.0 && q < 1.0)) throw UsageError("--q values must lie in (0,1)");
    }
    std::vector<ReportRecord> records;
    for (const IdentityCase* c : cases) {
        const int n = v.samples > 0 ? v.samples : default_samples(c->cost_class);
        VerifyOptions o;
        o.tol_override = v.tol;
        if (c->uses_q && !v.q.empty()) {
            for (double q : v.q) {
                o.q = q;
                records.push_back(to_record(verify_identity(*c, v.seed, n, o)));
            }
        } else {
            records.push_back(to_record(verify_identity(*c, v.seed, n, o)));
        }
    }
    emit(v, [&](std::ostream& out) { write_report(out, records, fmt); });
    for (const auto& r : records) {
        if (!r.pass) return kExitFail;
    }
    return 0;
}

int cmd_list(const std::string& format) {
    const ReportFormat fmt = parse_report_format(format);
    const auto& reg = builtin_registry();
    if (fmt == ReportFormat::Json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : reg) {
            arr.push_back({{"id", c.id},
                           {"anchor", c.anchor},
                           {"cost_class", to_string(c.cost_class)},
                           {"tol", c.tol},
                           {"uses_q", c.uses_q}});
        }
        std::cout << arr.dump() << '\n';
        return 0;
    }
    for (const auto& c : reg) {
        char tol[16];
        std::snprintf(tol, sizeof tol, "%.0e", c.tol);
        if (fmt == ReportFormat::Csv) {
            std::cout << c.id << ",\"" << c.anchor << "\"," << to_string(c.cost_class) << ',' << tol << '\n';
        } else {
            std::printf("%-24s %-44s %-16s %s\n", c.id.c_str(), c.anchor.c_str(), to_string(c.cost_class), tol);
        }
    }
    return 0;
}

int cmd_report(const std::string& input, const VerifyArgs& v) {
    const ReportFormat fmt = parse_report_format(v.format);
    std::ifstream in(input);
    if (!in) throw UsageError("cannot read " + input);
    const auto records = read_report(in);
    emit(v, [&](std::ostream& out) { write_report(out, records, fmt); });
    for (const auto& r : records) {
        if (!r.pass) return kExitFail;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hypergeometric and basic hypergeometric identity harness"};
    app.require_subcommand(1);

    auto* eval = app.add_subcommand("eval", "Evaluate a function at a point; parameters go as --name value");
    std::string fn;
    eval->add_option("function", fn,
                     "2f1 | pfq | f2 | fk | fk_L | phik | rphis | phi3 | qgamma | qbeta | measure-moment | q-moment")
        ->required();
    eval->allow_extras();
    eval->prefix_command();

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Verify registry identities at sampled parameters");
    verify->add_option("--identities", va.identities, "Comma-separated ids or 'all'")->capture_default_str();
    verify->add_option("--seed", va.seed, "Sampler seed")->capture_default_str();
    verify->add_option("--samples", va.samples, "Samples per identity (default depends on the cost class)");
    verify->add_option("--tol", va.tol, "Override every tolerance");
    verify->add_option("--q", va.q, "Base for q-identities; repeat for a sweep")->allow_extra_args(false);
    verify->add_option("--format", va.format, "json | csv | human")->capture_default_str();
    verify->add_option("--output", va.output, "Write the report here instead of stdout");

    std::string list_format = "human";
    auto* list = app.add_subcommand("list", "List the registry");
    list->add_option("--format", list_format, "json | csv | human")->capture_default_str();

    std::string report_in;
    VerifyArgs ra;
    ra.format = "human";
    auto* report = app.add_subcommand("report", "Render a json-lines report in another format");
    report->add_option("input", report_in, "json-lines report")->required();
    report->add_option("--format", ra.format, "json | csv | human")->capture_default_str();
    report->add_option("--output", ra.output, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*eval) return cmd_eval(fn, eval->remaining());
        if (*verify) return cmd_verify(va);
        if (*list) return cmd_list(list_format);
        if (*report) return cmd_report(report_in, ra);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PoleError& e) {
        std::cerr << "pole: " << e.what() << '\n';
        return kExitUsage;
    } catch (const RangeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFail;
    }
    return kExitUsage;
}

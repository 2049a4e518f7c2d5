#include "saranfk/report.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>

#include "json.hpp"

namespace saranfk {

namespace {

using json = nlohmann::ordered_json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_inf(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

// Real entries stay plain numbers, complex ones become [re, im].
json complex_map(const std::map<std::string, Complex>& m) {
    json o = json::object();
    for (const auto& [k, v] : m) {
        if (v.imag() == 0.0) {
            o[k] = number(v.real());
        } else {
            o[k] = json::array({number(v.real()), number(v.imag())});
        }
    }
    return o;
}

std::map<std::string, Complex> read_complex_map(const json& o) {
    std::map<std::string, Complex> m;
    for (const auto& [k, v] : o.items()) {
        if (v.is_array()) {
            m[k] = Complex(v.at(0).get<double>(), v.at(1).get<double>());
        } else {
            m[k] = v.get<double>();
        }
    }
    return m;
}

std::string sci(double v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string q_suffix(double q) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "@q=%g", q);
    return buf;
}

}  // namespace

ReportFormat parse_report_format(const std::string& s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    if (s == "human") return ReportFormat::Human;
    throw RangeError("unknown report format '" + s + "'");
}

ReportRecord to_record(const VerificationResult& r) {
    ReportRecord rec;
    rec.id = r.q ? r.id + q_suffix(*r.q) : r.id;
    rec.anchor = r.anchor;
    rec.q = r.q;
    rec.samples = r.samples;
    rec.max_rel_residual = r.max_rel_residual;
    rec.cost_class = r.cost_class;
    rec.pass = r.pass;
    rec.wall_time_ms = r.wall_time_ms;
    for (const auto& f : r.failures) rec.failures.push_back({f.params, f.residual, f.diagnostic});
    return rec;
}

std::string to_json_line(const ReportRecord& r) {
    json failures = json::array();
    for (const auto& f : r.failures) {
        failures.push_back({{"params", {{"values", complex_map(f.params.values)},
                                        {"arguments", complex_map(f.params.arguments)}}},
                            {"residual", number(f.residual)}});
    }
    json j = {{"id", r.id},
              {"anchor", r.anchor},
              {"q", r.q ? json(*r.q) : json(nullptr)},
              {"samples", r.samples},
              {"max_rel_residual", number(r.max_rel_residual)},
              {"pass", r.pass},
              {"wall_time_ms", number(r.wall_time_ms)},
              {"failures", failures}};
    return j.dump();
}

ReportRecord from_json_line(const std::string& line) {
    try {
        const json j = json::parse(line);
        ReportRecord r;
        r.id = j.at("id").get<std::string>();
        r.anchor = j.at("anchor").get<std::string>();
        if (!j.at("q").is_null()) r.q = j.at("q").get<double>();
        r.samples = j.at("samples").get<int>();
        r.max_rel_residual = number_or_inf(j.at("max_rel_residual"));
        r.pass = j.at("pass").get<bool>();
        try {
            r.cost_class = lookup(r.id.substr(0, r.id.find('@'))).cost_class;
        } catch (const RangeError&) {
        }
        r.wall_time_ms = number_or_inf(j.at("wall_time_ms"));
        for (const auto& f : j.at("failures")) {
            ReportFailure rf;
            const json& p = f.at("params");
            rf.params.values = read_complex_map(p.at("values"));
            rf.params.arguments = read_complex_map(p.at("arguments"));
            rf.residual = number_or_inf(f.at("residual"));
            r.failures.push_back(std::move(rf));
        }
        return r;
    } catch (const json::exception& e) {
        throw RangeError(std::string("malformed report record: ") + e.what());
    }
}

void write_report(std::ostream& out, const std::vector<ReportRecord>& records, ReportFormat fmt) {
    switch (fmt) {
        case ReportFormat::Json:
            for (const auto& r : records) out << to_json_line(r) << '\n';
            break;
        case ReportFormat::Csv:
            out << "id,anchor,q,cost_class,samples,max_rel_residual,pass,wall_time_ms,failures\n";
            for (const auto& r : records) {
                char q[32] = "";
                if (r.q) std::snprintf(q, sizeof q, "%g", *r.q);
                char res[32], ms[32];
                std::snprintf(res, sizeof res, "%.17g", r.max_rel_residual);
                std::snprintf(ms, sizeof ms, "%.3f", r.wall_time_ms);
                out << csv_field(r.id) << ',' << csv_field(r.anchor) << ',' << q << ',' << to_string(r.cost_class) << ',' << r.samples << ',' << res
                    << ',' << (r.pass ? "true" : "false") << ',' << ms << ',' << r.failures.size() << '\n';
            }
            break;
        case ReportFormat::Human:
            for (const auto& r : records) {
                char line[256];
                std::snprintf(line, sizeof line, "%-4s %-28s max residual %s  samples %d  %-15s %.0f ms  [%s]",
                              r.pass ? "PASS" : "FAIL", r.id.c_str(), sci(r.max_rel_residual).c_str(), r.samples,
                              to_string(r.cost_class),
                              r.wall_time_ms, r.anchor.c_str());
                out << line << '\n';
                for (const auto& f : r.failures) {
                    out << "       residual " << sci(f.residual);
                    if (!f.diagnostic.empty()) out << "  " << f.diagnostic;
                    out << '\n';
                }
            }
            break;
    }
}

std::vector<ReportRecord> read_report(std::istream& in) {
    std::vector<ReportRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(from_json_line(line));
    }
    return out;
}

}  // namespace saranfk

#pragma once

// Report records for verification runs and their json-lines, csv and
// human-readable renderings.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "saranfk/registry.hpp"

namespace saranfk {

enum class ReportFormat { Json, Csv, Human };

/// Throws RangeError for anything but "json", "csv" or "human".
ReportFormat parse_report_format(const std::string& s);

struct ReportFailure {
    ParameterPoint params;
    double residual = 0.0;
    std::string diagnostic;  // human format only
};

struct ReportRecord {
    std::string id;  // q-identities carry an "@q=<q>" suffix
    std::string anchor;
    std::optional<double> q;
    CostClass cost_class = CostClass::Cheap;  // not part of the json record
    int samples = 0;
    double max_rel_residual = 0.0;
    bool pass = false;
    double wall_time_ms = 0.0;
    std::vector<ReportFailure> failures;
};

ReportRecord to_record(const VerificationResult& r);

/// One json object, no trailing newline. Non-finite numbers become null.
std::string to_json_line(const ReportRecord& r);
/// Inverse of to_json_line; null residuals read back as +infinity.
ReportRecord from_json_line(const std::string& line);

void write_report(std::ostream& out, const std::vector<ReportRecord>& records, ReportFormat fmt);
/// Reads json lines, skipping blank lines. Throws RangeError on bad input.
std::vector<ReportRecord> read_report(std::istream& in);

}  // namespace saranfk

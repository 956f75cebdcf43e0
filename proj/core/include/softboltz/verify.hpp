#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "softboltz/config.hpp"

namespace softboltz {

enum class Status { pass, fail, info };
std::string to_string(Status s);

/// One report line: `id status measured bound anchor`.
struct CriterionResult {
    std::string id;
    Status status = Status::info;
    double measured = 0.0;
    double bound = 0.0;
    std::string anchor;

    std::string line() const;
};

struct Lemma41Row {
    int field = 0;
    int n = 0;
    std::string mode;
    double lhs_minus = 0.0, rhs_minus = 0.0;
    double lhs_plus = 0.0, rhs_plus = 0.0;
};

struct VerifyReport {
    std::vector<CriterionResult> rows;
    std::vector<Lemma41Row> lemma41;

    /// No row has status fail.
    bool passed() const noexcept;
    std::vector<std::string> failures() const;
    std::string to_text() const;
    /// field,n,mode,operator,lhs,rhs_core,ratio
    std::string lemma41_csv() const;
};

struct VerifyOptions {
    int threads = 1;
    /// Criteria to run (1..13); empty runs all of them.
    std::set<int> only;
    /// Progress messages; never part of the report.
    std::ostream* log = nullptr;
};

/// Runs the acceptance suite on `config`. The report depends on the config
/// only, never on the thread count.
VerifyReport run_verify(const RunConfig& config, const VerifyOptions& options);

/// Cut-down config used by the determinism criterion: every grid at
/// `determinism_n` (coarse partner two nodes below), two fields and two windows.
RunConfig determinism_config(const RunConfig& config);

} // namespace softboltz

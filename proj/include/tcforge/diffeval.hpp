#pragma once

#include "tcforge/core.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tcforge {

/// One problem's differential re-judging summary. Invariants:
/// before = both + only_original, after = both + only_ai.
struct DiffRow {
    std::string problem_id;
    int before = 0;
    int after = 0;
    int both = 0;
    int only_original = 0;
    int only_ai = 0;
};

/// Throws SubmissionSetMismatch if the row's counting identities do not hold.
void check_identities(const DiffRow& row);

/// Failure-fraction buckets for previously full-passing solutions.
enum class Bucket { B0, B1, B2, B3, B4 };

const char* bucket_label(Bucket b); // "0%", "0.1-10%", "10.1-25%", "25.1-50%", "50+%"

struct BucketDistribution {
    std::map<Bucket, int> counts;
    int undefined = 0; // rows with before == 0, excluded from the distribution
};

struct VerdictHistogram {
    int wa = 0;
    int tle = 0;
    int mle = 0;
    int re = 0;
    int unattributed = 0; // newly-failed without any non-AC test (e.g. compile failure)

    int total_attributed() const { return wa + tle + mle + re; }
    void add(Verdict v);
};

/// Counts full passes per suite over an aligned submission corpus.
/// Throws SubmissionSetMismatch when the two lists do not cover the same
/// submission ids.
DiffRow diff_problem(const std::string& problem_id,
                     const std::vector<SuiteResult>& results_original,
                     const std::vector<SuiteResult>& results_ai);

/// Fraction buckets, closed on the right: 0 -> B0, (0,10%] -> B1,
/// (10%,25%] -> B2, (25%,50%] -> B3, above -> B4. Undefined when before == 0.
std::optional<Bucket> bucket_of(int before, int only_original);

BucketDistribution bucket_distribution(const std::vector<DiffRow>& rows);

/// For each submission that fully passed the original suite but not the AI
/// suite, attributes the verdict of its lowest-index non-AC test in the AI
/// result and tallies per verdict.
VerdictHistogram verdict_histogram(const std::vector<SuiteResult>& results_original,
                                   const std::vector<SuiteResult>& results_ai);

enum class ReportFormat { markdown_table, csv, json };

ReportFormat report_format_from_string(const std::string& s);

/// Deterministic serialization; rows ordered by problem_id.
std::string render_report(std::vector<DiffRow> rows,
                          const std::vector<std::pair<std::string, BucketDistribution>>& distributions,
                          const std::vector<std::pair<std::string, VerdictHistogram>>& histograms,
                          ReportFormat format);

} // namespace tcforge

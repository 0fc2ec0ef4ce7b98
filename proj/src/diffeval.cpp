#include "tcforge/diffeval.hpp"

#include "tcforge/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <sstream>

namespace tcforge {

using nlohmann::json;

void check_identities(const DiffRow& row) {
    if (row.before < 0 || row.after < 0 || row.both < 0 || row.only_original < 0 ||
        row.only_ai < 0)
        throw SubmissionSetMismatch(row.problem_id + ": negative count");
    if (row.before != row.both + row.only_original)
        throw SubmissionSetMismatch(row.problem_id + ": before != both + only_original");
    if (row.after != row.both + row.only_ai)
        throw SubmissionSetMismatch(row.problem_id + ": after != both + only_ai");
}

const char* bucket_label(Bucket b) {
    switch (b) {
    case Bucket::B0: return "0%";
    case Bucket::B1: return "0.1-10%";
    case Bucket::B2: return "10.1-25%";
    case Bucket::B3: return "25.1-50%";
    case Bucket::B4: return "50+%";
    }
    return "?";
}

void VerdictHistogram::add(Verdict v) {
    switch (v) {
    case Verdict::WA: wa++; break;
    case Verdict::TLE: tle++; break;
    case Verdict::MLE: mle++; break;
    case Verdict::RE: re++; break;
    case Verdict::AC: break; // never attributed
    }
}

namespace {

std::map<std::string, bool> pass_map(const std::vector<SuiteResult>& results) {
    std::map<std::string, bool> out;
    for (const auto& r : results) {
        if (!out.emplace(r.submission_id, full_pass(r)).second)
            throw SubmissionSetMismatch("duplicate submission id " + r.submission_id);
    }
    return out;
}

void require_same_ids(const std::map<std::string, bool>& a, const std::map<std::string, bool>& b) {
    if (a.size() != b.size())
        throw SubmissionSetMismatch("submission sets differ in size");
    for (const auto& [id, _] : a)
        if (!b.count(id)) throw SubmissionSetMismatch("submission " + id + " missing from one suite");
}

} // namespace

DiffRow diff_problem(const std::string& problem_id,
                     const std::vector<SuiteResult>& results_original,
                     const std::vector<SuiteResult>& results_ai) {
    auto orig = pass_map(results_original);
    auto ai = pass_map(results_ai);
    require_same_ids(orig, ai);

    DiffRow row;
    row.problem_id = problem_id;
    for (const auto& [id, passed_orig] : orig) {
        bool passed_ai = ai.at(id);
        if (passed_orig) row.before++;
        if (passed_ai) row.after++;
        if (passed_orig && passed_ai) row.both++;
    }
    row.only_original = row.before - row.both;
    row.only_ai = row.after - row.both;
    return row;
}

std::optional<Bucket> bucket_of(int before, int only_original) {
    if (before == 0) return std::nullopt;
    if (only_original == 0) return Bucket::B0;
    // Closed-right boundaries, exact integer arithmetic: f <= 1/10, 1/4, 1/2.
    if (10 * only_original <= before) return Bucket::B1;
    if (4 * only_original <= before) return Bucket::B2;
    if (2 * only_original <= before) return Bucket::B3;
    return Bucket::B4;
}

BucketDistribution bucket_distribution(const std::vector<DiffRow>& rows) {
    BucketDistribution dist;
    for (Bucket b : {Bucket::B0, Bucket::B1, Bucket::B2, Bucket::B3, Bucket::B4})
        dist.counts[b] = 0;
    for (const auto& row : rows) {
        auto b = bucket_of(row.before, row.only_original);
        if (b)
            dist.counts[*b]++;
        else
            dist.undefined++;
    }
    return dist;
}

VerdictHistogram verdict_histogram(const std::vector<SuiteResult>& results_original,
                                   const std::vector<SuiteResult>& results_ai) {
    auto orig = pass_map(results_original);
    std::map<std::string, const SuiteResult*> ai_by_id;
    for (const auto& r : results_ai) ai_by_id[r.submission_id] = &r;
    if (orig.size() != ai_by_id.size())
        throw SubmissionSetMismatch("submission sets differ in size");
    for (const auto& [id, _] : orig)
        if (!ai_by_id.count(id))
            throw SubmissionSetMismatch("submission " + id + " missing from AI results");

    VerdictHistogram hist;
    for (const auto& [id, passed_orig] : orig) {
        const SuiteResult& ai = *ai_by_id.at(id);
        if (!passed_orig || full_pass(ai)) continue;
        auto first_fail =
            std::find_if(ai.per_test.begin(), ai.per_test.end(),
                         [](const TestVerdict& t) { return t.verdict != Verdict::AC; });
        if (first_fail == ai.per_test.end())
            hist.unattributed++;
        else
            hist.add(first_fail->verdict);
    }
    return hist;
}

ReportFormat report_format_from_string(const std::string& s) {
    if (s == "markdown" || s == "markdown_table") return ReportFormat::markdown_table;
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    throw ConfigError("unknown report format: " + s);
}

namespace {

json row_to_json(const DiffRow& r) {
    return json{{"problem", r.problem_id}, {"before", r.before},        {"after", r.after},
                {"both", r.both},          {"only_original", r.only_original},
                {"only_ai", r.only_ai}};
}

json distribution_to_json(const BucketDistribution& d) {
    json buckets = json::object();
    for (const auto& [b, count] : d.counts) buckets[bucket_label(b)] = count;
    return json{{"buckets", buckets}, {"undefined", d.undefined}};
}

json histogram_to_json(const VerdictHistogram& h) {
    return json{{"WA", h.wa},   {"TLE", h.tle}, {"MLE", h.mle},
                {"RE", h.re},   {"unattributed", h.unattributed}};
}

} // namespace

std::string render_report(std::vector<DiffRow> rows,
                          const std::vector<std::pair<std::string, BucketDistribution>>& distributions,
                          const std::vector<std::pair<std::string, VerdictHistogram>>& histograms,
                          ReportFormat format) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const DiffRow& a, const DiffRow& b) { return a.problem_id < b.problem_id; });

    std::ostringstream out;
    switch (format) {
    case ReportFormat::markdown_table: {
        out << "| Problem | 100p Before | 100p After | Both Sets | Only Original | Only AI |\n";
        out << "| --- | --- | --- | --- | --- | --- |\n";
        for (const auto& r : rows)
            out << "| " << r.problem_id << " | " << r.before << " | " << r.after << " | " << r.both
                << " | " << r.only_original << " | " << r.only_ai << " |\n";
        for (const auto& [name, dist] : distributions) {
            out << "\n**" << name << "**\n\n| Bucket | Problems |\n| --- | --- |\n";
            for (const auto& [b, count] : dist.counts)
                out << "| " << bucket_label(b) << " | " << count << " |\n";
            if (dist.undefined > 0) out << "| (no 100p before) | " << dist.undefined << " |\n";
        }
        for (const auto& [name, h] : histograms) {
            out << "\n**" << name << "**\n\n| Verdict | Newly failed |\n| --- | --- |\n";
            out << "| WA | " << h.wa << " |\n| TLE | " << h.tle << " |\n| MLE | " << h.mle
                << " |\n| RE | " << h.re << " |\n";
        }
        break;
    }
    case ReportFormat::csv: {
        out << "problem,before,after,both,only_original,only_ai\n";
        for (const auto& r : rows)
            out << r.problem_id << ',' << r.before << ',' << r.after << ',' << r.both << ','
                << r.only_original << ',' << r.only_ai << '\n';
        break;
    }
    case ReportFormat::json: {
        json doc;
        doc["rows"] = json::array();
        for (const auto& r : rows) doc["rows"].push_back(row_to_json(r));
        doc["distributions"] = json::object();
        for (const auto& [name, dist] : distributions)
            doc["distributions"][name] = distribution_to_json(dist);
        doc["histograms"] = json::object();
        for (const auto& [name, h] : histograms) doc["histograms"][name] = histogram_to_json(h);
        out << doc.dump(2) << '\n';
        break;
    }
    }
    return out.str();
}

} // namespace tcforge

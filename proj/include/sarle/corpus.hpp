#ifndef SARLE_CORPUS_HPP
#define SARLE_CORPUS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sarle/normalize.hpp"

namespace sarle {

enum class ReportStatus { preliminary, verified };

struct ReportRecord {
    std::string accession;
    std::string mrn;
    std::string protocol;
    ReportStatus status = ReportStatus::verified;
    int addendum_count = 0;
    std::string text;

    bool operator==(const ReportRecord&) const = default;
};

inline ReportStatus parse_status(const std::string& s) {
    if (s == "preliminary") return ReportStatus::preliminary;
    if (s == "verified") return ReportStatus::verified;
    throw std::runtime_error("unknown report status: '" + s + "'");
}

inline const char* status_name(ReportStatus s) {
    return s == ReportStatus::preliminary ? "preliminary" : "verified";
}

enum class Split { train, val, reserved, test };

inline const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::reserved: return "reserved";
        default: return "test";
    }
}

struct SplitAssignment {
    std::string mrn;
    Split split = Split::train;
};

struct SplitFractions {
    double train = 0.70;
    double val = 0.06;
    double reserved = 0.04;
    double test = 0.20;
};

struct DedupCounts {
    size_t raw = 0;
    size_t after_exact = 0;
    size_t after_preliminary = 0;
    size_t after_addendum = 0;
    size_t after_exclusions = 0;
    size_t after_min_length = 0;
};

inline constexpr size_t kMinReportChars = 550;

// Duplicate-removal ladder, applied in order:
//   1. drop exact duplicates (all fields equal)
//   2. per accession, if any verified report exists, drop preliminary ones
//   3. per accession, keep only the maximal addendum_count
//   4. drop accessions on the manual exclusion list
//   5. drop reports with text shorter than 550 characters
// Output ordered by (accession, original index).
inline std::vector<ReportRecord> dedup(const std::vector<ReportRecord>& records,
                                       const std::set<std::string>& excluded_accessions = {},
                                       DedupCounts* counts = nullptr) {
    struct Indexed { ReportRecord rec; size_t index; };
    std::vector<Indexed> work;
    work.reserve(records.size());
    for (size_t i = 0; i < records.size(); ++i) work.push_back({records[i], i});
    if (counts) counts->raw = work.size();

    // 1. exact duplicates; the first occurrence survives
    {
        std::set<std::string> seen;
        std::erase_if(work, [&](const Indexed& w) {
            const ReportRecord& r = w.rec;
            std::string key = r.accession + '\x1f' + r.mrn + '\x1f' + r.protocol + '\x1f' +
                              status_name(r.status) + '\x1f' +
                              std::to_string(r.addendum_count) + '\x1f' + r.text;
            return !seen.insert(std::move(key)).second;
        });
    }
    if (counts) counts->after_exact = work.size();

    // 2. preliminary vs verified, per accession
    {
        std::set<std::string> has_verified;
        for (const auto& w : work)
            if (w.rec.status == ReportStatus::verified) has_verified.insert(w.rec.accession);
        std::erase_if(work, [&](const Indexed& w) {
            return w.rec.status == ReportStatus::preliminary &&
                   has_verified.count(w.rec.accession) > 0;
        });
    }
    if (counts) counts->after_preliminary = work.size();

    // 3. keep-max addendum count per accession (covers both the "addended
    //    or not" and "multiple addendums" ladder rows)
    {
        std::map<std::string, int> max_addenda;
        for (const auto& w : work) {
            auto it = max_addenda.find(w.rec.accession);
            if (it == max_addenda.end() || w.rec.addendum_count > it->second)
                max_addenda[w.rec.accession] = w.rec.addendum_count;
        }
        std::erase_if(work, [&](const Indexed& w) {
            return w.rec.addendum_count < max_addenda[w.rec.accession];
        });
    }
    if (counts) counts->after_addendum = work.size();

    // 4. manual exclusion list (human-error duplicates)
    std::erase_if(work, [&](const Indexed& w) {
        return excluded_accessions.count(w.rec.accession) > 0;
    });
    if (counts) counts->after_exclusions = work.size();

    // 5. near-empty reports
    std::erase_if(work, [](const Indexed& w) { return w.rec.text.size() < kMinReportChars; });
    if (counts) counts->after_min_length = work.size();

    std::sort(work.begin(), work.end(), [](const Indexed& a, const Indexed& b) {
        if (a.rec.accession != b.rec.accession) return a.rec.accession < b.rec.accession;
        return a.index < b.index;
    });
    std::vector<ReportRecord> out;
    out.reserve(work.size());
    for (auto& w : work) out.push_back(std::move(w.rec));
    return out;
}

// Case-insensitive exact protocol match against the accepted set.
inline std::vector<std::string> default_accepted_protocols() {
    return {"ct chest wo contrast w 3d mips protocol",
            "ct chest without contrast with 3d mips protocol"};
}

inline std::vector<ReportRecord> filter_protocol(
    const std::vector<ReportRecord>& records,
    const std::vector<std::string>& accepted_protocols) {
    if (accepted_protocols.empty())
        throw std::invalid_argument("accepted protocol list must be nonempty");
    std::set<std::string> accepted;
    for (const auto& p : accepted_protocols) accepted.insert(detail::to_lower(p));
    std::vector<ReportRecord> out;
    for (const auto& r : records)
        if (accepted.count(detail::to_lower(r.protocol))) out.push_back(r);
    return out;
}

namespace detail {

inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace detail

// Deterministic function of (mrn, seed): stable hash mapped to [0,1),
// bucketed by cumulative fractions.
inline Split split_for_mrn(const std::string& mrn, const SplitFractions& fractions,
                           uint64_t seed) {
    uint64_t h = detail::fnv1a64(mrn + "\x1f" + std::to_string(seed));
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // 53 uniform bits
    if (u < fractions.train) return Split::train;
    if (u < fractions.train + fractions.val) return Split::val;
    if (u < fractions.train + fractions.val + fractions.reserved) return Split::reserved;
    return Split::test;
}

inline void validate_fractions(const SplitFractions& f) {
    double sum = f.train + f.val + f.reserved + f.test;
    if (f.train < 0 || f.val < 0 || f.reserved < 0 || f.test < 0 ||
        std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("split fractions must be nonnegative and sum to 1.0");
}

// One assignment per distinct MRN, ordered by MRN.
inline std::vector<SplitAssignment> split_by_patient(const std::vector<ReportRecord>& records,
                                                     const SplitFractions& fractions,
                                                     uint64_t seed) {
    validate_fractions(fractions);
    std::set<std::string> mrns;
    for (const auto& r : records) mrns.insert(r.mrn);
    std::vector<SplitAssignment> out;
    out.reserve(mrns.size());
    for (const auto& mrn : mrns)
        out.push_back(SplitAssignment{mrn, split_for_mrn(mrn, fractions, seed)});
    return out;
}

}  // namespace sarle

#endif  // SARLE_CORPUS_HPP

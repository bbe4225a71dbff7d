#ifndef SARLE_METRICS_HPP
#define SARLE_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace sarle {

struct ConfusionCounts {
    int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct ConfusionMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    double accuracy = 0.0;
    // Set when a zero denominator forced the 0-by-convention value.
    bool degenerate_precision = false;
    bool degenerate_recall = false;
    ConfusionCounts counts;
};

inline ConfusionCounts count_confusion(const std::vector<int>& pred,
                                       const std::vector<int>& truth) {
    if (pred.size() != truth.size())
        throw std::invalid_argument("prediction/truth length mismatch");
    ConfusionCounts c;
    for (size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] && truth[i]) ++c.tp;
        else if (pred[i] && !truth[i]) ++c.fp;
        else if (!pred[i] && truth[i]) ++c.fn;
        else ++c.tn;
    }
    return c;
}

inline ConfusionMetrics confusion_metrics(const ConfusionCounts& c) {
    ConfusionMetrics m;
    m.counts = c;
    int64_t n = c.tp + c.fp + c.fn + c.tn;
    if (c.tp + c.fp > 0)
        m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    else
        m.degenerate_precision = true;
    if (c.tp + c.fn > 0)
        m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    else
        m.degenerate_recall = true;
    if (m.precision + m.recall > 0)
        m.f_score = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    if (n > 0) m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
    return m;
}

inline ConfusionMetrics confusion_metrics(const std::vector<int>& pred,
                                          const std::vector<int>& truth) {
    return confusion_metrics(count_confusion(pred, truth));
}

namespace detail {

// Midranks (average rank for ties), 1-based, in input order.
inline std::vector<double> midranks(const std::vector<double>& values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline void require_both_classes(const std::vector<int>& labels) {
    bool pos = false, neg = false;
    for (int l : labels) (l ? pos : neg) = true;
    if (!pos || !neg)
        throw std::invalid_argument("labels must contain both a positive and a negative");
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace detail

// Mann-Whitney AUROC: fraction of (positive, negative) pairs ranked
// correctly, ties counting one half.
inline double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("scores/labels length mismatch");
    detail::require_both_classes(labels);
    std::vector<double> ranks = detail::midranks(scores);
    double pos_rank_sum = 0.0;
    size_t n_pos = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i]) {
            pos_rank_sum += ranks[i];
            ++n_pos;
        }
    }
    size_t n_neg = labels.size() - n_pos;
    double p = static_cast<double>(n_pos), n = static_cast<double>(n_neg);
    return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

// Area under the precision-recall curve with step interpolation: the mean
// of precision-at-k over the positions of positives in the stable
// score-descending order.
inline double average_precision(const std::vector<double>& scores,
                                const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("scores/labels length mismatch");
    size_t n_pos = 0;
    for (int l : labels) n_pos += (l != 0);
    if (n_pos == 0) throw std::invalid_argument("average precision needs a positive example");
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });
    double sum = 0.0;
    size_t tp = 0;
    for (size_t k = 0; k < order.size(); ++k) {
        if (labels[order[k]]) {
            ++tp;
            sum += static_cast<double>(tp) / static_cast<double>(k + 1);
        }
    }
    return sum / static_cast<double>(n_pos);
}

struct DeLongResult {
    double auc_a = 0.0, auc_b = 0.0;
    double ci_a_low = 0.0, ci_a_high = 0.0;
    double ci_b_low = 0.0, ci_b_high = 0.0;
    double p_value = 1.0;
    bool degenerate = false;  // zero variance with unequal AUCs
};

// Paired DeLong comparison of two correlated AUROCs via placement values,
// two-sided p from the normal approximation, per-AUC 95% CIs.
inline DeLongResult delong_test(const std::vector<double>& scores_a,
                                const std::vector<double>& scores_b,
                                const std::vector<int>& labels) {
    const size_t n = labels.size();
    if (scores_a.size() != n || scores_b.size() != n)
        throw std::invalid_argument("scores/labels length mismatch");
    detail::require_both_classes(labels);

    std::vector<size_t> pos_idx, neg_idx;
    for (size_t i = 0; i < n; ++i) (labels[i] ? pos_idx : neg_idx).push_back(i);
    const size_t m = pos_idx.size(), k = neg_idx.size();

    // Placement values v01 (per positive) and v10 (per negative) for each
    // score vector, from midranks of the positive, negative, and combined
    // samples.
    auto placements = [&](const std::vector<double>& scores, std::vector<double>& v01,
                          std::vector<double>& v10, double& auc) {
        std::vector<double> pos(m), neg(k), all;
        all.reserve(n);
        for (size_t i = 0; i < m; ++i) pos[i] = scores[pos_idx[i]];
        for (size_t j = 0; j < k; ++j) neg[j] = scores[neg_idx[j]];
        for (double s : pos) all.push_back(s);
        for (double s : neg) all.push_back(s);
        std::vector<double> tx = detail::midranks(pos);
        std::vector<double> ty = detail::midranks(neg);
        std::vector<double> tz = detail::midranks(all);
        v01.resize(m);
        v10.resize(k);
        double sum_tz_pos = 0.0;
        for (size_t i = 0; i < m; ++i) {
            v01[i] = (tz[i] - tx[i]) / static_cast<double>(k);
            sum_tz_pos += tz[i];
        }
        for (size_t j = 0; j < k; ++j)
            v10[j] = 1.0 - (tz[m + j] - ty[j]) / static_cast<double>(m);
        auc = (sum_tz_pos - static_cast<double>(m) * (m + 1.0) / 2.0) /
              (static_cast<double>(m) * static_cast<double>(k));
    };

    DeLongResult r;
    std::vector<double> v01a, v10a, v01b, v10b;
    placements(scores_a, v01a, v10a, r.auc_a);
    placements(scores_b, v01b, v10b, r.auc_b);

    auto cov = [](const std::vector<double>& x, const std::vector<double>& y) {
        const size_t len = x.size();
        if (len < 2) return 0.0;
        double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(len);
        double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(len);
        double s = 0.0;
        for (size_t i = 0; i < len; ++i) s += (x[i] - mx) * (y[i] - my);
        return s / static_cast<double>(len - 1);
    };

    double s_aa = cov(v01a, v01a) / m + cov(v10a, v10a) / k;
    double s_bb = cov(v01b, v01b) / m + cov(v10b, v10b) / k;
    double s_ab = cov(v01a, v01b) / m + cov(v10a, v10b) / k;

    const double z95 = 1.959963984540054;
    auto clamp01 = [](double x) { return std::min(1.0, std::max(0.0, x)); };
    r.ci_a_low = clamp01(r.auc_a - z95 * std::sqrt(s_aa));
    r.ci_a_high = clamp01(r.auc_a + z95 * std::sqrt(s_aa));
    r.ci_b_low = clamp01(r.auc_b - z95 * std::sqrt(s_bb));
    r.ci_b_high = clamp01(r.auc_b + z95 * std::sqrt(s_bb));

    double var_diff = s_aa + s_bb - 2.0 * s_ab;
    double diff = r.auc_a - r.auc_b;
    if (var_diff <= 0.0) {
        if (diff == 0.0) {
            r.p_value = 1.0;
        } else {
            r.p_value = 0.0;
            r.degenerate = true;
        }
    } else {
        double z = diff / std::sqrt(var_diff);
        r.p_value = 2.0 * (1.0 - detail::normal_cdf(std::abs(z)));
    }
    return r;
}

// Step-up FDR adjustment: adj_(i) = min over j >= i of m*p_(j)/j, capped
// at 1, returned in the input order.
inline std::vector<double> benjamini_hochberg(const std::vector<double>& p_values) {
    const size_t m = p_values.size();
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("p-values must lie in [0,1]");
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> adjusted(m);
    double running_min = 1.0;
    for (size_t i = m; i-- > 0;) {
        double v = static_cast<double>(m) * p_values[order[i]] / static_cast<double>(i + 1);
        running_min = std::min(running_min, v);
        adjusted[order[i]] = std::min(1.0, running_min);
    }
    return adjusted;
}

struct DatasetStats {
    std::vector<int64_t> label_counts;     // positives per label
    std::vector<double> label_frequency;   // counts / n_scans
    std::vector<int64_t> histogram;        // per-scan label-count histogram, bin = count
    double median = 0.0;
    double q1 = 0.0, q3 = 0.0;
    double iqr = 0.0;
    int64_t normal_count = 0;              // all-zero rows
    int64_t n_scans = 0;
};

namespace detail {

// Median of a sorted range; quartiles use the exclusive-halves convention
// (the middle element of an odd-length sample belongs to neither half).
inline double sorted_median(const std::vector<int>& sorted, size_t begin, size_t end) {
    size_t len = end - begin;
    size_t mid = begin + len / 2;
    if (len % 2 == 1) return sorted[mid];
    return 0.5 * (sorted[mid - 1] + sorted[mid]);
}

}  // namespace detail

inline DatasetStats dataset_stats(const std::vector<std::vector<int>>& matrix) {
    if (matrix.empty()) throw std::invalid_argument("dataset_stats needs a nonempty matrix");
    const size_t n_labels = matrix.front().size();
    DatasetStats st;
    st.n_scans = static_cast<int64_t>(matrix.size());
    st.label_counts.assign(n_labels, 0);
    std::vector<int> per_scan;
    per_scan.reserve(matrix.size());
    int max_count = 0;
    for (const auto& row : matrix) {
        if (row.size() != n_labels) throw std::invalid_argument("ragged label matrix");
        int c = 0;
        for (size_t j = 0; j < n_labels; ++j) {
            if (row[j]) {
                ++c;
                ++st.label_counts[j];
            }
        }
        per_scan.push_back(c);
        max_count = std::max(max_count, c);
        if (c == 0) ++st.normal_count;
    }
    st.label_frequency.resize(n_labels);
    for (size_t j = 0; j < n_labels; ++j)
        st.label_frequency[j] =
            static_cast<double>(st.label_counts[j]) / static_cast<double>(st.n_scans);
    st.histogram.assign(static_cast<size_t>(max_count) + 1, 0);
    for (int c : per_scan) ++st.histogram[static_cast<size_t>(c)];

    std::sort(per_scan.begin(), per_scan.end());
    const size_t n = per_scan.size();
    st.median = detail::sorted_median(per_scan, 0, n);
    if (n >= 2) {
        size_t half = n / 2;
        st.q1 = detail::sorted_median(per_scan, 0, half);
        st.q3 = detail::sorted_median(per_scan, (n % 2 == 1) ? half + 1 : half, n);
    } else {
        st.q1 = st.q3 = st.median;
    }
    st.iqr = st.q3 - st.q1;
    return st;
}

}  // namespace sarle

#endif  // SARLE_METRICS_HPP

#include "qarank/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <gsl/gsl_cdf.h>

#include "qarank/errors.hpp"

namespace qarank {

namespace {

double safe_div(double num, double den) { return den != 0.0 ? num / den : 0.0; }

void check_scores(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    if (scores.empty()) throw DataError("empty score vector");
    if (scores.size() != labels.size())
        throw DataError("scores and labels differ in length: " + std::to_string(scores.size()) +
                        " vs " + std::to_string(labels.size()));
}

void split_by_label(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels,
                    std::vector<double>& pos, std::vector<double>& neg) {
    for (std::size_t i = 0; i < scores.size(); ++i)
        (labels[i] ? pos : neg).push_back(scores[i]);
    if (pos.empty() || neg.empty())
        throw DataError("ROC needs both classes; got " + std::to_string(pos.size()) +
                        " positives and " + std::to_string(neg.size()) + " negatives");
}

}  // namespace

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double chi_squared_quantile(double p, double dof) { return gsl_cdf_chisq_Pinv(p, dof); }

ConfusionMatrix confusion(const std::vector<double>& scores,
                          const std::vector<std::uint8_t>& labels, double threshold) {
    check_scores(scores, labels);
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] > threshold;
        if (labels[i]) {
            predicted ? ++cm.tp : ++cm.fn;
        } else {
            predicted ? ++cm.fp : ++cm.tn;
        }
    }
    return cm;
}

MetricReport scalar_metrics(const ConfusionMatrix& cm) {
    MetricReport r;
    r.confusion = cm;
    const double total = static_cast<double>(cm.tp + cm.fp + cm.fn + cm.tn);
    r.accuracy = safe_div(static_cast<double>(cm.tp + cm.tn), total);
    r.error_rate = 1.0 - r.accuracy;
    r.precision = safe_div(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fp));
    r.recall = safe_div(static_cast<double>(cm.tp), static_cast<double>(cm.tp + cm.fn));
    if (r.precision + r.recall > 0.0)
        r.f_measure = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    r.tn_rate = safe_div(static_cast<double>(cm.tn), static_cast<double>(cm.tn + cm.fp));
    r.g_mean = std::sqrt(r.recall * r.tn_rate);
    r.fp_rate = safe_div(static_cast<double>(cm.fp), static_cast<double>(cm.fp + cm.tn));
    r.balance = balance(r.fp_rate, r.recall);
    return r;
}

MetricReport metric_report(const std::vector<double>& scores,
                           const std::vector<std::uint8_t>& labels, double threshold) {
    MetricReport r = scalar_metrics(confusion(scores, labels, threshold));
    r.auc = roc_and_auc(scores, labels).second;
    return r;
}

std::pair<RocCurve, double> roc_and_auc(const std::vector<double>& scores,
                                        const std::vector<std::uint8_t>& labels) {
    check_scores(scores, labels);
    std::vector<double> pos, neg;
    split_by_label(scores, labels, pos, neg);
    const double P = static_cast<double>(pos.size());
    const double N = static_cast<double>(neg.size());

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    RocCurve curve;
    curve.fp_rate.push_back(0.0);
    curve.tp_rate.push_back(0.0);
    curve.thresholds.push_back(std::numeric_limits<double>::infinity());

    std::int64_t tp = 0, fp = 0;
    double area2 = 0.0;  // accumulated in units of 2*P*N to stay exact longer
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        std::int64_t dtp = 0, dfp = 0;
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == s) {
            labels[order[j]] ? ++dtp : ++dfp;
            ++j;
        }
        // trapezoid over the tie block: width dfp, heights tp and tp+dtp
        area2 += static_cast<double>(dfp) * static_cast<double>(2 * tp + dtp);
        tp += dtp;
        fp += dfp;
        curve.fp_rate.push_back(static_cast<double>(fp) / N);
        curve.tp_rate.push_back(static_cast<double>(tp) / P);
        curve.thresholds.push_back(s);
        i = j;
    }
    if (curve.fp_rate.back() != 1.0 || curve.tp_rate.back() != 1.0) {
        curve.fp_rate.push_back(1.0);
        curve.tp_rate.push_back(1.0);
        curve.thresholds.push_back(-std::numeric_limits<double>::infinity());
    } else {
        curve.thresholds.back() = -std::numeric_limits<double>::infinity();
    }
    return {std::move(curve), area2 / (2.0 * P * N)};
}

double mann_whitney_auc(const std::vector<double>& scores,
                        const std::vector<std::uint8_t>& labels) {
    check_scores(scores, labels);
    std::vector<double> pos, neg;
    split_by_label(scores, labels, pos, neg);
    std::sort(neg.begin(), neg.end());
    double wins2 = 0.0;  // 2*wins + ties
    for (double s : pos) {
        const auto lo = std::lower_bound(neg.begin(), neg.end(), s);
        const auto hi = std::upper_bound(neg.begin(), neg.end(), s);
        wins2 += 2.0 * static_cast<double>(lo - neg.begin()) + static_cast<double>(hi - lo);
    }
    return wins2 / (2.0 * static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

double balance(double fp_rate, double recall) {
    return 1.0 - std::sqrt(fp_rate * fp_rate + (1.0 - recall) * (1.0 - recall)) / std::sqrt(2.0);
}

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
    out << "threshold,fp_rate,tp_rate\n";
    char buf[96];
    for (std::size_t i = 0; i < curve.fp_rate.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", curve.thresholds[i],
                      curve.fp_rate[i], curve.tp_rate[i]);
        out << buf;
    }
}

namespace {

// placement of value s against the opposing class values (sorted)
double placement(const std::vector<double>& sorted_other, double s, bool other_is_negative) {
    const auto lo = std::lower_bound(sorted_other.begin(), sorted_other.end(), s);
    const auto hi = std::upper_bound(sorted_other.begin(), sorted_other.end(), s);
    const double below = static_cast<double>(lo - sorted_other.begin());
    const double equal = static_cast<double>(hi - lo);
    const double n = static_cast<double>(sorted_other.size());
    // positives are placed by how many negatives they beat; negatives by how
    // many positives beat them
    const double beats = other_is_negative ? below : n - below - equal;
    return (beats + 0.5 * equal) / n;
}

double unbiased_cov(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double mx = mean_of(x), my = mean_of(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (x[i] - mx) * (y[i] - my);
    return acc / static_cast<double>(n - 1);
}

}  // namespace

DeLongResult delong_test(const std::vector<double>& scores_a,
                         const std::vector<double>& scores_b,
                         const std::vector<std::uint8_t>& labels) {
    check_scores(scores_a, labels);
    check_scores(scores_b, labels);
    std::size_t P = 0, N = 0;
    for (auto l : labels) l ? ++P : ++N;
    if (P < 2 || N < 2)
        throw DataError("DeLong needs at least 2 positives and 2 negatives; got " +
                        std::to_string(P) + "/" + std::to_string(N));

    const auto placements = [&](const std::vector<double>& scores, std::vector<double>& v10,
                                std::vector<double>& v01) {
        std::vector<double> pos, neg;
        for (std::size_t i = 0; i < scores.size(); ++i)
            (labels[i] ? pos : neg).push_back(scores[i]);
        std::vector<double> sorted_pos = pos, sorted_neg = neg;
        std::sort(sorted_pos.begin(), sorted_pos.end());
        std::sort(sorted_neg.begin(), sorted_neg.end());
        for (double s : pos) v10.push_back(placement(sorted_neg, s, true));
        for (double s : neg) v01.push_back(placement(sorted_pos, s, false));
    };

    std::vector<double> v10a, v01a, v10b, v01b;
    placements(scores_a, v10a, v01a);
    placements(scores_b, v10b, v01b);

    DeLongResult r;
    r.auc_a = mean_of(v10a);
    r.auc_b = mean_of(v10b);

    const double s10 = unbiased_cov(v10a, v10a) + unbiased_cov(v10b, v10b) -
                       2.0 * unbiased_cov(v10a, v10b);
    const double s01 = unbiased_cov(v01a, v01a) + unbiased_cov(v01b, v01b) -
                       2.0 * unbiased_cov(v01a, v01b);
    const double var = s10 / static_cast<double>(P) + s01 / static_cast<double>(N);

    const double diff = r.auc_a - r.auc_b;
    if (var <= 0.0) {
        if (diff == 0.0) {
            r.z = 0.0;
            r.p = 1.0;
            return r;
        }
        throw DataError("DeLong variance is zero but the AUCs differ");
    }
    r.z = diff / std::sqrt(var);
    r.p = 2.0 * (1.0 - normal_cdf(std::abs(r.z)));
    return r;
}

namespace {

// ascending average ranks (1 = smallest), ties averaged
std::vector<double> rank_ascending(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

// exact two-sided p for the signed-rank statistic via convolution over the
// doubled ranks (doubling keeps tied average ranks integral)
double wilcoxon_exact_p(const std::vector<double>& ranks, double w_observed) {
    std::vector<int> doubled;
    int total2 = 0;
    for (double r : ranks) {
        const int d = static_cast<int>(std::llround(2.0 * r));
        doubled.push_back(d);
        total2 += d;
    }
    std::vector<double> count(static_cast<std::size_t>(total2) + 1, 0.0);
    count[0] = 1.0;
    for (int d : doubled) {
        for (int s = total2; s >= d; --s) count[s] += count[s - d];
    }
    const double n_assignments = std::pow(2.0, static_cast<double>(ranks.size()));
    const int w2 = static_cast<int>(std::llround(2.0 * w_observed));
    double below = 0.0, above = 0.0;
    for (int s = 0; s <= total2; ++s) {
        if (s <= w2) below += count[s];
        if (s >= w2) above += count[s];
    }
    const double p = 2.0 * std::min(below, above) / n_assignments;
    return std::min(p, 1.0);
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw DataError("Wilcoxon needs paired samples of equal length");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty())
        throw DataError("Wilcoxon is undefined: every paired difference is zero");

    std::vector<double> abs_diffs(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) abs_diffs[i] = std::abs(diffs[i]);
    const auto ranks = rank_ascending(abs_diffs);

    WilcoxonResult r;
    r.n_nonzero = static_cast<int>(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] > 0.0) r.w += ranks[i];

    const std::size_t n = diffs.size();
    if (n <= 20) {
        r.exact = true;
        r.p = wilcoxon_exact_p(ranks, r.w);
        return r;
    }
    // normal approximation with tie correction and continuity correction
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    double tie_term = 0.0;
    {
        std::vector<double> sorted = abs_diffs;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) throw DataError("Wilcoxon variance is zero");
    const double centered = r.w - mean;
    const double cc = centered > 0 ? -0.5 : (centered < 0 ? 0.5 : 0.0);
    const double z = (centered + cc) / std::sqrt(var);
    r.p = 2.0 * (1.0 - normal_cdf(std::abs(z)));
    r.p = std::min(r.p, 1.0);
    return r;
}

double cohens_d(const std::vector<double>& diffs) {
    if (diffs.size() < 2) throw DataError("Cohen's d needs at least 2 differences");
    const double m = mean_of(diffs);
    const double s = sd_of(diffs);
    if (s == 0.0) {
        if (m == 0.0) return 0.0;
        return m > 0.0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    }
    return m / s;
}

double cohens_d_pooled(const std::vector<double>& x, const std::vector<double>& y) {
    const double n1 = static_cast<double>(x.size());
    const double n2 = static_cast<double>(y.size());
    if (n1 + n2 < 3.0) throw DataError("pooled Cohen's d needs at least 3 samples");
    const double s1 = sd_of(x), s2 = sd_of(y);
    const double pooled =
        std::sqrt(((n1 - 1.0) * s1 * s1 + (n2 - 1.0) * s2 * s2) / (n1 + n2 - 2.0));
    const double dm = mean_of(x) - mean_of(y);
    if (pooled == 0.0) {
        if (dm == 0.0) return 0.0;
        return dm > 0.0 ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
    }
    return dm / pooled;
}

}  // namespace qarank

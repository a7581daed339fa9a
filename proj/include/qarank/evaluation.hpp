#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qarank {

struct ConfusionMatrix {
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// Scalar metrics at one operating point. f_measure is absent when
// precision + recall is zero; auc/balance are filled in by metric_report.
struct MetricReport {
    double accuracy = 0;
    double error_rate = 0;
    double precision = 0;
    double recall = 0;
    std::optional<double> f_measure;
    double tn_rate = 0;
    double g_mean = 0;
    double fp_rate = 0;
    double auc = 0;
    double balance = 0;
    ConfusionMatrix confusion;
};

// Positive iff score > threshold.
ConfusionMatrix confusion(const std::vector<double>& scores,
                          const std::vector<std::uint8_t>& labels, double threshold = 0.5);

// Scalar metrics from a confusion matrix alone (auc left at 0).
MetricReport scalar_metrics(const ConfusionMatrix& cm);

// Full report: threshold metrics + ROC AUC. Needs both classes present.
MetricReport metric_report(const std::vector<double>& scores,
                           const std::vector<std::uint8_t>& labels, double threshold = 0.5);

struct RocCurve {
    std::vector<double> fp_rate;     // non-decreasing, anchored at 0 and 1
    std::vector<double> tp_rate;
    std::vector<double> thresholds;  // +inf at (0,0), -inf at (1,1)
};

// Curve from sweeping the distinct scores descending; tied positive/negative
// scores form diagonal segments. Trapezoid area over this curve equals the
// Mann-Whitney statistic.
std::pair<RocCurve, double> roc_and_auc(const std::vector<double>& scores,
                                        const std::vector<std::uint8_t>& labels);

// (#(pos>neg) + 0.5 * #(pos=neg)) / (P*N), computed by pair counting over
// sorted negatives. Independent of the curve construction above.
double mann_whitney_auc(const std::vector<double>& scores,
                        const std::vector<std::uint8_t>& labels);

// 1 - dist((fp_rate, recall), (0, 1)) / sqrt(2)
double balance(double fp_rate, double recall);

void write_roc_csv(const RocCurve& curve, std::ostream& out);

struct DeLongResult {
    double auc_a = 0;
    double auc_b = 0;
    double z = 0;
    double p = 1;
};

// Paired comparison of two score vectors over the same labels, variance from
// the per-instance placement components.
DeLongResult delong_test(const std::vector<double>& scores_a,
                         const std::vector<double>& scores_b,
                         const std::vector<std::uint8_t>& labels);

struct WilcoxonResult {
    double w = 0;        // sum of positive-difference ranks
    double p = 1;        // two-sided
    int n_nonzero = 0;
    bool exact = false;  // exact distribution (n <= 20) vs normal approximation
};

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

// mean(diff) / sd(diff); +/-inf sentinel when sd is zero
double cohens_d(const std::vector<double>& diffs);

// pooled-sd effect size between two samples
double cohens_d_pooled(const std::vector<double>& x, const std::vector<double>& y);

struct ScottKnottCluster {
    int rank = 1;  // 1 = best mean
    std::vector<std::string> models;
    double mean = 0;
};

// Recursive mean clustering: the split maximizing the between-group sum of
// squares is kept while its likelihood-ratio statistic exceeds the chi-square
// critical value at alpha; adjacent groups closer than negligible_d in
// Cohen's d are then merged.
std::vector<ScottKnottCluster> scott_knott_esd(
    const std::map<std::string, std::vector<double>>& samples, double alpha = 0.01,
    double negligible_d = 0.2);

// distribution helpers shared by the tests above
double normal_cdf(double z);
double chi_squared_quantile(double p, double dof);

double mean_of(const std::vector<double>& v);
double sd_of(const std::vector<double>& v);  // sample sd, n-1

}  // namespace qarank

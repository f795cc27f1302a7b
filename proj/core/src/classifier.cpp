#include "padwerk/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "padwerk/error.hpp"
#include "padwerk/parallel.hpp"

namespace padwerk {

FeatureVector featurize(const DirectionSequence& seq, std::size_t points) {
    if (points < 2) throw ValidationError("featurize needs at least 2 sample points");
    FeatureVector f(3 + points, 0.0);

    std::size_t plus = 0, minus = 0, effective = 0;
    for (std::size_t i = 0; i < seq.values.size(); ++i) {
        if (seq.values[i] > 0) ++plus;
        if (seq.values[i] < 0) ++minus;
        if (seq.values[i] != 0) effective = i + 1;
    }
    const std::size_t nonzero = plus + minus;
    f[0] = static_cast<double>(plus);
    f[1] = static_cast<double>(minus);
    f[2] = static_cast<double>(nonzero);
    if (nonzero == 0) return f;

    long running = 0;
    std::size_t pos = 0;
    for (std::size_t i = 1; i <= points; ++i) {
        const std::size_t upto = (i * effective + points - 1) / points;
        for (; pos < upto; ++pos) running += seq.values[pos];
        f[2 + i] = static_cast<double>(running) / static_cast<double>(nonzero);
    }
    return f;
}

void ScoreMatrix::add_row(const Label& truth, std::span<const double> scores) {
    if (scores.size() != classes_) {
        throw ValidationError("score row has " + std::to_string(scores.size()) + " columns, expected " +
                              std::to_string(classes_));
    }
    double sum = 0;
    for (double s : scores) {
        if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
            throw ValidationError("score " + std::to_string(s) + " outside [0, 1]");
        }
        sum += s;
    }
    if (sum > 1.0 + 1e-6) throw ValidationError("score row sums to " + std::to_string(sum) + " > 1");
    truth_.push_back(truth);
    scores_.insert(scores_.end(), scores.begin(), scores.end());
}

std::size_t ScoreMatrix::argmax(std::size_t r) const {
    auto s = row(r);
    return static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
}

std::size_t ScoreMatrix::monitored_rows() const {
    return static_cast<std::size_t>(
        std::count_if(truth_.begin(), truth_.end(), [](const Label& l) { return l.is_monitored(); }));
}

ScoreMatrix knn_scores(const LabeledFeatures& train, const LabeledFeatures& test, std::size_t k) {
    const std::size_t n = train.features.size();
    if (train.labels.size() != n || test.labels.size() != test.features.size()) {
        throw ValidationError("labels and features differ in count");
    }
    if (n == 0) throw ValidationError("knn needs a non-empty training set");
    if (k == 0 || k > n) {
        throw ValidationError("k = " + std::to_string(k) + " invalid for " + std::to_string(n) +
                              " training samples");
    }
    const std::size_t dim = train.features.front().size();
    auto check_dim = [dim](const FeatureVector& f) {
        if (f.size() != dim) throw ValidationError("feature vectors differ in dimension");
    };
    std::for_each(train.features.begin(), train.features.end(), check_dim);
    std::for_each(test.features.begin(), test.features.end(), check_dim);

    // Per-feature scale from the largest training magnitude (order independent).
    std::vector<double> inv_scale(dim, 0.0);
    for (const auto& f : train.features) {
        for (std::size_t d = 0; d < dim; ++d) inv_scale[d] = std::max(inv_scale[d], std::abs(f[d]));
    }
    for (double& s : inv_scale) s = s > 0 ? 1.0 / s : 1.0;

    auto scaled = [&](const FeatureVector& f) {
        FeatureVector out(dim);
        for (std::size_t d = 0; d < dim; ++d) out[d] = f[d] * inv_scale[d];
        return out;
    };
    std::vector<FeatureVector> train_scaled;
    train_scaled.reserve(n);
    for (const auto& f : train.features) train_scaled.push_back(scaled(f));

    std::vector<std::vector<double>> rows(test.features.size());
    parallel_for(test.features.size(), [&](std::size_t t) {
        const FeatureVector q = scaled(test.features[t]);
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = q[d] - train_scaled[i][d];
                acc += diff * diff;
            }
            dist[i] = {acc, i};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::vector<std::size_t> votes(kMonitoredClasses, 0);
        for (std::size_t j = 0; j < k; ++j) {
            const Label& l = train.labels[dist[j].second];
            if (l.is_monitored()) ++votes[static_cast<std::size_t>(l.site())];
        }
        rows[t].resize(kMonitoredClasses);
        for (std::size_t c = 0; c < kMonitoredClasses; ++c) {
            rows[t][c] = static_cast<double>(votes[c]) / static_cast<double>(k);
        }
    });

    ScoreMatrix out;
    for (std::size_t t = 0; t < rows.size(); ++t) out.add_row(test.labels[t], rows[t]);
    return out;
}

std::optional<PRPoint> pr_point(const ScoreMatrix& scores, double threshold) {
    const std::size_t monitored = scores.monitored_rows();
    if (monitored == 0) return std::nullopt;
    std::size_t tp = 0, fp = 0;
    for (std::size_t r = 0; r < scores.rows(); ++r) {
        const std::size_t c = scores.argmax(r);
        if (scores.row(r)[c] < threshold) continue;
        const Label& truth = scores.truth(r);
        if (truth.is_monitored() && static_cast<std::size_t>(truth.site()) == c) {
            ++tp;
        } else {
            ++fp;
        }
    }
    if (tp + fp == 0) return std::nullopt;
    return PRPoint{threshold, static_cast<double>(tp) / static_cast<double>(tp + fp),
                   static_cast<double>(tp) / static_cast<double>(monitored)};
}

std::vector<PRPoint> pr_sweep(const ScoreMatrix& scores, std::size_t thresholds) {
    if (thresholds < 2) throw ValidationError("a sweep needs at least 2 thresholds");
    std::vector<PRPoint> points;
    for (std::size_t i = 0; i < thresholds; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(thresholds);
        if (auto p = pr_point(scores, t)) points.push_back(*p);
    }
    return points;
}

double max_recall(const ScoreMatrix& scores) {
    auto p = pr_point(scores, 0.0);
    if (!p) throw ValidationError("max recall needs at least one monitored test sample");
    return p->recall;
}

}  // namespace padwerk

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "padwerk/trace.hpp"

namespace padwerk {

inline constexpr std::size_t kMonitoredClasses = 50;
inline constexpr std::size_t kDefaultFeaturePoints = 100;
inline constexpr std::size_t kDefaultNeighbors = 5;
inline constexpr std::size_t kDefaultThresholds = 16;

using FeatureVector = std::vector<double>;

/// Cumulative-direction features: counts of +1, -1 and nonzero cells, then
/// the running sum sampled at `points` equispaced positions up to the last
/// nonzero cell, divided by the nonzero count. Trailing zeros never change
/// the result.
FeatureVector featurize(const DirectionSequence& seq, std::size_t points = kDefaultFeaturePoints);

/// Per-sample monitored-class scores. Mass missing from a row (1 - sum)
/// belongs to "unmonitored".
class ScoreMatrix {
public:
    explicit ScoreMatrix(std::size_t classes = kMonitoredClasses) : classes_{classes} {}

    /// Throws ValidationError if the row has the wrong width, a value outside
    /// [0, 1] or non-finite, or sums above 1.
    void add_row(const Label& truth, std::span<const double> scores);

    std::size_t rows() const { return truth_.size(); }
    std::size_t classes() const { return classes_; }
    const Label& truth(std::size_t row) const { return truth_[row]; }
    std::span<const double> row(std::size_t r) const {
        return {scores_.data() + r * classes_, classes_};
    }

    /// Highest-scoring class; the lowest index wins ties.
    std::size_t argmax(std::size_t row) const;

    std::size_t monitored_rows() const;

private:
    std::size_t classes_;
    std::vector<Label> truth_;
    std::vector<double> scores_;
};

struct LabeledFeatures {
    std::vector<Label> labels;
    std::vector<FeatureVector> features;
};

/// k-nearest-neighbour scores: the share of the k closest training samples
/// (Euclidean, after scaling each feature by its largest training magnitude)
/// carrying each monitored class. Equal distances favour the lower training
/// index. Throws ValidationError when k is 0 or exceeds the training size.
ScoreMatrix knn_scores(const LabeledFeatures& train, const LabeledFeatures& test,
                       std::size_t k = kDefaultNeighbors);

struct PRPoint {
    double threshold = 0;
    double precision = 0;
    double recall = 0;
};

/// Open-world precision/recall at one threshold. A sample is assigned its
/// argmax class when that score reaches the threshold. Every assignment to a
/// class other than the true one is a false positive. Returns nullopt when
/// nothing is assigned or no monitored samples exist.
std::optional<PRPoint> pr_point(const ScoreMatrix& scores, double threshold);

/// Thresholds i / count for i in [0, count); undefined points are left out.
std::vector<PRPoint> pr_sweep(const ScoreMatrix& scores, std::size_t thresholds = kDefaultThresholds);

/// Recall at threshold 0. Throws ValidationError without monitored rows.
double max_recall(const ScoreMatrix& scores);

}  // namespace padwerk

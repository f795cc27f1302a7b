#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "padwerk/classifier.hpp"
#include "padwerk/dataset.hpp"
#include "padwerk/simulator.hpp"
#include "padwerk/trace.hpp"

namespace padwerk {

struct LabeledSequences {
    std::vector<Label> labels;
    std::vector<DirectionSequence> sequences;

    std::size_t size() const { return labels.size(); }
    void add(const Label& label, DirectionSequence seq) {
        labels.push_back(label);
        sequences.push_back(std::move(seq));
    }
};

/// Undefended client traces.
LabeledSequences to_sequences(const Dataset& dataset, std::size_t length = kDefaultSequenceLength);
LabeledSequences to_sequences(std::span<const DefendedSample> samples,
                              std::size_t length = kDefaultSequenceLength);

struct FoldSplit {
    LabeledSequences train;
    LabeledSequences validation;
    LabeledSequences test;
};

FoldSplit split_fold(const LabeledSequences& data, const FoldPlan& fold);

/// Trains on the train split (validation available for early stopping) and
/// scores the test split.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual ScoreMatrix classify(const FoldSplit& split) = 0;
};

class KnnClassifier final : public Classifier {
public:
    explicit KnnClassifier(std::size_t k = kDefaultNeighbors, std::size_t points = kDefaultFeaturePoints)
        : k_{k}, points_{points} {}

    ScoreMatrix classify(const FoldSplit& split) override;

private:
    std::size_t k_;
    std::size_t points_;
};

struct FoldResult {
    int fold = 0;
    double max_recall = 0;
    std::vector<PRPoint> points;
};

struct EvaluationReport {
    std::vector<FoldResult> folds;
    /// Per-threshold averages over the folds that defined the point.
    std::vector<PRPoint> mean_points;
    double mean_max_recall = 0;
};

EvaluationReport evaluate(const LabeledSequences& data, std::span<const FoldPlan> folds,
                          Classifier& classifier, std::size_t thresholds = kDefaultThresholds);

/// M[i][j]: max recall of a model trained on datasets[i]'s train split and
/// tested on datasets[j]'s test split, for one fold. Throws ValidationError
/// when the datasets differ in sequence length or monitored classes.
std::vector<std::vector<double>> cross_classify(std::span<const LabeledSequences> datasets,
                                                const FoldPlan& fold, Classifier& classifier);

/// fold,threshold,precision,recall rows.
std::string format_pr_csv(const EvaluationReport& report);

}  // namespace padwerk

#include "padwerk/evaluation.hpp"

#include <map>
#include <set>
#include <sstream>

#include "padwerk/error.hpp"

namespace padwerk {

LabeledSequences to_sequences(const Dataset& dataset, std::size_t length) {
    LabeledSequences out;
    for (const auto& s : dataset.samples) out.add(s.label, extract_direction_cells(s.client, length));
    return out;
}

LabeledSequences to_sequences(std::span<const DefendedSample> samples, std::size_t length) {
    LabeledSequences out;
    for (const auto& s : samples) out.add(s.label, extract_direction_cells(s.defended.trace, length));
    return out;
}

FoldSplit split_fold(const LabeledSequences& data, const FoldPlan& fold) {
    FoldSplit split;
    for (std::size_t i = 0; i < data.size(); ++i) {
        switch (fold.role_of(data.labels[i])) {
            case Role::train: split.train.add(data.labels[i], data.sequences[i]); break;
            case Role::validation: split.validation.add(data.labels[i], data.sequences[i]); break;
            case Role::test: split.test.add(data.labels[i], data.sequences[i]); break;
        }
    }
    return split;
}

namespace {

LabeledFeatures features_of(const LabeledSequences& data, std::size_t points) {
    LabeledFeatures out;
    out.labels = data.labels;
    out.features.reserve(data.size());
    for (const auto& seq : data.sequences) out.features.push_back(featurize(seq, points));
    return out;
}

}  // namespace

ScoreMatrix KnnClassifier::classify(const FoldSplit& split) {
    return knn_scores(features_of(split.train, points_), features_of(split.test, points_), k_);
}

EvaluationReport evaluate(const LabeledSequences& data, std::span<const FoldPlan> folds,
                          Classifier& classifier, std::size_t thresholds) {
    if (folds.empty()) throw ValidationError("evaluation needs at least one fold");
    EvaluationReport report;
    std::map<double, std::pair<PRPoint, std::size_t>> sums;
    double recall_sum = 0;
    for (const FoldPlan& fold : folds) {
        const ScoreMatrix scores = classifier.classify(split_fold(data, fold));
        FoldResult r;
        r.fold = fold.fold();
        r.max_recall = max_recall(scores);
        r.points = pr_sweep(scores, thresholds);
        for (const PRPoint& p : r.points) {
            auto& [acc, n] = sums[p.threshold];
            acc.threshold = p.threshold;
            acc.precision += p.precision;
            acc.recall += p.recall;
            ++n;
        }
        recall_sum += r.max_recall;
        report.folds.push_back(std::move(r));
    }
    for (const auto& [t, entry] : sums) {
        const auto& [acc, n] = entry;
        report.mean_points.push_back({t, acc.precision / static_cast<double>(n), acc.recall / static_cast<double>(n)});
    }
    report.mean_max_recall = recall_sum / static_cast<double>(folds.size());
    return report;
}

std::vector<std::vector<double>> cross_classify(std::span<const LabeledSequences> datasets,
                                                const FoldPlan& fold, Classifier& classifier) {
    if (datasets.empty()) return {};
    auto classes_of = [](const LabeledSequences& d) {
        std::set<int> sites;
        for (const auto& l : d.labels) {
            if (l.is_monitored()) sites.insert(l.site());
        }
        return sites;
    };
    auto length_of = [](const LabeledSequences& d) -> std::size_t {
        std::size_t len = d.sequences.empty() ? 0 : d.sequences.front().size();
        for (const auto& s : d.sequences) {
            if (s.size() != len) throw ValidationError("sequences within a dataset differ in length");
        }
        return len;
    };
    const auto reference_classes = classes_of(datasets.front());
    const std::size_t reference_length = length_of(datasets.front());
    for (const auto& d : datasets) {
        if (classes_of(d) != reference_classes) {
            throw ValidationError("cross classification requires a shared class universe");
        }
        if (length_of(d) != reference_length) {
            throw ValidationError("cross classification requires a shared sequence length");
        }
    }

    std::vector<FoldSplit> splits;
    splits.reserve(datasets.size());
    for (const auto& d : datasets) splits.push_back(split_fold(d, fold));

    std::vector<std::vector<double>> matrix(datasets.size(), std::vector<double>(datasets.size(), 0.0));
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        for (std::size_t j = 0; j < datasets.size(); ++j) {
            FoldSplit mixed{splits[i].train, splits[i].validation, splits[j].test};
            matrix[i][j] = max_recall(classifier.classify(mixed));
        }
    }
    return matrix;
}

std::string format_pr_csv(const EvaluationReport& report) {
    std::ostringstream out;
    out << "fold,threshold,precision,recall\n";
    for (const auto& f : report.folds) {
        for (const auto& p : f.points) out << f.fold << ',' << p.threshold << ',' << p.precision << ',' << p.recall << '\n';
    }
    for (const auto& p : report.mean_points) out << "mean," << p.threshold << ',' << p.precision << ',' << p.recall << '\n';
    return out.str();
}

}  // namespace padwerk

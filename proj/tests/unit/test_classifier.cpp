#include <gtest/gtest.h>

#include <cmath>

#include "padwerk/classifier.hpp"
#include "padwerk/error.hpp"
#include "padwerk/random.hpp"

using namespace padwerk;

namespace {

DirectionSequence seq(std::vector<int> v) {
    DirectionSequence s;
    s.values.assign(v.begin(), v.end());
    return s;
}

std::vector<double> one_hot(std::size_t c, double v = 1.0) {
    std::vector<double> row(kMonitoredClasses, 0.0);
    row[c] = v;
    return row;
}

}  // namespace

TEST(Featurize, HandExample) {
    EXPECT_EQ(featurize(seq({1, 1, 1, 1}), 2), (FeatureVector{4, 0, 4, 0.5, 1.0}));
    EXPECT_EQ(featurize(seq({1, -1, -1, 0}), 2), (FeatureVector{1, 2, 3, 0.0, -1.0 / 3}));
}

TEST(Featurize, TrailingZerosDoNotMatter) {
    Rng rng{4};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> v(1 + rng.below(300));
        for (int& x : v) x = static_cast<int>(rng.below(3)) - 1;
        std::vector<int> padded = v;
        padded.resize(v.size() + 1 + rng.below(500), 0);
        EXPECT_EQ(featurize(seq(v), 16), featurize(seq(padded), 16));
    }
}

TEST(Featurize, AllZeroAndBadPointCount) {
    EXPECT_EQ(featurize(seq({0, 0, 0}), 3), FeatureVector(6, 0.0));
    EXPECT_THROW(featurize(seq({1}), 1), ValidationError);
}

TEST(ScoreMatrix, RowValidation) {
    ScoreMatrix m;
    const Label l = Label::monitored(0, 0, 0);
    EXPECT_THROW(m.add_row(l, std::vector<double>(49, 0.0)), ValidationError);
    EXPECT_THROW(m.add_row(l, one_hot(0, 1.5)), ValidationError);
    EXPECT_THROW(m.add_row(l, one_hot(0, -0.1)), ValidationError);
    EXPECT_THROW(m.add_row(l, one_hot(0, std::nan(""))), ValidationError);
    auto two = one_hot(0, 0.7);
    two[1] = 0.7;
    EXPECT_THROW(m.add_row(l, two), ValidationError);
    m.add_row(l, one_hot(3, 0.4));
    EXPECT_EQ(m.rows(), 1u);
    EXPECT_EQ(m.argmax(0), 3u);
}

TEST(Knn, IdenticalPointWithOneNeighbour) {
    LabeledFeatures train{{Label::monitored(3, 0, 0), Label::monitored(7, 0, 0)}, {{0, 0}, {1, 1}}};
    LabeledFeatures test{{Label::monitored(7, 9, 0)}, {{1, 1}}};
    const ScoreMatrix s = knn_scores(train, test, 1);
    EXPECT_EQ(s.row(0)[7], 1.0);
    EXPECT_EQ(s.row(0)[3], 0.0);
}

TEST(Knn, VoteShares) {
    // three site-2 samples and two unmonitored ones, all equidistant
    LabeledFeatures train;
    for (int i = 0; i < 3; ++i) train.labels.push_back(Label::monitored(2, 0, i));
    for (int i = 0; i < 2; ++i) train.labels.push_back(Label::unmonitored(i));
    train.features.assign(5, FeatureVector{1.0});
    LabeledFeatures test{{Label::monitored(2, 9, 0)}, {{1.0}}};
    const ScoreMatrix s = knn_scores(train, test, 5);
    EXPECT_DOUBLE_EQ(s.row(0)[2], 0.6);
    EXPECT_THROW(knn_scores(train, test, 6), ValidationError);
    EXPECT_THROW(knn_scores(train, test, 0), ValidationError);
}

TEST(Knn, SeparatesTwoClusters) {
    Rng rng{8};
    LabeledFeatures train, test;
    auto point = [&](double centre) {
        return FeatureVector{centre + rng.uniform(-0.1, 0.1), centre + rng.uniform(-0.1, 0.1)};
    };
    for (int i = 0; i < 20; ++i) {
        train.labels.push_back(Label::monitored(0, 0, i));
        train.features.push_back(point(0));
        train.labels.push_back(Label::monitored(1, 0, i));
        train.features.push_back(point(5));
    }
    for (int i = 0; i < 10; ++i) {
        test.labels.push_back(Label::monitored(0, 9, i));
        test.features.push_back(point(0));
        test.labels.push_back(Label::monitored(1, 9, i));
        test.features.push_back(point(5));
    }
    const ScoreMatrix s = knn_scores(train, test, 5);
    EXPECT_DOUBLE_EQ(max_recall(s), 1.0);
}

TEST(PrecisionRecall, HandCase) {
    ScoreMatrix m;
    m.add_row(Label::monitored(0, 0, 0), one_hot(0, 0.8));   // right
    m.add_row(Label::monitored(1, 0, 0), one_hot(0, 0.6));   // wrong monitored class
    m.add_row(Label::unmonitored(0), one_hot(2, 0.4));       // unmonitored flagged
    m.add_row(Label::monitored(3, 0, 0), one_hot(3, 0.2));   // right, low score

    auto p = pr_point(m, 0.5);
    ASSERT_TRUE(p);
    EXPECT_DOUBLE_EQ(p->precision, 0.5);
    EXPECT_DOUBLE_EQ(p->recall, 1.0 / 3);
    p = pr_point(m, 0.7);
    ASSERT_TRUE(p);
    EXPECT_DOUBLE_EQ(p->precision, 1.0);
    EXPECT_DOUBLE_EQ(p->recall, 1.0 / 3);
    p = pr_point(m, 0.0);
    ASSERT_TRUE(p);
    EXPECT_DOUBLE_EQ(p->precision, 0.5);
    EXPECT_DOUBLE_EQ(p->recall, 2.0 / 3);
    EXPECT_FALSE(pr_point(m, 0.9));
    EXPECT_DOUBLE_EQ(max_recall(m), 2.0 / 3);
}

TEST(PrecisionRecall, ThreeSampleCase) {
    ScoreMatrix m;
    m.add_row(Label::monitored(0, 9, 0), one_hot(0, 0.9));
    m.add_row(Label::monitored(1, 9, 0), one_hot(0, 0.6));
    m.add_row(Label::unmonitored(9), one_hot(0, 0.4));
    const auto half = pr_point(m, 0.5);
    ASSERT_TRUE(half);
    EXPECT_EQ(half->precision, 0.5);
    EXPECT_EQ(half->recall, 0.5);
    const auto high = pr_point(m, 0.7);
    ASSERT_TRUE(high);
    EXPECT_EQ(high->precision, 1.0);
    EXPECT_EQ(high->recall, 0.5);
}

TEST(PrecisionRecall, UnmonitoredOnlyIsUndefined) {
    ScoreMatrix m;
    m.add_row(Label::unmonitored(1), one_hot(0, 0.9));
    EXPECT_FALSE(pr_point(m, 0.0));
    EXPECT_THROW(max_recall(m), ValidationError);
    EXPECT_THROW(pr_sweep(m, 1), ValidationError);
}

TEST(PrecisionRecall, SweepProperties) {
    Rng rng{21};
    for (int trial = 0; trial < 20; ++trial) {
        ScoreMatrix m;
        for (int r = 0; r < 300; ++r) {
            const Label l = rng.below(3) == 0 ? Label::unmonitored(r)
                                              : Label::monitored(static_cast<int>(rng.below(50)), 0, 0);
            std::vector<double> row(kMonitoredClasses, 0.0);
            double left = 1.0;
            for (int c = 0; c < 3; ++c) {
                const double v = rng.uniform(0, left);
                row[rng.below(kMonitoredClasses)] += v;
                left -= v;
            }
            m.add_row(l, row);
        }
        const auto points = pr_sweep(m, 16);
        ASSERT_FALSE(points.empty());
        EXPECT_EQ(points.front().threshold, 0.0);
        EXPECT_DOUBLE_EQ(points.front().recall, max_recall(m));
        for (std::size_t i = 1; i < points.size(); ++i) {
            EXPECT_LE(points[i].recall, points[i - 1].recall);
            EXPECT_DOUBLE_EQ(points[i].threshold, points[i - 1].threshold + 1.0 / 16);
        }
        for (const auto& p : points) {
            EXPECT_GE(p.precision, 0.0);
            EXPECT_LE(p.precision, 1.0);
        }
    }
}

TEST(PrecisionRecall, RandomScoresSitAtChance) {
    Rng rng{99};
    ScoreMatrix m;
    for (int r = 0; r < 20'000; ++r) {
        std::vector<double> row(kMonitoredClasses);
        for (double& v : row) v = rng.uniform01() / kMonitoredClasses;
        m.add_row(Label::monitored(static_cast<int>(rng.below(50)), 0, 0), row);
    }
    // binomial(20000, 1/50): standard deviation ~0.001
    EXPECT_NEAR(max_recall(m), 1.0 / 50, 0.005);
}

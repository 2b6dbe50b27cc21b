#pragma once

#include <span>

namespace trialkit {

double normalCdf(double z);
double logisticCdf(double x);

struct TrendTest {
    double slope = 0.0;
    double fStatistic = 0.0;
    double pValue = 1.0;
};

/// OLS of y against its 0-based index; F = (regression MS)/(residual MS)
/// with df (1, n-2). Zero-variance input yields F = 0, p = 1. A perfect
/// nonzero-slope fit yields p = 0.
TrendTest olsTrendFTest(std::span<const double> y);

/// Upper tail of the F distribution, P(F_{df1,df2} > f).
double fUpperTail(double f, int df1, int df2);

struct RankSumResult {
    double w = 0.0;         // rank sum of the first sample, midrank ties
    double pTwoSided = 1.0;
    bool exact = false;
};

/// Wilcoxon rank-sum. Exact p by full enumeration of rank assignments when
/// n + m <= 12, normal approximation with continuity correction otherwise.
/// Two-sided p is P(|W' - E[W]| >= |W - E[W]|) under the null.
RankSumResult rankSumTest(std::span<const double> a, std::span<const double> b);

}  // namespace trialkit

#include "trialkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>

#include "trialkit/errors.hpp"

namespace trialkit {

double normalCdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double logisticCdf(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

TrendTest olsTrendFTest(std::span<const double> y) {
    const std::size_t n = y.size();
    if (n < 3) throw EngineError(errc::short_window, "trend test needs at least 3 points");
    const double nd = static_cast<double>(n);
    const double xMean = (nd - 1.0) / 2.0;
    double yMean = 0.0;
    for (double v : y) yMean += v;
    yMean /= nd;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - xMean;
        const double dy = y[i] - yMean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    TrendTest result;
    const double eps = 1e-12 * std::max(1.0, syy);
    if (syy <= std::numeric_limits<double>::min()) {
        // flat window: no trend by definition
        return result;
    }
    result.slope = sxy / sxx;
    const double ssr = sxy * sxy / sxx;
    const double sse = syy - ssr;
    if (sse <= eps) {
        result.fStatistic = std::numeric_limits<double>::infinity();
        result.pValue = 0.0;
        return result;
    }
    result.fStatistic = ssr / (sse / (nd - 2.0));
    result.pValue = fUpperTail(result.fStatistic, 1, static_cast<int>(n) - 2);
    return result;
}

double fUpperTail(double f, int df1, int df2) {
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    boost::math::fisher_f dist(df1, df2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

namespace {

std::vector<double> midranks(const std::vector<double>& combined) {
    const std::size_t n = combined.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return combined[a] < combined[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && combined[idx[j + 1]] == combined[idx[i]]) ++j;
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

/// Counts, over all C(N, n) rank subsets, those with |sum - mu| >= |w - mu|.
void enumerateSubsets(const std::vector<double>& ranks, std::size_t n, double threshold,
                      double mu, std::size_t start, std::size_t chosen, double sum,
                      long long& hits, long long& total) {
    if (chosen == n) {
        ++total;
        if (std::abs(sum - mu) >= threshold - 1e-12) ++hits;
        return;
    }
    if (ranks.size() - start < n - chosen) return;
    enumerateSubsets(ranks, n, threshold, mu, start + 1, chosen + 1, sum + ranks[start], hits,
                     total);
    enumerateSubsets(ranks, n, threshold, mu, start + 1, chosen, sum, hits, total);
}

}  // namespace

RankSumResult rankSumTest(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw EngineError(errc::empty, "rank-sum requires two non-empty samples");
    const std::size_t n = a.size(), m = b.size(), total = n + m;
    std::vector<double> combined;
    combined.reserve(total);
    combined.insert(combined.end(), a.begin(), a.end());
    combined.insert(combined.end(), b.begin(), b.end());
    const std::vector<double> ranks = midranks(combined);

    RankSumResult result;
    for (std::size_t i = 0; i < n; ++i) result.w += ranks[i];
    const double mu = static_cast<double>(n) * (static_cast<double>(total) + 1.0) / 2.0;

    if (total <= 12) {
        result.exact = true;
        long long hits = 0, count = 0;
        enumerateSubsets(ranks, n, std::abs(result.w - mu), mu, 0, 0, 0.0, hits, count);
        result.pTwoSided = static_cast<double>(hits) / static_cast<double>(count);
        return result;
    }

    // tie-corrected variance
    double tieTerm = 0.0;
    {
        std::vector<double> sorted(combined);
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tieTerm += t * t * t - t;
            i = j + 1;
        }
    }
    const double nd = static_cast<double>(n), md = static_cast<double>(m),
                 totald = static_cast<double>(total);
    const double variance =
        nd * md / 12.0 * (totald + 1.0 - tieTerm / (totald * (totald - 1.0)));
    if (variance <= 0.0) {
        result.pTwoSided = 1.0;  // everything tied
        return result;
    }
    const double z = (std::abs(result.w - mu) - 0.5) / std::sqrt(variance);
    result.pTwoSided = std::min(1.0, 2.0 * (1.0 - normalCdf(std::max(z, 0.0))));
    return result;
}

}  // namespace trialkit

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace placenav {

struct GroupSummary {
    std::string name;
    std::size_t n = 0;
    double mean = 0.0;
    double sem = 0.0;  // sample stdev / sqrt(n)
};

struct StatsSummary {
    std::vector<GroupSummary> groups;
    double ss_between = 0.0;
    double ss_within = 0.0;
    int df_between = 0;
    int df_within = 0;
    /// Empty when the within-group variance is zero.
    std::optional<double> f;
    std::optional<double> p;
};

/// Reference values of the policy-learning ANOVA reported for the original
/// study. Documentation only; not used as test oracles.
inline constexpr double kReportedAnovaF = 127.36;
inline constexpr double kReportedAnovaP = 1.22e-68;

double mean(std::span<const double> values);
/// Standard error of the mean; requires at least two values.
double sem(std::span<const double> values);

/// One-way ANOVA with per-group mean and SEM. Requires >= 2 groups with
/// n >= 2 each.
StatsSummary summarize(const std::vector<std::vector<double>>& groups,
                       const std::vector<std::string>& names = {});

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

/// P(F > f) for an F(d1, d2) variate.
double f_survival(double f, double d1, double d2);

}  // namespace placenav

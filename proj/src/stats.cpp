#include "placenav/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace placenav {
namespace {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    return h;
}

}  // namespace

double mean(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double sem(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("sem: need at least two values");
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    const double n = static_cast<double>(values.size());
    return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_survival(double f, double d1, double d2) {
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

StatsSummary summarize(const std::vector<std::vector<double>>& groups,
                       const std::vector<std::string>& names) {
    if (groups.size() < 2) throw std::invalid_argument("summarize: need at least two groups");
    StatsSummary out;
    double grand = 0.0;
    std::size_t total = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& v = groups[g];
        if (v.size() < 2) throw std::invalid_argument("summarize: every group needs n >= 2");
        GroupSummary s;
        s.name = g < names.size() ? names[g] : "group" + std::to_string(g);
        s.n = v.size();
        s.mean = mean(v);
        s.sem = sem(v);
        out.groups.push_back(s);
        for (double x : v) grand += x;
        total += v.size();
    }
    grand /= static_cast<double>(total);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double m = out.groups[g].mean;
        out.ss_between += static_cast<double>(groups[g].size()) * (m - grand) * (m - grand);
        for (double x : groups[g]) out.ss_within += (x - m) * (x - m);
    }
    out.df_between = static_cast<int>(groups.size()) - 1;
    out.df_within = static_cast<int>(total - groups.size());
    if (out.ss_within > 0.0) {
        const double f = (out.ss_between / out.df_between) / (out.ss_within / out.df_within);
        out.f = f;
        out.p = f_survival(f, out.df_between, out.df_within);
    }
    return out;
}

}  // namespace placenav

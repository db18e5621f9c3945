#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dedupe/error.hpp"
#include "dedupe/text.hpp"

namespace dedupe {

// Nine field-similarity algorithms. Every function maps two Unicode strings
// to [0, 1] where 1 is an exact match; all are total over valid strings.

enum class MetricKind {
    jaro,
    jaro_winkler,
    ngram,
    smith_waterman,
    levenshtein,
    damerau_levenshtein,
    longest_common_substring,
    binary,
    monge_elkan,
};

struct SmithWatermanParams {
    int match_score = 1;
    int mismatch_penalty = -1;
    int gap_penalty = -1;
};

/// One concrete metric with its parameters. monge_elkan is not atomic;
/// it takes one of the eight atomic metrics as its inner comparer.
struct AtomicMetric {
    MetricKind kind = MetricKind::binary;
    int ngram_n = 2;              // ngram
    double prefix_weight = 0.1;   // jaro_winkler
    int max_prefix = 4;           // jaro_winkler
    SmithWatermanParams sw{};     // smith_waterman
};

struct MetricSpec {
    AtomicMetric metric;
    std::optional<AtomicMetric> inner; // required iff metric.kind == monge_elkan
};

inline std::string_view metric_name(MetricKind k) {
    switch (k) {
        case MetricKind::jaro: return "jaro";
        case MetricKind::jaro_winkler: return "jaro_winkler";
        case MetricKind::ngram: return "ngram";
        case MetricKind::smith_waterman: return "smith_waterman";
        case MetricKind::levenshtein: return "levenshtein";
        case MetricKind::damerau_levenshtein: return "damerau_levenshtein";
        case MetricKind::longest_common_substring: return "longest_common_substring";
        case MetricKind::binary: return "binary";
        case MetricKind::monge_elkan: return "monge_elkan";
    }
    return "unknown";
}

inline MetricKind parse_metric_kind(std::string_view name) {
    static const std::map<std::string_view, MetricKind> table = {
        {"jaro", MetricKind::jaro},
        {"jaro_winkler", MetricKind::jaro_winkler},
        {"ngram", MetricKind::ngram},
        {"smith_waterman", MetricKind::smith_waterman},
        {"levenshtein", MetricKind::levenshtein},
        {"damerau_levenshtein", MetricKind::damerau_levenshtein},
        {"longest_common_substring", MetricKind::longest_common_substring},
        {"binary", MetricKind::binary},
        {"monge_elkan", MetricKind::monge_elkan},
    };
    const auto it = table.find(name);
    if (it == table.end()) throw ParamError("unknown metric: " + std::string(name));
    return it->second;
}

namespace detail {

using Cp = std::span<const char32_t>;

inline double jaro_impl(Cp a, Cp b) {
    const std::size_t la = a.size(), lb = b.size();
    if (la == 0 && lb == 0) return 1.0;
    if (la == 0 || lb == 0) return 0.0;
    const std::size_t max_len = std::max(la, lb);
    const std::size_t window = max_len / 2 > 0 ? max_len / 2 - 1 : 0;

    std::vector<char> a_matched(la, 0), b_matched(lb, 0);
    std::size_t m = 0;
    for (std::size_t i = 0; i < la; ++i) {
        const std::size_t lo = i > window ? i - window : 0;
        const std::size_t hi = std::min(lb, i + window + 1);
        for (std::size_t j = lo; j < hi; ++j) {
            if (!b_matched[j] && a[i] == b[j]) {
                a_matched[i] = 1;
                b_matched[j] = 1;
                ++m;
                break;
            }
        }
    }
    if (m == 0) return 0.0;

    // Transpositions: matched characters compared in order; half the
    // number of positions where the two sequences disagree.
    std::size_t t2 = 0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < la; ++i) {
        if (!a_matched[i]) continue;
        while (!b_matched[j]) ++j;
        if (a[i] != b[j]) ++t2;
        ++j;
    }
    const double md = static_cast<double>(m);
    const double t = static_cast<double>(t2) / 2.0;
    return (md / static_cast<double>(la) + md / static_cast<double>(lb) + (md - t) / md) / 3.0;
}

inline double jaro_winkler_impl(Cp a, Cp b, double prefix_weight, int max_prefix) {
    if (prefix_weight < 0.0 || prefix_weight > 0.25) {
        throw ParamError("jaro_winkler prefix_weight must be in [0, 0.25]");
    }
    if (max_prefix < 0) throw ParamError("jaro_winkler max_prefix must be >= 0");
    const double j = jaro_impl(a, b);
    std::size_t l = 0;
    const std::size_t cap = std::min({a.size(), b.size(), static_cast<std::size_t>(max_prefix)});
    while (l < cap && a[l] == b[l]) ++l;
    return j + static_cast<double>(l) * prefix_weight * (1.0 - j);
}

// Multiset Dice over n-grams of the strings left-padded with (n-1)
// sentinels. The sentinel lies outside Unicode, so it can never collide
// with input characters.
inline double ngram_impl(Cp a, Cp b, int n) {
    if (n < 2 || n > 4) throw ParamError("ngram n must be 2, 3 or 4");
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    constexpr char32_t kSentinel = 0xFFFFFFFFu;

    const auto grams = [n](Cp s) {
        std::vector<std::u32string> out;
        std::u32string padded(static_cast<std::size_t>(n - 1), kSentinel);
        padded.append(s.begin(), s.end());
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= padded.size(); ++i) {
            out.push_back(padded.substr(i, static_cast<std::size_t>(n)));
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    const auto ga = grams(a);
    const auto gb = grams(b);

    std::size_t common = 0;
    std::size_t i = 0, j = 0;
    while (i < ga.size() && j < gb.size()) {
        if (ga[i] == gb[j]) { ++common; ++i; ++j; }
        else if (ga[i] < gb[j]) ++i;
        else ++j;
    }
    return 2.0 * static_cast<double>(common) / static_cast<double>(ga.size() + gb.size());
}

inline double smith_waterman_impl(Cp a, Cp b, const SmithWatermanParams& p) {
    if (p.match_score <= 0) throw ParamError("smith_waterman match_score must be > 0");
    if (p.mismatch_penalty > 0) throw ParamError("smith_waterman mismatch_penalty must be <= 0");
    if (p.gap_penalty > 0) throw ParamError("smith_waterman gap_penalty must be <= 0");
    const std::size_t la = a.size(), lb = b.size();
    if (la == 0 && lb == 0) return 1.0;
    if (la == 0 || lb == 0) return 0.0;

    // Local alignment DP, cells floored at zero; one rolling row.
    std::vector<long long> prev(lb + 1, 0), cur(lb + 1, 0);
    long long best = 0;
    for (std::size_t i = 1; i <= la; ++i) {
        cur[0] = 0;
        for (std::size_t j = 1; j <= lb; ++j) {
            const long long sub = (a[i - 1] == b[j - 1]) ? p.match_score : p.mismatch_penalty;
            long long v = prev[j - 1] + sub;
            v = std::max(v, prev[j] + p.gap_penalty);
            v = std::max(v, cur[j - 1] + p.gap_penalty);
            v = std::max(v, 0ll);
            cur[j] = v;
            best = std::max(best, v);
        }
        std::swap(prev, cur);
    }
    const double denom = static_cast<double>(p.match_score) * static_cast<double>(std::min(la, lb));
    return static_cast<double>(best) / denom;
}

inline std::size_t levenshtein_distance(Cp a, Cp b) {
    const std::size_t la = a.size(), lb = b.size();
    std::vector<std::size_t> prev(lb + 1), cur(lb + 1);
    for (std::size_t j = 0; j <= lb; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= la; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= lb; ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[lb];
}

// Optimal string alignment: Levenshtein plus adjacent transposition,
// each substring edited at most once.
inline std::size_t osa_distance(Cp a, Cp b) {
    const std::size_t la = a.size(), lb = b.size();
    std::vector<std::vector<std::size_t>> d(la + 1, std::vector<std::size_t>(lb + 1));
    for (std::size_t i = 0; i <= la; ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= lb; ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= la; ++i) {
        for (std::size_t j = 1; j <= lb; ++j) {
            const std::size_t cost = (a[i - 1] == b[j - 1]) ? 0 : 1;
            std::size_t v = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
            if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
                v = std::min(v, d[i - 2][j - 2] + 1);
            }
            d[i][j] = v;
        }
    }
    return d[la][lb];
}

inline double distance_to_similarity(std::size_t dist, std::size_t la, std::size_t lb) {
    const std::size_t max_len = std::max(la, lb);
    if (max_len == 0) return 1.0;
    return 1.0 - static_cast<double>(dist) / static_cast<double>(max_len);
}

inline double lcs_impl(Cp a, Cp b) {
    const std::size_t la = a.size(), lb = b.size();
    if (la == 0 && lb == 0) return 1.0;
    if (la == 0 || lb == 0) return 0.0;
    std::vector<std::size_t> prev(lb + 1, 0), cur(lb + 1, 0);
    std::size_t best = 0;
    for (std::size_t i = 1; i <= la; ++i) {
        cur[0] = 0;
        for (std::size_t j = 1; j <= lb; ++j) {
            if (a[i - 1] == b[j - 1]) {
                cur[j] = prev[j - 1] + 1;
                best = std::max(best, cur[j]);
            } else {
                cur[j] = 0;
            }
        }
        std::swap(prev, cur);
    }
    return static_cast<double>(best) / static_cast<double>(std::max(la, lb));
}

inline double binary_impl(Cp a, Cp b) {
    return (a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin())) ? 1.0 : 0.0;
}

inline double evaluate_atomic(const AtomicMetric& m, Cp a, Cp b) {
    switch (m.kind) {
        case MetricKind::jaro: return jaro_impl(a, b);
        case MetricKind::jaro_winkler: return jaro_winkler_impl(a, b, m.prefix_weight, m.max_prefix);
        case MetricKind::ngram: return ngram_impl(a, b, m.ngram_n);
        case MetricKind::smith_waterman: return smith_waterman_impl(a, b, m.sw);
        case MetricKind::levenshtein:
            return distance_to_similarity(levenshtein_distance(a, b), a.size(), b.size());
        case MetricKind::damerau_levenshtein:
            return distance_to_similarity(osa_distance(a, b), a.size(), b.size());
        case MetricKind::longest_common_substring: return lcs_impl(a, b);
        case MetricKind::binary: return binary_impl(a, b);
        case MetricKind::monge_elkan:
            throw ParamError("monge_elkan cannot be its own inner metric");
    }
    throw ParamError("unknown metric kind");
}

// Directed Monge-Elkan: mean over tokens of x of the best inner score
// against any token of y.
inline double monge_elkan_directed(const std::vector<CodePoints>& x,
                                   const std::vector<CodePoints>& y,
                                   const AtomicMetric& inner) {
    double total = 0.0;
    for (const auto& u : x) {
        double best = 0.0;
        for (const auto& v : y) {
            best = std::max(best, evaluate_atomic(inner, u, v));
        }
        total += best;
    }
    return total / static_cast<double>(x.size());
}

inline double monge_elkan_impl(Cp a, Cp b, const AtomicMetric& inner) {
    if (inner.kind == MetricKind::monge_elkan) {
        throw ParamError("monge_elkan inner metric must be atomic");
    }
    const auto ta = tokenize(CodePoints(a.begin(), a.end()));
    const auto tb = tokenize(CodePoints(b.begin(), b.end()));
    if (ta.empty() && tb.empty()) return 1.0;
    if (ta.empty() || tb.empty()) return 0.0;
    return (monge_elkan_directed(ta, tb, inner) + monge_elkan_directed(tb, ta, inner)) / 2.0;
}

} // namespace detail

inline double jaro(std::string_view a, std::string_view b) {
    const auto ca = decode_utf8(a), cb = decode_utf8(b);
    return detail::jaro_impl(ca, cb);
}

inline double jaro_winkler(std::string_view a, std::string_view b,
                           double prefix_weight = 0.1, int max_prefix = 4) {
    const auto ca = decode_utf8(a), cb = decode_utf8(b);
    return detail::jaro_winkler_impl(ca, cb, prefix_weight, max_prefix);
}

inline double ngram(std::string_view a, std::string_view b, int n) {
    const auto ca = decode_utf8(a), cb = decode_utf8(b);
    return detail::ngram_impl(ca, cb, n);
}

inline double smith_waterman(std::string_view a, std::string_view b,
                             const SmithWatermanParams& params = {}) {
    const auto ca = decode_utf8(a), cb = decode_utf8(b);
    return detail::smith_waterman_impl(ca, cb, params);
}

inline double levenshtein(std::string_view a, std::string_view b) {
    const auto ca = decode_utf8(a), cb = decode_utf8(b);
    return detail::distance_to_similarity(detail::levenshtein_distance(ca, cb), ca.size(), cb.size());
}

inline double damerau_levenshtein(std::string_view a, std::string_view b) {
    const auto ca = decode_utf8(a), cb = decode_utf8(b);
    return detail::distance_to_similarity(detail::osa_distance(ca, cb), ca.size(), cb.size());
}

inline double longest_common_substring(std::string_view a, std::string_view b) {
    const auto ca = decode_utf8(a), cb = decode_utf8(b);
    return detail::lcs_impl(ca, cb);
}

inline double binary(std::string_view a, std::string_view b) {
    return a == b ? 1.0 : 0.0;
}

inline double monge_elkan(std::string_view a, std::string_view b, const AtomicMetric& inner) {
    const auto ca = decode_utf8(a), cb = decode_utf8(b);
    return detail::monge_elkan_impl(ca, cb, inner);
}

/// Edit distances on raw strings; exposed for oracle comparisons.
inline std::size_t levenshtein_distance(std::string_view a, std::string_view b) {
    const auto ca = decode_utf8(a), cb = decode_utf8(b);
    return detail::levenshtein_distance(ca, cb);
}

inline std::size_t osa_distance(std::string_view a, std::string_view b) {
    const auto ca = decode_utf8(a), cb = decode_utf8(b);
    return detail::osa_distance(ca, cb);
}

/// Dispatch on a full metric spec (handles monge_elkan's inner metric).
inline double evaluate_metric(const MetricSpec& spec, std::string_view a, std::string_view b) {
    if (spec.metric.kind == MetricKind::monge_elkan) {
        if (!spec.inner) throw ParamError("monge_elkan requires an inner metric");
        return monge_elkan(a, b, *spec.inner);
    }
    const auto ca = decode_utf8(a), cb = decode_utf8(b);
    return detail::evaluate_atomic(spec.metric, ca, cb);
}

} // namespace dedupe

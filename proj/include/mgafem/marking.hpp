#pragma once

#include "mgafem/estimator.hpp"
#include "mgafem/mesh.hpp"

#include <deque>
#include <optional>
#include <string_view>
#include <vector>

namespace mgafem {

enum class MarkingKind { regular, irregular };

enum class IrregularVariant {
    cap_largest,  // keep the previous cardinality, largest normalized indicators first
    empty,        // mark nothing
};

std::string_view to_string(IrregularVariant variant);
IrregularVariant parse_irregular_variant(std::string_view text);

/**
 * Minimal-cardinality Doerfler set: the shortest prefix of the indicators,
 * sorted descending (ties by ascending index), whose sum reaches
 * theta * total. Returns the empty set when the total is zero.
 */
MarkSet doerfler_min(const IndicatorField& indicators, double theta);

/**
 * Union of the smaller of the two sets (ties towards `primal`) with up to
 * (c_mark - 1) * #smaller further elements of the other set, chosen by
 * descending indicator of the other estimator.
 */
MarkSet combine_marks(const MarkSet& primal, const MarkSet& dual, const IndicatorField& primal_indicators,
                      const IndicatorField& dual_indicators, double c_mark);

/**
 * Estimator values of the last N-1 active dual problems, indexed by lag
 * i = 1..N-1 (zeta^active_{l-i}), plus the previous mark cardinality. Levels
 * -k < 0 read seed[k-1] (zero unless seeded).
 */
class ActiveHistory {
public:
    explicit ActiveHistory(int num_goals);

    /// seed[k-1] stands for the active estimator of level -k.
    void seed(std::vector<double> values);
    /// Records the active estimator of the level just finished.
    void push(double zeta_active);
    void record_marks(int count) { previous_marks_ = count; }

    int lags() const { return lags_; }
    double at_lag(int i) const;
    double max() const;
    std::optional<int> previous_marks() const { return previous_marks_; }

private:
    int lags_;
    std::vector<double> seed_;
    std::deque<double> recent_;  // newest first
    int pushes_ = 0;
    std::optional<int> previous_marks_;
};

/// Regular iff rho_irr * max(lags) <= zeta_now; always regular without lags.
MarkingKind decide_marking(double zeta_now, const ActiveHistory& history, double rho_irr);

/**
 * Irregular marking. cap_largest keeps the min(cap, #M_uz) elements with the
 * largest max(ind_u / total_u, ind_z / total_z), ties by index; no cap means
 * M_uz unchanged. empty returns the empty set.
 */
MarkSet irregular_select(const MarkSet& combined, std::optional<int> cap, IrregularVariant variant,
                         const IndicatorField& primal_indicators, const IndicatorField& dual_indicators);

}  // namespace mgafem

#include "mgafem/marking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mgafem {

std::string_view to_string(IrregularVariant variant)
{
    return variant == IrregularVariant::cap_largest ? "cap_largest" : "empty";
}

IrregularVariant parse_irregular_variant(std::string_view text)
{
    if (text == "cap_largest")
        return IrregularVariant::cap_largest;
    if (text == "empty")
        return IrregularVariant::empty;
    throw InputError("unknown irregular variant '" + std::string(text) + "' (expected cap_largest or empty)");
}

namespace {

// Indices ordered by descending score, ties by ascending index.
template <typename Score>
void sort_descending(std::vector<int>& indices, Score score)
{
    std::sort(indices.begin(), indices.end(), [&](int a, int b) {
        const double sa = score(a), sb = score(b);
        if (sa != sb)
            return sa > sb;
        return a < b;
    });
}

}  // namespace

MarkSet doerfler_min(const IndicatorField& indicators, double theta)
{
    if (!(theta > 0.0 && theta <= 1.0))
        throw InputError("doerfler_min: theta must lie in (0, 1]");
    const auto& values = indicators.values;
    const int n = static_cast<int>(values.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    sort_descending(order, [&](int t) { return values[t]; });

    // The total is summed in the same order as the prefix, so theta = 1
    // terminates exactly at the last nonzero indicator.
    double total = 0.0;
    for (int t : order)
        total += values[t];
    if (!(total > 0.0))
        return {};
    const double goal = theta * total;
    double sum = 0.0;
    std::vector<int> chosen;
    for (int t : order) {
        sum += values[t];
        chosen.push_back(t);
        if (sum >= goal)
            break;
    }
    return MarkSet(std::move(chosen), n);
}

MarkSet combine_marks(const MarkSet& primal, const MarkSet& dual, const IndicatorField& primal_indicators,
                      const IndicatorField& dual_indicators, double c_mark)
{
    if (!(c_mark >= 1.0))
        throw InputError("combine_marks: C_mark must be >= 1");
    const int n = static_cast<int>(primal_indicators.values.size());
    if (static_cast<int>(dual_indicators.values.size()) != n)
        throw InputError("combine_marks: indicator fields belong to different meshes");
    const bool primal_smaller = primal.size() <= dual.size();
    const MarkSet& smaller = primal_smaller ? primal : dual;
    const MarkSet& other = primal_smaller ? dual : primal;
    const IndicatorField& other_ind = primal_smaller ? dual_indicators : primal_indicators;

    const auto cap = static_cast<std::size_t>(std::floor(c_mark * smaller.size()));
    std::vector<int> result(smaller.elements().begin(), smaller.elements().end());
    std::vector<int> extra;
    for (int t : other.elements())
        if (!smaller.contains(t))
            extra.push_back(t);
    sort_descending(extra, [&](int t) { return other_ind.values[t]; });
    for (int t : extra) {
        if (result.size() >= cap)
            break;
        result.push_back(t);
    }
    return MarkSet(std::move(result), n);
}

ActiveHistory::ActiveHistory(int num_goals) : lags_(std::max(0, num_goals - 1)), seed_(lags_, 0.0) {}

void ActiveHistory::seed(std::vector<double> values)
{
    if (static_cast<int>(values.size()) != lags_)
        throw InputError("active history: seed needs N-1 values");
    for (double v : values)
        if (!(v >= 0.0))
            throw InputError("active history: seed values must be nonnegative");
    seed_ = std::move(values);
}

void ActiveHistory::push(double zeta_active)
{
    if (lags_ == 0)
        return;
    ++pushes_;
    recent_.push_front(zeta_active);
    if (static_cast<int>(recent_.size()) > lags_)
        recent_.pop_back();
}

double ActiveHistory::at_lag(int i) const
{
    if (i < 1 || i > lags_)
        throw InputError("active history: lag out of range");
    // lag i refers to level l - i; negative levels -k read seed[k - 1]
    return i <= pushes_ ? recent_[i - 1] : seed_[i - pushes_ - 1];
}

double ActiveHistory::max() const
{
    double best = 0.0;
    for (int i = 1; i <= lags_; ++i)
        best = std::max(best, at_lag(i));
    return best;
}

MarkingKind decide_marking(double zeta_now, const ActiveHistory& history, double rho_irr)
{
    if (history.lags() == 0)
        return MarkingKind::regular;
    return rho_irr * history.max() <= zeta_now ? MarkingKind::regular : MarkingKind::irregular;
}

MarkSet irregular_select(const MarkSet& combined, std::optional<int> cap, IrregularVariant variant,
                         const IndicatorField& primal_indicators, const IndicatorField& dual_indicators)
{
    const int n = static_cast<int>(primal_indicators.values.size());
    if (variant == IrregularVariant::empty)
        return {};
    if (!cap)
        return combined;
    if (*cap < 0)
        throw InputError("irregular_select: negative cap");
    const double tu = primal_indicators.total, tz = dual_indicators.total;
    auto score = [&](int t) {
        const double su = tu > 0.0 ? primal_indicators.values[t] / tu : 0.0;
        const double sz = tz > 0.0 ? dual_indicators.values[t] / tz : 0.0;
        return std::max(su, sz);
    };
    std::vector<int> order(combined.elements().begin(), combined.elements().end());
    sort_descending(order, score);
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(*cap)));
    return MarkSet(std::move(order), n);
}

}  // namespace mgafem

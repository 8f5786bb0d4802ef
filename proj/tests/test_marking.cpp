#include "mgafem/marking.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace mgafem;

namespace {

IndicatorField field(std::vector<double> values)
{
    IndicatorField f;
    f.total = 0.0;
    for (double v : values)
        f.total += v;
    f.values = std::move(values);
    return f;
}

std::vector<int> members(const MarkSet& s) { return {s.elements().begin(), s.elements().end()}; }

double mass(const IndicatorField& f, const MarkSet& s)
{
    double m = 0.0;
    for (int t : s.elements())
        m += f.values[t];
    return m;
}

int brute_force_minimum(const IndicatorField& f, double theta)
{
    const int n = static_cast<int>(f.values.size());
    int best = n + 1;
    for (unsigned subset = 0; subset < (1u << n); ++subset) {
        double m = 0.0;
        for (int t = 0; t < n; ++t)
            if (subset & (1u << t))
                m += f.values[t];
        if (m >= theta * f.total)
            best = std::min(best, std::popcount(subset));
    }
    return best;
}

}  // namespace

TEST_CASE("doerfler_min examples")
{
    const IndicatorField f = field({9, 4, 2, 1});
    CHECK(members(doerfler_min(f, 0.5)) == std::vector<int>{0});
    CHECK(members(doerfler_min(field({0, 3, 0, 1}), 1.0)) == std::vector<int>{1, 3});
    CHECK(members(doerfler_min(field({1, 1, 1, 1, 1}), 0.5)) == std::vector<int>{0, 1, 2});
    CHECK(doerfler_min(field({0, 0, 0}), 0.5).empty());
    CHECK_THROWS_AS(doerfler_min(f, 0.0), InputError);
    CHECK_THROWS_AS(doerfler_min(f, 1.5), InputError);
}

TEST_CASE("doerfler_min is minimal against exhaustive search")
{
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> size(1, 12);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> v(size(rng));
        for (double& x : v)
            x = trial % 3 == 0 ? std::floor(4 * value(rng)) : std::pow(value(rng), 3);
        const IndicatorField f = field(v);
        for (double theta : {0.3, 0.5, 1.0}) {
            const MarkSet m = doerfler_min(f, theta);
            if (f.total == 0.0) {
                CHECK(m.empty());
                continue;
            }
            CHECK(mass(f, m) >= theta * f.total);
            CHECK(m.size() == brute_force_minimum(f, theta));
        }
    }
}

TEST_CASE("combine_marks examples and contract")
{
    const IndicatorField u = field({5, 0, 0, 0});
    const IndicatorField z = field({0, 3, 2, 0});
    CHECK(members(combine_marks(MarkSet({0}, 4), MarkSet({1, 2}, 4), u, z, 2.0)) == std::vector<int>{0, 1});
    CHECK(members(combine_marks(MarkSet({0}, 4), MarkSet({0}, 4), u, z, 2.0)) == std::vector<int>{0});
    CHECK(members(combine_marks(MarkSet({0}, 4), MarkSet({1, 2}, 4), u, z, 1.0)) == std::vector<int>{0});
    // equal sizes: the primal set is the minimal one
    CHECK(members(combine_marks(MarkSet({0}, 4), MarkSet({1}, 4), u, z, 1.0)) == std::vector<int>{0});

    std::mt19937 rng(32);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 20;
        std::vector<double> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = value(rng);
            b[i] = value(rng);
        }
        const IndicatorField fu = field(a), fz = field(b);
        const MarkSet mu = doerfler_min(fu, 0.5), mz = doerfler_min(fz, 0.3 + 0.1 * (trial % 5));
        const double c_mark = 1.0 + 0.5 * (trial % 4);
        const MarkSet uz = combine_marks(mu, mz, fu, fz, c_mark);
        const MarkSet& smaller = mz.size() < mu.size() ? mz : mu;
        for (int t : smaller.elements())
            CHECK(uz.contains(t));
        for (int t : uz.elements())
            CHECK((mu.contains(t) || mz.contains(t)));
        CHECK(uz.size() <= c_mark * smaller.size());
    }
}

TEST_CASE("decide_marking")
{
    ActiveHistory fresh(3);
    CHECK(decide_marking(0.0, fresh, 0.25) == MarkingKind::regular);

    ActiveHistory h(3);
    h.push(1.0);
    h.push(0.4);
    CHECK(h.max() == 1.0);
    CHECK(h.at_lag(1) == 0.4);
    CHECK(h.at_lag(2) == 1.0);
    CHECK(decide_marking(0.5, h, 0.25) == MarkingKind::regular);
    CHECK(decide_marking(0.2, h, 0.25) == MarkingKind::irregular);
    h.push(0.1);  // lag 2 is now 0.4
    CHECK(h.max() == 0.4);

    ActiveHistory single(1);
    single.push(100.0);
    CHECK(single.lags() == 0);
    CHECK(decide_marking(0.0, single, 0.99) == MarkingKind::regular);

    ActiveHistory seeded(3);
    seeded.seed({0.7, 0.2});
    CHECK(seeded.at_lag(1) == 0.7);
    CHECK(seeded.at_lag(2) == 0.2);
    seeded.push(0.5);
    CHECK(seeded.at_lag(1) == 0.5);
    CHECK(seeded.at_lag(2) == 0.7);
}

TEST_CASE("irregular_select")
{
    const IndicatorField u = field({4, 1, 0, 3});
    const IndicatorField z = field({0, 2, 6, 0});
    const MarkSet uz({0, 1, 2, 3}, 4);
    CHECK(irregular_select(uz, 0, IrregularVariant::cap_largest, u, z).empty());
    CHECK(irregular_select(uz, 3, IrregularVariant::empty, u, z).empty());
    CHECK(irregular_select(uz, 9, IrregularVariant::cap_largest, u, z) == uz);
    CHECK(irregular_select(uz, std::nullopt, IrregularVariant::cap_largest, u, z) == uz);
    // normalized scores: 0.5, 0.25, 0.75, 0.375
    CHECK(members(irregular_select(uz, 2, IrregularVariant::cap_largest, u, z)) == std::vector<int>{0, 2});
    CHECK(parse_irregular_variant("cap_largest") == IrregularVariant::cap_largest);
    CHECK(parse_irregular_variant("empty") == IrregularVariant::empty);
    CHECK_THROWS_AS(parse_irregular_variant("largest"), InputError);
}

TEST_CASE("marking is invariant under scaling by powers of two")
{
    std::mt19937 rng(33);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(15), b(15);
        for (int i = 0; i < 15; ++i) {
            a[i] = value(rng);
            b[i] = value(rng);
        }
        const double s = std::ldexp(1.0, trial % 20 - 10);
        std::vector<double> as = a, bs = b;
        for (double& x : as)
            x *= s;
        for (double& x : bs)
            x *= s;
        const IndicatorField fu = field(a), fz = field(b), fus = field(as), fzs = field(bs);
        const MarkSet mu = doerfler_min(fu, 0.5), mz = doerfler_min(fz, 0.5);
        CHECK(mu == doerfler_min(fus, 0.5));
        CHECK(mz == doerfler_min(fzs, 0.5));
        const MarkSet uz = combine_marks(mu, mz, fu, fz, 2.0);
        CHECK(uz == combine_marks(mu, mz, fus, fzs, 2.0));
        const int cap = trial % 6;
        CHECK(irregular_select(uz, cap, IrregularVariant::cap_largest, fu, fz) ==
              irregular_select(uz, cap, IrregularVariant::cap_largest, fus, fzs));
    }
}

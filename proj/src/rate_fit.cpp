#include "mgafem/driver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace mgafem {

namespace {

int parse_positive(std::string_view digits, std::string_view context)
{
    int value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || value < 1)
        throw InputError("invalid " + std::string(context) + " '" + std::string(digits) + "'");
    return value;
}

}  // namespace

Quantity Quantity::parse(std::string_view text)
{
    if (text == "delta")
        return {Kind::delta, 0, std::nullopt};
    if (text == "eta")
        return {Kind::eta, 0, std::nullopt};
    if (text.starts_with("zeta_"))
        return {Kind::zeta, parse_positive(text.substr(5), "quantity"), std::nullopt};
    if (text.starts_with("goal_error_"))
        return {Kind::goal_error, parse_positive(text.substr(11), "quantity"), std::nullopt};
    throw InputError("unknown quantity '" + std::string(text) + "'");
}

std::string Quantity::name() const
{
    switch (kind) {
    case Kind::delta:
        return "delta";
    case Kind::eta:
        return "eta";
    case Kind::zeta:
        return "zeta_" + std::to_string(goal);
    case Kind::goal_error:
        return "goal_error_" + std::to_string(goal);
    }
    return {};
}

Window Window::parse(std::string_view text)
{
    if (text == "decade")
        return {};
    if (text.starts_with("last:")) {
        Window w;
        w.kind = Kind::last;
        w.count = parse_positive(text.substr(5), "window");
        return w;
    }
    throw InputError("unknown window '" + std::string(text) + "' (expected decade or last:k)");
}

std::string Window::to_string() const
{
    switch (kind) {
    case Kind::decade:
        return "decade";
    case Kind::last:
        return "last:" + std::to_string(count);
    case Kind::range:
        return "levels " + std::to_string(first) + ".." + std::to_string(last);
    }
    return {};
}

RateFit rate_fit(std::span<const LevelRecord> levels, const Quantity& quantity, const Window& window, XAxis axis)
{
    struct Sample {
        int level;
        double x, y;
    };
    const int goal = quantity.goal - 1;
    if ((quantity.kind == Quantity::Kind::zeta || quantity.kind == Quantity::Kind::goal_error) &&
        (levels.empty() || goal < 0 || goal >= static_cast<int>(levels.front().zeta.size())))
        throw InputError("rate_fit: goal index out of range for " + quantity.name());

    bool ever_active = false;
    if (quantity.kind == Quantity::Kind::zeta)
        for (const LevelRecord& rec : levels)
            ever_active |= rec.active_goal == quantity.goal;

    std::optional<double> reference = quantity.reference;
    std::size_t usable = levels.size();
    if (quantity.kind == Quantity::Kind::goal_error && !reference) {
        if (levels.empty())
            throw InputError("rate_fit: window too small (no levels)");
        reference = levels.back().goal_values[goal];
        usable = levels.size() - 1;
    }

    std::vector<Sample> samples;
    for (std::size_t i = 0; i < usable; ++i) {
        const LevelRecord& rec = levels[i];
        double y = 0.0;
        switch (quantity.kind) {
        case Quantity::Kind::delta:
            y = rec.delta;
            break;
        case Quantity::Kind::eta:
            y = rec.eta;
            break;
        case Quantity::Kind::zeta:
            if (ever_active && rec.active_goal != quantity.goal)
                continue;
            y = rec.zeta[goal];
            break;
        case Quantity::Kind::goal_error:
            y = std::abs(*reference - rec.goal_values[goal]);
            break;
        }
        const double x = axis == XAxis::ndof ? static_cast<double>(rec.ndof) : static_cast<double>(rec.cumndof);
        samples.push_back({rec.level, x, y});
    }

    switch (window.kind) {
    case Window::Kind::decade: {
        double x_max = 0.0;
        for (const Sample& s : samples)
            x_max = std::max(x_max, s.x);
        std::erase_if(samples, [&](const Sample& s) { return s.x < x_max / 10.0; });
        break;
    }
    case Window::Kind::last:
        if (static_cast<int>(samples.size()) > window.count)
            samples.erase(samples.begin(), samples.end() - window.count);
        break;
    case Window::Kind::range:
        std::erase_if(samples, [&](const Sample& s) { return s.level < window.first || s.level > window.last; });
        break;
    }
    if (samples.size() < 3)
        throw InputError("rate_fit: window too small for " + quantity.name() + " (" +
                         std::to_string(samples.size()) + " points, need 3)");

    double sx = 0.0, sy = 0.0;
    RateFit fit;
    fit.x_min = samples.front().x;
    fit.x_max = samples.front().x;
    for (const Sample& s : samples) {
        if (!(s.x > 0.0) || !(s.y > 0.0) || !std::isfinite(s.y))
            throw InputError("rate_fit: nonpositive value of " + quantity.name() + " at level " +
                             std::to_string(s.level));
        sx += std::log(s.x);
        sy += std::log(s.y);
        fit.x_min = std::min(fit.x_min, s.x);
        fit.x_max = std::max(fit.x_max, s.x);
    }
    const double n = static_cast<double>(samples.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const Sample& s : samples) {
        const double dx = std::log(s.x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(s.y) - my);
    }
    if (!(sxx > 0.0))
        throw InputError("rate_fit: x values in the window are all equal");
    fit.slope = sxy / sxx;
    fit.points = static_cast<int>(samples.size());
    return fit;
}

double rate_fit_slope(std::span<const LevelRecord> levels, const Quantity& quantity, const Window& window,
                      XAxis axis)
{
    return rate_fit(levels, quantity, window, axis).slope;
}

}  // namespace mgafem

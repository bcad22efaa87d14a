#include "arhmm/geometry.hpp"

#include "arhmm/core.hpp"
#include "arhmm/errors.hpp"

#include <cmath>
#include <string>

namespace arhmm {

StepTurnSeries steps_and_turns(const Track& track, double zero_floor) {
    const auto& loc = track.locations;
    const std::size_t n = loc.size();
    if (n < 3) {
        throw DataError("steps_and_turns: track '" + track.id + "' has " +
                        std::to_string(n) + " locations, need at least 3");
    }
    if (zero_floor < 0.0) throw ArgumentError("steps_and_turns: zero_floor must be >= 0");

    std::vector<double> raw_steps(n - 1), headings(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dx = loc[i + 1].x - loc[i].x;
        const double dy = loc[i + 1].y - loc[i].y;
        double s = std::hypot(dx, dy);
        if (s == 0.0 && zero_floor == 0.0) {
            throw DomainError("steps_and_turns: zero-length step between locations " +
                              std::to_string(i) + " and " + std::to_string(i + 1) +
                              " of track '" + track.id + "' (zero_floor = 0)");
        }
        raw_steps[i] = std::max(s, zero_floor);
        headings[i] = std::atan2(dy, dx);
    }

    StepTurnSeries out;
    out.track_id = track.id;
    out.steps.reserve(n - 2);
    out.turns.reserve(n - 2);
    for (std::size_t t = 0; t + 2 < n; ++t) {
        out.steps.push_back(raw_steps[t + 1]);
        out.turns.push_back(wrap_angle(headings[t + 1] - headings[t]));
    }
    return out;
}

Track downsample(const Track& track, unsigned factor) {
    if (factor == 0) throw ArgumentError("downsample: factor must be >= 1");
    Track out;
    out.id = track.id;
    out.sample_rate_hz = track.sample_rate_hz / factor;
    out.locations.reserve(track.locations.size() / factor + 1);
    for (std::size_t i = 0; i < track.locations.size(); i += factor) {
        out.locations.push_back(track.locations[i]);
    }
    return out;
}

} // namespace arhmm

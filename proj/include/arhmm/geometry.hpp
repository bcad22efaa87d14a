#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace arhmm {

struct Location {
    double x = 0.0;
    double y = 0.0;
};

// Ordered planar locations for one animal; the raw ingestion unit.
struct Track {
    std::string id;
    std::vector<Location> locations;
    double sample_rate_hz = 1.0;
};

// Bivariate series of step lengths and turning angles derived from a track.
// Pairs are index-aligned: entry t holds the step that terminates the turn at
// the same index (see steps_and_turns for the alignment rule).
struct StepTurnSeries {
    std::string track_id;
    std::vector<double> steps; // > 0
    std::vector<double> turns; // in (-pi, pi]

    std::size_t length() const { return steps.size(); }
};

// Converts a track of n >= 3 locations into n-2 aligned (step, turn) pairs.
//
// Raw quantities: n-1 step lengths (Euclidean distances between consecutive
// locations) and n-2 turning angles (signed heading change at each interior
// location, counter-clockwise positive, wrapped into (-pi, pi]). The t-th
// aligned pair is (step from location t+1 to t+2, turn at location t+1); the
// leading raw step, which no turn precedes, is dropped.
//
// Steps shorter than zero_floor are raised to zero_floor when zero_floor > 0;
// with zero_floor = 0 an exactly zero-length step is a DomainError naming the
// offending location index.
StepTurnSeries steps_and_turns(const Track& track, double zero_floor = 0.0);

// Keeps every factor-th location starting at index 0 and divides the sample
// rate accordingly. factor must be >= 1.
Track downsample(const Track& track, unsigned factor);

} // namespace arhmm

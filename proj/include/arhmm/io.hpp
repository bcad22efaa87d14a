#pragma once

#include "arhmm/decode.hpp"
#include "arhmm/fit.hpp"
#include "arhmm/geometry.hpp"
#include "arhmm/model.hpp"

#include <string>
#include <vector>

namespace arhmm {

// --- CSV formats -----------------------------------------------------------
//
// TrackFile:   header `id,x,y` with optional fourth column `t_sec`, one row
//              per location, rows grouped by id in order; t_sec must be
//              strictly increasing within an id.
// SeriesFile:  header `id,t,step,turn`; step > 0, turn in (-pi, pi].
// States:      header `track_id,t,value`, value a 1-based state label.
// Residuals:   header `track_id,t,value`, value a residual or NA inside the
//              conditioning prefix; one file per variable.
//
// All writers format doubles with 17 significant digits, so write/read
// round-trips are exact and output bytes are deterministic.

std::vector<Track> read_tracks(const std::string& path);
void write_tracks(const std::string& path, const std::vector<Track>& tracks);

std::vector<StepTurnSeries> read_series(const std::string& path);
void write_series(const std::string& path, const std::vector<StepTurnSeries>& series);

std::vector<StateSequence> read_states(const std::string& path);
void write_states(const std::string& path, const std::vector<StateSequence>& states);

enum class ResidualVariable { step, turn };
void write_residuals(const std::string& path, const std::vector<ResidualSeries>& series,
                     ResidualVariable variable);

// Rebuilds a planar track from steps and turns: the heading accumulates each
// turn and the position advances by each step. origin and initial_heading are
// the two free constants steps_and_turns discards; the leading segment (whose
// length steps_and_turns also discards) reuses the first step value. Hence
// steps_and_turns(integrate_track(s, o, h)) == s up to rounding.
Track integrate_track(const StepTurnSeries& series, Location origin,
                      double initial_heading);

// --- JSON ------------------------------------------------------------------

std::string fit_to_json(const FitResult& fit);
// Accepts either a bare FitResult document or a cmd_fit envelope (uses the
// `refit` entry when present, else `selected`, else `fit`).
FitResult fit_from_json(const std::string& text);

void write_fit_json(const std::string& path, const FitResult& fit);
FitResult read_fit_json(const std::string& path);

std::string lambda_path_to_json(const LambdaPath& path);

// 17-significant-digit formatting used by every CSV writer.
std::string format_double(double v);

// Entire file as a string; DataError when unreadable.
std::string slurp_file(const std::string& path);
void spit_file(const std::string& path, const std::string& content);

} // namespace arhmm

#include "arhmm/io.hpp"

#include "arhmm/core.hpp"
#include "arhmm/errors.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace arhmm {

namespace {

using nlohmann::json;

std::string strip_cr(std::string line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    return line;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

double parse_double(const std::string& text, const std::string& path, std::size_t line_no,
                    const char* what) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw DataError(path + ":" + std::to_string(line_no) + ": cannot parse " + what +
                        " from '" + text + "'");
    return value;
}

long parse_long(const std::string& text, const std::string& path, std::size_t line_no,
                const char* what) {
    long value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw DataError(path + ":" + std::to_string(line_no) + ": cannot parse " + what +
                        " from '" + text + "'");
    return value;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(strip_cr(line));
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

void require_header(const std::vector<std::string>& lines, const std::string& path,
                    const std::vector<std::string>& expected_prefix) {
    if (lines.empty()) throw DataError("file '" + path + "' is empty");
    std::string expected;
    for (const auto& c : expected_prefix) {
        if (!expected.empty()) expected += ',';
        expected += c;
    }
    const auto cols = split_csv(lines[0]);
    if (cols.size() < expected_prefix.size())
        throw DataError(path + ":1: expected header '" + expected + "', got '" + lines[0] +
                        "'");
    for (std::size_t i = 0; i < expected_prefix.size(); ++i) {
        if (cols[i] != expected_prefix[i])
            throw DataError(path + ":1: expected header column " + std::to_string(i + 1) +
                            " to be '" + expected_prefix[i] + "', got '" + cols[i] + "'");
    }
}

// JSON (de)serialization helpers shared by fit and path documents.

json fit_to_json_obj(const FitResult& fit) {
    json j;
    j["params"] = json::parse(parameters_to_json(fit.params));
    j["loglik"] = fit.loglik;
    j["penalized_objective"] = fit.penalized_objective;
    j["lambda"] = fit.lambda;
    j["converged"] = fit.converged;
    j["n_starts_agreeing"] = fit.n_starts_agreeing;
    j["aic"] = fit.aic;
    j["bic"] = fit.bic;
    j["edf"] = fit.edf;
    return j;
}

FitResult fit_from_json_obj(const json& j) {
    if (!j.is_object()) throw DataError("fit JSON: document is not an object");
    if (!j.contains("params")) {
        for (const char* key : {"refit", "selected", "fit"}) {
            if (j.contains(key)) return fit_from_json_obj(j.at(key));
        }
        throw DataError("fit JSON: no 'params' entry (and no fit envelope)");
    }
    FitResult fit;
    try {
        fit.params = parameters_from_json(j.at("params").dump());
        fit.spec = spec_of(fit.params);
        fit.loglik = j.at("loglik").get<double>();
        fit.penalized_objective = j.at("penalized_objective").get<double>();
        fit.lambda = j.at("lambda").get<double>();
        fit.converged = j.at("converged").get<bool>();
        fit.n_starts_agreeing = j.at("n_starts_agreeing").get<int>();
        fit.aic = j.at("aic").get<double>();
        fit.bic = j.at("bic").get<double>();
        fit.edf = j.at("edf").get<int>();
    } catch (const json::exception& e) {
        throw DataError(std::string("fit JSON: ") + e.what());
    }
    return fit;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file '" + path + "'");
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

void spit_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open file '" + path + "' for writing");
    out << content;
    if (!out) throw DataError("failed writing file '" + path + "'");
}

std::vector<Track> read_tracks(const std::string& path) {
    const auto lines = read_lines(path);
    require_header(lines, path, {"id", "x", "y"});
    const auto header_cols = split_csv(lines[0]);
    const bool has_time = header_cols.size() >= 4 && header_cols[3] == "t_sec";
    if (header_cols.size() > (has_time ? 4u : 3u))
        throw DataError(path + ":1: unexpected extra header columns");
    if (lines.size() < 2) throw DataError("file '" + path + "' has a header but no rows");

    std::vector<Track> tracks;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<double> last_time;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto cols = split_csv(lines[li]);
        const std::size_t expected = has_time ? 4 : 3;
        if (cols.size() != expected)
            throw DataError(path + ":" + std::to_string(li + 1) + ": expected " +
                            std::to_string(expected) + " columns, got " +
                            std::to_string(cols.size()));
        if (cols[0].empty())
            throw DataError(path + ":" + std::to_string(li + 1) + ": empty id");
        const double x = parse_double(cols[1], path, li + 1, "x");
        const double y = parse_double(cols[2], path, li + 1, "y");
        if (!std::isfinite(x) || !std::isfinite(y))
            throw DataError(path + ":" + std::to_string(li + 1) + ": non-finite coordinate");

        auto [it, inserted] = index.emplace(cols[0], tracks.size());
        if (inserted) {
            tracks.push_back(Track{cols[0], {}, 1.0});
            last_time.push_back(0.0);
        }
        Track& track = tracks[it->second];

        if (has_time) {
            const double t = parse_double(cols[3], path, li + 1, "t_sec");
            if (!track.locations.empty() && !(t > last_time[it->second]))
                throw DataError(path + ":" + std::to_string(li + 1) +
                                ": t_sec not increasing within id '" + cols[0] + "'");
            last_time[it->second] = t;
        }
        track.locations.push_back(Location{x, y});
    }
    if (tracks.empty()) throw DataError("file '" + path + "' contains no data rows");
    return tracks;
}

void write_tracks(const std::string& path, const std::vector<Track>& tracks) {
    std::ostringstream oss;
    oss << "id,x,y\n";
    for (const auto& track : tracks)
        for (const auto& loc : track.locations)
            oss << track.id << ',' << format_double(loc.x) << ',' << format_double(loc.y)
                << '\n';
    spit_file(path, oss.str());
}

std::vector<StepTurnSeries> read_series(const std::string& path) {
    const auto lines = read_lines(path);
    require_header(lines, path, {"id", "t", "step", "turn"});
    if (lines.size() < 2) throw DataError("file '" + path + "' has a header but no rows");

    std::vector<StepTurnSeries> series;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<long> last_t;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto cols = split_csv(lines[li]);
        if (cols.size() != 4)
            throw DataError(path + ":" + std::to_string(li + 1) +
                            ": expected 4 columns, got " + std::to_string(cols.size()));
        if (cols[0].empty())
            throw DataError(path + ":" + std::to_string(li + 1) + ": empty id");
        const long t = parse_long(cols[1], path, li + 1, "t");
        const double step = parse_double(cols[2], path, li + 1, "step");
        const double turn = parse_double(cols[3], path, li + 1, "turn");
        if (!(step > 0.0) || !std::isfinite(step))
            throw DataError(path + ":" + std::to_string(li + 1) +
                            ": step must be a positive finite number");
        if (!std::isfinite(turn) || turn <= -pi || turn > pi)
            throw DataError(path + ":" + std::to_string(li + 1) +
                            ": turn must lie in (-pi, pi]");

        auto [it, inserted] = index.emplace(cols[0], series.size());
        if (inserted) {
            series.push_back(StepTurnSeries{cols[0], {}, {}});
            last_t.push_back(0);
        }
        StepTurnSeries& s = series[it->second];
        if (!s.steps.empty() && t <= last_t[it->second])
            throw DataError(path + ":" + std::to_string(li + 1) +
                            ": t not increasing within id '" + cols[0] + "'");
        last_t[it->second] = t;
        s.steps.push_back(step);
        s.turns.push_back(turn);
    }
    if (series.empty()) throw DataError("file '" + path + "' contains no data rows");
    return series;
}

void write_series(const std::string& path, const std::vector<StepTurnSeries>& series) {
    std::ostringstream oss;
    oss << "id,t,step,turn\n";
    for (const auto& s : series)
        for (std::size_t t = 0; t < s.length(); ++t)
            oss << s.track_id << ',' << t << ',' << format_double(s.steps[t]) << ','
                << format_double(s.turns[t]) << '\n';
    spit_file(path, oss.str());
}

std::vector<StateSequence> read_states(const std::string& path) {
    const auto lines = read_lines(path);
    require_header(lines, path, {"track_id", "t", "value"});
    if (lines.size() < 2) throw DataError("file '" + path + "' has a header but no rows");

    std::vector<StateSequence> out;
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto cols = split_csv(lines[li]);
        if (cols.size() != 3)
            throw DataError(path + ":" + std::to_string(li + 1) +
                            ": expected 3 columns, got " + std::to_string(cols.size()));
        const long value = parse_long(cols[2], path, li + 1, "state");
        if (value < 1)
            throw DataError(path + ":" + std::to_string(li + 1) +
                            ": state labels are 1-based positive integers");
        auto [it, inserted] = index.emplace(cols[0], out.size());
        if (inserted) out.push_back(StateSequence{cols[0], {}});
        out[it->second].states.push_back(static_cast<int>(value));
    }
    if (out.empty()) throw DataError("file '" + path + "' contains no data rows");
    return out;
}

void write_states(const std::string& path, const std::vector<StateSequence>& states) {
    std::ostringstream oss;
    oss << "track_id,t,value\n";
    for (const auto& s : states)
        for (std::size_t t = 0; t < s.states.size(); ++t)
            oss << s.track_id << ',' << t << ',' << s.states[t] << '\n';
    spit_file(path, oss.str());
}

void write_residuals(const std::string& path, const std::vector<ResidualSeries>& series,
                     ResidualVariable variable) {
    std::ostringstream oss;
    oss << "track_id,t,value\n";
    for (const auto& s : series) {
        const auto& values = variable == ResidualVariable::step ? s.r_step : s.r_turn;
        for (std::size_t t = 0; t < values.size(); ++t) {
            oss << s.track_id << ',' << t << ',';
            if (std::isnan(values[t]))
                oss << "NA";
            else
                oss << format_double(values[t]);
            oss << '\n';
        }
    }
    spit_file(path, oss.str());
}

Track integrate_track(const StepTurnSeries& series, Location origin,
                      double initial_heading) {
    Track track;
    track.id = series.track_id;
    track.locations.reserve(series.length() + 2);
    track.locations.push_back(origin);
    if (series.length() == 0) return track;

    double heading = initial_heading;
    Location pos = origin;
    // Leading segment: steps_and_turns drops the first raw step, so its
    // length is free; reuse the first step value.
    pos.x += series.steps[0] * std::cos(heading);
    pos.y += series.steps[0] * std::sin(heading);
    track.locations.push_back(pos);

    for (std::size_t t = 0; t < series.length(); ++t) {
        heading += series.turns[t];
        pos.x += series.steps[t] * std::cos(heading);
        pos.y += series.steps[t] * std::sin(heading);
        track.locations.push_back(pos);
    }
    return track;
}

std::string fit_to_json(const FitResult& fit) { return fit_to_json_obj(fit).dump(2); }

FitResult fit_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("fit JSON: ") + e.what());
    }
    return fit_from_json_obj(j);
}

void write_fit_json(const std::string& path, const FitResult& fit) {
    spit_file(path, fit_to_json(fit) + "\n");
}

FitResult read_fit_json(const std::string& path) { return fit_from_json(slurp_file(path)); }

std::string lambda_path_to_json(const LambdaPath& path) {
    json j;
    j["grid"] = path.grid;
    j["warm_started"] = path.warm_started;
    j["errors"] = path.errors;
    json fits = json::array();
    for (const auto& f : path.fits) {
        if (f)
            fits.push_back(fit_to_json_obj(*f));
        else
            fits.push_back(nullptr);
    }
    j["fits"] = std::move(fits);
    return j.dump(2);
}

} // namespace arhmm

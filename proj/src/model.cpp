#include "arhmm/model.hpp"

#include "arhmm/core.hpp"
#include "arhmm/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace arhmm {

namespace {

constexpr double boundary_nudge = 1e-8;

// exp with the argument clamped so from_working stays total on any finite input.
double safe_exp(double w) { return std::exp(std::clamp(w, -700.0, 700.0)); }

} // namespace

ModelSpec ModelSpec::uniform(int n_states, int degree_step, int degree_turn) {
    ModelSpec spec;
    spec.n_states = n_states;
    spec.p_step.assign(static_cast<std::size_t>(n_states), degree_step);
    spec.p_turn.assign(static_cast<std::size_t>(n_states), degree_turn);
    spec.validate();
    return spec;
}

int ModelSpec::max_p_step() const {
    return p_step.empty() ? 0 : *std::max_element(p_step.begin(), p_step.end());
}

int ModelSpec::max_p_turn() const {
    return p_turn.empty() ? 0 : *std::max_element(p_turn.begin(), p_turn.end());
}

void ModelSpec::validate() const {
    if (n_states < 1) throw ArgumentError("ModelSpec: n_states must be >= 1");
    if (p_step.size() != static_cast<std::size_t>(n_states) ||
        p_turn.size() != static_cast<std::size_t>(n_states)) {
        throw ArgumentError("ModelSpec: need one AR degree per state and variable");
    }
    for (int p : p_step)
        if (p < 0) throw ArgumentError("ModelSpec: negative step degree");
    for (int p : p_turn)
        if (p < 0) throw ArgumentError("ModelSpec: negative turn degree");
}

void Parameters::validate(const ModelSpec& spec) const {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_states);
    if (tpm.size() != n) throw ArgumentError("Parameters: tpm row count != n_states");
    for (const auto& row : tpm) {
        if (row.size() != n) throw ArgumentError("Parameters: tpm is not square");
        double sum = 0.0;
        for (double g : row) {
            if (!(g >= 0.0 && g <= 1.0)) throw DomainError("Parameters: tpm entry outside [0,1]");
            sum += g;
        }
        if (std::fabs(sum - 1.0) > 1e-12) throw DomainError("Parameters: tpm row sum != 1");
    }
    if (mu_step.size() != n || cv_step.size() != n || mu_turn.size() != n ||
        kappa_turn.size() != n || phi_step.size() != n || phi_turn.size() != n) {
        throw ArgumentError("Parameters: per-state block size != n_states");
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!(mu_step[j] > 0.0)) throw DomainError("Parameters: mu_step must be > 0");
        if (!(cv_step[j] > 0.0)) throw DomainError("Parameters: cv_step must be > 0");
        if (!(kappa_turn[j] >= 0.0)) throw DomainError("Parameters: kappa_turn must be >= 0");
        if (!(mu_turn[j] > -pi - 1e-12 && mu_turn[j] <= pi + 1e-12)) {
            throw DomainError("Parameters: mu_turn outside (-pi, pi]");
        }
        if (phi_step[j].size() != static_cast<std::size_t>(spec.p_step[j]) ||
            phi_turn[j].size() != static_cast<std::size_t>(spec.p_turn[j])) {
            throw ArgumentError("Parameters: phi row length != AR degree");
        }
        for (const auto* row : {&phi_step[j], &phi_turn[j]}) {
            double sum = 0.0;
            for (double f : *row) {
                if (!(f >= 0.0 && f <= 1.0)) throw DomainError("Parameters: phi entry outside [0,1]");
                sum += f;
            }
            if (sum > 1.0 + 1e-12) throw DomainError("Parameters: phi row sum exceeds 1");
        }
    }
}

int param_count(const ModelSpec& spec) {
    spec.validate();
    const int n = spec.n_states;
    int degrees = 0;
    for (std::size_t j = 0; j < spec.p_step.size(); ++j) {
        degrees += spec.p_step[j] + spec.p_turn[j];
    }
    return n * (n - 1) + 4 * n + degrees;
}

std::vector<double> stationary_dist(const std::vector<std::vector<double>>& tpm) {
    const std::size_t n = tpm.size();
    if (n == 0) throw ArgumentError("stationary_dist: empty matrix");
    for (const auto& row : tpm) {
        if (row.size() != n) throw ArgumentError("stationary_dist: matrix not square");
    }
    if (n == 1) return {1.0};

    // Solve (tpm' - I) x = 0 with the last equation replaced by sum(x) = 1,
    // by Gaussian elimination with partial pivoting.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = tpm[j][i] - (i == j ? 1.0 : 0.0);
    }
    for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
    a[n - 1][n] = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        }
        if (std::fabs(a[piv][col]) < 1e-14) {
            throw NumericError("stationary_dist: transition matrix has no unique stationary law");
        }
        std::swap(a[col], a[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> delta(n);
    for (std::size_t i = n; i-- > 0;) {
        double v = a[i][n];
        for (std::size_t c = i + 1; c < n; ++c) v -= a[i][c] * delta[c];
        delta[i] = v / a[i][i];
    }

    double resid = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double dj = 0.0;
        for (std::size_t i = 0; i < n; ++i) dj += delta[i] * tpm[i][j];
        resid = std::max(resid, std::fabs(dj - delta[j]));
        if (delta[j] < -1e-12) throw NumericError("stationary_dist: negative stationary mass");
    }
    if (resid > 1e-12) throw NumericError("stationary_dist: residual exceeds 1e-12");
    return delta;
}

namespace {

// Logit of a simplex row against an implicit reference category, nudging zero
// entries into the interior first. Used for tpm rows (reference = diagonal)
// and phi rows (reference = slack 1 - sum(phi)).
void simplex_to_logits(std::vector<double> probs, std::size_t reference,
                       std::vector<double>& out, const char* what) {
    double sum = 0.0;
    for (double& v : probs) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + ": entry outside [0,1]");
        v = std::max(v, boundary_nudge);
        sum += v;
    }
    for (double& v : probs) v /= sum;
    const double ref = probs[reference];
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (k == reference) continue;
        out.push_back(std::log(probs[k] / ref));
    }
}

} // namespace

WorkingVector to_working(const Parameters& params, const ModelSpec& spec) {
    params.validate(spec);
    const auto n = static_cast<std::size_t>(spec.n_states);
    WorkingVector w;
    w.reserve(static_cast<std::size_t>(param_count(spec)));

    for (std::size_t i = 0; i < n; ++i) {
        simplex_to_logits(params.tpm[i], i, w, "to_working: tpm row");
    }
    for (double m : params.mu_step) w.push_back(std::log(m));
    for (double c : params.cv_step) w.push_back(std::log(c));
    for (double m : params.mu_turn) w.push_back(m);
    for (double k : params.kappa_turn) w.push_back(std::log(std::max(k, boundary_nudge)));

    for (const auto* block : {&params.phi_step, &params.phi_turn}) {
        for (const auto& row : *block) {
            if (row.empty()) continue;
            double sum = 0.0;
            std::vector<double> cats(row.begin(), row.end());
            for (double& f : cats) {
                f = std::max(f, boundary_nudge);
                sum += f;
            }
            const double slack = 1.0 - sum;
            if (slack < boundary_nudge) {
                throw DomainError(
                    "to_working: phi row sum is at the boundary (sum >= 1); nudge the "
                    "coefficients into the interior of the constraint set");
            }
            for (double f : cats) w.push_back(std::log(f / slack));
        }
    }
    return w;
}

Parameters from_working(const WorkingVector& w, const ModelSpec& spec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_states);
    if (w.size() != static_cast<std::size_t>(param_count(spec))) {
        throw ArgumentError("from_working: vector length does not match spec");
    }

    Parameters p;
    std::size_t pos = 0;

    p.tpm.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        // logits with the diagonal pinned at 0; stabilized softmax
        std::vector<double> logits(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) logits[j] = w[pos++];
        }
        double m = *std::max_element(logits.begin(), logits.end());
        double denom = 0.0;
        for (double& l : logits) {
            l = safe_exp(l - m);
            denom += l;
        }
        for (std::size_t j = 0; j < n; ++j) p.tpm[i][j] = logits[j] / denom;
    }
    p.mu_step.resize(n);
    for (std::size_t j = 0; j < n; ++j) p.mu_step[j] = safe_exp(w[pos++]);
    p.cv_step.resize(n);
    for (std::size_t j = 0; j < n; ++j) p.cv_step[j] = safe_exp(w[pos++]);
    p.mu_turn.resize(n);
    for (std::size_t j = 0; j < n; ++j) p.mu_turn[j] = wrap_angle(w[pos++]);
    p.kappa_turn.resize(n);
    for (std::size_t j = 0; j < n; ++j) p.kappa_turn[j] = safe_exp(w[pos++]);

    p.phi_step.resize(n);
    p.phi_turn.resize(n);
    for (auto* block : {&p.phi_step, &p.phi_turn}) {
        const auto& degrees = (block == &p.phi_step) ? spec.p_step : spec.p_turn;
        for (std::size_t j = 0; j < n; ++j) {
            const auto pj = static_cast<std::size_t>(degrees[j]);
            auto& row = (*block)[j];
            row.resize(pj);
            if (pj == 0) continue;
            double m = 0.0; // reference (slack) logit
            for (std::size_t k = 0; k < pj; ++k) m = std::max(m, w[pos + k]);
            double denom = safe_exp(-m);
            for (std::size_t k = 0; k < pj; ++k) {
                row[k] = safe_exp(w[pos + k] - m);
                denom += row[k];
            }
            for (double& f : row) f /= denom;
            pos += pj;
        }
    }
    return p;
}

Parameters sort_states_by_step_mean(const Parameters& params) {
    const std::size_t n = params.mu_step.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return params.mu_step[a] < params.mu_step[b]; });

    Parameters out;
    out.tpm.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out.tpm[i][j] = params.tpm[order[i]][order[j]];
    }
    auto pick = [&](const std::vector<double>& v) {
        std::vector<double> r(n);
        for (std::size_t j = 0; j < n; ++j) r[j] = v[order[j]];
        return r;
    };
    out.mu_step = pick(params.mu_step);
    out.cv_step = pick(params.cv_step);
    out.mu_turn = pick(params.mu_turn);
    out.kappa_turn = pick(params.kappa_turn);
    out.phi_step.resize(n);
    out.phi_turn.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.phi_step[j] = params.phi_step[order[j]];
        out.phi_turn[j] = params.phi_turn[order[j]];
    }
    return out;
}

std::string parameters_to_json(const Parameters& params) {
    nlohmann::json j;
    j["tpm"] = params.tpm;
    j["mu_step"] = params.mu_step;
    j["cv_step"] = params.cv_step;
    j["mu_turn"] = params.mu_turn;
    j["kappa_turn"] = params.kappa_turn;
    j["phi_step"] = params.phi_step;
    j["phi_turn"] = params.phi_turn;
    return j.dump(2);
}

Parameters parameters_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("parameters_from_json: ") + e.what());
    }
    Parameters p;
    try {
        j.at("tpm").get_to(p.tpm);
        j.at("mu_step").get_to(p.mu_step);
        j.at("cv_step").get_to(p.cv_step);
        j.at("mu_turn").get_to(p.mu_turn);
        j.at("kappa_turn").get_to(p.kappa_turn);
        j.at("phi_step").get_to(p.phi_step);
        j.at("phi_turn").get_to(p.phi_turn);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("parameters_from_json: missing or malformed field: ") + e.what());
    }
    return p;
}

} // namespace arhmm

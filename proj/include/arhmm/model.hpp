#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace arhmm {

// Structural choices of the model: number of states and per-state
// autoregressive degrees for each observed variable.
struct ModelSpec {
    int n_states = 2;
    std::vector<int> p_step; // one nonnegative degree per state
    std::vector<int> p_turn;

    static ModelSpec uniform(int n_states, int degree_step, int degree_turn);

    int max_p_step() const;
    int max_p_turn() const;
    void validate() const; // throws ArgumentError on malformed specs
};

// All estimable quantities in natural scale.
//
// tpm is the N x N row-stochastic transition matrix. mu_step/cv_step hold the
// steady-state step mean and the constant coefficient of variation per state
// (the state-dependent SD tracks the AR-driven mean as sd = cv * mean).
// mu_turn/kappa_turn are the von Mises location and concentration. phi_step
// and phi_turn are ragged per-state rows of AR coefficients, each entry in
// [0,1] with row sums <= 1.
struct Parameters {
    std::vector<std::vector<double>> tpm;
    std::vector<double> mu_step;
    std::vector<double> cv_step;
    std::vector<double> mu_turn;
    std::vector<double> kappa_turn;
    std::vector<std::vector<double>> phi_step;
    std::vector<std::vector<double>> phi_turn;

    // Throws DomainError / ArgumentError when an invariant fails against spec.
    void validate(const ModelSpec& spec) const;
};

using WorkingVector = std::vector<double>;

// N*(N-1) + 4*N + sum_j (p_j_step + p_j_turn); also the working-vector length.
int param_count(const ModelSpec& spec);

// Solves delta * tpm = delta, sum(delta) = 1. Throws NumericError when the
// chain has no unique stationary law or the residual exceeds 1e-12.
std::vector<double> stationary_dist(const std::vector<std::vector<double>>& tpm);

// Natural -> unconstrained working scale. Log transforms for mu_step, cv_step
// and kappa_turn; row-wise multinomial logit with the diagonal as reference
// for the tpm; a (p+1)-category logit with the slack 1 - sum(phi) as implicit
// remainder for each phi row; mu_turn passes through raw. Natural values at a
// zero boundary are nudged to 1e-8 first; parameters that remain on the
// boundary (e.g. sum(phi) = 1) are a DomainError.
WorkingVector to_working(const Parameters& params, const ModelSpec& spec);

// Inverse of to_working. Total: every finite vector of the correct length
// maps to Parameters satisfying all invariants.
Parameters from_working(const WorkingVector& w, const ModelSpec& spec);

// Relabels states so mu_step is ascending (fitting identifiability rule);
// permutes every parameter block consistently.
Parameters sort_states_by_step_mean(const Parameters& params);

// JSON document with fields tpm, mu_step, cv_step, mu_turn, kappa_turn,
// phi_step, phi_turn (ragged arrays).
std::string parameters_to_json(const Parameters& params);
Parameters parameters_from_json(const std::string& text);

} // namespace arhmm

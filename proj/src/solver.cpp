#include "qdm/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <set>
#include <thread>

#include "qdm/errors.hpp"

namespace qdm {

namespace {

/// sqrt(m) * prod_{q<l} cos z_q * (l < k-1 ? sin z_l : 1), with factor
/// `replace` (if any) swapped for its derivative.
double stick_amplitude(double root_mass, std::span<const double> z, std::size_t l,
                       std::size_t k, std::size_t replace) {
    double r = root_mass;
    for (std::size_t q = 0; q < l; ++q) {
        r *= q == replace ? -std::sin(z[q]) : std::cos(z[q]);
    }
    if (l + 1 < k) {
        r *= l == replace ? std::cos(z[l]) : std::sin(z[l]);
    }
    return r;
}

constexpr std::size_t kNoReplace = static_cast<std::size_t>(-1);

} // namespace

ManifoldChart::ManifoldChart(const StateManifold &m) : n_(m.dimension()) {
    for (std::size_t j = 0; j < m.blocks().size(); ++j) {
        Block b{m.blocks()[j].mass, m.block_basis(j), stick_count_};
        stick_count_ += b.basis.size() - 1;
        blocks_.push_back(std::move(b));
    }
    pinned_ = blocks_.front().basis.front();
    for (std::size_t i = 0; i < n_; ++i) {
        if (i != pinned_) {
            phase_index_.push_back(i);
        }
    }
}

void ManifoldChart::amplitudes(std::span<const double> angular, std::vector<Complex> &out,
                               Eigen::MatrixXcd *jacobian) const {
    if (angular.size() != dimension()) {
        throw DimensionMismatch("chart expects " + std::to_string(dimension()) +
                                " coordinates, got " + std::to_string(angular.size()));
    }
    std::vector<double> phase(n_, 0.0);
    for (std::size_t p = 0; p < phase_index_.size(); ++p) {
        phase[phase_index_[p]] = angular[stick_count_ + p];
    }
    out.assign(n_, Complex{0.0, 0.0});
    if (jacobian != nullptr) {
        jacobian->setZero(static_cast<Eigen::Index>(n_),
                          static_cast<Eigen::Index>(dimension()));
    }
    for (const auto &b : blocks_) {
        const std::size_t k = b.basis.size();
        const double root = std::sqrt(b.mass);
        const auto z = angular.subspan(b.first_stick, k - 1);
        for (std::size_t l = 0; l < k; ++l) {
            const std::size_t i = b.basis[l];
            const Complex unit = std::polar(1.0, phase[i]);
            const double r = stick_amplitude(root, z, l, k, kNoReplace);
            out[i] = r * unit;
            if (jacobian == nullptr) {
                continue;
            }
            const std::size_t last = std::min(l, k - 2);
            for (std::size_t q = 0; q + 1 < k && q <= last; ++q) {
                (*jacobian)(static_cast<Eigen::Index>(i),
                            static_cast<Eigen::Index>(b.first_stick + q)) =
                    stick_amplitude(root, z, l, k, q) * unit;
            }
        }
    }
    if (jacobian != nullptr) {
        for (std::size_t p = 0; p < phase_index_.size(); ++p) {
            const std::size_t i = phase_index_[p];
            (*jacobian)(static_cast<Eigen::Index>(i),
                        static_cast<Eigen::Index>(stick_count_ + p)) =
                Complex{0.0, 1.0} * out[i];
        }
    }
}

std::vector<double> ManifoldChart::to_angular(std::span<const double> coords) const {
    if (coords.size() != dimension()) {
        throw DimensionMismatch("chart expects " + std::to_string(dimension()) +
                                " coordinates, got " + std::to_string(coords.size()));
    }
    std::vector<double> out(coords.begin(), coords.end());
    for (std::size_t c = 0; c < stick_count_; ++c) {
        const double t = std::clamp(coords[c], 0.0, 1.0);
        out[c] = std::asin(std::sqrt(t));
    }
    return out;
}

StateVector ManifoldChart::decode(std::span<const double> coords) const {
    std::vector<Complex> amps;
    amplitudes(to_angular(coords), amps);
    return StateVector(std::move(amps));
}

void FitProblem::validate() const {
    std::set<std::string> slot_set;
    for (const auto &s : slots) {
        if (s.empty() || !slot_set.insert(s).second) {
            throw MalformedProblem("slot names must be nonempty and distinct");
        }
    }
    std::set<std::string> gap_set;
    for (const auto &g : free_gaps) {
        if (g.name.empty() || !gap_set.insert(g.name).second) {
            throw MalformedProblem("gap names must be nonempty and distinct");
        }
        if (g.initial && !(*g.initial > 0.0 && std::isfinite(*g.initial))) {
            throw MalformedProblem("initial guess for gap '" + g.name + "' must be positive");
        }
    }
    for (const auto &t : targets) {
        if (slot_set.count(t.slot) == 0) {
            throw MalformedProblem("target references undeclared slot '" + t.slot + "'");
        }
        if (!std::isfinite(t.value)) {
            throw MalformedProblem("target values must be finite");
        }
        if (t.op.entries.size() != manifold.dimension()) {
            throw MalformedProblem("target operator dimension does not match the manifold");
        }
        for (const auto &name : t.op.gap_names()) {
            if (gap_set.count(name) == 0) {
                throw MalformedProblem("target references undeclared gap '" + name + "'");
            }
        }
    }
    for (const auto &[a, b] : orthogonal_pairs) {
        if (slot_set.count(a) == 0 || slot_set.count(b) == 0) {
            throw MalformedProblem("orthogonality references an undeclared slot");
        }
        if (a == b) {
            throw MalformedProblem("a slot cannot be orthogonal to itself");
        }
    }
    if (options.starts == 0 || !(options.tol > 0.0) || options.max_iterations == 0) {
        throw MalformedProblem("fit options need starts > 0, tol > 0, max_iterations > 0");
    }
}

FitObjective::FitObjective(const FitProblem &problem)
    : problem_(problem), chart_(problem.manifold) {
    problem.validate();
    for (const auto &g : problem.free_gaps) {
        gap_names_.push_back(g.name);
    }
    auto slot_index = [&](const std::string &s) {
        return static_cast<std::size_t>(
            std::find(problem.slots.begin(), problem.slots.end(), s) - problem.slots.begin());
    };
    const std::size_t n = chart_.state_dimension();
    for (const auto &t : problem.targets) {
        target_slot_.push_back(slot_index(t.slot));
        std::vector<double> constants(n);
        std::vector<std::vector<double>> coef(n, std::vector<double>(gap_names_.size(), 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            constants[i] = t.op.entries[i].constant;
            for (std::size_t g = 0; g < gap_names_.size(); ++g) {
                auto it = t.op.entries[i].coeffs.find(gap_names_[g]);
                if (it != t.op.entries[i].coeffs.end()) {
                    coef[i][g] = it->second;
                }
            }
        }
        target_const_.push_back(std::move(constants));
        target_gap_coef_.push_back(std::move(coef));
    }
    for (const auto &[a, b] : problem.orthogonal_pairs) {
        pairs_.emplace_back(slot_index(a), slot_index(b));
    }
    params_ = problem.slots.size() * chart_.dimension() + gap_names_.size();
    residuals_ = problem.targets.size() + 2 * pairs_.size();
}

void FitObjective::evaluate(const Eigen::VectorXd &x, double weight, Eigen::VectorXd &r,
                            Eigen::MatrixXd *jacobian) const {
    const std::size_t d = chart_.dimension();
    const std::size_t n = chart_.state_dimension();
    const std::size_t S = problem_.slots.size();
    const std::size_t G = gap_names_.size();
    const auto gap_offset = static_cast<Eigen::Index>(S * d);

    std::vector<std::vector<Complex>> amps(S);
    std::vector<Eigen::MatrixXcd> jac(S);
    for (std::size_t s = 0; s < S; ++s) {
        std::span<const double> coords(x.data() + s * d, d);
        chart_.amplitudes(coords, amps[s], jacobian != nullptr ? &jac[s] : nullptr);
    }
    std::vector<double> gaps(G);
    for (std::size_t g = 0; g < G; ++g) {
        gaps[g] = std::exp(x[gap_offset + static_cast<Eigen::Index>(g)]);
    }

    r.resize(static_cast<Eigen::Index>(residuals_));
    if (jacobian != nullptr) {
        jacobian->setZero(static_cast<Eigen::Index>(residuals_),
                          static_cast<Eigen::Index>(params_));
    }

    Eigen::Index row = 0;
    for (std::size_t t = 0; t < problem_.targets.size(); ++t, ++row) {
        const std::size_t s = target_slot_[t];
        const auto &psi = amps[s];
        std::vector<double> diag(n);
        double value = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diag[i] = target_const_[t][i];
            for (std::size_t g = 0; g < G; ++g) {
                diag[i] += target_gap_coef_[t][i][g] * gaps[g];
            }
            value += diag[i] * std::norm(psi[i]);
        }
        r[row] = value - problem_.targets[t].value;
        if (jacobian == nullptr) {
            continue;
        }
        for (std::size_t c = 0; c < d; ++c) {
            double dv = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const Complex dpsi =
                    jac[s](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
                dv += diag[i] * 2.0 * (std::conj(psi[i]) * dpsi).real();
            }
            (*jacobian)(row, static_cast<Eigen::Index>(s * d + c)) = dv;
        }
        for (std::size_t g = 0; g < G; ++g) {
            double dv = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dv += target_gap_coef_[t][i][g] * gaps[g] * std::norm(psi[i]);
            }
            (*jacobian)(row, gap_offset + static_cast<Eigen::Index>(g)) = dv;
        }
    }

    const double sw = std::sqrt(weight);
    for (const auto &[a, b] : pairs_) {
        Complex overlap{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            overlap += std::conj(amps[a][i]) * amps[b][i];
        }
        r[row] = sw * overlap.real();
        r[row + 1] = sw * overlap.imag();
        if (jacobian != nullptr) {
            for (std::size_t c = 0; c < d; ++c) {
                Complex da{0.0, 0.0};
                Complex db{0.0, 0.0};
                for (std::size_t i = 0; i < n; ++i) {
                    const auto ii = static_cast<Eigen::Index>(i);
                    const auto cc = static_cast<Eigen::Index>(c);
                    da += std::conj(jac[a](ii, cc)) * amps[b][i];
                    db += std::conj(amps[a][i]) * jac[b](ii, cc);
                }
                const auto ca = static_cast<Eigen::Index>(a * d + c);
                const auto cb = static_cast<Eigen::Index>(b * d + c);
                (*jacobian)(row, ca) += sw * da.real();
                (*jacobian)(row + 1, ca) += sw * da.imag();
                (*jacobian)(row, cb) += sw * db.real();
                (*jacobian)(row + 1, cb) += sw * db.imag();
            }
        }
        row += 2;
    }
}

std::map<std::string, StateVector> FitObjective::decode_states(const Eigen::VectorXd &x) const {
    std::map<std::string, StateVector> out;
    const std::size_t d = chart_.dimension();
    for (std::size_t s = 0; s < problem_.slots.size(); ++s) {
        std::vector<Complex> amps;
        chart_.amplitudes(std::span<const double>(x.data() + s * d, d), amps);
        out.emplace(problem_.slots[s], StateVector(std::move(amps)));
    }
    return out;
}

std::map<std::string, double> FitObjective::decode_gaps(const Eigen::VectorXd &x) const {
    std::map<std::string, double> out;
    const std::size_t offset = problem_.slots.size() * chart_.dimension();
    for (std::size_t g = 0; g < gap_names_.size(); ++g) {
        out[gap_names_[g]] = std::exp(x[static_cast<Eigen::Index>(offset + g)]);
    }
    return out;
}

namespace {

struct StartOutcome {
    Eigen::VectorXd x;
    double weight = 0.0;
    std::size_t iterations = 0;
};

Eigen::VectorXd starting_point(const FitObjective &obj, const FitProblem &problem,
                               std::size_t start) {
    const auto seed = problem.options.seed;
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(start)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto &chart = obj.chart();
    Eigen::VectorXd x(static_cast<Eigen::Index>(obj.parameter_count()));
    Eigen::Index k = 0;
    for (std::size_t s = 0; s < problem.slots.size(); ++s) {
        for (std::size_t c = 0; c < chart.modulus_coordinates(); ++c) {
            x[k++] = std::asin(std::sqrt(unit(rng)));
        }
        for (std::size_t c = 0; c < chart.phase_coordinates(); ++c) {
            x[k++] = 2.0 * kPi * unit(rng);
        }
    }
    for (const auto &g : problem.free_gaps) {
        x[k++] = std::log(g.initial.value_or(1.0)) + (2.0 * unit(rng) - 1.0);
    }
    return x;
}

struct Progress {
    double target_norm;
    double max_overlap;
};

Progress measure(const Eigen::VectorXd &r, std::size_t n_targets, double weight) {
    const auto T = static_cast<Eigen::Index>(n_targets);
    Progress p{r.head(T).norm(), 0.0};
    const double sw = std::sqrt(weight);
    for (Eigen::Index row = T; row + 1 < r.size(); row += 2) {
        p.max_overlap = std::max(p.max_overlap, std::hypot(r[row], r[row + 1]) / sw);
    }
    return p;
}

StartOutcome run_start(const FitObjective &obj, const FitProblem &problem, Eigen::VectorXd x) {
    const auto &opt = problem.options;
    const std::size_t T = problem.targets.size();
    const double goal = opt.tol * 1e-3;

    double weight = opt.penalty;
    double lambda = 1e-3;
    std::size_t it = 0;

    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    obj.evaluate(x, weight, r, &J);
    double cost = r.squaredNorm();

    while (it < opt.max_iterations) {
        const Progress p = measure(r, T, weight);
        if (p.target_norm <= goal && p.max_overlap <= goal) {
            break;
        }
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        bool accepted = false;
        bool stalled = false;
        while (!accepted && it < opt.max_iterations) {
            ++it;
            Eigen::MatrixXd M = A;
            for (Eigen::Index i = 0; i < M.rows(); ++i) {
                M(i, i) += lambda * std::max(A(i, i), 1e-9);
            }
            const Eigen::VectorXd delta = M.ldlt().solve(-g);
            if (delta.allFinite()) {
                const Eigen::VectorXd trial = x + delta;
                Eigen::VectorXd r_trial;
                obj.evaluate(trial, weight, r_trial);
                const double c_trial = r_trial.squaredNorm();
                if (std::isfinite(c_trial) && c_trial < cost) {
                    x = trial;
                    cost = c_trial;
                    lambda = std::max(lambda * 0.3, 1e-15);
                    accepted = true;
                    break;
                }
            }
            lambda *= 4.0;
            if (lambda > 1e15) {
                stalled = true;
                break;
            }
        }
        if (stalled) {
            const Progress q = measure(r, T, weight);
            if (q.max_overlap > opt.tol && weight < opt.max_penalty) {
                weight = std::min(weight * 10.0, opt.max_penalty);
                lambda = 1e-3;
                obj.evaluate(x, weight, r, &J);
                cost = r.squaredNorm();
                continue;
            }
            break;
        }
        if (!accepted) {
            break;
        }
        obj.evaluate(x, weight, r, &J);
        cost = r.squaredNorm();
    }
    return {std::move(x), weight, it};
}

} // namespace

FitResult fit(const FitProblem &problem) {
    FitObjective obj(problem);
    const auto &opt = problem.options;

    std::vector<StartOutcome> outcomes(opt.starts);
    unsigned workers = opt.threads != 0 ? opt.threads : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(opt.starts)));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t s = next++; s < opt.starts; s = next++) {
            outcomes[s] = run_start(obj, problem, starting_point(obj, problem, s));
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto &t : pool) {
            t.join();
        }
    }

    std::optional<FitResult> best;
    double best_score = 0.0;
    for (std::size_t s = 0; s < outcomes.size(); ++s) {
        const auto &o = outcomes[s];
        if (!o.x.allFinite()) {
            continue;
        }
        FitResult candidate;
        candidate.states = obj.decode_states(o.x);
        candidate.gaps = obj.decode_gaps(o.x);
        const CandidateReport rep = verify_candidate(candidate.states, candidate.gaps, problem);
        for (const auto &t : rep.targets) {
            candidate.target_residuals.push_back(t.residual);
        }
        candidate.residual_norm = rep.residual_norm;
        candidate.orthogonality = rep.max_overlap;
        candidate.manifold_violation = rep.max_manifold_violation;
        candidate.constraint_violation = std::max(rep.max_overlap, rep.max_manifold_violation);
        candidate.iterations = o.iterations;
        candidate.best_start = s;
        candidate.penalty_weight = o.weight;
        candidate.converged = rep.residual_norm <= opt.tol && rep.max_overlap <= opt.tol &&
                              rep.max_manifold_violation <= kManifoldTolerance;
        const double score = candidate.residual_norm + candidate.constraint_violation;
        if (!best || (candidate.converged && !best->converged) ||
            (candidate.converged == best->converged && score < best_score)) {
            best = std::move(candidate);
            best_score = score;
        }
    }
    if (!best) {
        // Every start diverged; report the first starting point as-is.
        const Eigen::VectorXd x0 = starting_point(obj, problem, 0);
        best = FitResult{};
        best->states = obj.decode_states(x0);
        best->gaps = obj.decode_gaps(x0);
        const auto rep = verify_candidate(best->states, best->gaps, problem);
        best->residual_norm = rep.residual_norm;
        best->orthogonality = rep.max_overlap;
        best->manifold_violation = rep.max_manifold_violation;
        best->constraint_violation = std::max(rep.max_overlap, rep.max_manifold_violation);
    }
    best->starts_used = opt.starts;
    return *best;
}

CandidateReport verify_candidate(const std::map<std::string, StateVector> &states,
                                 const std::map<std::string, double> &gaps,
                                 const FitProblem &problem) {
    auto state_of = [&](const std::string &slot) -> const StateVector & {
        auto it = states.find(slot);
        if (it == states.end()) {
            throw MalformedProblem("no state supplied for slot '" + slot + "'");
        }
        return it->second;
    };

    CandidateReport rep;
    double sq = 0.0;
    for (const auto &t : problem.targets) {
        const StateVector &v = state_of(t.slot);
        const double value = expectation(v, t.op.evaluate(gaps));
        const double residual = value - t.value;
        rep.targets.push_back({t.slot, t.label, value, t.value, residual});
        sq += residual * residual;
        rep.max_residual = std::max(rep.max_residual, std::abs(residual));
    }
    rep.residual_norm = std::sqrt(sq);
    for (const auto &[a, b] : problem.orthogonal_pairs) {
        const double overlap = std::abs(inner(state_of(a), state_of(b)));
        rep.pairs.push_back({a, b, overlap});
        rep.max_overlap = std::max(rep.max_overlap, overlap);
    }
    for (const auto &slot : problem.slots) {
        auto it = states.find(slot);
        if (it == states.end()) {
            continue;
        }
        StateCheck c{slot, std::abs(it->second.norm_squared() - 1.0),
                     problem.manifold.violation(it->second), it->second.tolerance_class()};
        rep.max_norm_deviation = std::max(rep.max_norm_deviation, c.norm_deviation);
        rep.max_manifold_violation = std::max(rep.max_manifold_violation, c.manifold_violation);
        rep.states.push_back(c);
    }
    return rep;
}

FitProblem make_choice_fit_problem(const StateManifold &m, const std::vector<Act> &acts,
                                   const UtilityFunction &u,
                                   const std::vector<ObservedChoice> &observations,
                                   bool orthogonal_slots, FitOptions options) {
    auto find = [&](const std::string &label) -> const Act & {
        for (const auto &a : acts) {
            if (a.label == label) {
                return a;
            }
        }
        throw MalformedProblem("observation references unknown act '" + label + "'");
    };
    FitProblem p{m, {}, {}, {}, {}, options};
    std::set<std::string> used;
    for (std::size_t k = 0; k < observations.size(); ++k) {
        const auto &obs = observations[k];
        const std::string slot = "w" + std::to_string(k + 1);
        p.slots.push_back(slot);
        FitTarget t{slot, obs.first + "-" + obs.second,
                    act_difference_form(find(obs.first), find(obs.second), u, m.family()),
                    obs.rate_first};
        for (const auto &g : t.op.gap_names()) {
            used.insert(g);
        }
        p.targets.push_back(std::move(t));
    }
    for (const auto &g : u.free_gaps()) {
        if (used.count(g.name) > 0) {
            p.free_gaps.push_back({g.name, std::nullopt});
        }
    }
    if (orthogonal_slots) {
        for (std::size_t a = 0; a < p.slots.size(); ++a) {
            for (std::size_t b = a + 1; b < p.slots.size(); ++b) {
                p.orthogonal_pairs.emplace_back(p.slots[a], p.slots[b]);
            }
        }
    }
    p.validate();
    return p;
}

} // namespace qdm

#include "nfrag/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nfrag/kahan.hpp"

namespace nfrag {

SolverSettings SolverSettings::from_config(const SimConfig& c) {
    SolverSettings s;
    s.dt_initial = c.dt_initial;
    s.dt_max = c.dt_max;
    s.safety = c.safety;
    s.rel_tol = c.rel_tol;
    s.positivity_floor = c.positivity_floor;
    s.loss_dt_cap = c.loss_dt_cap;
    s.end_time = c.horizon;
    s.fixed_dt = c.fixed_dt;
    s.output_points = c.output_points;
    s.threads = c.threads;
    s.probe_blowup = c.probe_blowup;
    s.blowup_factor = c.blowup_factor;
    s.wall_budget_seconds = c.wall_budget;
    return s;
}

StiffnessError::StiffnessError(double time, double dt)
    : std::runtime_error([&] {
          std::ostringstream s;
          s << "time step underflow at t = " << time << " (dt = " << dt
            << "); the system is too stiff for the explicit scheme here";
          return s.str();
      }()),
      time_(time),
      dt_(dt) {}

// ---------------------------------------------------------------------------
// TableRhs

struct TableRhs::Impl {
    const AllocationTable* table;
    int threads;
    double floor;
    int cells;
    int nchunks;
    std::vector<std::size_t> chunk_begin;

    // scratch, reused across evaluations
    mutable std::vector<double> g;
    mutable std::vector<double> gain, gain_c, loss, loss_c;  // nchunks x cells
    mutable std::vector<double> gain_tot, loss_tot;

    void run_chunk(int c) const {
        const auto& pairs = table->pairs();
        const double* w_all = table->weights().data();
        double* grow = gain.data() + static_cast<std::size_t>(c) * cells;
        double* growc = gain_c.data() + static_cast<std::size_t>(c) * cells;
        double* lrow = loss.data() + static_cast<std::size_t>(c) * cells;
        double* lrowc = loss_c.data() + static_cast<std::size_t>(c) * cells;
        for (std::size_t pi = chunk_begin[c]; pi < chunk_begin[c + 1]; ++pi) {
            const auto& p = pairs[pi];
            const double f2 = p.rate * g[p.i] * g[p.j];
            if (f2 == 0.0) continue;
            const double f = p.i == p.j ? 0.5 * f2 : f2;
            const double* w = w_all + p.offset;
            for (int k = 0; k < p.count; ++k) {
                const double y = f * w[k] - growc[k];
                const double t = grow[k] + y;
                growc[k] = (t - grow[k]) - y;
                grow[k] = t;
            }
            {
                const double y = f2 - lrowc[p.i];
                const double t = lrow[p.i] + y;
                lrowc[p.i] = (t - lrow[p.i]) - y;
                lrow[p.i] = t;
            }
            if (p.i != p.j) {
                const double y = f2 - lrowc[p.j];
                const double t = lrow[p.j] + y;
                lrowc[p.j] = (t - lrow[p.j]) - y;
                lrow[p.j] = t;
            }
        }
    }
};

TableRhs::TableRhs(const AllocationTable& table, int threads, double positivity_floor) {
    impl_ = std::make_shared<Impl>();
    impl_->table = &table;
    impl_->threads = std::max(1, threads);
    impl_->floor = positivity_floor;
    impl_->cells = table.grid().size();
    const std::size_t npairs = table.pairs().size();
    impl_->nchunks = static_cast<int>(std::min<std::size_t>(64, std::max<std::size_t>(npairs, 1)));
    impl_->chunk_begin.resize(impl_->nchunks + 1);
    for (int c = 0; c <= impl_->nchunks; ++c)
        impl_->chunk_begin[c] = npairs * c / impl_->nchunks;
    const std::size_t buf = static_cast<std::size_t>(impl_->nchunks) * impl_->cells;
    impl_->g.resize(impl_->cells);
    impl_->gain.resize(buf);
    impl_->gain_c.resize(buf);
    impl_->loss.resize(buf);
    impl_->loss_c.resize(buf);
    impl_->gain_tot.resize(impl_->cells);
    impl_->loss_tot.resize(impl_->cells);
}

int TableRhs::cells() const { return impl_->cells; }

void TableRhs::eval(const std::vector<double>& density, std::vector<double>& density_rate,
                    std::vector<double>& number_rate, double& max_loss_rate) const {
    Impl& im = *impl_;
    const Grid& grid = im.table->grid();
    const int cells = im.cells;
    if (static_cast<int>(density.size()) != cells)
        throw std::invalid_argument("state size does not match the allocation table");
    for (int k = 0; k < cells; ++k) im.g[k] = density[k] * grid.widths[k];

    std::fill(im.gain.begin(), im.gain.end(), 0.0);
    std::fill(im.gain_c.begin(), im.gain_c.end(), 0.0);
    std::fill(im.loss.begin(), im.loss.end(), 0.0);
    std::fill(im.loss_c.begin(), im.loss_c.end(), 0.0);

    if (im.threads <= 1) {
        for (int c = 0; c < im.nchunks; ++c) im.run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(im.threads);
        for (int t = 0; t < im.threads; ++t)
            pool.emplace_back([&im, t] {
                for (int c = t; c < im.nchunks; c += im.threads) im.run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }

    // merge in fixed chunk order; independent of the thread count
    density_rate.resize(cells);
    number_rate.resize(cells);
    for (int k = 0; k < cells; ++k) {
        KahanSum gs, ls;
        for (int c = 0; c < im.nchunks; ++c) {
            gs.add(im.gain[static_cast<std::size_t>(c) * cells + k]);
            ls.add(im.loss[static_cast<std::size_t>(c) * cells + k]);
        }
        im.gain_tot[k] = gs.sum;
        im.loss_tot[k] = ls.sum;
        number_rate[k] = gs.sum - ls.sum;
        density_rate[k] = number_rate[k] / grid.widths[k];
    }

    max_loss_rate = 0.0;
    for (int k = 0; k < cells; ++k) {
        if (im.g[k] > im.floor * grid.widths[k] && im.g[k] > 0.0)
            max_loss_rate = std::max(max_loss_rate, im.loss_tot[k] / im.g[k]);
    }
}

// ---------------------------------------------------------------------------
// Stepper

namespace {

constexpr double kThird = 1.0 / 3.0;

bool any_negative(const std::vector<double>& v) {
    for (double x : v)
        if (x < 0.0) return true;
    return false;
}

}  // namespace

Stepper::Stepper(const RhsFunction& rhs, const SolverSettings& settings)
    : rhs_(rhs), settings_(settings), dt_(settings.dt_initial) {
    const int n = rhs.cells();
    for (auto* v : {&l0_, &l1_, &l2_, &n0_, &n1_, &n2_, &u1_, &u2_, &u3_}) v->resize(n);
    if (settings_.fixed_dt > 0.0) dt_ = settings_.fixed_dt;
}

double Stepper::advance(State& state, double t_clip, const StageObserver& observer) {
    const int n = rhs_.cells();
    const bool fixed = settings_.fixed_dt > 0.0;
    const std::vector<double>& u = state.density;

    if (!abs_tol_set_) {
        double dmax = 0.0;
        for (double v : u) dmax = std::max(dmax, v);
        abs_tol_ = settings_.rel_tol * std::max(dmax, 1e-300) * 1e-4;
        abs_tol_set_ = true;
    }

    const double dt_floor = 1e-15 * std::max(settings_.end_time, 1.0);
    double max_lambda = 0.0;
    rhs_.eval(u, l0_, n0_, max_lambda);

    double attempt = fixed ? settings_.fixed_dt : dt_;
    while (true) {
        double dt = std::min(attempt, settings_.dt_max);
        if (max_lambda > 0.0) dt = std::min(dt, settings_.loss_dt_cap / max_lambda);
        // stretch steps that nearly reach the landing time, so roundoff can
        // never leave an unresolvable sliver behind
        bool clipped = false;
        if (state.time + 1.01 * dt >= t_clip) {
            dt = t_clip - state.time;
            clipped = true;
        }
        if (!(dt > dt_floor)) throw StiffnessError(state.time, dt);

        for (int k = 0; k < n; ++k) u1_[k] = u[k] + dt * l0_[k];
        double ignored;
        rhs_.eval(u1_, l1_, n1_, ignored);
        for (int k = 0; k < n; ++k)
            u2_[k] = 0.75 * u[k] + 0.25 * (u1_[k] + dt * l1_[k]);
        rhs_.eval(u2_, l2_, n2_, ignored);
        for (int k = 0; k < n; ++k)
            u3_[k] = kThird * u[k] + (2.0 * kThird) * (u2_[k] + dt * l2_[k]);

        if (any_negative(u1_) || any_negative(u2_) || any_negative(u3_)) {
            ++rejected_;
            attempt = 0.5 * dt;
            if (!fixed) dt_ = attempt;
            continue;
        }

        double err = 0.0;
        if (!fixed) {
            // embedded second-order solution u + dt (l0 + l1)/2
            for (int k = 0; k < n; ++k) {
                const double e =
                    dt * std::abs((2.0 * kThird) * l2_[k] - kThird * (l0_[k] + l1_[k]));
                const double sc =
                    abs_tol_ + settings_.rel_tol * std::max(std::abs(u[k]), std::abs(u3_[k]));
                err = std::max(err, e / sc);
            }
            if (err > 1.0) {
                ++rejected_;
                const double shrink =
                    std::min(0.9, std::max(0.2, settings_.safety * std::pow(err, -kThird)));
                attempt = dt * shrink;
                dt_ = attempt;
                continue;
            }
        }

        state.density.swap(u3_);
        state.time = clipped ? t_clip : state.time + dt;
        if (observer) observer(dt, n0_, n1_, n2_);
        if (!fixed) {
            const double grow = err > 1e-12
                                    ? std::min(5.0, std::max(0.2, settings_.safety *
                                                                      std::pow(err, -kThird)))
                                    : 5.0;
            dt_ = std::min(dt * grow, settings_.dt_max);
        }
        return dt;
    }
}

// ---------------------------------------------------------------------------
// integration loop

std::vector<double> WeakFormSeries::residuals() const {
    std::vector<double> r(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i)
        r[i] = std::abs(sums[i] - initial_sum - integrals[i]);
    return r;
}

std::vector<WeakFormSpec> standard_weak_forms(const Grid& grid) {
    const int n = grid.size();
    WeakFormSpec one{"theta_one", std::vector<double>(n, 1.0), 1.0};
    WeakFormSpec ident{"theta_x", grid.pivots, grid.pivots.back()};
    WeakFormSpec box{"theta_box_1_2", std::vector<double>(n, 0.0), 1.0};
    for (int k = 0; k < n; ++k)
        if (grid.pivots[k] >= 1.0 && grid.pivots[k] <= 2.0) box.theta[k] = 1.0;
    return {std::move(one), std::move(ident), std::move(box)};
}

namespace {

double weak_dot(const std::vector<double>& theta, const std::vector<double>& v) {
    KahanSum acc;
    for (std::size_t k = 0; k < theta.size(); ++k) acc.add(theta[k] * v[k]);
    return acc.sum;
}

double weak_state_sum(const WeakFormSpec& spec, const Grid& grid, const State& s) {
    KahanSum acc;
    for (int k = 0; k < grid.size(); ++k)
        acc.add(spec.theta[k] * s.density[k] * grid.widths[k]);
    return acc.sum;
}

}  // namespace

RunResult integrate_core(const AllocationTable& table, const State& initial,
                         const SolverSettings& settings, std::vector<double> moment_orders,
                         const KernelParams& kernel, std::vector<WeakFormSpec> weak_forms) {
    const auto wall_start = std::chrono::steady_clock::now();
    const Grid& grid = table.grid();

    for (double required : {0.0, 1.0}) {
        if (std::none_of(moment_orders.begin(), moment_orders.end(),
                         [&](double m) { return std::abs(m - required) <= 1e-12; }))
            moment_orders.insert(moment_orders.begin(), required);
    }
    std::sort(moment_orders.begin(), moment_orders.end());

    RunResult res;
    res.grid = grid;
    res.kernel = kernel;
    res.step_moments = MomentSeries(moment_orders);
    res.output_moments = MomentSeries(moment_orders);
    res.max_number_defect = table.max_number_defect();

    State state = initial;
    state.time = 0.0;

    auto record_row = [&](MomentSeries& series) {
        std::vector<double> row(moment_orders.size());
        for (std::size_t i = 0; i < moment_orders.size(); ++i)
            row[i] = moment(grid, state, moment_orders[i]);
        series.append(state.time, row);
        return row;
    };

    const auto row0 = record_row(res.step_moments);
    res.output_moments.append(0.0, row0);
    res.mu0_initial = res.step_moments.value(0, 0.0);
    res.rho = res.step_moments.value(0, 1.0);
    if (!(res.rho > 0.0))
        throw std::invalid_argument("initial data carries no mass on the grid");

    res.horizon_t_star =
        t_star(res.mu0_initial, res.rho, kernel.kappa, kernel.sigma(), kernel.gamma);
    if (!settings.probe_blowup && settings.end_time >= res.horizon_t_star) {
        std::ostringstream msg;
        msg << "end time " << settings.end_time << " reaches the finite horizon T* = "
            << res.horizon_t_star << "; shorten the run or probe blow-up explicitly";
        throw std::invalid_argument(msg.str());
    }

    res.min_density = *std::min_element(state.density.begin(), state.density.end());

    // weak-form bookkeeping
    for (const auto& spec : weak_forms) {
        if (static_cast<int>(spec.theta.size()) != grid.size())
            throw std::invalid_argument("test function `" + spec.name +
                                        "` is not tabulated on the grid");
        for (double v : spec.theta)
            if (!std::isfinite(v) || std::abs(v) > spec.norm_inf * (1.0 + 1e-12))
                throw std::invalid_argument("test function `" + spec.name +
                                            "` exceeds its declared bound");
    }
    std::vector<WeakFormSeries> weak(weak_forms.size());
    std::vector<KahanSum> weak_integral(weak_forms.size());
    for (std::size_t i = 0; i < weak_forms.size(); ++i) {
        weak[i].name = weak_forms[i].name;
        weak[i].norm_inf = weak_forms[i].norm_inf;
        weak[i].initial_sum = weak_state_sum(weak_forms[i], grid, state);
        weak[i].max_abs_upsilon = table.max_abs_upsilon(weak_forms[i].theta);
        weak[i].sums.push_back(weak[i].initial_sum);
        weak[i].integrals.push_back(0.0);
    }

    TableRhs rhs(table, settings.threads, settings.positivity_floor);
    Stepper stepper(rhs, settings);

    StageObserver observer = [&](double dt, const std::vector<double>& n0,
                                 const std::vector<double>& n1,
                                 const std::vector<double>& n2) {
        for (std::size_t i = 0; i < weak_forms.size(); ++i) {
            const auto& theta = weak_forms[i].theta;
            const double s = (weak_dot(theta, n0) + weak_dot(theta, n1)) / 6.0 +
                             (2.0 * kThird) * weak_dot(theta, n2);
            weak_integral[i].add(dt * s);
        }
    };

    const double t_end = settings.end_time;
    const int outputs = std::max(2, settings.output_points);
    std::vector<double> output_times(outputs);
    for (int i = 0; i < outputs; ++i) output_times[i] = t_end * i / (outputs - 1);
    output_times.back() = t_end;

    res.trajectory.times.push_back(0.0);
    res.trajectory.states.push_back(state);
    State prev_output = state;

    res.status = RunStatus::Ok;
    int next_output = 1;
    try {
        while (next_output < outputs) {
            const double t_clip = output_times[next_output];
            stepper.advance(state, t_clip, observer);
            ++res.steps_accepted;

            const auto row = record_row(res.step_moments);
            const double mu0 = row[res.step_moments.order_index(0.0)];
            const double mu1 = row[res.step_moments.order_index(1.0)];
            res.max_mass_drift =
                std::max(res.max_mass_drift, std::abs(mu1 - res.rho) / res.rho);
            res.min_density = std::min(
                res.min_density,
                *std::min_element(state.density.begin(), state.density.end()));

            if (settings.wall_budget_seconds > 0.0) {
                const double elapsed =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                  wall_start)
                        .count();
                if (elapsed > settings.wall_budget_seconds) {
                    res.status = RunStatus::BudgetExceeded;
                    res.stop_time = state.time;
                    res.status_detail = "wall budget exhausted";
                    break;
                }
            }

            if (settings.probe_blowup && mu0 >= settings.blowup_factor * res.mu0_initial) {
                res.status = RunStatus::BlowupStop;
                res.stop_time = state.time;
                std::ostringstream d;
                d << "mu_0 reached " << settings.blowup_factor
                  << " x its initial value at t = " << state.time;
                res.status_detail = d.str();
                break;
            }

            if (state.time == output_times[next_output]) {
                res.trajectory.times.push_back(state.time);
                res.trajectory.states.push_back(state);
                res.output_moments.append(state.time, row);
                double l1 = 0.0;
                for (int k = 0; k < grid.size(); ++k)
                    l1 += std::abs((state.density[k] - prev_output.density[k]) *
                                   grid.widths[k]);
                res.lipschitz_l1_diffs.push_back(l1);
                prev_output = state;
                for (std::size_t i = 0; i < weak.size(); ++i) {
                    weak[i].sums.push_back(weak_state_sum(weak_forms[i], grid, state));
                    weak[i].integrals.push_back(weak_integral[i].sum);
                }
                ++next_output;
            }
        }
    } catch (const StiffnessError& e) {
        res.status = RunStatus::StiffnessFailure;
        res.stop_time = e.time();
        res.status_detail = e.what();
    }

    if (res.status == RunStatus::Ok) res.stop_time = state.time;
    res.steps_rejected = stepper.rejected();
    res.weak_forms = std::move(weak);
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
            .count();
    return res;
}

RunResult integrate(const SimConfig& config) {
    const CollisionKernel collision = make_collision_kernel(config);
    const BreakageKernel breakage = make_breakage_kernel(config);
    const Grid grid = make_grid(config);
    const InitialCondition init = make_initial_condition(config);
    const AllocationTable table = build_allocation_table(grid, collision, breakage);
    const State state0 = build_initial_state(init, grid);

    KernelParams kernel{collision.kappa, collision.sigma1, collision.sigma2,
                        breakage.gamma()};
    RunResult res =
        integrate_core(table, state0, SolverSettings::from_config(config),
                       config.moment_orders, kernel, standard_weak_forms(grid));
    res.analytic_initial = init.analytic_moments();
    return res;
}

}  // namespace nfrag

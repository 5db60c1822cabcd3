#pragma once

#include <string>
#include <vector>

#include "tfelab/core.hpp"

namespace tfelab {

enum class FaceAverage { arithmetic, geometric };

struct SolverConfig {
    double dt_initial = 1e-4;
    double dt_min = 1e-13;
    double dt_max = 1e-2;
    double newton_tol = 1e-10;       // max-norm, scaled by max(1, sup|u|)
    int newton_max_iter = 12;
    FaceAverage face_average = FaceAverage::arithmetic;
    BoundaryMode boundary = BoundaryMode::decay_clamped;
    double theta = 1.0;              // time-implicitness weight in [1/2, 1]
    double blowup_ceiling_factor = 1e6;   // on sup|u| relative to sup|u0|
    double dt_growth = 1.5;
    int newton_grow_threshold = 4;   // grow dt when Newton converges this fast

    void validate() const;
};

enum class StepStatus { ok, newton_diverged };

struct StepStats {
    int iterations = 0;
    double residual = 0.0;
};

// One theta-implicit step of the conservative flux-form scheme
//   u_i <- u_i - (dt/h) (q_{i+1/2} - q_{i-1/2}),
//   q_{i+1/2} = phi_face * (third difference of u across the face),
// with phi and the third difference evaluated at theta*u_new + (1-theta)*u.
// On Newton divergence returns newton_diverged and leaves out untouched
// (caller halves dt).
StepStatus step(const Field& state, double dt, const ModelParams& params,
                const SolverConfig& config, Field& out, StepStats* stats = nullptr);

enum class SimStatus { completed, blowup_ceiling, dt_collapse };
const char* to_string(SimStatus s);

struct SimResult {
    Trajectory trajectory;
    SimStatus status = SimStatus::completed;
    double t_end = 0.0;
    bool ceiling_hit = false;
    double ceiling_time = 0.0;
    std::vector<std::pair<double, double>> sup_history;  // (t, sup|u|) per step
    Field final_state;
    std::string message;
};

// Integrates to t_final with adaptive dt controlled by the Newton iteration
// count, landing exactly on every requested snapshot time. stop_at_ceiling
// false keeps integrating after the sup ceiling until dt collapses (blow-up
// time estimation).
SimResult simulate(const Field& u0, const ModelParams& params, double t_final,
                   const SolverConfig& config, const std::vector<double>& snap_times,
                   bool stop_at_ceiling = true);

}  // namespace tfelab

//! Adaptive Dormand-Prince 5(4) integration of i c-dot = H(t) c for 2- and
//! 3-component complex amplitude vectors.

use crate::error::{Error, Result};
use crate::hamiltonian::{build_three_state, build_two_state, HamiltonianMatrix, SystemParams};
use crate::pulses::PulseDescriptor;
use crate::real::{Real, C};

/// Complex amplitude vector of dimension 2 or 3.
#[derive(Clone, Copy, Debug)]
pub struct StateVec<F: Real> {
    pub dim: usize,
    pub data: [C<F>; 3],
}

impl<F: Real> StateVec<F> {
    pub fn new(amplitudes: &[C<F>]) -> Self {
        assert!(amplitudes.len() == 2 || amplitudes.len() == 3);
        let mut data = [C::new(F::zero(), F::zero()); 3];
        data[..amplitudes.len()].copy_from_slice(amplitudes);
        StateVec { dim: amplitudes.len(), data }
    }

    /// Basis state |k> of the given dimension.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut data = [C::new(F::zero(), F::zero()); 3];
        data[k] = C::new(F::one(), F::zero());
        StateVec { dim, data }
    }

    pub fn norm_sqr(&self) -> F {
        self.data[..self.dim]
            .iter()
            .fold(F::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn populations(&self) -> Vec<F> {
        self.data[..self.dim].iter().map(|z| z.norm_sqr()).collect()
    }

    fn axpy(&self, scale: F, other: &StateVec<F>) -> StateVec<F> {
        let mut out = *self;
        for i in 0..self.dim {
            out.data[i] = self.data[i] + other.data[i] * scale;
        }
        out
    }
}

/// Amplitude vector with its timestamp.
#[derive(Clone, Copy, Debug)]
pub struct AmplitudeState<F: Real> {
    pub t: F,
    pub c: StateVec<F>,
}

/// Integrator tolerances and output control.
#[derive(Clone, Copy, Debug)]
pub struct IntegratorConfig<F: Real> {
    pub rel_tol: F,
    pub abs_tol: F,
    pub max_step: Option<F>,
    pub initial_step: Option<F>,
    /// Number of equally spaced trajectory samples to record (0 = none).
    pub dense_output_samples: usize,
}

impl<F: Real> Default for IntegratorConfig<F> {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: F::lit(1e-10),
            abs_tol: F::lit(1e-12),
            max_step: None,
            initial_step: None,
            dense_output_samples: 0,
        }
    }
}

impl<F: Real> IntegratorConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.rel_tol <= F::zero() || self.abs_tol <= F::zero() {
            return Err(Error::Validation("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PropagationResult<F: Real> {
    pub final_state: AmplitudeState<F>,
    pub trajectory: Option<Vec<AmplitudeState<F>>>,
    /// max over saved samples of | ||c||^2 - 1 |.
    pub norm_drift: F,
    pub steps_taken: usize,
    pub rejected_steps: usize,
}

impl<F: Real> PropagationResult<F> {
    /// Final populations P_k = |c_k(t_end)|^2.
    pub fn final_populations(&self) -> Vec<F> {
        self.final_state.c.populations()
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C_NODES: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// b5 - b4 (error coefficients, 7 stages with FSAL)
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate i c-dot = H(t) c over `window` for an arbitrary Hamiltonian
/// closure, clamping steps onto the requested dense-output sample times.
pub fn propagate_with<F: Real>(
    h: &dyn Fn(F) -> HamiltonianMatrix<F>,
    window: (F, F),
    initial: &AmplitudeState<F>,
    cfg: &IntegratorConfig<F>,
) -> Result<PropagationResult<F>> {
    cfg.validate()?;
    let (t_start, t_end) = window;
    if !(t_start < t_end) {
        return Err(Error::Validation("window start must precede end".into()));
    }
    let span = t_end - t_start;
    let dim = initial.c.dim;
    let rhs = |t: F, y: &StateVec<F>| -> StateVec<F> {
        let m = h(t);
        let hy = m.apply(&y.data);
        let mut out = *y;
        for i in 0..dim {
            // i c-dot = H c  =>  c-dot = -i H c
            out.data[i] = hy[i] * C::new(F::zero(), -F::one());
        }
        out
    };

    let sample_times: Vec<F> = if cfg.dense_output_samples > 1 {
        (0..cfg.dense_output_samples)
            .map(|i| {
                t_start + span * F::lit(i as f64) / F::lit((cfg.dense_output_samples - 1) as f64)
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut trajectory: Vec<AmplitudeState<F>> = Vec::with_capacity(sample_times.len());
    let mut next_sample = 0usize;

    let mut t = t_start;
    let mut y = initial.c;
    let mut norm_drift = (y.norm_sqr() - F::one()).abs();
    let h_max = cfg.max_step.unwrap_or(span);
    let mut step = cfg.initial_step.unwrap_or(span * F::lit(1e-4)).min(h_max);
    let h_min = span * F::lit(1e-15);
    let mut k1 = rhs(t, &y);
    let mut steps_taken = 0usize;
    let mut rejected_steps = 0usize;

    let record = |trajectory: &mut Vec<AmplitudeState<F>>, norm_drift: &mut F, t: F, y: &StateVec<F>| {
        let d = (y.norm_sqr() - F::one()).abs();
        if d > *norm_drift {
            *norm_drift = d;
        }
        trajectory.push(AmplitudeState { t, c: *y });
    };

    while next_sample < sample_times.len() && sample_times[next_sample] <= t {
        record(&mut trajectory, &mut norm_drift, t, &y);
        next_sample += 1;
    }

    while t < t_end {
        if t_end - t <= h_min {
            // within rounding of the endpoint
            t = t_end;
            break;
        }
        let mut h_step = step.min(h_max).min(t_end - t);
        if next_sample < sample_times.len() {
            let dt = sample_times[next_sample] - t;
            if dt > F::zero() {
                h_step = h_step.min(dt);
            }
        }
        if h_step < h_min {
            return Err(Error::StepUnderflow {
                t: t.to_f64().unwrap_or(f64::NAN),
                h: h_step.to_f64().unwrap_or(f64::NAN),
            });
        }
        // six derivative stages beyond k1
        let mut k = [k1; 7];
        for s in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s + 1) {
                ys = ys.axpy(h_step * F::lit(A[s][j]), kj);
            }
            k[s + 1] = rhs(t + h_step * F::lit(C_NODES[s]), &ys);
        }
        let y_new = {
            let mut acc = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                if A[5][j] != 0.0 {
                    acc = acc.axpy(h_step * F::lit(A[5][j]), kj);
                }
            }
            acc
        };
        // embedded error estimate, real and imaginary parts separately
        let mut err_sq = F::zero();
        for i in 0..dim {
            let mut e = C::new(F::zero(), F::zero());
            for (j, kj) in k.iter().enumerate() {
                e += kj.data[i] * (h_step * F::lit(E[j]));
            }
            let sc_re = cfg.abs_tol + cfg.rel_tol * y.data[i].re.abs().max(y_new.data[i].re.abs());
            let sc_im = cfg.abs_tol + cfg.rel_tol * y.data[i].im.abs().max(y_new.data[i].im.abs());
            err_sq += (e.re / sc_re).powi(2) + (e.im / sc_im).powi(2);
        }
        let err = (err_sq / F::lit(2.0 * dim as f64)).sqrt();
        if err <= F::one() {
            t = t + h_step;
            y = y_new;
            k1 = k[6]; // FSAL
            steps_taken += 1;
            while next_sample < sample_times.len() && sample_times[next_sample] <= t {
                record(&mut trajectory, &mut norm_drift, t, &y);
                next_sample += 1;
            }
        } else {
            rejected_steps += 1;
        }
        let factor = if err <= F::zero() {
            F::lit(5.0)
        } else {
            (F::lit(0.9) * err.powf(-F::lit(0.2))).max(F::lit(0.2)).min(F::lit(5.0))
        };
        step = (h_step * factor).min(h_max);
    }

    while next_sample < sample_times.len() {
        record(&mut trajectory, &mut norm_drift, t, &y);
        next_sample += 1;
    }
    let d = (y.norm_sqr() - F::one()).abs();
    if d > norm_drift {
        norm_drift = d;
    }
    Ok(PropagationResult {
        final_state: AmplitudeState { t, c: y },
        trajectory: if sample_times.is_empty() { None } else { Some(trajectory) },
        norm_drift,
        steps_taken,
        rejected_steps,
    })
}

/// Propagate the descriptor's system (2- or 3-state) over `params.window`.
pub fn propagate<F: Real>(
    desc: &PulseDescriptor<F>,
    params: &SystemParams<F>,
    initial: &AmplitudeState<F>,
    cfg: &IntegratorConfig<F>,
) -> Result<PropagationResult<F>> {
    desc.validate()?;
    params.validate()?;
    let dim = desc.dim();
    if initial.c.dim != dim {
        return Err(Error::Validation(format!(
            "initial state has dimension {}, descriptor drives a {}-state system",
            initial.c.dim, dim
        )));
    }
    let norm_dev = (initial.c.norm_sqr().sqrt() - F::one()).abs();
    if params.gamma == F::zero() {
        if norm_dev > F::lit(1e-9) {
            return Err(Error::NotNormalized { deviation: norm_dev.to_f64().unwrap_or(f64::NAN) });
        }
    } else if initial.c.norm_sqr().sqrt() > F::one() + F::lit(1e-9) {
        return Err(Error::NotNormalized { deviation: norm_dev.to_f64().unwrap_or(f64::NAN) });
    }
    let desc = desc.clone();
    let params = *params;
    let h = move |t: F| -> HamiltonianMatrix<F> {
        if dim == 2 {
            let s = desc.sample(t);
            build_two_state(s.omega_p, s.omega_s)
        } else {
            build_three_state(&desc, &params, t)
        }
    };
    propagate_with(&h, params.window, initial, cfg)
}

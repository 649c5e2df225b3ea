//! Figure-reproduction harness: parameter sweeps, infidelity metrics,
//! breakdown-area diagnostics, and the rotating-wave error estimate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::SystemParams;
use crate::output::{csv_line, fmt_float};
use crate::propagator::{propagate, AmplitudeState, IntegratorConfig, PropagationResult, StateVec};
use crate::pulses::PulseDescriptor;
use crate::real::Real;

/// Parameter varied along a sweep grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweptParameter {
    PeakRabi,
    SinglePhotonDetuning,
    TwoPhotonDetuning,
    MaskWidth,
}

impl SweptParameter {
    /// Column name used in CSV headers.
    pub fn name(&self) -> &'static str {
        match self {
            SweptParameter::PeakRabi => "peak_rabi",
            SweptParameter::SinglePhotonDetuning => "delta",
            SweptParameter::TwoPhotonDetuning => "delta2",
            SweptParameter::MaskWidth => "mask_width",
        }
    }
}

/// Figure of merit evaluated at the end of each run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target<F: Real> {
    FullTransfer,
    /// Coherent superposition psi1 cos(alpha) - psi3 sin(alpha).
    Superposition(F),
}

/// Full description of one sweep.
#[derive(Clone, Debug)]
pub struct SweepSpec<F: Real> {
    pub swept: SweptParameter,
    pub grid: Vec<F>,
    pub base_descriptor: PulseDescriptor<F>,
    pub base_params: SystemParams<F>,
    pub target: Target<F>,
}

impl<F: Real> SweepSpec<F> {
    pub fn validate(&self) -> Result<()> {
        self.base_descriptor.validate()?;
        self.base_params.validate()?;
        if self.base_descriptor.dim() != 3 {
            return Err(Error::Validation("sweeps drive the three-state system".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::Validation("sweep grid is empty".into()));
        }
        for w in self.grid.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Validation("sweep grid must be strictly increasing".into()));
            }
        }
        let positive = matches!(
            self.swept,
            SweptParameter::PeakRabi | SweptParameter::MaskWidth
        );
        if positive && self.grid[0] <= F::zero() {
            return Err(Error::Validation(format!(
                "{} values must be positive",
                self.swept.name()
            )));
        }
        Ok(())
    }
}

/// One row of a sweep result.
#[derive(Clone, Debug)]
pub struct SweepRecord<F: Real> {
    pub value: F,
    pub p1: F,
    pub p2: F,
    pub p3: F,
    pub infidelity: F,
    /// 1 - sum of populations, relevant when Gamma > 0.
    pub norm_loss: F,
    /// "ok" or the per-point error text; failed points keep their row.
    pub status: String,
}

/// 1 - P3 at the end of a three-state run started in psi1.
pub fn transfer_infidelity<F: Real>(result: &PropagationResult<F>) -> F {
    let p = result.final_populations();
    (F::one() - p[2]).max(F::zero()).min(F::one())
}

/// 1 - |cos(alpha) c1 - sin(alpha) c3|^2 at the end of the run; the global
/// phase of the final state cancels in the modulus.
pub fn superposition_infidelity<F: Real>(result: &PropagationResult<F>, alpha: F) -> F {
    let c = &result.final_state.c;
    let overlap = c.data[0] * alpha.cos() - c.data[2] * alpha.sin();
    (F::one() - overlap.norm_sqr()).max(F::zero()).min(F::one())
}

fn point_descriptor<F: Real>(spec: &SweepSpec<F>, value: F) -> PulseDescriptor<F> {
    match spec.swept {
        SweptParameter::PeakRabi => spec.base_descriptor.with_peak(value),
        SweptParameter::MaskWidth => spec.base_descriptor.with_mask_width(value),
        _ => spec.base_descriptor.clone(),
    }
}

fn point_params<F: Real>(spec: &SweepSpec<F>, value: F) -> SystemParams<F> {
    let mut p = spec.base_params;
    match spec.swept {
        SweptParameter::SinglePhotonDetuning => p.delta = value,
        SweptParameter::TwoPhotonDetuning => p.delta2 = value,
        _ => {}
    }
    p
}

/// Run the sweep; points execute concurrently, records come back in grid
/// order and are deterministic for a fixed spec and config.
pub fn run_sweep<F: Real>(
    spec: &SweepSpec<F>,
    cfg: &IntegratorConfig<F>,
) -> Result<Vec<SweepRecord<F>>> {
    spec.validate()?;
    let records = spec
        .grid
        .par_iter()
        .map(|&value| {
            let desc = point_descriptor(spec, value);
            let params = point_params(spec, value);
            let initial = AmplitudeState {
                t: params.window.0,
                c: StateVec::basis(3, 0),
            };
            match propagate(&desc, &params, &initial, cfg) {
                Ok(run) => {
                    let p = run.final_populations();
                    let infidelity = match spec.target {
                        Target::FullTransfer => transfer_infidelity(&run),
                        Target::Superposition(alpha) => superposition_infidelity(&run, alpha),
                    };
                    SweepRecord {
                        value,
                        p1: p[0],
                        p2: p[1],
                        p3: p[2],
                        infidelity,
                        norm_loss: F::one() - (p[0] + p[1] + p[2]),
                        status: "ok".into(),
                    }
                }
                Err(e) => SweepRecord {
                    value,
                    p1: F::nan(),
                    p2: F::nan(),
                    p3: F::nan(),
                    infidelity: F::nan(),
                    norm_loss: F::nan(),
                    status: format!("error: {e}"),
                },
            }
        })
        .collect();
    Ok(records)
}

/// CSV rendering of a sweep, first column named after the swept parameter.
pub fn sweep_csv<F: Real>(spec: &SweepSpec<F>, records: &[SweepRecord<F>]) -> String {
    let mut out = format!("{},P1,P2,P3,infidelity,norm_loss,status\n", spec.swept.name());
    for r in records {
        out.push_str(&csv_line(&[
            fmt_float(r.value),
            fmt_float(r.p1),
            fmt_float(r.p2),
            fmt_float(r.p3),
            fmt_float(r.infidelity),
            fmt_float(r.norm_loss),
            r.status.clone(),
        ]));
        out.push('\n');
    }
    out
}

/// Result of a breakdown-area scan over pulse area.
#[derive(Clone, Debug)]
pub struct BreakdownReport<F: Real> {
    /// Area at which the exponential infidelity decline first turns over.
    pub a_b: F,
    /// Area ratio R = A / A_overlap of the family, from the pulse areas.
    pub ratio: F,
    /// (area, infidelity) pairs of the scan.
    pub rows: Vec<(F, F)>,
}

/// Scan transfer infidelity over rms pulse area and locate the first local
/// minimum of log-infidelity followed by a rise (3-point window).
pub fn breakdown_scan<F: Real>(
    desc: &PulseDescriptor<F>,
    area_grid: &[F],
    params: &SystemParams<F>,
    cfg: &IntegratorConfig<F>,
) -> Result<BreakdownReport<F>> {
    desc.validate()?;
    if area_grid.len() < 3 {
        return Err(Error::NoBreakdownDetected);
    }
    let areas = desc.with_peak(F::one()).areas(params.window)?;
    let a_unit = areas.a_rms;
    let ratio = areas.ratio;

    let spec = SweepSpec {
        swept: SweptParameter::PeakRabi,
        grid: area_grid.iter().map(|&a| a / a_unit).collect(),
        base_descriptor: desc.clone(),
        base_params: *params,
        target: Target::FullTransfer,
    };
    let records = run_sweep(&spec, cfg)?;
    let rows: Vec<(F, F)> = area_grid
        .iter()
        .zip(&records)
        .map(|(&a, r)| (a, r.infidelity))
        .collect();

    // floor keeps the log finite when a point hits the integrator noise level
    let floor = F::lit(1e-18);
    let logs: Vec<F> = rows.iter().map(|&(_, f)| f.max(floor).ln()).collect();
    for i in 1..logs.len() - 1 {
        if logs[i] < logs[i - 1] && logs[i] < logs[i + 1] {
            return Ok(BreakdownReport { a_b: rows[i].0, ratio, rows });
        }
    }
    Err(Error::NoBreakdownDetected)
}

/// Rotating-wave error estimate (duration * omega_rabi^2 / omega_carrier)^2.
pub fn rwa_error_estimate<F: Real>(omega_carrier: F, omega_rabi: F, duration: F) -> F {
    let x = duration * omega_rabi * omega_rabi / omega_carrier;
    x * x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{MaskFunction, ShapeFunction};
    use crate::real::C;
    use approx::assert_relative_eq;

    fn optimized(omega0: f64, order: u32, lambda: f64, t0: f64) -> PulseDescriptor<f64> {
        PulseDescriptor::DdpOptimized {
            omega0,
            mask: MaskFunction::Hypergaussian { order, width: t0 },
            shape: ShapeFunction::sigmoid(lambda),
            t_unit: 1.0,
        }
    }

    fn run(desc: &PulseDescriptor<f64>, params: &SystemParams<f64>) -> PropagationResult<f64> {
        let initial = AmplitudeState { t: params.window.0, c: StateVec::basis(3, 0) };
        propagate(desc, params, &initial, &IntegratorConfig::default()).unwrap()
    }

    #[test]
    fn transfer_infidelity_limits() {
        // untouched initial state: no transfer at all
        let stuck = PropagationResult {
            final_state: AmplitudeState { t: 10.0, c: StateVec::basis(3, 0) },
            trajectory: None,
            norm_drift: 0.0,
            steps_taken: 0,
            rejected_steps: 0,
        };
        assert_eq!(transfer_infidelity(&stuck), 1.0);
        // flagship adiabatic point
        let p = SystemParams::resonant((-10.0, 10.0));
        let r = run(&optimized(20.0, 3, 4.0, 2.0), &p);
        assert!(transfer_infidelity(&r) < 1e-4, "inf {}", transfer_infidelity(&r));
    }

    #[test]
    fn superposition_infidelity_of_exact_target() {
        let alpha = 0.7f64;
        let mut c = StateVec::new(&[
            C::new(alpha.cos(), 0.0),
            C::new(0.0, 0.0),
            C::new(-alpha.sin(), 0.0),
        ]);
        // a global phase must not matter
        let phase = C::from_polar(1.0, 1.3);
        for a in c.data.iter_mut() {
            *a = *a * phase;
        }
        let r = PropagationResult {
            final_state: AmplitudeState { t: 10.0, c },
            trajectory: None,
            norm_drift: 0.0,
            steps_taken: 0,
            rejected_steps: 0,
        };
        assert!(superposition_infidelity(&r, alpha) < 1e-14);
    }

    #[test]
    fn superposition_at_right_angle_matches_transfer() {
        let p = SystemParams::resonant((-10.0, 10.0));
        let r = run(&optimized(12.0, 3, 4.0, 2.0), &p);
        let a = superposition_infidelity(&r, std::f64::consts::FRAC_PI_2);
        let b = transfer_infidelity(&r);
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn fractional_hadamard_point() {
        let d = PulseDescriptor::FractionalDdp {
            omega0: 20.0,
            mask: MaskFunction::Hypergaussian { order: 1, width: 2.0 },
            shape: ShapeFunction::sigmoid(2.0),
            alpha: std::f64::consts::FRAC_PI_4,
            t_unit: 1.0,
        };
        let p = SystemParams::resonant((-10.0, 10.0));
        let r = run(&d, &p);
        let inf = superposition_infidelity(&r, std::f64::consts::FRAC_PI_4);
        assert!(inf < 1e-3, "infidelity {inf}");
    }

    #[test]
    fn sweep_is_ordered_and_deterministic() {
        let spec = SweepSpec {
            swept: SweptParameter::PeakRabi,
            grid: vec![5.0, 10.0, 15.0, 20.0],
            base_descriptor: optimized(1.0, 3, 4.0, 2.0),
            base_params: SystemParams::resonant((-10.0, 10.0)),
            target: Target::FullTransfer,
        };
        let cfg = IntegratorConfig::default();
        let a = run_sweep(&spec, &cfg).unwrap();
        let b = run_sweep(&spec, &cfg).unwrap();
        assert_eq!(sweep_csv(&spec, &a), sweep_csv(&spec, &b));
        assert_eq!(a.len(), 4);
        for (r, want) in a.iter().zip(&spec.grid) {
            assert_eq!(r.value, *want);
            assert_eq!(r.status, "ok");
            assert!((r.p1 + r.p2 + r.p3 - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn single_point_sweep_matches_direct_run() {
        let desc = optimized(14.0, 3, 4.0, 2.0);
        let params = SystemParams::resonant((-10.0, 10.0));
        let spec = SweepSpec {
            swept: SweptParameter::PeakRabi,
            grid: vec![14.0],
            base_descriptor: desc.clone(),
            base_params: params,
            target: Target::FullTransfer,
        };
        let rec = &run_sweep(&spec, &IntegratorConfig::default()).unwrap()[0];
        let direct = run(&desc, &params);
        assert_relative_eq!(rec.infidelity, transfer_infidelity(&direct), epsilon = 1e-12);
    }

    #[test]
    fn optimized_beats_gaussian_at_large_area() {
        let cfg = IntegratorConfig::default();
        let params = SystemParams::resonant((-10.0, 10.0));
        // below Omega0 T ~ 17 the Gaussian pair can transiently win inside
        // one of its oscillation dips (near Omega0 T = 15 the dip reaches
        // 2e-5); past the crossing the optimized curve stays below
        let grid = vec![17.0, 18.0, 19.0, 20.0];
        let opt = SweepSpec {
            swept: SweptParameter::PeakRabi,
            grid: grid.clone(),
            base_descriptor: optimized(1.0, 3, 4.0, 2.0),
            base_params: params,
            target: Target::FullTransfer,
        };
        let gau = SweepSpec {
            swept: SweptParameter::PeakRabi,
            grid,
            base_descriptor: PulseDescriptor::Gaussian { omega0: 1.0, delay: 1.2, width: 1.0 },
            base_params: params,
            target: Target::FullTransfer,
        };
        let a = run_sweep(&opt, &cfg).unwrap();
        let b = run_sweep(&gau, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(
                x.infidelity <= y.infidelity,
                "at {}: {} vs {}",
                x.value,
                x.infidelity,
                y.infidelity
            );
        }
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let mut spec = SweepSpec {
            swept: SweptParameter::PeakRabi,
            grid: vec![5.0, 5.0],
            base_descriptor: optimized(1.0, 3, 4.0, 2.0),
            base_params: SystemParams::resonant((-10.0, 10.0)),
            target: Target::FullTransfer,
        };
        assert!(spec.validate().is_err());
        spec.grid = vec![-1.0, 5.0];
        assert!(spec.validate().is_err());
        spec.grid = vec![];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn breakdown_area_orders_with_mask_width() {
        let cfg = IntegratorConfig::default();
        let params = SystemParams::resonant((-12.0, 12.0));
        // the T0 = 3T family keeps declining until Omega0 T ~ 40, which is an
        // rms area near 160; the grid has to reach past that point
        let grid: Vec<f64> = (0..=27).map(|i| 40.0 + 6.0 * i as f64).collect();
        let narrow = breakdown_scan(&optimized(1.0, 3, 4.0, 2.0), &grid, &params, &cfg).unwrap();
        let wide = breakdown_scan(&optimized(1.0, 3, 4.0, 3.0), &grid, &params, &cfg).unwrap();
        assert!(
            wide.a_b >= narrow.a_b,
            "A_b(3T) = {} < A_b(2T) = {}",
            wide.a_b,
            narrow.a_b
        );
        assert!(narrow.ratio > 1.0);
    }

    #[test]
    fn breakdown_requires_enough_points() {
        let cfg = IntegratorConfig::default();
        let params = SystemParams::resonant((-10.0, 10.0));
        let r = breakdown_scan(&optimized(1.0, 3, 4.0, 2.0), &[5.0, 10.0], &params, &cfg);
        assert!(matches!(r, Err(Error::NoBreakdownDetected)));
    }

    #[test]
    fn rwa_error_examples() {
        assert_relative_eq!(rwa_error_estimate(1e16, 1e9, 1e-6), 1e-8, max_relative = 1e-12);
        assert_relative_eq!(rwa_error_estimate(1e16, 1e8, 1e-8), 1e-16, max_relative = 1e-12);
        assert_eq!(rwa_error_estimate(1e16, 0.0, 1.0), 0.0);
    }
}

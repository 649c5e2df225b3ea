//! Two-state reductions of STIRAP: the exact resonant reduction with its
//! amplitude back-map, and adiabatic elimination at large single-photon
//! detuning.

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianMatrix, SystemParams};
use crate::output::{csv_line, fmt_float};
use crate::propagator::{propagate, propagate_with, AmplitudeState, IntegratorConfig, StateVec};
use crate::pulses::PulseDescriptor;
use crate::real::{Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Resonant,
    Eliminated,
}

/// Effective two-state system obtained from a three-state descriptor.
#[derive(Clone, Debug)]
pub struct EffectiveTwoState<F: Real> {
    pub desc: PulseDescriptor<F>,
    pub regime: Regime,
    /// Single-photon detuning used by the eliminated branch (unused when
    /// resonant).
    pub delta: F,
    /// False when 3 Omega0 <= |Delta| < 10 Omega0 (elimination accepted with
    /// a warning).
    pub well_separated: bool,
}

impl<F: Real> EffectiveTwoState<F> {
    /// Effective coupling at time t.
    pub fn omega_eff(&self, t: F) -> F {
        let s = self.desc.sample(t);
        match self.regime {
            Regime::Resonant => s.omega_p,
            Regime::Eliminated => -s.omega_p * s.omega_s / (F::two() * self.delta),
        }
    }

    /// Effective detuning at time t.
    pub fn delta_eff(&self, t: F) -> F {
        let s = self.desc.sample(t);
        match self.regime {
            Regime::Resonant => s.omega_s,
            Regime::Eliminated => {
                (s.omega_p * s.omega_p - s.omega_s * s.omega_s) / (F::lit(4.0) * self.delta)
            }
        }
    }

    /// Effective quasienergy splitting sqrt(omega_eff^2 + delta_eff^2).
    pub fn splitting(&self, t: F) -> F {
        let w = self.omega_eff(t);
        let d = self.delta_eff(t);
        (w * w + d * d).sqrt()
    }

    /// Effective two-state Hamiltonian (traceless form).
    pub fn hamiltonian(&self, t: F) -> HamiltonianMatrix<F> {
        let (w, d) = (self.omega_eff(t), self.delta_eff(t));
        let mut h = crate::hamiltonian::build_two_state(w, F::zero());
        let half = F::half();
        match self.regime {
            // (1/2) [[Ws, Wp], [Wp, -Ws]]
            Regime::Resonant => {
                h.entries[0][0] = C::new(half * d, F::zero());
                h.entries[1][1] = C::new(-half * d, F::zero());
            }
            // (1/2) [[-Deff, Weff], [Weff, Deff]]
            Regime::Eliminated => {
                h.entries[0][0] = C::new(-half * d, F::zero());
                h.entries[1][1] = C::new(half * d, F::zero());
            }
        }
        h
    }

    /// Two-state Hamiltonian in the frame where [`map_amplitudes`] is exact
    /// (Resonant regime only): diag(-Omega/4, +Omega/4) with nonadiabatic
    /// coupling -i thetadot/2, where Omega is the rms Rabi frequency.
    ///
    /// The traceless coupling/detuning form returned by [`Self::hamiltonian`]
    /// shares the quasienergy zero structure but its amplitudes do not map
    /// back onto the three-state amplitudes; propagation for the consistency
    /// check has to happen in this frame instead.
    pub fn dark_frame_hamiltonian(&self, t: F) -> Result<HamiltonianMatrix<F>> {
        let s = self.desc.sample(t);
        let omega = (s.omega_p * s.omega_p + s.omega_s * s.omega_s).sqrt();
        let rate = self.desc.mixing_angle_rate(t)?;
        let mut h = crate::hamiltonian::build_two_state(F::zero(), F::zero());
        let q = F::lit(0.25) * omega;
        let half_rate = F::half() * rate;
        h.entries[0][0] = C::new(-q, F::zero());
        h.entries[1][1] = C::new(q, F::zero());
        h.entries[0][1] = C::new(F::zero(), -half_rate);
        h.entries[1][0] = C::new(F::zero(), half_rate);
        h.t = t;
        Ok(h)
    }
}

/// Exact resonant reduction (Delta = 0): detuning Omega_s, coupling Omega_p.
pub fn resonant_reduce<F: Real>(desc: &PulseDescriptor<F>) -> EffectiveTwoState<F> {
    EffectiveTwoState {
        desc: desc.clone(),
        regime: Regime::Resonant,
        delta: F::zero(),
        well_separated: true,
    }
}

/// Adiabatic elimination of the intermediate state at large detuning.
///
/// Requires |Delta| >= 3 Omega0; logs a warning below 10 Omega0.
pub fn eliminate<F: Real>(desc: &PulseDescriptor<F>, delta: F) -> Result<EffectiveTwoState<F>> {
    let omega0 = desc.peak();
    let minimum = F::lit(3.0) * omega0;
    if delta.abs() < minimum {
        return Err(Error::DetuningTooSmall {
            delta: delta.to_f64().unwrap_or(f64::NAN),
            minimum: minimum.to_f64().unwrap_or(f64::NAN),
        });
    }
    let well_separated = delta.abs() >= F::lit(10.0) * omega0;
    if !well_separated {
        log::warn!(
            "adiabatic elimination with |Delta| = {} < 10 Omega0 = {}; accuracy degrades",
            delta.abs(),
            F::lit(10.0) * omega0
        );
    }
    Ok(EffectiveTwoState { desc: desc.clone(), regime: Regime::Eliminated, delta, well_separated })
}

/// Map effective two-state amplitudes b back to three-state amplitudes c.
///
/// c1 = 2 Re(b1* b2) sin(theta) + (|b1|^2 - |b2|^2) cos(theta)
/// c2 = 2 i Im(b1* b2)
/// c3 = 2 Re(b1* b2) cos(theta) - (|b1|^2 - |b2|^2) sin(theta)
pub fn map_amplitudes<F: Real>(b: &[C<F>; 2], theta: F) -> Result<[C<F>; 3]> {
    let norm = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
    let dev = (norm - F::one()).abs();
    if dev > F::lit(1e-9) {
        return Err(Error::NotNormalized { deviation: dev.to_f64().unwrap_or(f64::NAN) });
    }
    let cross = b[0].conj() * b[1];
    let two_re = F::two() * cross.re;
    let pop_diff = b[0].norm_sqr() - b[1].norm_sqr();
    let (st, ct) = (theta.sin(), theta.cos());
    Ok([
        C::new(two_re * st + pop_diff * ct, F::zero()),
        C::new(F::zero(), F::two() * cross.im),
        C::new(two_re * ct - pop_diff * st, F::zero()),
    ])
}

/// One sampled comparison row of a consistency run.
#[derive(Clone, Copy, Debug)]
pub struct ConsistencyRow<F: Real> {
    pub t: F,
    pub p_full: [F; 3],
    pub p_mapped: [F; 3],
    pub deviation: F,
}

/// Report comparing full three-state propagation against the reduced
/// two-state propagation plus back-map.
#[derive(Clone, Debug)]
pub struct ConsistencyReport<F: Real> {
    pub regime: Regime,
    pub rows: Vec<ConsistencyRow<F>>,
    pub max_deviation: F,
    pub final_deviation: F,
}

impl<F: Real> ConsistencyReport<F> {
    /// CSV rendering: t, P1..P3 full, P1..P3 mapped, deviation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "t,P1_full,P2_full,P3_full,P1_mapped,P2_mapped,P3_mapped,deviation\n",
        );
        for r in &self.rows {
            out.push_str(&csv_line(&[
                fmt_float(r.t),
                fmt_float(r.p_full[0]),
                fmt_float(r.p_full[1]),
                fmt_float(r.p_full[2]),
                fmt_float(r.p_mapped[0]),
                fmt_float(r.p_mapped[1]),
                fmt_float(r.p_mapped[2]),
                fmt_float(r.deviation),
            ]));
            out.push('\n');
        }
        out
    }
}

/// Compare full three-state propagation against the reduced two-state
/// propagation with the amplitude back-map.
///
/// The branch is chosen from `params.delta`: zero selects the exact resonant
/// reduction, nonzero the adiabatic elimination.
pub fn consistency_check<F: Real>(
    desc: &PulseDescriptor<F>,
    params: &SystemParams<F>,
    cfg: &IntegratorConfig<F>,
) -> Result<ConsistencyReport<F>> {
    desc.validate()?;
    params.validate()?;
    if params.delta2 != F::zero() || params.gamma != F::zero() {
        return Err(Error::Validation(
            "consistency check requires delta2 = 0 and gamma = 0".into(),
        ));
    }
    let samples = if cfg.dense_output_samples > 1 { cfg.dense_output_samples } else { 201 };
    let mut cfg = *cfg;
    cfg.dense_output_samples = samples;
    let (t_start, _) = params.window;

    let eff = if params.delta == F::zero() {
        resonant_reduce(desc)
    } else {
        eliminate(desc, params.delta)?
    };
    let eff_h: Box<dyn Fn(F) -> HamiltonianMatrix<F>> = match eff.regime {
        Regime::Resonant => {
            let eff = eff.clone();
            Box::new(move |t: F| {
                eff.dark_frame_hamiltonian(t)
                    .expect("mixing angle rate is finite on the real axis")
            })
        }
        Regime::Eliminated => {
            let eff = eff.clone();
            Box::new(move |t: F| eff.hamiltonian(t))
        }
    };
    let b_init = StateVec::basis(2, 0);
    let b_run = propagate_with(
        &eff_h,
        params.window,
        &AmplitudeState { t: t_start, c: b_init },
        &cfg,
    )?;

    // full three-state run; the initial state is taken through the map so the
    // two sides start in exact correspondence
    let c_init = match eff.regime {
        Regime::Resonant => {
            let theta0 = desc.mixing_angle(t_start)?;
            let c = map_amplitudes(&[b_init.data[0], b_init.data[1]], theta0)?;
            StateVec::new(&c)
        }
        Regime::Eliminated => StateVec::basis(3, 0),
    };
    let c_run = propagate(desc, params, &AmplitudeState { t: t_start, c: c_init }, &cfg)?;

    let b_traj = b_run.trajectory.expect("dense output requested");
    let c_traj = c_run.trajectory.expect("dense output requested");
    let mut rows = Vec::with_capacity(b_traj.len());
    let mut max_dev = F::zero();
    for (bs, cs) in b_traj.iter().zip(&c_traj) {
        let p_mapped: [F; 3] = match eff.regime {
            Regime::Resonant => {
                let theta = desc.mixing_angle(bs.t)?;
                let c = map_amplitudes(&[bs.c.data[0], bs.c.data[1]], theta)?;
                [c[0].norm_sqr(), c[1].norm_sqr(), c[2].norm_sqr()]
            }
            // eliminated branch: b components are (c1, c3), no transient c2
            Regime::Eliminated => [bs.c.data[0].norm_sqr(), F::zero(), bs.c.data[1].norm_sqr()],
        };
        let p_full = [
            cs.c.data[0].norm_sqr(),
            cs.c.data[1].norm_sqr(),
            cs.c.data[2].norm_sqr(),
        ];
        let mut dev = F::zero();
        for i in 0..3 {
            dev = dev.max((p_full[i] - p_mapped[i]).abs());
        }
        max_dev = max_dev.max(dev);
        rows.push(ConsistencyRow { t: bs.t, p_full, p_mapped, deviation: dev });
    }
    let final_deviation = rows.last().map(|r| r.deviation).unwrap_or(F::zero());
    Ok(ConsistencyReport { regime: eff.regime, rows, max_deviation: max_dev, final_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{MaskFunction, ShapeFunction};
    use approx::assert_relative_eq;

    fn ddp(omega0: f64) -> PulseDescriptor<f64> {
        PulseDescriptor::DdpOptimized {
            omega0,
            mask: MaskFunction::Hypergaussian { order: 3, width: 2.0 },
            shape: ShapeFunction::sigmoid(4.0),
            t_unit: 1.0,
        }
    }

    #[test]
    fn resonant_constant_mask_splitting_is_constant() {
        let d = PulseDescriptor::DdpOptimized {
            omega0: 5.0,
            mask: MaskFunction::Constant,
            shape: ShapeFunction::sigmoid(4.0),
            t_unit: 1.0,
        };
        let eff = resonant_reduce(&d);
        for t in [-3.0, -1.0, 0.0, 0.5, 2.0] {
            assert_relative_eq!(eff.splitting(t), 5.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn resonant_roles_at_symmetry_point() {
        let d = PulseDescriptor::Gaussian { omega0: 2.0, delay: 1.2, width: 1.0 };
        let eff = resonant_reduce(&d);
        assert_relative_eq!(eff.omega_eff(0.0), eff.delta_eff(0.0), epsilon = 1e-13);
        // early times: Stokes only, pure detuning; the Gaussian ratio at
        // t = -5 is exp(-2 t tau / T^2) ~ 6e-6
        assert!(eff.omega_eff(-5.0) / eff.delta_eff(-5.0) < 1e-5);
    }

    #[test]
    fn eliminated_invariants() {
        let d = PulseDescriptor::DdpOptimized {
            omega0: 2.0,
            mask: MaskFunction::Constant,
            shape: ShapeFunction::sigmoid(4.0),
            t_unit: 1.0,
        };
        let eff = eliminate(&d, 50.0).unwrap();
        // constant mask: splitting = Omega0^2 / (4 Delta) for all t
        for t in [-2.0, 0.0, 1.5] {
            assert_relative_eq!(eff.splitting(t), 4.0 / 200.0, epsilon = 1e-12);
        }
        // equal envelopes at t = 0: delta_eff vanishes
        assert!(f64::abs(eff.delta_eff(0.0)) < 1e-13);
        // sign convention: Omega_eff < 0 for positive envelopes
        assert!(eff.omega_eff(0.0) < 0.0);
    }

    #[test]
    fn eliminate_rejects_small_detuning() {
        let d = ddp(10.0);
        assert!(matches!(eliminate(&d, 5.0), Err(Error::DetuningTooSmall { .. })));
        assert!(!eliminate(&d, 50.0).unwrap().well_separated);
        assert!(eliminate(&d, 150.0).unwrap().well_separated);
    }

    #[test]
    fn map_amplitudes_examples() {
        // b = (1, 0), theta = 0 -> (1, 0, 0)
        let b = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
        let c = map_amplitudes(&b, 0.0).unwrap();
        assert_relative_eq!(c[0].re, 1.0);
        assert_eq!(c[1], C::new(0.0, 0.0));
        assert_relative_eq!(c[2].re, 0.0);
        // b = (1, 0), theta = pi/2 -> (0, 0, -1)
        let c = map_amplitudes(&b, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(c[0].re.abs() < 1e-15);
        assert_relative_eq!(c[2].re, -1.0);
        // b = ((1+i)/2, (1-i)/2), theta = pi/4: b1* b2 = -i/2, c2 = -i
        let b = [C::new(0.5, 0.5), C::new(0.5, -0.5)];
        let c = map_amplitudes(&b, std::f64::consts::FRAC_PI_4).unwrap();
        assert!((c[1] - C::new(0.0, -1.0)).norm() < 1e-15);
        assert_relative_eq!(c[1].norm_sqr(), 1.0);
    }

    #[test]
    fn map_preserves_normalization() {
        let mut x = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..200 {
            let raw = [C::new(rnd(), rnd()), C::new(rnd(), rnd())];
            let n = (raw[0].norm_sqr() + raw[1].norm_sqr()).sqrt();
            let b = [raw[0] / n, raw[1] / n];
            let theta = 3.0 * rnd();
            let c = map_amplitudes(&b, theta).unwrap();
            let total = c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr();
            assert!((total - 1.0).abs() <= 1e-12, "norm {total}");
        }
    }

    #[test]
    fn map_rejects_unnormalized() {
        let b = [C::new(0.5, 0.0), C::new(0.0, 0.0)];
        assert!(matches!(map_amplitudes(&b, 0.0), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn resonant_consistency_is_exact() {
        let p = SystemParams::resonant((-10.0, 10.0));
        let cfg = IntegratorConfig::default();
        for d in [ddp(20.0), ddp(7.0)] {
            let rep = consistency_check(&d, &p, &cfg).unwrap();
            assert_eq!(rep.regime, Regime::Resonant);
            assert!(rep.max_deviation <= 1e-8, "max dev {}", rep.max_deviation);
        }
        let g = PulseDescriptor::Gaussian { omega0: 10.0, delay: 1.2, width: 1.0 };
        let rep = consistency_check(&g, &p, &cfg).unwrap();
        assert!(rep.max_deviation <= 1e-8, "max dev {}", rep.max_deviation);
    }

    #[test]
    fn elimination_improves_with_detuning() {
        let d = PulseDescriptor::Gaussian { omega0: 1.0, delay: 1.2, width: 1.0 };
        let cfg = IntegratorConfig::default();
        let dev = |delta: f64| {
            let p = SystemParams {
                delta,
                ..SystemParams::resonant((-10.0, 10.0))
            };
            consistency_check(&d, &p, &cfg).unwrap().final_deviation
        };
        let d10 = dev(10.0);
        let d100 = dev(100.0);
        assert!(d100 < d10, "dev(100) = {d100} !< dev(10) = {d10}");
    }

    #[test]
    fn eliminated_matches_full_at_large_detuning() {
        let d = PulseDescriptor::Gaussian { omega0: 1.0, delay: 1.2, width: 1.0 };
        let p = SystemParams { delta: 50.0, ..SystemParams::resonant((-10.0, 10.0)) };
        let rep = consistency_check(&d, &p, &IntegratorConfig::default()).unwrap();
        assert!(rep.final_deviation <= 2e-2, "final dev {}", rep.final_deviation);
    }

    #[test]
    fn csv_report_shape() {
        let d = ddp(10.0);
        let p = SystemParams::resonant((-10.0, 10.0));
        let rep = consistency_check(&d, &p, &IntegratorConfig::default()).unwrap();
        let csv = rep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,P1_full,P2_full,P3_full,P1_mapped,P2_mapped,P3_mapped,deviation"
        );
        assert_eq!(csv.lines().count(), rep.rows.len() + 1);
    }
}

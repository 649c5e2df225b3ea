//! Analytic pulse families: pump/Stokes envelope pairs evaluable at real and
//! complex time, plus shape utilities (mixing angle, areas, adiabaticity
//! diagnostics).
//!
//! Every family is dimensionless with hbar = 1: times in units of the
//! characteristic width `T`, frequencies in units of `1/T`.

use num_traits::One;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::real::{Real, C};

/// Exclusion radius around shape-function poles, in units of `T`.
pub const POLE_EXCLUSION_FACTOR: f64 = 1e-3;

/// Relative floor (times the peak Rabi frequency) below which an envelope is
/// treated as vanished.
pub const ENVELOPE_FLOOR_REL: f64 = 1e-15;

/// Relative floor for the window-edge check in [`PulseDescriptor::areas`].
pub const AREA_EDGE_FLOOR_REL: f64 = 1e-6;

/// Monotone profile f(t) rising from 0 at -inf to 1 at +inf.
///
/// Evaluated in the dimensionless argument `u = t / T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShapeFunction<F: Real> {
    /// f(u) = 1 / (1 + e^(-lambda u)); poles at u = i pi (2k + 1) / lambda.
    Sigmoid { steepness: F },
}

impl<F: Real> ShapeFunction<F> {
    pub fn sigmoid(steepness: F) -> Self {
        ShapeFunction::Sigmoid { steepness }
    }

    /// f(u) on the real axis, overflow-safe at both tails.
    pub fn eval(&self, u: F) -> F {
        match *self {
            ShapeFunction::Sigmoid { steepness } => {
                let x = steepness * u;
                if x >= F::zero() {
                    F::one() / (F::one() + (-x).exp())
                } else {
                    let e = x.exp();
                    e / (F::one() + e)
                }
            }
        }
    }

    /// df/du on the real axis.
    pub fn deriv(&self, u: F) -> F {
        match *self {
            ShapeFunction::Sigmoid { steepness } => {
                let f = self.eval(u);
                // 1 - f computed stably from the opposite tail
                let g = self.eval(-u);
                steepness * f * g
            }
        }
    }

    /// Analytic continuation of f to complex u.
    pub fn eval_c(&self, u: C<F>) -> C<F> {
        match *self {
            ShapeFunction::Sigmoid { steepness } => {
                let x = u * steepness;
                if x.re >= F::zero() {
                    let e = (-x).exp();
                    (C::<F>::one() + e).inv()
                } else {
                    let e = x.exp();
                    e / (C::<F>::one() + e)
                }
            }
        }
    }

    /// df/du at complex u.
    pub fn deriv_c(&self, u: C<F>) -> C<F> {
        match *self {
            ShapeFunction::Sigmoid { steepness } => {
                let f = self.eval_c(u);
                let g = self.eval_c(-u);
                f * g * steepness
            }
        }
    }

    /// Poles in the dimensionless argument `u` with |Im u| <= `im_limit`.
    pub fn poles_u(&self, im_limit: F) -> Vec<C<F>> {
        match *self {
            ShapeFunction::Sigmoid { steepness } => {
                let mut out = Vec::new();
                let mut k = 0i64;
                loop {
                    let im = F::PI() * F::lit((2 * k + 1) as f64) / steepness;
                    if im > im_limit {
                        break;
                    }
                    out.push(C::new(F::zero(), im));
                    out.push(C::new(F::zero(), -im));
                    k += 1;
                }
                out
            }
        }
    }
}

/// Mask F(t) limiting the rms Rabi frequency in time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MaskFunction<F: Real> {
    /// F(t) = 1.
    Constant,
    /// F(t) = exp(-(t / T0)^(2n)); n = 1 is Gaussian.
    Hypergaussian { order: u32, width: F },
}

impl<F: Real> MaskFunction<F> {
    pub fn eval(&self, t: F) -> F {
        match *self {
            MaskFunction::Constant => F::one(),
            MaskFunction::Hypergaussian { order, width } => {
                (-(t / width).powi(2 * order as i32)).exp()
            }
        }
    }

    /// dF/dt.
    pub fn deriv(&self, t: F) -> F {
        match *self {
            MaskFunction::Constant => F::zero(),
            MaskFunction::Hypergaussian { order, width } => {
                let p = 2 * order as i32;
                let x = t / width;
                -F::lit(p as f64) * x.powi(p - 1) / width * self.eval(t)
            }
        }
    }

    pub fn eval_c(&self, t: C<F>) -> C<F> {
        match *self {
            MaskFunction::Constant => C::one(),
            MaskFunction::Hypergaussian { order, width } => {
                (-(t / width).powi(2 * order as i32)).exp()
            }
        }
    }

    pub fn deriv_c(&self, t: C<F>) -> C<F> {
        match *self {
            MaskFunction::Constant => C::new(F::zero(), F::zero()),
            MaskFunction::Hypergaussian { order, width } => {
                let p = 2 * order as i32;
                let x = t / width;
                -x.powi(p - 1) * self.eval_c(t) * (F::lit(p as f64) / width)
            }
        }
    }
}

/// One real-time sample of the envelope pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSample<F: Real> {
    pub t: F,
    pub omega_p: F,
    pub omega_s: F,
}

/// Pulse-area summary over a window.
#[derive(Clone, Copy, Debug)]
pub struct Areas<F: Real> {
    pub a_p: F,
    pub a_s: F,
    /// sqrt(A_p^2 + A_s^2)
    pub a_rms: F,
    /// integral of min(Omega_p, Omega_s)
    pub a_overlap: F,
    /// A_rms / A_overlap
    pub ratio: F,
}

/// A parameterized analytic pulse pair (pump, Stokes), or for the two-state
/// families a (coupling, detuning) pair in the same two slots.
#[derive(Clone, Debug, PartialEq)]
pub enum PulseDescriptor<F: Real> {
    /// Omega_p = Omega0 F(t) sin[(pi/2) f(t/T)], Omega_s = Omega0 F(t) cos[(pi/2) f(t/T)].
    DdpOptimized {
        omega0: F,
        mask: MaskFunction<F>,
        shape: ShapeFunction<F>,
        t_unit: F,
    },
    /// Omega_p = Omega0 e^(-((t - tau/2)/T)^2), Omega_s = Omega0 e^(-((t + tau/2)/T)^2).
    Gaussian { omega0: F, delay: F, width: F },
    /// f-STIRAP variant of `DdpOptimized` with angle factor alpha.
    FractionalDdp {
        omega0: F,
        mask: MaskFunction<F>,
        shape: ShapeFunction<F>,
        alpha: F,
        t_unit: F,
    },
    /// f-STIRAP Gaussian pair ending with amplitude ratio tan(alpha).
    FractionalGaussian {
        omega0: F,
        delay: F,
        width: F,
        alpha: F,
    },
    /// Two-state constant-quasienergy family: coupling eps0 sin[pi f], detuning eps0 cos[pi f].
    TwoStateConstantEps {
        eps0: F,
        shape: ShapeFunction<F>,
        t_unit: F,
    },
    /// Two-state linear sweep: coupling Omega0, detuning alpha t.
    LandauZener { omega0: F, sweep_rate: F },
}

impl<F: Real> PulseDescriptor<F> {
    pub fn validate(&self) -> Result<()> {
        let check_pos = |v: F, name: &str| -> Result<()> {
            if v > F::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Validation(format!("{name} must be positive and finite, got {v}")))
            }
        };
        let check_mask = |m: &MaskFunction<F>| -> Result<()> {
            if let MaskFunction::Hypergaussian { order, width } = m {
                if *order < 1 {
                    return Err(Error::Validation("mask order n must be >= 1".into()));
                }
                check_pos(*width, "mask width T0")?;
            }
            Ok(())
        };
        let check_alpha = |a: F| -> Result<()> {
            if a >= F::zero() && a <= F::FRAC_PI_2() {
                Ok(())
            } else {
                Err(Error::Validation(format!("alpha must lie in [0, pi/2], got {a}")))
            }
        };
        match self {
            PulseDescriptor::DdpOptimized { omega0, mask, t_unit, .. } => {
                check_pos(*omega0, "omega0")?;
                check_pos(*t_unit, "T")?;
                check_mask(mask)
            }
            PulseDescriptor::Gaussian { omega0, width, .. } => {
                check_pos(*omega0, "omega0")?;
                check_pos(*width, "width T")
            }
            PulseDescriptor::FractionalDdp { omega0, mask, alpha, t_unit, .. } => {
                check_pos(*omega0, "omega0")?;
                check_pos(*t_unit, "T")?;
                check_mask(mask)?;
                check_alpha(*alpha)
            }
            PulseDescriptor::FractionalGaussian { omega0, width, alpha, .. } => {
                check_pos(*omega0, "omega0")?;
                check_pos(*width, "width T")?;
                check_alpha(*alpha)
            }
            PulseDescriptor::TwoStateConstantEps { eps0, t_unit, .. } => {
                check_pos(*eps0, "eps0")?;
                check_pos(*t_unit, "T")
            }
            PulseDescriptor::LandauZener { omega0, sweep_rate } => {
                check_pos(*omega0, "omega0")?;
                check_pos(*sweep_rate, "sweep rate alpha")
            }
        }
    }

    /// Peak amplitude scale (Omega0 or eps0).
    pub fn peak(&self) -> F {
        match *self {
            PulseDescriptor::DdpOptimized { omega0, .. }
            | PulseDescriptor::Gaussian { omega0, .. }
            | PulseDescriptor::FractionalDdp { omega0, .. }
            | PulseDescriptor::FractionalGaussian { omega0, .. }
            | PulseDescriptor::LandauZener { omega0, .. } => omega0,
            PulseDescriptor::TwoStateConstantEps { eps0, .. } => eps0,
        }
    }

    /// Characteristic time unit of the family.
    pub fn t_unit(&self) -> F {
        match *self {
            PulseDescriptor::DdpOptimized { t_unit, .. }
            | PulseDescriptor::FractionalDdp { t_unit, .. }
            | PulseDescriptor::TwoStateConstantEps { t_unit, .. } => t_unit,
            PulseDescriptor::Gaussian { width, .. }
            | PulseDescriptor::FractionalGaussian { width, .. } => width,
            PulseDescriptor::LandauZener { .. } => F::one(),
        }
    }

    /// Hilbert-space dimension of the driven system (2 or 3).
    pub fn dim(&self) -> usize {
        match self {
            PulseDescriptor::TwoStateConstantEps { .. } | PulseDescriptor::LandauZener { .. } => 2,
            _ => 3,
        }
    }

    /// Angle reached by the shape argument as f -> 1 (pi/2, alpha, or pi).
    pub fn angle_factor(&self) -> F {
        match *self {
            PulseDescriptor::DdpOptimized { .. } | PulseDescriptor::Gaussian { .. } => {
                F::FRAC_PI_2()
            }
            PulseDescriptor::FractionalDdp { alpha, .. }
            | PulseDescriptor::FractionalGaussian { alpha, .. } => alpha,
            PulseDescriptor::TwoStateConstantEps { .. } => F::PI(),
            PulseDescriptor::LandauZener { .. } => F::FRAC_PI_2(),
        }
    }

    /// Copy of the descriptor with the peak amplitude replaced.
    pub fn with_peak(&self, value: F) -> Self {
        let mut d = self.clone();
        match &mut d {
            PulseDescriptor::DdpOptimized { omega0, .. }
            | PulseDescriptor::Gaussian { omega0, .. }
            | PulseDescriptor::FractionalDdp { omega0, .. }
            | PulseDescriptor::FractionalGaussian { omega0, .. }
            | PulseDescriptor::LandauZener { omega0, .. } => *omega0 = value,
            PulseDescriptor::TwoStateConstantEps { eps0, .. } => *eps0 = value,
        }
        d
    }

    /// Copy of the descriptor with the hypergaussian mask width replaced.
    /// No-op for families without a mask.
    pub fn with_mask_width(&self, value: F) -> Self {
        let mut d = self.clone();
        if let PulseDescriptor::DdpOptimized { mask, .. }
        | PulseDescriptor::FractionalDdp { mask, .. } = &mut d
        {
            if let MaskFunction::Hypergaussian { width, .. } = mask {
                *width = value;
            }
        }
        d
    }

    /// Shape-function poles of the family in complex time (empty for the
    /// entire families).
    pub fn poles(&self) -> Vec<C<F>> {
        match self {
            PulseDescriptor::DdpOptimized { shape, t_unit, .. }
            | PulseDescriptor::FractionalDdp { shape, t_unit, .. }
            | PulseDescriptor::TwoStateConstantEps { shape, t_unit, .. } => shape
                .poles_u(F::lit(100.0))
                .into_iter()
                .map(|p| p * *t_unit)
                .collect(),
            _ => Vec::new(),
        }
    }

    fn check_pole_distance(&self, t: C<F>) -> Result<()> {
        let r = F::lit(POLE_EXCLUSION_FACTOR) * self.t_unit();
        for p in self.poles() {
            if (t - p).norm() < r {
                return Err(Error::PoleProximity {
                    pole: format!("{p}"),
                    radius: r.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }

    /// Analytic continuation of both envelope slots to complex time.
    ///
    /// On the real axis the imaginary parts are exactly zero.
    pub fn evaluate(&self, t: C<F>) -> Result<(C<F>, C<F>)> {
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(Error::Validation("non-finite complex time".into()));
        }
        self.check_pole_distance(t)?;
        Ok(match *self {
            PulseDescriptor::DdpOptimized { omega0, mask, shape, t_unit } => {
                let g = shape.eval_c(t / t_unit) * F::FRAC_PI_2();
                let a = mask.eval_c(t) * omega0;
                (a * g.sin(), a * g.cos())
            }
            PulseDescriptor::Gaussian { omega0, delay, width } => {
                let half = delay * F::half();
                let xp = (t - half) / width;
                let xs = (t + half) / width;
                ((-xp * xp).exp() * omega0, (-xs * xs).exp() * omega0)
            }
            PulseDescriptor::FractionalDdp { omega0, mask, shape, alpha, t_unit } => {
                let g = shape.eval_c(t / t_unit) * alpha;
                let a = mask.eval_c(t) * omega0;
                (a * g.sin(), a * g.cos())
            }
            PulseDescriptor::FractionalGaussian { omega0, delay, width, alpha } => {
                let half = delay * F::half();
                let xp = (t - half) / width;
                let xs = (t + half) / width;
                let gp = (-xp * xp).exp();
                let gs = (-xs * xs).exp();
                (gp * (omega0 * alpha.sin()), (gs + gp * alpha.cos()) * omega0)
            }
            PulseDescriptor::TwoStateConstantEps { eps0, shape, t_unit } => {
                let g = shape.eval_c(t / t_unit) * F::PI();
                (g.sin() * eps0, g.cos() * eps0)
            }
            PulseDescriptor::LandauZener { omega0, sweep_rate } => {
                (C::new(omega0, F::zero()), t * sweep_rate)
            }
        })
    }

    /// Closed-form time derivative of both envelope slots at complex time.
    pub fn evaluate_deriv(&self, t: C<F>) -> Result<(C<F>, C<F>)> {
        self.check_pole_distance(t)?;
        Ok(match *self {
            PulseDescriptor::DdpOptimized { omega0, mask, shape, t_unit } => {
                ddp_family_deriv(omega0, &mask, &shape, F::FRAC_PI_2(), t_unit, t)
            }
            PulseDescriptor::Gaussian { omega0, delay, width } => {
                let half = delay * F::half();
                let w2 = width * width;
                let xp = t - half;
                let xs = t + half;
                let gp = (-xp * xp / w2).exp() * omega0;
                let gs = (-xs * xs / w2).exp() * omega0;
                (-gp * xp * (F::two() / w2), -gs * xs * (F::two() / w2))
            }
            PulseDescriptor::FractionalDdp { omega0, mask, shape, alpha, t_unit } => {
                ddp_family_deriv(omega0, &mask, &shape, alpha, t_unit, t)
            }
            PulseDescriptor::FractionalGaussian { omega0, delay, width, alpha } => {
                let half = delay * F::half();
                let w2 = width * width;
                let xp = t - half;
                let xs = t + half;
                let dgp = -(-xp * xp / w2).exp() * xp * (F::two() / w2);
                let dgs = -(-xs * xs / w2).exp() * xs * (F::two() / w2);
                (
                    dgp * (omega0 * alpha.sin()),
                    (dgs + dgp * alpha.cos()) * omega0,
                )
            }
            PulseDescriptor::TwoStateConstantEps { eps0, shape, t_unit } => {
                let g = shape.eval_c(t / t_unit) * F::PI();
                let dg = shape.deriv_c(t / t_unit) * (F::PI() / t_unit);
                (g.cos() * dg * eps0, -g.sin() * dg * eps0)
            }
            PulseDescriptor::LandauZener { sweep_rate, .. } => (
                C::new(F::zero(), F::zero()),
                C::new(sweep_rate, F::zero()),
            ),
        })
    }

    /// Real-axis sample of the envelope pair.
    pub fn sample(&self, t: F) -> PulseSample<F> {
        let (p, s) = match *self {
            PulseDescriptor::DdpOptimized { omega0, mask, shape, t_unit } => {
                let g = F::FRAC_PI_2() * shape.eval(t / t_unit);
                let a = omega0 * mask.eval(t);
                (a * g.sin(), a * g.cos())
            }
            PulseDescriptor::Gaussian { omega0, delay, width } => {
                let half = delay * F::half();
                let xp = (t - half) / width;
                let xs = (t + half) / width;
                (omega0 * (-xp * xp).exp(), omega0 * (-xs * xs).exp())
            }
            PulseDescriptor::FractionalDdp { omega0, mask, shape, alpha, t_unit } => {
                let g = alpha * shape.eval(t / t_unit);
                let a = omega0 * mask.eval(t);
                (a * g.sin(), a * g.cos())
            }
            PulseDescriptor::FractionalGaussian { omega0, delay, width, alpha } => {
                let half = delay * F::half();
                let xp = (t - half) / width;
                let xs = (t + half) / width;
                let gp = (-xp * xp).exp();
                let gs = (-xs * xs).exp();
                (omega0 * alpha.sin() * gp, omega0 * (gs + alpha.cos() * gp))
            }
            PulseDescriptor::TwoStateConstantEps { eps0, shape, t_unit } => {
                let g = F::PI() * shape.eval(t / t_unit);
                (eps0 * g.sin(), eps0 * g.cos())
            }
            PulseDescriptor::LandauZener { omega0, sweep_rate } => (omega0, sweep_rate * t),
        };
        PulseSample { t, omega_p: p, omega_s: s }
    }

    /// Real-axis closed-form derivatives of the envelope pair.
    pub fn sample_deriv(&self, t: F) -> (F, F) {
        match *self {
            PulseDescriptor::DdpOptimized { omega0, mask, shape, t_unit } => {
                ddp_family_deriv_real(omega0, &mask, &shape, F::FRAC_PI_2(), t_unit, t)
            }
            PulseDescriptor::FractionalDdp { omega0, mask, shape, alpha, t_unit } => {
                ddp_family_deriv_real(omega0, &mask, &shape, alpha, t_unit, t)
            }
            _ => {
                let (dp, ds) = self
                    .evaluate_deriv(C::new(t, F::zero()))
                    .expect("real-axis derivative cannot hit a pole");
                (dp.re, ds.re)
            }
        }
    }

    /// Mixing angle theta(t) = atan2(Omega_p, Omega_s), from a robust
    /// closed form per family.
    pub fn mixing_angle(&self, t: F) -> Result<F> {
        let theta = match *self {
            PulseDescriptor::DdpOptimized { shape, t_unit, .. } => {
                // mask cancels exactly in the ratio
                F::FRAC_PI_2() * shape.eval(t / t_unit)
            }
            PulseDescriptor::FractionalDdp { shape, alpha, t_unit, .. } => {
                alpha * shape.eval(t / t_unit)
            }
            PulseDescriptor::Gaussian { delay, width, .. } => {
                // ratio of the two Gaussians is exp(2 t tau / T^2)
                (F::two() * t * delay / (width * width)).exp().atan()
            }
            PulseDescriptor::FractionalGaussian { delay, width, alpha, .. } => {
                let u = (-F::two() * t * delay / (width * width)).exp();
                alpha.sin().atan2(u + alpha.cos())
            }
            PulseDescriptor::TwoStateConstantEps { shape, t_unit, .. } => {
                F::PI() * shape.eval(t / t_unit)
            }
            PulseDescriptor::LandauZener { omega0, sweep_rate } => {
                omega0.atan2(sweep_rate * t)
            }
        };
        if theta.is_finite() {
            Ok(theta)
        } else {
            Err(Error::DegenerateAngle { t: t.to_f64().unwrap_or(f64::NAN) })
        }
    }

    /// d(theta)/dt from closed-form family derivatives.
    pub fn mixing_angle_rate(&self, t: F) -> Result<F> {
        let rate = match *self {
            PulseDescriptor::DdpOptimized { shape, t_unit, .. } => {
                F::FRAC_PI_2() * shape.deriv(t / t_unit) / t_unit
            }
            PulseDescriptor::FractionalDdp { shape, alpha, t_unit, .. } => {
                alpha * shape.deriv(t / t_unit) / t_unit
            }
            PulseDescriptor::Gaussian { delay, width, .. } => {
                let x = F::two() * t * delay / (width * width);
                let sech = F::two() / (x.exp() + (-x).exp());
                delay / (width * width) * sech
            }
            PulseDescriptor::FractionalGaussian { delay, width, alpha, .. } => {
                let c = F::two() * delay / (width * width);
                let u = (-c * t).exp();
                let (sa, ca) = (alpha.sin(), alpha.cos());
                if u.is_infinite() {
                    F::zero()
                } else {
                    let denom = u + F::two() * ca + ca * ca / u.max(F::min_positive_value());
                    let r = sa / (u + ca);
                    c * sa / denom / (F::one() + r * r)
                }
            }
            PulseDescriptor::TwoStateConstantEps { shape, t_unit, .. } => {
                F::PI() * shape.deriv(t / t_unit) / t_unit
            }
            PulseDescriptor::LandauZener { omega0, sweep_rate } => {
                let eps2 = omega0 * omega0 + sweep_rate * sweep_rate * t * t;
                -omega0 * sweep_rate / eps2
            }
        };
        if rate.is_finite() {
            Ok(rate)
        } else {
            Err(Error::DegenerateAngle { t: t.to_f64().unwrap_or(f64::NAN) })
        }
    }

    /// Pulse areas over `window`; see [`Areas`].
    ///
    /// For families whose envelopes decay (Gaussian pairs, hypergaussian
    /// masks) the rms envelope at the window edges must be below the floor
    /// `AREA_EDGE_FLOOR_REL * peak`. Non-decaying families (constant mask,
    /// Landau-Zener, constant-quasienergy) are integrated window-relative.
    pub fn areas(&self, window: (F, F)) -> Result<Areas<F>> {
        let (t0, t1) = window;
        if !(t0 < t1) {
            return Err(Error::Validation("window start must precede end".into()));
        }
        if self.decays() {
            let floor = F::lit(AREA_EDGE_FLOOR_REL) * self.peak();
            for edge in [t0, t1] {
                let s = self.sample(edge);
                let rms = (s.omega_p * s.omega_p + s.omega_s * s.omega_s).sqrt();
                if rms > floor {
                    return Err(Error::WindowTooNarrow {
                        edge_value: rms.to_f64().unwrap_or(f64::NAN),
                        floor: floor.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        let tol = F::lit(1e-12) * self.peak() * (t1 - t0);
        let a_p = adaptive_simpson(&|t| self.sample(t).omega_p, t0, t1, tol);
        let a_s = adaptive_simpson(&|t| self.sample(t).omega_s, t0, t1, tol);
        let a_overlap = adaptive_simpson(
            &|t| {
                let s = self.sample(t);
                s.omega_p.min(s.omega_s)
            },
            t0,
            t1,
            tol,
        );
        let a_rms = (a_p * a_p + a_s * a_s).sqrt();
        Ok(Areas { a_p, a_s, a_rms, a_overlap, ratio: a_rms / a_overlap })
    }

    /// Local adiabaticity reserve Omega0 |F(t)| - a |df/dt| minimized over
    /// `num_samples` points of `window`; `a` is the family angle factor.
    ///
    /// Returns the minimum and its location. Only defined for the masked
    /// optimized families.
    pub fn adiabaticity_margin(&self, window: (F, F), num_samples: usize) -> Result<(F, F)> {
        let (omega0, mask, shape, factor, t_unit) = match *self {
            PulseDescriptor::DdpOptimized { omega0, mask, shape, t_unit } => {
                (omega0, mask, shape, F::FRAC_PI_2(), t_unit)
            }
            PulseDescriptor::FractionalDdp { omega0, mask, shape, alpha, t_unit } => {
                (omega0, mask, shape, alpha, t_unit)
            }
            _ => {
                return Err(Error::Validation(
                    "adiabaticity margin is defined for the DDP-optimized families only".into(),
                ))
            }
        };
        let (t0, t1) = window;
        let n = num_samples.max(2);
        let mut best = (F::infinity(), t0);
        for i in 0..n {
            let t = t0 + (t1 - t0) * F::lit(i as f64) / F::lit((n - 1) as f64);
            let margin =
                omega0 * mask.eval(t).abs() - factor * (shape.deriv(t / t_unit) / t_unit).abs();
            if margin < best.0 {
                best = (margin, t);
            }
        }
        Ok(best)
    }

    fn decays(&self) -> bool {
        match self {
            PulseDescriptor::Gaussian { .. } | PulseDescriptor::FractionalGaussian { .. } => true,
            PulseDescriptor::DdpOptimized { mask, .. }
            | PulseDescriptor::FractionalDdp { mask, .. } => {
                matches!(mask, MaskFunction::Hypergaussian { .. })
            }
            _ => false,
        }
    }
}

/// Derivative of (Omega0 F sin[a f], Omega0 F cos[a f]) at complex t.
fn ddp_family_deriv<F: Real>(
    omega0: F,
    mask: &MaskFunction<F>,
    shape: &ShapeFunction<F>,
    factor: F,
    t_unit: F,
    t: C<F>,
) -> (C<F>, C<F>) {
    let u = t / t_unit;
    let g = shape.eval_c(u) * factor;
    let dg = shape.deriv_c(u) * (factor / t_unit);
    let m = mask.eval_c(t);
    let dm = mask.deriv_c(t);
    let (sg, cg) = (g.sin(), g.cos());
    (
        (dm * sg + m * cg * dg) * omega0,
        (dm * cg - m * sg * dg) * omega0,
    )
}

fn ddp_family_deriv_real<F: Real>(
    omega0: F,
    mask: &MaskFunction<F>,
    shape: &ShapeFunction<F>,
    factor: F,
    t_unit: F,
    t: F,
) -> (F, F) {
    let u = t / t_unit;
    let g = factor * shape.eval(u);
    let dg = factor * shape.deriv(u) / t_unit;
    let m = mask.eval(t);
    let dm = mask.deriv(t);
    let (sg, cg) = (g.sin(), g.cos());
    (
        omega0 * (dm * sg + m * cg * dg),
        omega0 * (dm * cg - m * sg * dg),
    )
}

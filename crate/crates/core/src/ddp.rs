//! Dykhne-Davis-Pechukas estimates for two-state nonadiabatic transitions:
//! complex quasienergy, transition-point search in the upper half-plane, the
//! D(t0) contour integral, residue factors, and single- and multi-zero
//! probability estimates.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pulses::PulseDescriptor;
use crate::quad::{GAUSS_WEIGHTS, KRONROD_NODES, KRONROD_WEIGHTS};
use crate::real::{Real, C};

/// Contour keeps at least this fraction of the time unit away from any pole.
const CONTOUR_POLE_CLEARANCE: f64 = 0.02;
/// Newton residual acceptance, relative to scale^2.
const NEWTON_RESIDUAL_REL: f64 = 5e-11;
/// Grid used by [`estimate`] for the zero search.
const ESTIMATE_GRID: (usize, usize) = (24, 24);

/// Two-state model for DDP analysis: coupling Omega(t) and detuning Delta(t)
/// continued to complex time, plus the known shape-function poles.
///
/// Three-state descriptors enter through the resonant reduction, which
/// assigns Omega = Omega_p and Delta = Omega_s.
#[derive(Clone, Debug)]
pub struct TwoStateModel<F: Real> {
    pub desc: PulseDescriptor<F>,
    pub poles: Vec<C<F>>,
    /// Natural amplitude scale (peak quasienergy).
    pub scale: F,
    /// Natural time scale.
    pub t_scale: F,
}

impl<F: Real> TwoStateModel<F> {
    fn wrap(desc: &PulseDescriptor<F>) -> Result<Self> {
        desc.validate()?;
        Ok(Self {
            poles: desc.poles(),
            scale: desc.peak(),
            t_scale: desc.t_unit(),
            desc: desc.clone(),
        })
    }

    /// Model from a native two-state descriptor.
    pub fn from_descriptor(desc: &PulseDescriptor<F>) -> Result<Self> {
        if desc.dim() != 2 {
            return Err(Error::Validation(
                "three-state descriptors enter DDP via from_resonant_reduction".into(),
            ));
        }
        Self::wrap(desc)
    }

    /// Model from a three-state descriptor via the resonant reduction.
    pub fn from_resonant_reduction(desc: &PulseDescriptor<F>) -> Result<Self> {
        if desc.dim() != 3 {
            return Err(Error::Validation(
                "two-state descriptors enter DDP via from_descriptor".into(),
            ));
        }
        Self::wrap(desc)
    }

    /// (Omega, Delta) at complex time.
    pub fn fields(&self, t: C<F>) -> Result<(C<F>, C<F>)> {
        self.desc.evaluate(t)
    }

    /// Squared quasienergy Omega^2 + Delta^2 (entire up to shape poles, so
    /// root finding needs no branch tracking).
    pub fn eps_sq(&self, t: C<F>) -> Result<C<F>> {
        let (w, d) = self.desc.evaluate(t)?;
        Ok(w * w + d * d)
    }

    /// d/dt of the squared quasienergy.
    pub fn eps_sq_deriv(&self, t: C<F>) -> Result<C<F>> {
        let (w, d) = self.desc.evaluate(t)?;
        let (dw, dd) = self.desc.evaluate_deriv(t)?;
        Ok((w * dw + d * dd) * F::two())
    }

    /// Principal-branch quasienergy, real and positive on the real axis.
    /// Continuity along a path is the caller's contract; the contour
    /// integrator tracks the sign explicitly.
    pub fn quasienergy(&self, t: C<F>) -> Result<C<F>> {
        Ok(self.eps_sq(t)?.sqrt())
    }

    /// Two-state mixing-angle rate (1/2) (Omegadot Delta - Omega Deltadot) / eps^2.
    pub fn theta_dot(&self, t: C<F>) -> Result<C<F>> {
        let (w, d) = self.desc.evaluate(t)?;
        let (dw, dd) = self.desc.evaluate_deriv(t)?;
        Ok((dw * d - w * dd) * F::half() / (w * w + d * d))
    }

    fn pole_clearance(&self) -> F {
        F::lit(CONTOUR_POLE_CLEARANCE) * self.t_scale
    }
}

/// Rectangular search region in the upper half of the complex time plane.
#[derive(Clone, Copy, Debug)]
pub struct SearchBox<F: Real> {
    pub re: (F, F),
    pub im: (F, F),
}

impl<F: Real> SearchBox<F> {
    pub fn new(re: (F, F), im: (F, F)) -> Result<Self> {
        if !(re.0 < re.1) || !(im.0 < im.1) {
            return Err(Error::Validation("search box edges out of order".into()));
        }
        if im.0 <= F::zero() {
            return Err(Error::Validation(
                "search box must lie strictly in the upper half-plane".into(),
            ));
        }
        Ok(Self { re, im })
    }

    /// Default box: the real window horizontally, and vertically up to the
    /// smaller of 2 time units and 0.8 times the nearest pole height.
    pub fn default_for(model: &TwoStateModel<F>, window: (F, F)) -> Result<Self> {
        let mut top = F::two() * model.t_scale;
        for p in &model.poles {
            if p.im > F::zero() {
                top = top.min(F::lit(0.8) * p.im);
            }
        }
        Self::new(window, (F::lit(1e-3) * model.t_scale, top))
    }

    fn contains(&self, t: C<F>, margin: F) -> bool {
        t.re >= self.re.0 - margin
            && t.re <= self.re.1 + margin
            && t.im >= self.im.0 - margin
            && t.im <= self.im.1 + margin
    }
}

/// A located zero of the squared quasienergy in the upper half-plane.
#[derive(Clone, Debug)]
pub struct TransitionPoint<F: Real> {
    pub t0: C<F>,
    /// D(t0), filled in by [`estimate`].
    pub d_value: Option<C<F>>,
    /// Residue factor Gamma_k, filled in by [`estimate`].
    pub gamma_k: Option<C<F>>,
    /// |eps^2| at the accepted root.
    pub newton_residual: F,
    /// Estimated from the local derivative of eps^2.
    pub multiplicity: usize,
}

/// How the headline probability of a [`DdpEstimate`] was formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMode {
    SingleDominant,
    MultiPoint,
    NoPointsFound,
}

/// DDP transition-probability estimate.
///
/// The estimate is asymptotic; DDP conditions (ii)-(iv) are not checked.
/// `NoPointsFound` reports probability zero relative to the box actually
/// searched, never as a global claim.
#[derive(Clone, Debug)]
pub struct DdpEstimate<F: Real> {
    pub probability: F,
    pub points: Vec<TransitionPoint<F>>,
    pub mode: EstimateMode,
    /// e^(-2 Im D) of the smallest-Im-D point, when any point exists.
    pub dominant_probability: Option<F>,
    /// |sum Gamma_k e^(i D_k)|^2 before clamping, when >= 2 points exist.
    pub coherent_probability: Option<F>,
    /// True when the coherent sum left [0, 1] and was clamped.
    pub clamped: bool,
    pub search_box: SearchBox<F>,
}

/// Find distinct upper-half-plane zeros of eps^2 inside `search_box` by
/// Newton iteration from a uniform seed grid.
pub fn find_transition_points<F: Real>(
    model: &TwoStateModel<F>,
    search_box: &SearchBox<F>,
    grid: (usize, usize),
) -> Result<Vec<TransitionPoint<F>>> {
    let (nx, ny) = grid;
    if nx < 2 || ny < 2 {
        return Err(Error::Validation("zero-search grid must be at least 2x2".into()));
    }
    let clearance = model.pole_clearance();
    for p in &model.poles {
        if search_box.contains(*p, clearance) {
            return Err(Error::BoxContainsPole { pole: format!("{p}") });
        }
    }

    let wx = search_box.re.1 - search_box.re.0;
    let wy = search_box.im.1 - search_box.im.0;
    let seeds: Vec<C<F>> = (0..nx * ny)
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            C::new(
                search_box.re.0 + wx * (F::lit(i as f64) + F::half()) / F::lit(nx as f64),
                search_box.im.0 + wy * (F::lit(j as f64) + F::half()) / F::lit(ny as f64),
            )
        })
        .collect();

    let tol_g = F::lit(NEWTON_RESIDUAL_REL) * model.scale * model.scale;
    let margin = (wx + wy) * F::half();
    let roots: Vec<(C<F>, F)> = seeds
        .par_iter()
        .filter_map(|&seed| {
            let mut t = seed;
            for _ in 0..80 {
                let g = model.eps_sq(t).ok()?;
                if g.norm() <= tol_g {
                    return Some((t, g.norm()));
                }
                let gp = model.eps_sq_deriv(t).ok()?;
                if gp.norm() < F::lit(1e-300) {
                    return None;
                }
                t = t - g / gp;
                if !search_box.contains(t, margin) {
                    return None;
                }
            }
            None
        })
        .collect();

    let dedupe = F::lit(1e-8) * model.t_scale;
    let mut roots: Vec<(C<F>, F)> = roots
        .into_iter()
        .filter(|(t, _)| t.im > F::zero() && search_box.contains(*t, F::zero()))
        .collect();
    roots.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut points: Vec<TransitionPoint<F>> = Vec::new();
    for (t0, residual) in roots {
        if points.iter().any(|p| (p.t0 - t0).norm() < dedupe) {
            continue;
        }
        let slope_scale = model.scale * model.scale / model.t_scale;
        let multiplicity = match model.eps_sq_deriv(t0) {
            Ok(gp) if gp.norm() >= F::lit(1e-6) * slope_scale => 1,
            _ => 2,
        };
        points.push(TransitionPoint {
            t0,
            d_value: None,
            gamma_k: None,
            newton_residual: residual,
            multiplicity,
        });
    }
    Ok(points)
}

/// Contour choice for [`d_integral_via`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContourRoute {
    /// Straight segment from the origin to t0.
    Straight,
    /// Along the real axis to Re t0, then vertically up to t0.
    AxisThenVertical,
    /// Along the real axis past Re t0, up, then horizontally back to t0.
    /// Used when an obstacle sits directly below the target.
    OffsetRight,
    /// Mirror image of `OffsetRight`.
    OffsetLeft,
}

fn route_nodes<F: Real>(model: &TwoStateModel<F>, t0: C<F>, route: ContourRoute) -> Vec<C<F>> {
    let origin = C::new(F::zero(), F::zero());
    let dx = F::lit(0.35) * model.t_scale;
    match route {
        ContourRoute::Straight => vec![origin, t0],
        ContourRoute::AxisThenVertical => vec![origin, C::new(t0.re, F::zero()), t0],
        ContourRoute::OffsetRight => vec![
            origin,
            C::new(t0.re + dx, F::zero()),
            C::new(t0.re + dx, t0.im),
            t0,
        ],
        ContourRoute::OffsetLeft => vec![
            origin,
            C::new(t0.re - dx, F::zero()),
            C::new(t0.re - dx, t0.im),
            t0,
        ],
    }
}

fn contour_clear<F: Real>(
    model: &TwoStateModel<F>,
    nodes: &[C<F>],
    t0: C<F>,
    avoid: &[C<F>],
) -> bool {
    let clearance = model.pole_clearance();
    for pair in nodes.windows(2) {
        for p in &model.poles {
            if segment_distance(pair[0], pair[1], *p) < clearance {
                return false;
            }
        }
        for z in avoid {
            // the target itself is a zero; only foreign zeros block a path
            if (*z - t0).norm() < clearance {
                continue;
            }
            if segment_distance(pair[0], pair[1], *z) < clearance {
                return false;
            }
        }
    }
    true
}

fn integrate_nodes<F: Real>(model: &TwoStateModel<F>, nodes: &[C<F>]) -> Result<C<F>> {
    let origin = nodes[0];
    let t0 = *nodes.last().unwrap();
    let tol_abs = F::lit(1e-12) * model.scale * model.t_scale;
    let tol_rel = F::lit(1e-10);
    let mut total = C::new(F::zero(), F::zero());
    let mut eps_prev = model.quasienergy(origin).map_err(|_| Error::ContourBlocked {
        from: format!("{origin}"),
        to: format!("{t0}"),
    })?;
    for pair in nodes.windows(2) {
        if (pair[1] - pair[0]).norm() < F::lit(1e-300) {
            continue;
        }
        let (part, eps_end) =
            integrate_segment(model, pair[0], pair[1], eps_prev, tol_abs, tol_rel, 48)?;
        total = total + part;
        eps_prev = eps_end;
    }
    Ok(total)
}

/// D(t0) along a chosen contour, with the quasienergy branch tracked
/// continuously from eps > 0 at the real-axis start.
pub fn d_integral_via<F: Real>(
    model: &TwoStateModel<F>,
    t0: C<F>,
    route: ContourRoute,
) -> Result<C<F>> {
    let nodes = route_nodes(model, t0, route);
    if !contour_clear(model, &nodes, t0, &[]) {
        return Err(Error::ContourBlocked {
            from: format!("{}", nodes[0]),
            to: format!("{t0}"),
        });
    }
    integrate_nodes(model, &nodes)
}

/// D(t0) = integral of eps from 0 to t0, rerouting around poles and the
/// listed foreign zeros (branch points the contour must not touch).
pub fn d_integral_avoiding<F: Real>(
    model: &TwoStateModel<F>,
    t0: C<F>,
    avoid: &[C<F>],
) -> Result<C<F>> {
    for route in [
        ContourRoute::Straight,
        ContourRoute::AxisThenVertical,
        ContourRoute::OffsetRight,
        ContourRoute::OffsetLeft,
    ] {
        let nodes = route_nodes(model, t0, route);
        if contour_clear(model, &nodes, t0, avoid) {
            return integrate_nodes(model, &nodes);
        }
    }
    Err(Error::ContourBlocked {
        from: format!("{}", C::<F>::new(F::zero(), F::zero())),
        to: format!("{t0}"),
    })
}

/// D(t0) with automatic rerouting around poles.
pub fn d_integral<F: Real>(model: &TwoStateModel<F>, t0: C<F>) -> Result<C<F>> {
    d_integral_avoiding(model, t0, &[])
}

/// Distance from point `p` to the segment [a, b].
fn segment_distance<F: Real>(a: C<F>, b: C<F>, p: C<F>) -> F {
    let ab = b - a;
    let len_sq = ab.norm_sqr();
    if len_sq < F::lit(1e-300) {
        return (p - a).norm();
    }
    let ap = p - a;
    let s = ((ap.re * ab.re + ap.im * ab.im) / len_sq).max(F::zero()).min(F::one());
    (p - (a + ab * s)).norm()
}

/// Branch-continuous quasienergy at `t`, choosing the sign of the principal
/// square root closest to `prev`. Returns None when the phase jumps by more
/// than pi/2, which forces a subdivision.
fn tracked_eps<F: Real>(model: &TwoStateModel<F>, t: C<F>, prev: C<F>) -> Result<Option<C<F>>> {
    let e = model.quasienergy(t)?;
    let pick = if (e - prev).norm() <= (-e - prev).norm() { e } else { -e };
    let floor = F::lit(1e-12) * model.scale;
    if pick.norm() > floor && prev.norm() > floor {
        let dot = pick.re * prev.re + pick.im * prev.im;
        if dot < F::zero() {
            return Ok(None);
        }
    }
    Ok(Some(pick))
}

/// One adaptive Gauss-Kronrod panel over the segment [a, b]. `eps_a` carries
/// the signed quasienergy at `a`; the signed value at `b` is returned so
/// branch tracking threads through consecutive panels.
#[allow(clippy::too_many_arguments)]
fn integrate_segment<F: Real>(
    model: &TwoStateModel<F>,
    a: C<F>,
    b: C<F>,
    eps_a: C<F>,
    tol_abs: F,
    tol_rel: F,
    depth: u32,
) -> Result<(C<F>, C<F>)> {
    let mid = (a + b) * F::half();
    let half = (b - a) * F::half();

    // ordered 15-node table over [-1, 1]
    let sample = |x: f64, prev: &mut C<F>| -> Result<Option<C<F>>> {
        let t = mid + half * F::lit(x);
        match tracked_eps(model, t, *prev)? {
            Some(e) => {
                *prev = e;
                Ok(Some(e))
            }
            None => Ok(None),
        }
    };

    let mut prev = eps_a;
    let mut kron = C::new(F::zero(), F::zero());
    let mut gauss = C::new(F::zero(), F::zero());
    let mut jumped = false;
    'nodes: {
        for i in (1..8).rev() {
            match sample(-KRONROD_NODES[i], &mut prev)? {
                Some(e) => {
                    kron = kron + e * F::lit(KRONROD_WEIGHTS[i]);
                    if i % 2 == 0 {
                        gauss = gauss + e * F::lit(GAUSS_WEIGHTS[i / 2]);
                    }
                }
                None => {
                    jumped = true;
                    break 'nodes;
                }
            }
        }
        for i in 0..8 {
            match sample(KRONROD_NODES[i], &mut prev)? {
                Some(e) => {
                    kron = kron + e * F::lit(KRONROD_WEIGHTS[i]);
                    if i % 2 == 0 {
                        gauss = gauss + e * F::lit(GAUSS_WEIGHTS[i / 2]);
                    }
                }
                None => {
                    jumped = true;
                    break 'nodes;
                }
            }
        }
    }

    if !jumped {
        let kron = kron * half;
        let gauss = gauss * half;
        let err = (kron - gauss).norm();
        let eps_b = match tracked_eps(model, b, prev)? {
            Some(e) => e,
            None => {
                jumped = true;
                C::new(F::zero(), F::zero())
            }
        };
        if !jumped && (err <= tol_abs + tol_rel * kron.norm() || depth == 0) {
            if depth == 0 {
                log::warn!("contour panel at depth limit; local error {err}");
            }
            return Ok((kron, eps_b));
        }
    }

    if depth == 0 {
        return Err(Error::ContourBlocked { from: format!("{a}"), to: format!("{b}") });
    }
    let half_abs = tol_abs * F::half();
    let (left, eps_mid) =
        integrate_segment(model, a, mid, eps_a, half_abs, tol_rel, depth - 1)?;
    let (right, eps_b) =
        integrate_segment(model, mid, b, eps_mid, half_abs, tol_rel, depth - 1)?;
    Ok((left + right, eps_b))
}

/// Residue factor Gamma_k = 4i lim (t - t0) thetadot(t), via a trapezoid
/// contour integral of thetadot on a circle around t0 at radius `r`.
pub fn residue_factor_with_radius<F: Real>(
    model: &TwoStateModel<F>,
    t0: C<F>,
    r: F,
) -> Result<C<F>> {
    let n = 256;
    let mut acc = C::new(F::zero(), F::zero());
    for j in 0..n {
        let phi = F::two() * F::PI() * F::lit(j as f64) / F::lit(n as f64);
        let dir = C::new(phi.cos(), phi.sin());
        let z = t0 + dir * r;
        let td = model.theta_dot(z)?;
        // dt = i r e^{i phi} dphi
        acc = acc + td * C::new(F::zero(), F::one()) * dir * r;
    }
    let integral = acc * (F::two() * F::PI() / F::lit(n as f64));
    // Gamma = 4i Res = (2/pi) * contour integral
    Ok(integral * (F::two() / F::PI()))
}

/// Residue factor with automatic radius selection and a radius-halving
/// stability check; unstable values indicate a higher-order zero.
pub fn residue_factor<F: Real>(model: &TwoStateModel<F>, point: &TransitionPoint<F>) -> Result<C<F>> {
    if point.multiplicity > 1 {
        return Err(Error::HigherOrderZero {
            t0: format!("{}", point.t0),
            multiplicity: point.multiplicity,
        });
    }
    let t0 = point.t0;
    let mut r = F::lit(0.1) * t0.im.min(model.t_scale);
    for p in &model.poles {
        r = r.min(F::half() * (t0 - *p).norm());
    }
    let g1 = residue_factor_with_radius(model, t0, r)?;
    let g2 = residue_factor_with_radius(model, t0, r * F::half())?;
    if (g1 - g2).norm() > F::lit(1e-4) * (F::one() + g2.norm()) {
        return Err(Error::HigherOrderZero { t0: format!("{t0}"), multiplicity: 2 });
    }
    Ok(g2)
}

/// Full DDP estimate over `search_box`.
///
/// Checks the real-axis nonvanishing condition over the box footprint, then
/// locates zeros, computes D and Gamma per zero, and reports the dominant
/// single-point value together with the coherent multi-point sum.
pub fn estimate<F: Real>(
    model: &TwoStateModel<F>,
    search_box: &SearchBox<F>,
) -> Result<DdpEstimate<F>> {
    let floor = F::lit(1e-8) * model.scale;
    let mut min_eps = F::infinity();
    let n_check = 512;
    for i in 0..=n_check {
        let t = search_box.re.0
            + (search_box.re.1 - search_box.re.0) * F::lit(i as f64) / F::lit(n_check as f64);
        let e = model.quasienergy(C::new(t, F::zero()))?.norm();
        min_eps = min_eps.min(e);
    }
    if min_eps < floor {
        return Err(Error::RealAxisZero { min_eps: min_eps.to_f64().unwrap_or(f64::NAN) });
    }

    let mut points = find_transition_points(model, search_box, ESTIMATE_GRID)?;
    if points.is_empty() {
        return Ok(DdpEstimate {
            probability: F::zero(),
            points,
            mode: EstimateMode::NoPointsFound,
            dominant_probability: None,
            coherent_probability: None,
            clamped: false,
            search_box: *search_box,
        });
    }

    let zeros: Vec<C<F>> = points.iter().map(|p| p.t0).collect();
    let mut gamma_failed = false;
    for p in points.iter_mut() {
        let d = d_integral_avoiding(model, p.t0, &zeros)?;
        p.d_value = Some(d);
        match residue_factor(model, p) {
            Ok(g) => p.gamma_k = Some(g),
            Err(e) => {
                log::warn!("residue factor unavailable at {}: {e}", p.t0);
                gamma_failed = true;
            }
        }
    }

    let im_d_min = points
        .iter()
        .map(|p| p.d_value.unwrap().im)
        .fold(F::infinity(), F::min);
    let dominant = (-F::two() * im_d_min).exp();

    if points.len() == 1 || gamma_failed {
        if gamma_failed && points.len() > 1 {
            log::warn!("falling back to the single-dominant estimate");
        }
        return Ok(DdpEstimate {
            probability: dominant.min(F::one()),
            points,
            mode: EstimateMode::SingleDominant,
            dominant_probability: Some(dominant),
            coherent_probability: None,
            clamped: false,
            search_box: *search_box,
        });
    }

    let mut sum = C::new(F::zero(), F::zero());
    for p in &points {
        let d = p.d_value.unwrap();
        let g = p.gamma_k.unwrap();
        // e^{iD} = e^{i Re D} e^{-Im D}
        let mag = (-d.im).exp();
        sum = sum + g * C::new(d.re.cos(), d.re.sin()) * mag;
    }
    let coherent = sum.norm_sqr();
    let clamped = coherent > F::one();
    if clamped {
        log::warn!("coherent DDP sum {coherent} clamped to 1");
    }
    Ok(DdpEstimate {
        probability: coherent.min(F::one()),
        points,
        mode: EstimateMode::MultiPoint,
        dominant_probability: Some(dominant),
        coherent_probability: Some(coherent),
        clamped,
        search_box: *search_box,
    })
}

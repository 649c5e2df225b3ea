//! Two- and three-state RWA Hamiltonians, their eigensystems, and the dark
//! state.

use crate::error::{Error, Result};
use crate::pulses::PulseDescriptor;
use crate::real::{Real, C};

/// Detunings, optional intermediate-state loss, and the time window defining
/// a simulation instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams<F: Real> {
    /// Single-photon detuning Delta (on the intermediate state).
    pub delta: F,
    /// Two-photon (Raman) detuning delta (on the target state).
    pub delta2: F,
    /// Intermediate-state loss rate Gamma >= 0; enters as -i Gamma / 2.
    pub gamma: F,
    /// Integration window (start, end).
    pub window: (F, F),
    /// Characteristic time unit.
    pub t_unit: F,
}

impl<F: Real> SystemParams<F> {
    pub fn resonant(window: (F, F)) -> Self {
        SystemParams {
            delta: F::zero(),
            delta2: F::zero(),
            gamma: F::zero(),
            window,
            t_unit: F::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma < F::zero() {
            return Err(Error::Validation("gamma must be >= 0".into()));
        }
        if !(self.window.0 < self.window.1) {
            return Err(Error::Validation("window start must precede end".into()));
        }
        Ok(())
    }
}

/// Dense complex matrix of dimension 2 or 3 at a fixed time.
#[derive(Clone, Copy, Debug)]
pub struct HamiltonianMatrix<F: Real> {
    pub dim: usize,
    pub entries: [[C<F>; 3]; 3],
    pub t: F,
}

impl<F: Real> HamiltonianMatrix<F> {
    fn zero(dim: usize, t: F) -> Self {
        HamiltonianMatrix { dim, entries: [[C::new(F::zero(), F::zero()); 3]; 3], t }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> F {
        let mut s = F::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.entries[i][j].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Max |H - H^dagger| entry.
    pub fn asymmetry(&self) -> F {
        let mut worst = F::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = (self.entries[i][j] - self.entries[j][i].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// y = H x for state vectors stored as fixed-size arrays.
    pub fn apply(&self, x: &[C<F>; 3]) -> [C<F>; 3] {
        let mut y = [C::new(F::zero(), F::zero()); 3];
        for i in 0..self.dim {
            let mut acc = C::new(F::zero(), F::zero());
            for j in 0..self.dim {
                acc += self.entries[i][j] * x[j];
            }
            y[i] = acc;
        }
        y
    }
}

/// Zero-eigenvalue eigenstate of the three-state Hamiltonian.
#[derive(Clone, Copy, Debug)]
pub struct DarkState<F: Real> {
    /// (cos theta, 0, -sin theta)
    pub amplitudes: [F; 3],
    pub theta: F,
}

/// H = (1/2) [[0, Wp, 0], [Wp, 2 Delta - i Gamma, Ws], [0, Ws, 2 delta]].
pub fn build_three_state<F: Real>(
    desc: &PulseDescriptor<F>,
    params: &SystemParams<F>,
    t: F,
) -> HamiltonianMatrix<F> {
    let s = desc.sample(t);
    let mut h = HamiltonianMatrix::zero(3, t);
    let half = F::half();
    h.entries[0][1] = C::new(half * s.omega_p, F::zero());
    h.entries[1][0] = h.entries[0][1];
    h.entries[1][2] = C::new(half * s.omega_s, F::zero());
    h.entries[2][1] = h.entries[1][2];
    h.entries[1][1] = C::new(params.delta, -half * params.gamma);
    h.entries[2][2] = C::new(params.delta2, F::zero());
    h
}

/// H = (1/2) [[0, Omega], [Omega, 2 Delta]].
pub fn build_two_state<F: Real>(omega: F, delta: F) -> HamiltonianMatrix<F> {
    let mut h = HamiltonianMatrix::zero(2, F::zero());
    h.entries[0][1] = C::new(F::half() * omega, F::zero());
    h.entries[1][0] = h.entries[0][1];
    h.entries[1][1] = C::new(delta, F::zero());
    h
}

/// Dark state (cos theta, 0, -sin theta) of the descriptor at time t.
pub fn dark_state<F: Real>(desc: &PulseDescriptor<F>, t: F) -> Result<DarkState<F>> {
    let theta = desc.mixing_angle(t)?;
    Ok(DarkState { amplitudes: [theta.cos(), F::zero(), -theta.sin()], theta })
}

/// Eigen-decomposition of a Hermitian (here: real-symmetric) matrix.
#[derive(Clone, Debug)]
pub struct Eigensystem<F: Real> {
    /// Ascending eigenvalues.
    pub values: Vec<F>,
    /// `vectors[k]` is the orthonormal eigenvector of `values[k]`.
    pub vectors: Vec<[F; 3]>,
    pub dim: usize,
}

/// Jacobi diagonalization of the Hermitian Hamiltonian (gamma = 0 path).
pub fn eigensystem<F: Real>(h: &HamiltonianMatrix<F>) -> Result<Eigensystem<F>> {
    let scale = h.norm();
    let tol = F::lit(1e-12) * scale.max(F::min_positive_value());
    if h.asymmetry() > tol {
        return Err(Error::NonHermitianInput {
            asymmetry: h.asymmetry().to_f64().unwrap_or(f64::NAN),
        });
    }
    for i in 0..h.dim {
        for j in 0..h.dim {
            if h.entries[i][j].im.abs() > tol {
                return Err(Error::NonHermitianInput {
                    asymmetry: h.entries[i][j].im.abs().to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    let n = h.dim;
    let mut a = [[F::zero(); 3]; 3];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = h.entries[i][j].re;
        }
    }
    let mut v = [[F::zero(); 3]; 3];
    for (i, row) in v.iter_mut().enumerate().take(n) {
        row[i] = F::one();
    }
    // cyclic Jacobi sweeps
    for _ in 0..100 {
        let mut off = F::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= F::epsilon() * scale.max(F::one()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= F::epsilon() * scale * F::lit(1e-3) {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (F::two() * a[p][q]);
                let t = {
                    let s = if theta >= F::zero() { F::one() } else { -F::one() };
                    s / (theta.abs() + (theta * theta + F::one()).sqrt())
                };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut pairs: Vec<(F, [F; 3])> = (0..n)
        .map(|k| {
            let mut vec = [F::zero(); 3];
            for i in 0..n {
                vec[i] = v[i][k];
            }
            (a[k][k], vec)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    Ok(Eigensystem {
        values: pairs.iter().map(|p| p.0).collect(),
        vectors: pairs.iter().map(|p| p.1).collect(),
        dim: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{MaskFunction, ShapeFunction};
    use approx::assert_relative_eq;

    fn desc() -> PulseDescriptor<f64> {
        PulseDescriptor::DdpOptimized {
            omega0: 20.0,
            mask: MaskFunction::Hypergaussian { order: 3, width: 2.0 },
            shape: ShapeFunction::sigmoid(4.0),
            t_unit: 1.0,
        }
    }

    fn params() -> SystemParams<f64> {
        SystemParams::resonant((-10.0, 10.0))
    }

    #[test]
    fn three_state_entries() {
        let d3 = desc();
        let p = SystemParams { delta: 3.0, ..params() };
        let h = build_three_state(&d3, &p, 0.0);
        let s = d3.sample(0.0);
        assert_relative_eq!(h.entries[0][1].re, 0.5 * s.omega_p);
        assert_relative_eq!(h.entries[1][2].re, 0.5 * s.omega_s);
        assert_relative_eq!(h.entries[1][1].re, 3.0);
        assert_eq!(h.entries[0][2], C::new(0.0, 0.0));
        assert_eq!(h.entries[2][0], C::new(0.0, 0.0));
    }

    #[test]
    fn zero_pulses_zero_matrix() {
        let d = PulseDescriptor::Gaussian { omega0: 1.0, delay: 1.2, width: 1.0 };
        let h = build_three_state(&d, &params(), 1e4);
        assert!(h.norm() < 1e-300);
    }

    #[test]
    fn gamma_enters_as_imaginary_loss() {
        let p = SystemParams { gamma: 0.5, ..params() };
        let h = build_three_state(&desc(), &p, 0.0);
        assert_relative_eq!(h.entries[1][1].im, -0.25);
        for (i, j) in [(0, 1), (1, 0), (1, 2), (2, 1), (2, 2)] {
            assert_eq!(h.entries[i][j].im, 0.0);
        }
    }

    #[test]
    fn two_state_eigensplitting() {
        let h = build_two_state(3.0, 4.0);
        let e = eigensystem(&h).unwrap();
        assert_relative_eq!(e.values[1] - e.values[0], 5.0, epsilon = 1e-13);
        assert_relative_eq!(e.values[0], -0.5, epsilon = 1e-13);
        assert_relative_eq!(e.values[1], 4.5, epsilon = 1e-13);
    }

    #[test]
    fn zero_matrix_eigensystem() {
        let h = build_two_state(0.0, 0.0);
        let e = eigensystem(&h).unwrap();
        assert_eq!(e.values, vec![0.0, 0.0]);
    }

    #[test]
    fn three_state_resonant_eigenvalues() {
        // Delta = 0: eigenvalues are {-rms/2, 0, +rms/2}
        let d = desc();
        let h = build_three_state(&d, &params(), 0.3);
        let s = d.sample(0.3);
        let rms = (s.omega_p.powi(2) + s.omega_s.powi(2)).sqrt();
        let e = eigensystem(&h).unwrap();
        assert_relative_eq!(e.values[0], -0.5 * rms, epsilon = 1e-12);
        assert!(e.values[1].abs() < 1e-12 * rms);
        assert_relative_eq!(e.values[2], 0.5 * rms, epsilon = 1e-12);
    }

    #[test]
    fn eigen_residuals_small() {
        let d = desc();
        for t in [-1.0, 0.0, 0.7, 2.0] {
            let p = SystemParams { delta: 1.5, ..params() };
            let h = build_three_state(&d, &p, t);
            let e = eigensystem(&h).unwrap();
            for k in 0..3 {
                let v = [
                    C::new(e.vectors[k][0], 0.0),
                    C::new(e.vectors[k][1], 0.0),
                    C::new(e.vectors[k][2], 0.0),
                ];
                let hv = h.apply(&v);
                let mut r = 0.0f64;
                for i in 0..3 {
                    r += (hv[i] - v[i] * e.values[k]).norm_sqr();
                }
                assert!(r.sqrt() <= 1e-12 * h.norm(), "residual {}", r.sqrt());
            }
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let p = SystemParams { gamma: 0.5, ..params() };
        let h = build_three_state(&desc(), &p, 0.0);
        assert!(matches!(eigensystem(&h), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn dark_state_limits_and_invariance() {
        let d = desc();
        let early = dark_state(&d, -30.0).unwrap();
        assert!((early.amplitudes[0] - 1.0).abs() < 1e-10);
        let late = dark_state(&d, 30.0).unwrap();
        assert!((late.amplitudes[2] + 1.0).abs() < 1e-10);
        let mid = dark_state(&d, 0.0).unwrap();
        assert_relative_eq!(mid.amplitudes[0], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(mid.amplitudes[2], -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_eq!(mid.amplitudes[1], 0.0);
    }

    #[test]
    fn dark_state_annihilated_by_hamiltonian() {
        // 1000 random (t, Delta); H phi_d = 0 because component 2 vanishes
        // and the (1, 3) rows mix Wp cos - Ws sin = 0.
        let d = desc();
        let mut x = 0x2545f4914f6cdd1du64;
        let mut rnd = || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let t = -4.0 + 8.0 * rnd();
            let delta = -5.0 + 10.0 * rnd();
            let p = SystemParams { delta, ..params() };
            let h = build_three_state(&d, &p, t);
            let ds = dark_state(&d, t).unwrap();
            let v = [
                C::new(ds.amplitudes[0], 0.0),
                C::new(ds.amplitudes[1], 0.0),
                C::new(ds.amplitudes[2], 0.0),
            ];
            let hv = h.apply(&v);
            let r = (hv[0].norm_sqr() + hv[1].norm_sqr() + hv[2].norm_sqr()).sqrt();
            assert!(r <= 1e-13 * h.norm().max(1e-30), "residual {r}");
        }
    }
}

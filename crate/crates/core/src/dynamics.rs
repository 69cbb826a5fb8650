//! Born–Markov master equation, spin-1/2 Bloch equations and their RK4
//! integration.
//!
//! The master equation is of Redfield type and does not enforce positivity;
//! the smallest eigenvalue of `ρ` is recorded at every sample and a warning is
//! attached to the trajectory when it drops below [`POSITIVITY_WARNING`].

use nalgebra::DVector;

use crate::bath::RateSet;
use crate::spin::{commutator, y_rotation, SpinOperators, SpinSize, SystemParams};
use crate::{CMatrix, Error, Result, C64};

pub const POSITIVITY_WARNING: f64 = -1e-6;

/// Largest accepted `dt · Δ`.
pub const MAX_STEP_PHASE: f64 = 0.05;

/// Samples kept per trajectory when `sample_every` is not given.
pub const DEFAULT_MAX_SAMPLES: usize = 5000;

const I: C64 = C64::new(0.0, 1.0);

fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn min_eigenvalue(m: &CMatrix) -> f64 {
    let herm = (m + m.adjoint()) * C64::from(0.5);
    herm.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `Re tr(ρ A)`.
pub fn expectation(rho: &CMatrix, op: &CMatrix) -> f64 {
    rho.iter()
        .zip(op.transpose().iter())
        .map(|(r, o)| r * o)
        .sum::<C64>()
        .re
}

/// Spin density matrix: Hermitian, unit trace, positive semidefinite when
/// constructed through [`DensityMatrix::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: CMatrix,
}

impl DensityMatrix {
    pub fn new(data: CMatrix) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::invalid("density matrix", "must be square"));
        }
        let herm = hermiticity_defect(&data);
        if herm > 1e-10 {
            return Err(Error::invalid("density matrix", format!("not Hermitian (defect {herm:e})")));
        }
        let trace = data.trace();
        if (trace - C64::from(1.0)).norm() > 1e-10 {
            return Err(Error::invalid("density matrix", format!("trace is {trace}")));
        }
        let min = min_eigenvalue(&data);
        if min < -1e-12 {
            return Err(Error::invalid("density matrix", format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { data })
    }

    /// Projector onto a normalised state vector.
    pub fn pure(state: &DVector<C64>) -> Result<Self> {
        let norm = state.norm();
        if !(norm > 0.0) {
            return Err(Error::invalid("state", "zero vector"));
        }
        let psi = state / C64::from(norm);
        DensityMatrix::new(&psi * psi.adjoint())
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_inner(self) -> CMatrix {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn expectation(&self, op: &CMatrix) -> f64 {
        expectation(&self.data, op)
    }

    pub fn purity(&self) -> f64 {
        expectation(&self.data, &self.data)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.data)
    }
}

/// `|J, M = J⟩⟨J, M = J|`.
pub fn initial_state_spin_up(spin: SpinSize) -> DensityMatrix {
    let n = spin.dim();
    let mut data = CMatrix::zeros(n, n);
    data[(0, 0)] = C64::from(1.0);
    DensityMatrix { data }
}

/// Eigenstate of `J_x` with eigenvalue `J`: `|J, J⟩` taken back through the
/// Dicke-frame rotation, `U† |J,J⟩` with `U = exp(i π/2 J_y)`.
pub fn initial_state_x_up(spin: SpinSize, ops: &SpinOperators) -> Result<DensityMatrix> {
    ops.check_dim(spin.dim())?;
    let u = y_rotation(ops, std::f64::consts::FRAC_PI_2);
    let psi = u.adjoint().column(0).into_owned();
    DensityMatrix::pure(&psi)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl BlochVector {
    pub fn new(jx: f64, jy: f64, jz: f64) -> Self {
        BlochVector { jx, jy, jz }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.jx * self.jx + self.jy * self.jy + self.jz * self.jz
    }

    /// Inside the spin-1/2 Bloch ball, `|v|² ≤ 1/4`.
    pub fn in_bloch_ball(&self) -> bool {
        self.norm_sqr() <= 0.25 + 1e-10
    }

    pub fn from_density(rho: &DensityMatrix, ops: &SpinOperators) -> Result<Self> {
        ops.check_dim(rho.dim())?;
        Ok(BlochVector {
            jx: rho.expectation(&ops.jx),
            jy: rho.expectation(&ops.jy),
            jz: rho.expectation(&ops.jz),
        })
    }
}

/// Expectation values and state-health diagnostics at one time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub trace_err: f64,
    pub herm_err: f64,
    pub min_eig: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub spin: SpinSize,
    pub times: Vec<f64>,
    pub jx: Vec<f64>,
    pub jy: Vec<f64>,
    pub jz: Vec<f64>,
    pub trace_err: Vec<f64>,
    pub herm_err: Vec<f64>,
    pub min_eig: Vec<f64>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn new(spin: SpinSize) -> Self {
        Trajectory {
            spin,
            times: Vec::new(),
            jx: Vec::new(),
            jy: Vec::new(),
            jz: Vec::new(),
            trace_err: Vec::new(),
            herm_err: Vec::new(),
            min_eig: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, s: Sample) {
        self.times.push(t);
        self.jx.push(s.jx);
        self.jy.push(s.jy);
        self.jz.push(s.jz);
        self.trace_err.push(s.trace_err);
        self.herm_err.push(s.herm_err);
        self.min_eig.push(s.min_eig);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `⟨J_z⟩ / J`.
    pub fn normalized_jz(&self) -> Vec<f64> {
        let j = self.spin.j();
        self.jz.iter().map(|z| z / j).collect()
    }

    pub fn max_trace_error(&self) -> f64 {
        self.trace_err.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.herm_err.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eig.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Fixed RK4 step grid: `steps` steps of `dt`, every `sample_every`-th state
/// recorded (the initial state always is).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
    pub sample_every: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, dt: f64, sample_every: Option<usize>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt", format!("must be > 0, got {dt}")));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::invalid("t_end", format!("must be > 0, got {t_end}")));
        }
        let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
        let sample_every = match sample_every {
            Some(0) => return Err(Error::invalid("sample_every", "must be ≥ 1")),
            Some(k) => k,
            None => steps.div_ceil(DEFAULT_MAX_SAMPLES - 1).max(1),
        };
        Ok(TimeGrid { dt, steps, sample_every })
    }

    pub fn t_end(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    /// The step must resolve the level spacing: `dt · Δ ≤ MAX_STEP_PHASE`.
    pub fn check_resolution(&self, delta: f64) -> Result<()> {
        if self.dt * delta > MAX_STEP_PHASE {
            return Err(Error::invalid(
                "dt",
                format!(
                    "{} does not resolve the level spacing {delta} (need dt ≤ {})",
                    self.dt,
                    MAX_STEP_PHASE / delta
                ),
            ));
        }
        Ok(())
    }
}

/// Vector-space operations the integrator needs.
pub trait OdeState: Clone {
    /// `self + h · k`
    fn add_scaled(&self, h: f64, k: &Self) -> Self;
    fn is_finite(&self) -> bool;
}

impl OdeState for CMatrix {
    fn add_scaled(&self, h: f64, k: &Self) -> Self {
        let h = C64::from(h);
        self.zip_map(k, |a, b| a + h * b)
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl OdeState for BlochVector {
    fn add_scaled(&self, h: f64, k: &Self) -> Self {
        BlochVector::new(self.jx + h * k.jx, self.jy + h * k.jy, self.jz + h * k.jz)
    }

    fn is_finite(&self) -> bool {
        self.jx.is_finite() && self.jy.is_finite() && self.jz.is_finite()
    }
}

/// One classic fourth-order Runge–Kutta step.
pub fn rk4_step<S: OdeState, F: Fn(&S) -> S>(rhs: &F, y: &S, dt: f64) -> S {
    let k1 = rhs(y);
    let k2 = rhs(&y.add_scaled(0.5 * dt, &k1));
    let k3 = rhs(&y.add_scaled(0.5 * dt, &k2));
    let k4 = rhs(&y.add_scaled(dt, &k3));
    y.add_scaled(dt / 6.0, &k1)
        .add_scaled(dt / 3.0, &k2)
        .add_scaled(dt / 3.0, &k3)
        .add_scaled(dt / 6.0, &k4)
}

/// Fixed-step RK4 integration of `dy/dt = rhs(y)` from `t = 0`, recording
/// `observe(y)` on the sampling grid. Aborts on the first non-finite state.
pub fn integrate<S, F, O>(spin: SpinSize, rhs: F, initial: S, grid: &TimeGrid, observe: O) -> Result<Trajectory>
where
    S: OdeState,
    F: Fn(&S) -> S,
    O: Fn(&S) -> Sample,
{
    let mut traj = Trajectory::new(spin);
    let mut y = initial;
    traj.push(0.0, observe(&y));
    for step in 1..=grid.steps {
        y = rk4_step(&rhs, &y, grid.dt);
        let t = step as f64 * grid.dt;
        if !y.is_finite() {
            return Err(Error::NonFinite { time: t });
        }
        if step % grid.sample_every == 0 {
            traj.push(t, observe(&y));
        }
    }
    Ok(traj)
}

fn check_rates(params: &SystemParams, rates: &RateSet) -> Result<()> {
    let system = params.delta();
    if (rates.delta - system).abs() > 1e-12 * system {
        return Err(Error::DeltaMismatch { rates: rates.delta, system });
    }
    Ok(())
}

/// Coefficients of the dissipator `-[J_z, Λρ] + [J_z, ρΛ†]` with
/// `Λ = A J_z + B J_x - C J_y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipatorCoefficients {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl DissipatorCoefficients {
    pub fn new(params: &SystemParams, rates: &RateSet) -> Self {
        let (eps, tc, delta) = (params.epsilon, params.tc, params.delta());
        let d2 = delta * delta;
        DissipatorCoefficients {
            a: (rates.gamma * (eps * eps) + rates.gamma_c * (4.0 * tc * tc)) / d2,
            b: (rates.gamma - rates.gamma_c) * (2.0 * tc * eps / d2),
            c: rates.gamma_s * (2.0 * tc / delta),
        }
    }
}

/// Right-hand side of the master equation, built term by term from dense
/// commutators:
///
/// ```text
/// dρ/dt = i[ρ, εJ_z + 2T_c J_x]
///         - A [J_z, J_z ρ] - B [J_z, J_x ρ] + C [J_z, J_y ρ]
///         + A*[J_z, ρ J_z] + B*[J_z, ρ J_x] - C*[J_z, ρ J_y]
/// ```
///
/// with `A = (ε²Γ + 4T_c²Γ_c)/Δ²`, `B = 2T_cε(Γ - Γ_c)/Δ²`, `C = 2T_cΓ_s/Δ`.
/// [`MasterEquation`] evaluates the same expression in `O(N²)`.
pub fn master_rhs(
    rho: &DensityMatrix,
    params: &SystemParams,
    ops: &SpinOperators,
    rates: &RateSet,
) -> Result<CMatrix> {
    ops.check_dim(params.spin.dim())?;
    ops.check_dim(rho.dim())?;
    check_rates(params, rates)?;
    let rho = rho.data();
    let k = DissipatorCoefficients::new(params, rates);
    let h = &ops.jz * C64::from(params.epsilon) + &ops.jx * C64::from(2.0 * params.tc);
    let jz = &ops.jz;
    let mut out = commutator(rho, &h) * I;
    out -= commutator(jz, &(jz * rho)) * k.a;
    out -= commutator(jz, &(&ops.jx * rho)) * k.b;
    out += commutator(jz, &(&ops.jy * rho)) * k.c;
    out += commutator(jz, &(rho * jz)) * k.a.conj();
    out += commutator(jz, &(rho * &ops.jx)) * k.b.conj();
    out -= commutator(jz, &(rho * &ops.jy)) * k.c.conj();
    Ok(out)
}

/// Tridiagonal matrix: `sub[i] = M[i+1, i]`, `sup[i] = M[i, i+1]`.
#[derive(Debug, Clone, PartialEq)]
struct Tridiagonal {
    diag: Vec<C64>,
    sub: Vec<C64>,
    sup: Vec<C64>,
}

impl Tridiagonal {
    fn from_dense(m: &CMatrix) -> Self {
        let n = m.nrows();
        debug_assert!((0..n).all(|i| (0..n).all(|j| i.abs_diff(j) <= 1 || m[(i, j)] == C64::default())));
        Tridiagonal {
            diag: (0..n).map(|i| m[(i, i)]).collect(),
            sub: (0..n.saturating_sub(1)).map(|i| m[(i + 1, i)]).collect(),
            sup: (0..n.saturating_sub(1)).map(|i| m[(i, i + 1)]).collect(),
        }
    }

    /// `(T X)[i, j]` for a column-major `x` of order `n`.
    #[inline]
    fn left(&self, x: &[C64], n: usize, i: usize, j: usize) -> C64 {
        let col = j * n;
        let mut v = self.diag[i] * x[col + i];
        if i > 0 {
            v += self.sub[i - 1] * x[col + i - 1];
        }
        if i + 1 < n {
            v += self.sup[i] * x[col + i + 1];
        }
        v
    }

    /// `(X T)[i, j]`
    #[inline]
    fn right(&self, x: &[C64], n: usize, i: usize, j: usize) -> C64 {
        let mut v = x[j * n + i] * self.diag[j];
        if j > 0 {
            v += x[(j - 1) * n + i] * self.sup[j - 1];
        }
        if j + 1 < n {
            v += x[(j + 1) * n + i] * self.sub[j];
        }
        v
    }
}

/// Master equation with time-independent coefficients, prepared once per run.
///
/// `H`, `Λ` and `Λ†` are tridiagonal and `J_z` is diagonal in the `J_z`
/// basis, so
/// `dρ/dt = -i(Hρ - ρH) - (m_i - m_j)(Λρ - ρΛ†)_{ij}` costs `O(N²)`.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    ops: SpinOperators,
    params: SystemParams,
    m: Vec<f64>,
    h: Tridiagonal,
    lambda: Tridiagonal,
    lambda_adj: Tridiagonal,
}

impl MasterEquation {
    pub fn new(params: &SystemParams, ops: &SpinOperators, rates: &RateSet) -> Result<Self> {
        ops.check_dim(params.spin.dim())?;
        check_rates(params, rates)?;
        let k = DissipatorCoefficients::new(params, rates);
        let h = &ops.jz * C64::from(params.epsilon) + &ops.jx * C64::from(2.0 * params.tc);
        let lambda = &ops.jz * k.a + &ops.jx * k.b - &ops.jy * k.c;
        Ok(MasterEquation {
            ops: ops.clone(),
            params: *params,
            m: params.spin.m_values().collect(),
            h: Tridiagonal::from_dense(&h),
            lambda_adj: Tridiagonal::from_dense(&lambda.adjoint()),
            lambda: Tridiagonal::from_dense(&lambda),
        })
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let n = self.dim();
        let x = rho.as_slice();
        let mut out = CMatrix::zeros(n, n);
        for (idx, o) in out.as_mut_slice().iter_mut().enumerate() {
            let (i, j) = (idx % n, idx / n);
            let coherent = self.h.left(x, n, i, j) - self.h.right(x, n, i, j);
            let dissipative = self.lambda.left(x, n, i, j) - self.lambda_adj.right(x, n, i, j);
            *o = -I * coherent - dissipative * (self.m[i] - self.m[j]);
        }
        out
    }

    pub fn sample(&self, rho: &CMatrix) -> Sample {
        Sample {
            jx: expectation(rho, &self.ops.jx),
            jy: expectation(rho, &self.ops.jy),
            jz: expectation(rho, &self.ops.jz),
            trace_err: (rho.trace() - C64::from(1.0)).norm(),
            herm_err: hermiticity_defect(rho),
            min_eig: min_eigenvalue(rho),
        }
    }

    /// Integrates from `initial` and flags positivity loss.
    pub fn run(&self, initial: &DensityMatrix, grid: &TimeGrid) -> Result<Trajectory> {
        self.ops.check_dim(initial.dim())?;
        grid.check_resolution(self.params.delta())?;
        let mut traj = integrate(
            self.params.spin,
            |rho: &CMatrix| self.rhs(rho),
            initial.data().clone(),
            grid,
            |rho: &CMatrix| self.sample(rho),
        )?;
        if let Some(k) = traj.min_eig.iter().position(|&e| e < POSITIVITY_WARNING) {
            let worst = traj.min_eigenvalue();
            traj.warnings.push(format!(
                "density matrix lost positivity at t = {} (most negative eigenvalue {worst:e})",
                traj.times[k]
            ));
        }
        Ok(traj)
    }
}

/// Linear spin-1/2 Bloch equations `dv/dt = M v + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochEquations {
    pub drift: [[f64; 3]; 3],
    pub constant: [f64; 3],
    params: SystemParams,
}

impl BlochEquations {
    pub fn new(params: &SystemParams, rates: &RateSet) -> Result<Self> {
        if params.spin != SpinSize::HALF {
            return Err(Error::RequiresSpinHalf { two_j: params.spin.two_j() });
        }
        check_rates(params, rates)?;
        let (eps, tc, delta) = (params.epsilon, params.tc, params.delta());
        let d2 = delta * delta;
        let (g, gc, gs) = (rates.gamma, rates.gamma_c, rates.gamma_s);
        let damping = (eps * eps * g.re + 4.0 * tc * tc * gc.re) / d2;
        let mix = 2.0 * tc * eps * (g.re - gc.re) / d2;
        let shift = 2.0 * tc + 2.0 * tc * gs.re / delta;
        Ok(BlochEquations {
            drift: [
                [-damping, -eps, mix],
                [eps, -damping, -shift],
                [0.0, 2.0 * tc, 0.0],
            ],
            constant: [tc * gs.im / delta, tc * eps * (g.im - gc.im) / d2, 0.0],
            params: *params,
        })
    }

    pub fn rhs(&self, v: &BlochVector) -> BlochVector {
        let x = [v.jx, v.jy, v.jz];
        let row = |r: usize| {
            self.drift[r].iter().zip(&x).map(|(m, x)| m * x).sum::<f64>() + self.constant[r]
        };
        BlochVector::new(row(0), row(1), row(2))
    }

    pub fn run(&self, initial: BlochVector, grid: &TimeGrid) -> Result<Trajectory> {
        grid.check_resolution(self.params.delta())?;
        integrate(SpinSize::HALF, |v: &BlochVector| self.rhs(v), initial, grid, |v| Sample {
            jx: v.jx,
            jy: v.jy,
            jz: v.jz,
            trace_err: 0.0,
            herm_err: 0.0,
            min_eig: 0.5 - v.norm_sqr().sqrt(),
        })
    }
}

pub fn bloch_rhs(v: &BlochVector, params: &SystemParams, rates: &RateSet) -> Result<BlochVector> {
    Ok(BlochEquations::new(params, rates)?.rhs(v))
}

//! Operator algebra and state construction for the 3-level-atom ⊗ field system.
//!
//! The joint Hilbert space is atom-major: basis state |i, n⟩ (atomic level i,
//! Fock state n) sits at joint index `(i-1)·N + n`, where N is the Fock
//! truncation. All level indices are 1-based in the public API, matching the
//! usual |1⟩, |2⟩, |3⟩ labelling; storage is 0-based.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Number of atomic levels. Fixed by the model.
pub const ATOM_DIM: usize = 3;

/// Entrywise Hermiticity tolerance for density matrices.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in [-EIG_CLAMP, 0] are treated as roundoff and clamped to 0.
pub const EIG_CLAMP: f64 = 1e-10;
/// Eigenvalues below -EIG_FAIL mean the matrix is not a state (or the
/// integration producing it failed).
pub const EIG_FAIL: f64 = 1e-8;
/// Default ceiling on the probability mass discarded by Fock truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-6;

/// Layout of the joint atom ⊗ field space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertLayout {
    field_dim: usize,
}

impl HilbertLayout {
    /// A layout with Fock states |0⟩ … |N-1⟩. Requires `field_dim >= 2`.
    pub fn new(field_dim: usize) -> Result<Self> {
        if field_dim < 2 {
            return Err(Error::InvalidDimension(format!(
                "field_dim must be >= 2, got {field_dim}"
            )));
        }
        Ok(Self { field_dim })
    }

    pub fn atom_dim(&self) -> usize {
        ATOM_DIM
    }

    pub fn field_dim(&self) -> usize {
        self.field_dim
    }

    pub fn joint_dim(&self) -> usize {
        ATOM_DIM * self.field_dim
    }

    /// Joint index of |level, n⟩ with `level` 1-based.
    pub fn joint_index(&self, level: usize, fock: usize) -> usize {
        debug_assert!((1..=ATOM_DIM).contains(&level) && fock < self.field_dim);
        (level - 1) * self.field_dim + fock
    }
}

/// The space an operator or state lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Atom,
    Field(usize),
    Joint(HilbertLayout),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Atom => ATOM_DIM,
            Space::Field(n) => *n,
            Space::Joint(layout) => layout.joint_dim(),
        }
    }

    pub fn layout(&self) -> Option<HilbertLayout> {
        match self {
            Space::Joint(layout) => Some(*layout),
            _ => None,
        }
    }
}

/// Which factor of the joint space an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Atom,
    Field,
}

/// A dense complex square matrix tagged with its Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: Space,
    matrix: Array2<C64>,
}

impl Operator {
    pub fn new(space: Space, matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != space.dim() {
            return Err(Error::InvalidDimension(format!(
                "matrix is {}x{} but space has dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                space.dim()
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: Array2::zeros((d, d)),
        }
    }

    pub fn identity(space: Space) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: Array2::eye(d),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let mut out = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                out[[i, j]] = self.matrix[[j, i]].conj();
            }
        }
        Self {
            space: self.space,
            matrix: out,
        }
    }

    /// Matrix product, checking that both factors share a space.
    pub fn dot(&self, rhs: &Operator) -> Result<Operator> {
        if self.space != rhs.space {
            return Err(Error::SpaceMismatch(format!(
                "{:?} vs {:?}",
                self.space, rhs.space
            )));
        }
        Ok(Operator {
            space: self.space,
            matrix: self.matrix.dot(&rhs.matrix),
        })
    }

    pub fn scale(&self, c: C64) -> Operator {
        Operator {
            space: self.space,
            matrix: self.matrix.mapv(|z| z * c),
        }
    }

    pub fn add(&self, rhs: &Operator) -> Result<Operator> {
        if self.space != rhs.space {
            return Err(Error::SpaceMismatch(format!(
                "{:?} vs {:?}",
                self.space, rhs.space
            )));
        }
        Ok(Operator {
            space: self.space,
            matrix: &self.matrix + &rhs.matrix,
        })
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().iter().sum()
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in i..d {
                let defect = (self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm();
                worst = worst.max(defect);
            }
        }
        worst
    }
}

/// Hermitian, unit-trace, positive-semidefinite operator: the system state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: Space,
    matrix: Array2<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity (entrywise, 1e-12) and unit trace (1e-10).
    /// Positivity is not checked here; see [`DensityMatrix::min_eigenvalue`].
    pub fn try_new(space: Space, matrix: Array2<C64>) -> Result<Self> {
        let op = Operator::new(space, matrix)?;
        let defect = op.max_hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::NotAState(format!(
                "Hermiticity defect {defect:.3e} exceeds {HERMITICITY_TOL:.1e}"
            )));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::NotAState(format!("trace = {tr}, expected 1")));
        }
        Ok(Self {
            space: op.space,
            matrix: op.matrix,
        })
    }

    /// Wrap a matrix produced by a trusted path (e.g. the integrator, whose
    /// health checks run separately) without re-validating invariants.
    pub fn from_matrix_unchecked(space: Space, matrix: Array2<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim());
        Self { space, matrix }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn as_operator(&self) -> Operator {
        Operator {
            space: self.space,
            matrix: self.matrix.clone(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diag().iter().map(|z| z.re).sum()
    }

    /// Tr ρ², in [1/d, 1] for a valid state.
    pub fn purity(&self) -> f64 {
        let d = self.dim();
        let mut p = 0.0;
        for i in 0..d {
            for j in 0..d {
                p += (self.matrix[[i, j]] * self.matrix[[j, i]]).re;
            }
        }
        p
    }

    /// Eigenvalues of the (Hermitian) state, unordered.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Diagonal of the state, as probabilities.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diag().iter().map(|z| z.re).collect()
    }
}

/// Eigenvalues of a Hermitian matrix.
///
/// Amplified field states carry populations spanning hundreds of orders of
/// magnitude, which underflows unguarded norm computations (squares of
/// entries near 1e-200 vanish, turning Householder/Givens denominators into
/// zeros). This is the classic guarded algorithm: column-scaled Householder
/// tridiagonalization followed by implicit-shift QL with `hypot` throughout.
pub(crate) fn hermitian_eigenvalues(m: &Array2<C64>) -> Vec<f64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![m[[0, 0]].re];
    }

    // --- Householder reduction to a real tridiagonal (d, e). -------------
    // A Hermitian tridiagonal is unitarily equivalent (by a diagonal phase
    // matrix) to the real tridiagonal with the same diagonal and the
    // magnitudes of its off-diagonals, so only |e_k| is kept.
    let mut a: Vec<C64> = m.iter().copied().collect();
    let idx = |i: usize, j: usize| i * n + j;
    let mut e = vec![0.0_f64; n];
    let mut u: Vec<C64> = vec![C64::new(0.0, 0.0); n];
    let mut q: Vec<C64> = vec![C64::new(0.0, 0.0); n];

    for k in 0..n - 2 {
        // Column k below the diagonal, scaled by its 1-norm so that all
        // norms are O(1) regardless of the entries' magnitudes.
        let mut scale = 0.0_f64;
        for i in k + 1..n {
            let z = a[idx(i, k)];
            scale += z.re.abs() + z.im.abs();
        }
        if scale == 0.0 {
            e[k] = 0.0;
            continue;
        }
        for i in k + 1..n {
            u[i] = a[idx(i, k)] / scale;
        }
        let sigma: f64 = (k + 1..n).map(|i| u[i].norm_sqr()).sum();
        let nrm = sigma.sqrt();
        if nrm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        e[k] = nrm * scale;
        let alpha0 = u[k + 1];
        let a0 = alpha0.norm();
        let theta = if a0 == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            alpha0 / a0
        };
        u[k + 1] += theta * nrm;
        let h = sigma + a0 * nrm; // = ‖u‖²/2

        // p = A u / h over the trailing block, then the rank-2 update
        // A ← A - u q† - q u† with q = p - (u†p / 2h) u.
        for i in k + 1..n {
            let mut s = C64::new(0.0, 0.0);
            for j in k + 1..n {
                s += a[idx(i, j)] * u[j];
            }
            q[i] = s / h;
        }
        let mut udotp = C64::new(0.0, 0.0);
        for i in k + 1..n {
            udotp += u[i].conj() * q[i];
        }
        let kappa = udotp / (2.0 * h);
        for i in k + 1..n {
            q[i] -= kappa * u[i];
        }
        for i in k + 1..n {
            let ui = u[i];
            let qi = q[i];
            for j in k + 1..=i {
                a[idx(i, j)] = a[idx(i, j)] - ui * q[j].conj() - qi * u[j].conj();
            }
        }
        // Mirror the lower triangle for the next sweep's column reads.
        for i in k + 1..n {
            for j in k + 1..i {
                a[idx(j, i)] = a[idx(i, j)].conj();
            }
        }
    }
    e[n - 2] = a[idx(n - 1, n - 2)].norm();

    let mut d: Vec<f64> = (0..n).map(|i| a[idx(i, i)].re).collect();

    // --- Implicit-shift QL on the real tridiagonal. -----------------------
    let eps = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut msub = l;
            while msub < n - 1 {
                let dd = d[msub].abs() + d[msub + 1].abs();
                if e[msub].abs() <= eps * dd {
                    break;
                }
                msub += 1;
            }
            if msub == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                // Extremely defensive: QL converges in a handful of sweeps.
                debug_assert!(false, "QL iteration failed to converge");
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let r = g.hypot(1.0);
            g = d[msub] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
            let mut underflow = false;
            for i in (l..msub).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                let rr = f.hypot(g);
                e[i + 1] = rr;
                if rr == 0.0 {
                    d[i + 1] -= p;
                    e[msub] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / rr;
                c = g / rr;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[msub] = 0.0;
        }
    }
    d
}

/// Lowering ladder operator `a` on a truncated Fock space:
/// ⟨n-1| a |n⟩ = √n.
pub fn annihilation_op(field_dim: usize) -> Result<Operator> {
    if field_dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "annihilation operator needs field_dim >= 2, got {field_dim}"
        )));
    }
    let mut m = Array2::zeros((field_dim, field_dim));
    for n in 1..field_dim {
        m[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(Operator {
        space: Space::Field(field_dim),
        matrix: m,
    })
}

/// Number operator a†a.
pub fn number_op(field_dim: usize) -> Result<Operator> {
    if field_dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "number operator needs field_dim >= 2, got {field_dim}"
        )));
    }
    let mut m = Array2::zeros((field_dim, field_dim));
    for n in 0..field_dim {
        m[[n, n]] = C64::new(n as f64, 0.0);
    }
    Ok(Operator {
        space: Space::Field(field_dim),
        matrix: m,
    })
}

/// Atomic lowering operator |lower⟩⟨upper| on the 3-level space.
/// Levels are 1-based and must satisfy `lower < upper`.
pub fn atomic_transition_op(lower: usize, upper: usize) -> Result<Operator> {
    if !(1..=ATOM_DIM).contains(&lower) || !(1..=ATOM_DIM).contains(&upper) || lower >= upper {
        return Err(Error::InvalidTransition { lower, upper });
    }
    let mut m = Array2::zeros((ATOM_DIM, ATOM_DIM));
    m[[lower - 1, upper - 1]] = C64::new(1.0, 0.0);
    Ok(Operator {
        space: Space::Atom,
        matrix: m,
    })
}

/// Atomic projector |level⟩⟨level|.
pub fn atomic_projector(level: usize) -> Result<Operator> {
    if !(1..=ATOM_DIM).contains(&level) {
        return Err(Error::InvalidParameter(format!(
            "atomic level must be 1..=3, got {level}"
        )));
    }
    let mut m = Array2::zeros((ATOM_DIM, ATOM_DIM));
    m[[level - 1, level - 1]] = C64::new(1.0, 0.0);
    Ok(Operator {
        space: Space::Atom,
        matrix: m,
    })
}

/// Embed a single-subsystem operator into the joint space:
/// `op ⊗ 1_f` for the atom side, `1_a ⊗ op` for the field side.
pub fn embed(op: &Operator, side: Subsystem, layout: HilbertLayout) -> Result<Operator> {
    let n = layout.field_dim();
    let d = layout.joint_dim();
    let mut out = Array2::zeros((d, d));
    match side {
        Subsystem::Atom => {
            if op.space() != Space::Atom {
                return Err(Error::SpaceMismatch(format!(
                    "expected an atom operator, got {:?}",
                    op.space()
                )));
            }
            for a in 0..ATOM_DIM {
                for b in 0..ATOM_DIM {
                    let v = op.matrix[[a, b]];
                    if v != C64::new(0.0, 0.0) {
                        for m in 0..n {
                            out[[a * n + m, b * n + m]] = v;
                        }
                    }
                }
            }
        }
        Subsystem::Field => {
            if op.space() != Space::Field(n) {
                return Err(Error::SpaceMismatch(format!(
                    "expected a field operator of dimension {n}, got {:?}",
                    op.space()
                )));
            }
            for a in 0..ATOM_DIM {
                for m in 0..n {
                    for k in 0..n {
                        out[[a * n + m, a * n + k]] = op.matrix[[m, k]];
                    }
                }
            }
        }
    }
    Ok(Operator {
        space: Space::Joint(layout),
        matrix: out,
    })
}

/// Reduced state on the kept subsystem. The input must live on a joint layout.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let layout = rho
        .space()
        .layout()
        .ok_or_else(|| Error::SpaceMismatch("partial_trace needs a joint state".into()))?;
    let n = layout.field_dim();
    let m = rho.matrix();
    match keep {
        Subsystem::Atom => {
            let mut out = Array2::zeros((ATOM_DIM, ATOM_DIM));
            for a in 0..ATOM_DIM {
                for b in 0..ATOM_DIM {
                    let mut s = C64::new(0.0, 0.0);
                    for k in 0..n {
                        s += m[[a * n + k, b * n + k]];
                    }
                    out[[a, b]] = s;
                }
            }
            Ok(DensityMatrix {
                space: Space::Atom,
                matrix: out,
            })
        }
        Subsystem::Field => {
            let mut out = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    let mut s = C64::new(0.0, 0.0);
                    for a in 0..ATOM_DIM {
                        s += m[[a * n + i, a * n + j]];
                    }
                    out[[i, j]] = s;
                }
            }
            Ok(DensityMatrix {
                space: Space::Field(n),
                matrix: out,
            })
        }
    }
}

/// Initial field states. Truncated distributions are renormalized and the
/// discarded mass is surfaced, not silently dropped.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldStateSpec {
    Vacuum,
    Fock(usize),
    Coherent(C64),
    PoissonMixed(f64),
    Thermal(f64),
}

/// Initial atomic states.
#[derive(Debug, Clone, PartialEq)]
pub enum AtomStateSpec {
    /// Populate a single level (1-based).
    Level(usize),
    /// An arbitrary 3x3 density matrix.
    General(Array2<C64>),
}

/// A constructed state together with the probability mass lost to truncation.
#[derive(Debug, Clone)]
pub struct BuiltState {
    pub rho: DensityMatrix,
    pub discarded_mass: f64,
}

/// Build a normalized field density matrix on `field_dim` Fock states,
/// with the default tail tolerance of 1e-6.
pub fn build_field_state(spec: &FieldStateSpec, field_dim: usize) -> Result<BuiltState> {
    build_field_state_with_tol(spec, field_dim, DEFAULT_TAIL_TOL)
}

/// As [`build_field_state`], erroring when the discarded tail mass exceeds
/// `tail_tol`.
pub fn build_field_state_with_tol(
    spec: &FieldStateSpec,
    field_dim: usize,
    tail_tol: f64,
) -> Result<BuiltState> {
    if field_dim < 2 {
        return Err(Error::InvalidDimension(format!(
            "field_dim must be >= 2, got {field_dim}"
        )));
    }
    let mut m: Array2<C64> = Array2::zeros((field_dim, field_dim));
    let discarded;
    match spec {
        FieldStateSpec::Vacuum => {
            m[[0, 0]] = C64::new(1.0, 0.0);
            discarded = 0.0;
        }
        FieldStateSpec::Fock(n) => {
            if *n >= field_dim {
                return Err(Error::InvalidDimension(format!(
                    "fock({n}) does not fit in field_dim {field_dim}"
                )));
            }
            m[[*n, *n]] = C64::new(1.0, 0.0);
            discarded = 0.0;
        }
        FieldStateSpec::Coherent(alpha) => {
            // c_n = e^{-|α|²/2} αⁿ/√n!, built by recurrence.
            let mut c = vec![C64::new(0.0, 0.0); field_dim];
            c[0] = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
            for n in 1..field_dim {
                c[n] = c[n - 1] * alpha / C64::new((n as f64).sqrt(), 0.0);
            }
            let kept: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            discarded = (1.0 - kept).max(0.0);
            check_tail(discarded, tail_tol)?;
            let norm = kept.sqrt();
            for z in &mut c {
                *z /= C64::new(norm, 0.0);
            }
            for i in 0..field_dim {
                for j in 0..field_dim {
                    m[[i, j]] = c[i] * c[j].conj();
                }
            }
        }
        FieldStateSpec::PoissonMixed(mean) => {
            let p = poisson_weights(*mean, field_dim)?;
            discarded = fill_diagonal_renormalized(&mut m, &p, tail_tol)?;
        }
        FieldStateSpec::Thermal(mean) => {
            if *mean < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "thermal mean must be >= 0, got {mean}"
                )));
            }
            // Bose-Einstein weights p_n = n̄ⁿ/(n̄+1)^{n+1}.
            let mut p = vec![0.0; field_dim];
            let ratio = mean / (mean + 1.0);
            p[0] = 1.0 / (mean + 1.0);
            for n in 1..field_dim {
                p[n] = p[n - 1] * ratio;
            }
            discarded = fill_diagonal_renormalized(&mut m, &p, tail_tol)?;
        }
    }
    Ok(BuiltState {
        rho: DensityMatrix {
            space: Space::Field(field_dim),
            matrix: m,
        },
        discarded_mass: discarded,
    })
}

/// Poisson weights e^{-m} mⁿ/n! for n < field_dim.
pub fn poisson_weights(mean: f64, field_dim: usize) -> Result<Vec<f64>> {
    if mean < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "poisson mean must be >= 0, got {mean}"
        )));
    }
    let mut p = vec![0.0; field_dim];
    p[0] = (-mean).exp();
    for n in 1..field_dim {
        p[n] = p[n - 1] * mean / n as f64;
    }
    Ok(p)
}

fn fill_diagonal_renormalized(m: &mut Array2<C64>, p: &[f64], tail_tol: f64) -> Result<f64> {
    let kept: f64 = p.iter().sum();
    let discarded = (1.0 - kept).max(0.0);
    check_tail(discarded, tail_tol)?;
    for (n, &w) in p.iter().enumerate() {
        m[[n, n]] = C64::new(w / kept, 0.0);
    }
    Ok(discarded)
}

fn check_tail(mass: f64, tol: f64) -> Result<()> {
    if mass > tol {
        Err(Error::TruncationTail { mass, tol })
    } else {
        Ok(())
    }
}

/// Build the atomic density matrix from its spec.
pub fn build_atom_state(spec: &AtomStateSpec) -> Result<DensityMatrix> {
    match spec {
        AtomStateSpec::Level(level) => {
            let proj = atomic_projector(*level)?;
            Ok(DensityMatrix {
                space: Space::Atom,
                matrix: proj.into_matrix(),
            })
        }
        AtomStateSpec::General(m) => DensityMatrix::try_new(Space::Atom, m.clone()),
    }
}

/// Separable initial state ρ_a ⊗ ρ_f on the joint layout.
pub fn build_joint_state(
    atom: &AtomStateSpec,
    field: &FieldStateSpec,
    layout: HilbertLayout,
) -> Result<BuiltState> {
    let rho_a = build_atom_state(atom)?;
    let built_f = build_field_state(field, layout.field_dim())?;
    let rho_f = built_f.rho;
    let n = layout.field_dim();
    let d = layout.joint_dim();
    let mut m = Array2::zeros((d, d));
    for a in 0..ATOM_DIM {
        for b in 0..ATOM_DIM {
            let w = rho_a.matrix()[[a, b]];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    m[[a * n + i, b * n + j]] = w * rho_f.matrix()[[i, j]];
                }
            }
        }
    }
    Ok(BuiltState {
        rho: DensityMatrix {
            space: Space::Joint(layout),
            matrix: m,
        },
        discarded_mass: built_f.discarded_mass,
    })
}

/// Von Neumann entropy -Σ λ ln λ in nats.
///
/// Eigenvalues in [-1e-10, 0] are clamped to zero; anything below -1e-8 is
/// treated as an invalid state rather than noise.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_from_eigenvalues(&rho.eigenvalues())
}

pub(crate) fn entropy_from_eigenvalues(eigs: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &lam in eigs {
        if lam < -EIG_FAIL {
            return Err(Error::NotAState(format!(
                "eigenvalue {lam:.3e} below -{EIG_FAIL:.1e}"
            )));
        }
        if lam > EIG_CLAMP {
            s -= lam * lam.ln();
        }
    }
    Ok(s)
}

/// Tr[ρ·obs]. Real to ~1e-10 when `obs` is Hermitian.
pub fn expectation(rho: &DensityMatrix, obs: &Operator) -> Result<C64> {
    if rho.space() != obs.space() {
        return Err(Error::SpaceMismatch(format!(
            "{:?} vs {:?}",
            rho.space(),
            obs.space()
        )));
    }
    let d = rho.dim();
    let a = rho.matrix();
    let b = obs.matrix();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += a[[i, j]] * b[[j, i]];
        }
    }
    Ok(s)
}

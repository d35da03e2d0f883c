//! Thermodynamic bookkeeping for amplifier runs.
//!
//! Heat currents follow the quasi-semiclassical energy operator
//! H̃ = H_a + H_int:
//!
//!   Q̇_{H(C)} = Tr{ D_{H(C)}(ρ) · (H_a + H_int) },
//!   P_f       = -i Tr{ ρ [H_f, H_int] },
//!   η         = P_f / Q̇_H,
//!
//! and satisfy d/dt Tr{ρH̃} = Q̇_H + Q̇_C - P_f identically (the [H_a, H_int]
//! commutator cancels against [H_int, H_a + H_f + H_int] term by term).
//!
//! Raw traces are in the model's ħ = 1 units. Reported samples use the
//! natural scales of the run: time in 1/Γ_ref, energies in ω_res, currents in
//! ω_res·Γ_ref, entropies in nats. With the standard amplifier parameters this
//! makes the steady currents land near 0.69 / -0.12 / 0.58 on the hot/cold/
//! power channels.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{
    entropy_from_eigenvalues, hermitian_eigenvalues, DensityMatrix, ATOM_DIM,
};
use crate::integrate::TimeSeries;
use crate::liouville::{
    atomic_hamiltonian, field_hamiltonian, interaction_hamiltonian, interaction_pairs,
    AmplifierModel, Bath,
};

/// Below this magnitude of Q̇_H (reported units) the efficiency is undefined
/// and reported as NaN.
pub const ETA_UNDEFINED_FLOOR: f64 = 1e-12;

/// Default steady-state detection window (units of 1/Γ_ref).
pub const STEADY_WINDOW_DEFAULT: f64 = 1.0;
/// Default steady-state relative variation tolerance.
pub const STEADY_TOL_DEFAULT: f64 = 1e-4;

/// One time point of energies, entropies, currents, and efficiency, in
/// reported units (see module docs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoSample {
    /// Sample time in 1/Γ_ref.
    pub t: f64,
    pub e_total: f64,
    pub e_atom: f64,
    pub e_field: f64,
    pub e_int: f64,
    pub s_atom: f64,
    pub s_field: f64,
    pub s_total: f64,
    pub qdot_h: f64,
    pub qdot_c: f64,
    pub p_f: f64,
    /// P_f / Q̇_H; NaN while |Q̇_H| is below [`ETA_UNDEFINED_FLOOR`].
    pub eta: f64,
}

impl ThermoSample {
    pub const CSV_HEADER: &'static str =
        "t,e_total,e_atom,e_field,e_int,s_atom,s_field,s_total,qdot_h,qdot_c,p_f,eta";

    pub fn csv_row(&self) -> String {
        let f = |v: f64| {
            if v.is_nan() {
                "nan".to_string()
            } else {
                format!("{v:.12e}")
            }
        };
        [
            self.t,
            self.e_total,
            self.e_atom,
            self.e_field,
            self.e_int,
            self.s_atom,
            self.s_field,
            self.s_total,
            self.qdot_h,
            self.qdot_c,
            self.p_f,
            self.eta,
        ]
        .into_iter()
        .map(f)
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// Conversion factors from raw model units into reported units.
#[derive(Debug, Clone, Copy)]
pub struct ReportUnits {
    /// Energy unit: ω_res, falling back to 1 if degenerate.
    pub energy: f64,
    /// Rate unit: Γ_ref, falling back to λ, then 1.
    pub rate: f64,
}

impl ReportUnits {
    pub fn from_model(model: &AmplifierModel) -> Self {
        let energy = if model.omega_res() > 0.0 {
            model.omega_res()
        } else {
            1.0
        };
        let rate = if model.gamma_ref() > 0.0 {
            model.gamma_ref()
        } else if model.lambda > 0.0 {
            model.lambda
        } else {
            1.0
        };
        Self { energy, rate }
    }

    pub fn current(&self) -> f64 {
        self.energy * self.rate
    }
}

/// A raw computed sample plus spectral health information carried out of the
/// joint diagonalization.
#[derive(Debug, Clone, Copy)]
pub struct SampleOutput {
    pub sample: ThermoSample,
    /// Smallest eigenvalue of the joint state.
    pub joint_min_eig: f64,
}

/// Precomputed contraction tables for fast per-sample thermodynamics.
#[derive(Debug, Clone)]
pub struct ThermoCtx {
    nfield: usize,
    dim: usize,
    /// Diagonals of H_a and H_f in the joint space.
    ha_diag: Vec<f64>,
    hf_diag: Vec<f64>,
    /// Interaction pairs (hi, lo, v).
    pairs: Vec<(usize, usize, f64)>,
    /// Nonzero entries (i, j, K_ij) of K = [H_f, H_int], computed numerically
    /// from the dense matrices once at construction.
    commutator_nz: Vec<(usize, usize, C64)>,
    /// Bath rates Γ(n̄+1) and Γn̄ for hot and cold channels.
    g_h: (f64, f64),
    g_c: (f64, f64),
    units: ReportUnits,
}

impl ThermoCtx {
    pub fn new(model: &AmplifierModel) -> Result<Self> {
        let model = model.clone().validated()?;
        let n = model.layout.field_dim();
        let dim = model.layout.joint_dim();
        let ha = atomic_hamiltonian(&model);
        let hf = field_hamiltonian(&model);
        let hint = interaction_hamiltonian(&model);
        let ha_diag: Vec<f64> = ha.matrix().diag().iter().map(|z| z.re).collect();
        let hf_diag: Vec<f64> = hf.matrix().diag().iter().map(|z| z.re).collect();

        let k = hf.dot(&hint)?.into_matrix() - hint.dot(&hf)?.into_matrix();
        let mut commutator_nz = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let z = k[[i, j]];
                if z != C64::new(0.0, 0.0) {
                    commutator_nz.push((i, j, z));
                }
            }
        }

        Ok(Self {
            nfield: n,
            dim,
            ha_diag,
            hf_diag,
            pairs: interaction_pairs(&model),
            commutator_nz,
            g_h: (
                model.gamma_h * (model.nbar_h + 1.0),
                model.gamma_h * model.nbar_h,
            ),
            g_c: (
                model.gamma_c * (model.nbar_c + 1.0),
                model.gamma_c * model.nbar_c,
            ),
            units: ReportUnits::from_model(&model),
        })
    }

    pub fn units(&self) -> ReportUnits {
        self.units
    }

    fn diag(&self, y: &[C64], i: usize) -> C64 {
        y[i * self.dim + i]
    }

    /// Raw heat current of one bath: Tr{D(ρ)(H_a + H_int)}, contracted
    /// against the block structure of the dissipator.
    pub fn heat_current_raw(&self, y: &[C64], bath: Bath) -> f64 {
        let n = self.nfield;
        let (g1, g2, lower) = match bath {
            Bath::Hot => (self.g_h.0, self.g_h.1, 0usize),
            Bath::Cold => (self.g_c.0, self.g_c.1, 1usize),
        };
        // Diagonal of D(ρ): levels `lower` and 3 exchange population.
        let mut s = 0.0;
        for m in 0..n {
            let i_lo = lower * n + m;
            let i_up = 2 * n + m;
            let p_lo = self.diag(y, i_lo).re;
            let p_up = self.diag(y, i_up).re;
            let d_lo = 2.0 * (g1 * p_up - g2 * p_lo);
            s += self.ha_diag[i_lo] * d_lo - self.ha_diag[i_up] * d_lo;
        }
        // H_int contraction: pair entries (atom blocks 1 and 2) only decay.
        // The hot channel damps atom level 1 (g2), the cold channel damps
        // levels 2 (g2) and 3 (g1); pair entries link levels 1 and 2.
        let w_pair = match bath {
            Bath::Hot => g2,
            Bath::Cold => g2,
        };
        for &(hi, lo, v) in &self.pairs {
            let z = y[hi * self.dim + lo];
            s += -w_pair * v * 2.0 * z.re;
        }
        s
    }

    /// Raw field power: -i Tr{ρ [H_f, H_int]} with the numerically computed
    /// commutator.
    pub fn field_power_raw(&self, y: &[C64]) -> f64 {
        let mut tr = C64::new(0.0, 0.0);
        for &(i, j, k) in &self.commutator_nz {
            tr += y[j * self.dim + i] * k;
        }
        (tr * C64::new(0.0, -1.0)).re
    }

    /// Raw interaction energy Tr{ρ H_int}.
    pub fn interaction_energy_raw(&self, y: &[C64]) -> f64 {
        let mut s = 0.0;
        for &(hi, lo, v) in &self.pairs {
            s += 2.0 * v * y[hi * self.dim + lo].re;
        }
        s
    }

    /// Full sample in reported units, plus the joint minimum eigenvalue.
    pub fn sample(&self, y: &[C64], t_report: f64) -> Result<SampleOutput> {
        let n = self.nfield;
        let dim = self.dim;

        let mut e_atom = 0.0;
        let mut e_field = 0.0;
        for i in 0..dim {
            let p = self.diag(y, i).re;
            e_atom += self.ha_diag[i] * p;
            e_field += self.hf_diag[i] * p;
        }
        let e_int = self.interaction_energy_raw(y);
        let qdot_h = self.heat_current_raw(y, Bath::Hot);
        let qdot_c = self.heat_current_raw(y, Bath::Cold);
        let p_f = self.field_power_raw(y);

        // Reduced states for the entropies.
        let mut rho_a: Array2<C64> = Array2::zeros((ATOM_DIM, ATOM_DIM));
        for a in 0..ATOM_DIM {
            for b in 0..ATOM_DIM {
                let mut z = C64::new(0.0, 0.0);
                for m in 0..n {
                    z += y[(a * n + m) * dim + b * n + m];
                }
                rho_a[[a, b]] = z;
            }
        }
        let mut rho_f: Array2<C64> = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut z = C64::new(0.0, 0.0);
                for a in 0..ATOM_DIM {
                    z += y[(a * n + i) * dim + a * n + j];
                }
                rho_f[[i, j]] = z;
            }
        }
        let joint = ndarray::ArrayView2::from_shape((dim, dim), y)
            .expect("flat state has dim² entries")
            .to_owned();

        let joint_eigs = hermitian_eigenvalues(&joint);
        let s_total = entropy_from_eigenvalues(&joint_eigs)?;
        let s_atom = entropy_from_eigenvalues(&hermitian_eigenvalues(&rho_a))?;
        let s_field = entropy_from_eigenvalues(&hermitian_eigenvalues(&rho_f))?;
        let joint_min_eig = joint_eigs.into_iter().fold(f64::INFINITY, f64::min);

        let eu = self.units.energy;
        let cu = self.units.current();
        let qdot_h_rep = qdot_h / cu;
        let qdot_c_rep = qdot_c / cu;
        let p_f_rep = p_f / cu;
        let eta = if qdot_h_rep.abs() < ETA_UNDEFINED_FLOOR {
            f64::NAN
        } else {
            p_f_rep / qdot_h_rep
        };

        Ok(SampleOutput {
            sample: ThermoSample {
                t: t_report,
                e_total: (e_atom + e_field + e_int) / eu,
                e_atom: e_atom / eu,
                e_field: e_field / eu,
                e_int: e_int / eu,
                s_atom,
                s_field,
                s_total,
                qdot_h: qdot_h_rep,
                qdot_c: qdot_c_rep,
                p_f: p_f_rep,
                eta,
            },
            joint_min_eig,
        })
    }
}

/// Heat current Tr{D_bath(ρ)(H_a + H_int)} in raw model units.
pub fn heat_current(rho: &DensityMatrix, model: &AmplifierModel, bath: Bath) -> Result<f64> {
    let ctx = ThermoCtx::new(model)?;
    let y = flat(rho, model)?;
    Ok(ctx.heat_current_raw(y, bath))
}

/// Field power -i Tr{ρ[H_f, H_int]} in raw model units.
pub fn field_power(rho: &DensityMatrix, model: &AmplifierModel) -> Result<f64> {
    let ctx = ThermoCtx::new(model)?;
    let y = flat(rho, model)?;
    Ok(ctx.field_power_raw(y))
}

/// One reported-unit sample at reported time `t` (units 1/Γ_ref).
pub fn thermo_sample(rho: &DensityMatrix, model: &AmplifierModel, t: f64) -> Result<ThermoSample> {
    let ctx = ThermoCtx::new(model)?;
    let y = flat(rho, model)?;
    Ok(ctx.sample(y, t)?.sample)
}

fn flat<'a>(rho: &'a DensityMatrix, model: &AmplifierModel) -> Result<&'a [C64]> {
    if rho.space().layout() != Some(model.layout) {
        return Err(Error::SpaceMismatch(
            "state and model live on different layouts".into(),
        ));
    }
    Ok(rho
        .matrix()
        .as_slice()
        .expect("states are contiguous row-major"))
}

/// Earliest sample time after which the currents, power, and atomic
/// populations all vary by less than `tol` (relative) over every trailing
/// window of length `window`. Returns `None` if the series never settles or
/// is too short to hold two windows.
pub fn detect_steady_state(series: &TimeSeries, window: f64, tol: f64) -> Option<f64> {
    let recs = &series.records;
    if recs.is_empty() {
        return None;
    }
    let t0 = recs[0].t;
    let t_end = recs[recs.len() - 1].t;
    if t_end - t0 < 2.0 * window {
        return None;
    }

    // Quantities checked: qdot_h, qdot_c, p_f, and the three atomic
    // populations.
    let quantity = |r: &crate::integrate::SampleRecord, q: usize| match q {
        0 => r.thermo.qdot_h,
        1 => r.thermo.qdot_c,
        2 => r.thermo.p_f,
        k => r.atom_populations[k - 3],
    };
    let nq = 6;

    // Series-wide scales provide a floor so that quantities settling to zero
    // count as settled.
    let mut series_scale = [0.0_f64; 6];
    for r in recs {
        for (q, scale) in series_scale.iter_mut().enumerate() {
            *scale = scale.max(quantity(r, q).abs());
        }
    }

    // windows_ok[i]: variation over [t_i, t_i + window] is below tol for all
    // quantities (true when the window extends past the series end, so the
    // suffix scan below is well-defined).
    let n = recs.len();
    let mut settled_from = n; // earliest i such that all windows j >= i pass
    for i in (0..n).rev() {
        let t_hi = recs[i].t + window;
        let mut ok = true;
        for q in 0..nq {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for r in &recs[i..] {
                if r.t > t_hi {
                    break;
                }
                let v = quantity(r, q);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let scale = hi.abs().max(lo.abs()).max(1e-9 * series_scale[q]);
            if hi - lo > tol * scale.max(f64::MIN_POSITIVE) {
                ok = false;
                break;
            }
        }
        if ok {
            settled_from = i;
        } else {
            break;
        }
    }

    if settled_from == n {
        return None;
    }
    // Require at least one full window after the detected time.
    let t_star = recs[settled_from].t;
    if t_star + window <= t_end + 1e-12 {
        Some(t_star)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{
        build_joint_state, AtomStateSpec, DensityMatrix, FieldStateSpec, HilbertLayout, Space,
    };
    use crate::liouville::{
        apply_dissipator, master_rhs, BathChannel, Frame, InteractionOrder,
    };
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn model(n: usize, order: InteractionOrder) -> AmplifierModel {
        let omega_res = 50.0;
        AmplifierModel {
            omega1: 0.0,
            omega2: omega_res,
            omega3: 1.2 * omega_res,
            omega_f: omega_res / order.photons() as f64,
            lambda: 1.0,
            gamma_h: 0.04,
            gamma_c: 0.03,
            nbar_h: 4.0,
            nbar_c: 0.3,
            order,
            frame: Frame::Interaction,
            layout: HilbertLayout::new(n).unwrap(),
        }
        .validated()
        .unwrap()
    }

    fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
        let mut g: Array2<C64> = Array2::zeros((dim, dim));
        for z in g.iter_mut() {
            *z = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let gd = g.t().mapv(|z| z.conj());
        let mut rho = gd.dot(&g);
        let tr: C64 = rho.diag().iter().sum();
        rho.mapv_inplace(|z| z / tr);
        DensityMatrix::try_new(Space::Joint(HilbertLayout::new(dim / 3).unwrap()), rho).unwrap()
    }

    /// The fast contraction must equal the dense trace against the full
    /// dissipator output.
    #[test]
    fn heat_current_matches_dense_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for order in [InteractionOrder::Linear, InteractionOrder::TwoPhoton] {
            let m = model(5, order);
            let rho = random_state(15, &mut rng);
            let h_tilde = atomic_hamiltonian(&m)
                .add(&interaction_hamiltonian(&m))
                .unwrap();
            for bath in [Bath::Hot, Bath::Cold] {
                let ch = BathChannel::from_model(bath, &m).unwrap();
                let d = apply_dissipator(&rho, &ch).unwrap();
                let dense = d.dot(&h_tilde).unwrap().trace();
                let fast = heat_current(&rho, &m, bath).unwrap();
                assert_abs_diff_eq!(dense.re, fast, epsilon = 1e-11);
                assert_abs_diff_eq!(dense.im, 0.0, epsilon = 1e-11);
            }
        }
    }

    /// Numeric commutator against the closed form
    /// [H_f, H_int] = p·ω_f·λ(σ12 ⊗ (a†)^p - σ12† ⊗ a^p).
    #[test]
    fn field_power_commutator_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for order in [InteractionOrder::Linear, InteractionOrder::TwoPhoton] {
            let m = model(6, order);
            let ctx = ThermoCtx::new(&m).unwrap();
            let p = m.order.photons() as f64;
            for _ in 0..5 {
                let rho = random_state(18, &mut rng);
                let y = rho.matrix().as_slice().unwrap();
                let numeric = ctx.field_power_raw(y);
                // Closed form: -i Tr{ρ K} with K = p ω_f λ (S - S†).
                let mut tr = c(0.0, 0.0);
                for &(hi, lo, v) in &ctx.pairs {
                    let k = p * m.omega_f * v / m.lambda * m.lambda;
                    tr += rho.matrix()[[lo, hi]] * c(k, 0.0);
                    tr -= rho.matrix()[[hi, lo]] * c(k, 0.0);
                }
                let analytic = (tr * c(0.0, -1.0)).re;
                assert_abs_diff_eq!(numeric, analytic, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn field_power_zero_on_diagonal_states() {
        let m = model(16, InteractionOrder::TwoPhoton);
        let rho = build_joint_state(
            &AtomStateSpec::Level(2),
            &FieldStateSpec::PoissonMixed(1.0),
            m.layout,
        )
        .unwrap()
        .rho;
        assert_abs_diff_eq!(field_power(&rho, &m).unwrap(), 0.0, epsilon = 1e-15);
    }

    /// First-law identity: Tr{ρ̇ H̃} = Q̇_H + Q̇_C - P_f for any state.
    #[test]
    fn first_law_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let m = model(5, InteractionOrder::TwoPhoton);
        let h_tilde = atomic_hamiltonian(&m)
            .add(&interaction_hamiltonian(&m))
            .unwrap();
        for _ in 0..5 {
            let rho = random_state(15, &mut rng);
            let rhs = master_rhs(&rho, &m).unwrap();
            let lhs = rhs.dot(&h_tilde).unwrap().trace().re;
            let qh = heat_current(&rho, &m, Bath::Hot).unwrap();
            let qc = heat_current(&rho, &m, Bath::Cold).unwrap();
            let pf = field_power(&rho, &m).unwrap();
            assert_abs_diff_eq!(lhs, qh + qc - pf, epsilon = 1e-10);
        }
    }

    #[test]
    fn zero_coupling_bath_current_vanishes_at_detailed_balance() {
        // λ = 0 and the atom at the hot bath's detailed-balance point: the
        // hot current vanishes.
        let mut m = model(4, InteractionOrder::TwoPhoton);
        m.lambda = 0.0;
        let nbar = m.nbar_h;
        let p1 = (nbar + 1.0) / (2.0 * nbar + 1.0);
        let p3 = nbar / (2.0 * nbar + 1.0);
        let mut atom: Array2<C64> = Array2::zeros((3, 3));
        atom[[0, 0]] = c(p1, 0.0);
        atom[[2, 2]] = c(p3, 0.0);
        let rho = build_joint_state(
            &AtomStateSpec::General(atom),
            &FieldStateSpec::Vacuum,
            m.layout,
        )
        .unwrap()
        .rho;
        assert_abs_diff_eq!(
            heat_current(&rho, &m, Bath::Hot).unwrap(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn initial_sample_values() {
        // Atom |2⟩ ⊗ vacuum at t = 0: e_field = 0, e_atom = ω2 (ω_res units),
        // both marginal entropies zero.
        let m = model(6, InteractionOrder::TwoPhoton);
        let rho = build_joint_state(&AtomStateSpec::Level(2), &FieldStateSpec::Vacuum, m.layout)
            .unwrap()
            .rho;
        let s = thermo_sample(&rho, &m, 0.0).unwrap();
        assert_abs_diff_eq!(s.e_field, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.e_atom, m.omega2 / m.omega_res(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.e_int, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.s_atom, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.s_field, 0.0, epsilon = 1e-10);
        assert!(s.eta.is_nan() || s.eta.is_finite());
    }

    /// Entropy subadditivity S(ρ) ≤ S(ρ_a) + S(ρ_f) on random joint states.
    #[test]
    fn entropy_subadditivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let m = model(4, InteractionOrder::TwoPhoton);
        let ctx = ThermoCtx::new(&m).unwrap();
        for _ in 0..8 {
            let rho = random_state(12, &mut rng);
            let out = ctx
                .sample(rho.matrix().as_slice().unwrap(), 0.0)
                .unwrap()
                .sample;
            assert!(
                out.s_total <= out.s_atom + out.s_field + 1e-9,
                "subadditivity violated: {} > {} + {}",
                out.s_total,
                out.s_atom,
                out.s_field
            );
        }
    }

    #[test]
    fn steady_state_detection_synthetic() {
        use crate::integrate::SampleRecord;
        let mk = |t: f64, v: f64| SampleRecord {
            t,
            thermo: ThermoSample {
                t,
                e_total: 0.0,
                e_atom: 0.0,
                e_field: 0.0,
                e_int: 0.0,
                s_atom: 0.0,
                s_field: 0.0,
                s_total: 0.0,
                qdot_h: v,
                qdot_c: -v / 6.0,
                p_f: v * 5.0 / 6.0,
                eta: 5.0 / 6.0,
            },
            trace_drift: 0.0,
            min_eig: 0.0,
            tail_mass: 0.0,
            field_parity: 1.0,
            atom_populations: [0.4, 0.35, 0.25],
        };

        // Constant series settles at the first sample.
        let series = TimeSeries {
            records: (0..41).map(|k| mk(k as f64 * 0.25, 0.7)).collect(),
        };
        assert_eq!(detect_steady_state(&series, 1.0, 1e-4), Some(0.0));

        // Exponential approach settles once the transient decays.
        let series = TimeSeries {
            records: (0..81)
                .map(|k| {
                    let t = k as f64 * 0.25;
                    mk(t, 0.7 * (1.0 - (-2.0 * t).exp()))
                })
                .collect(),
        };
        let t = detect_steady_state(&series, 1.0, 1e-4).expect("settles");
        assert!(t > 2.0 && t < 10.0, "detected at t = {t}");

        // A drifting series never settles.
        let series = TimeSeries {
            records: (0..41).map(|k| mk(k as f64 * 0.25, 0.1 * k as f64)).collect(),
        };
        assert_eq!(detect_steady_state(&series, 1.0, 1e-4), None);
    }
}

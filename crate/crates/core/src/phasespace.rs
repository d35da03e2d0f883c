//! Husimi-Kano Q and Wigner quasiprobability functions on α-plane grids,
//! plus parity, negativity, and grid-distance diagnostics.
//!
//! Conventions: the grid lives in the coherent-amplitude plane (Re α
//! horizontal, Im α vertical), related to quadratures by α = (x + ip)/√2
//! with ħ = 1. Normalizations are fixed by Q_vac(0) = 1/π and W_vac(0) = 2/π.
//!
//!   Q(α) = (1/π)⟨α|ρ|α⟩,
//!   W(α) = (2/π) Σ_{m,n} ρ_{mn} w_{nm}(α),
//!   w_{nm}(α) = (-1)^n √(n!/m!) (2α*)^{m-n} e^{-2|α|²} L_n^{(m-n)}(4|α|²)
//!   for m ≥ n, and w_{mn} = w_{nm}*.
//!
//! The generalized Laguerre factors are evaluated by an upward recurrence on
//! the fully scaled kernel terms, with log-space prefactors, so no
//! intermediate overflows or underflows occur for any grid radius of
//! practical size. The displaced-parity identity W(0) = (2/π)⟨(-1)^{a†a}⟩ is
//! exact in this representation and is used as a kernel test.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Space};

/// Relative normalization defect above which a grid is rejected as too
/// coarse or too small.
pub const COVERAGE_TOL: f64 = 0.01;
/// Largest imaginary residue tolerated in quasiprobability values.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Rectangular α-plane grid specification (inclusive bounds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl GridSpec {
    /// Square grid [-h, h]² with `points` nodes per axis.
    pub fn square(half_width: f64, points: usize) -> Self {
        Self {
            re_min: -half_width,
            re_max: half_width,
            im_min: -half_width,
            im_max: half_width,
            n_re: points,
            n_im: points,
        }
    }

    pub fn validated(self) -> Result<Self> {
        if self.n_re < 2 || self.n_im < 2 {
            return Err(Error::InvalidParameter(
                "grid needs at least 2 points per axis".into(),
            ));
        }
        if !(self.re_max > self.re_min) || !(self.im_max > self.im_min) {
            return Err(Error::InvalidParameter(
                "grid bounds must satisfy max > min".into(),
            ));
        }
        Ok(self)
    }

    pub fn spacing_re(&self) -> f64 {
        (self.re_max - self.re_min) / (self.n_re - 1) as f64
    }

    pub fn spacing_im(&self) -> f64 {
        (self.im_max - self.im_min) / (self.n_im - 1) as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing_re() * self.spacing_im()
    }

    /// α at row `i` (Im index) and column `j` (Re index).
    pub fn alpha(&self, i: usize, j: usize) -> C64 {
        C64::new(
            self.re_min + j as f64 * self.spacing_re(),
            self.im_min + i as f64 * self.spacing_im(),
        )
    }
}

/// Quasiprobability values on a grid; rows hold fixed Im α.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    pub spec: GridSpec,
    pub values: Array2<f64>,
    pub cell_area: f64,
}

impl PhaseSpaceGrid {
    /// Quadrature sum Σ values · cell_area.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.cell_area
    }

    /// Value at the grid node nearest to α = 0 (exact when the grid has odd
    /// point counts and symmetric bounds).
    pub fn origin_value(&self) -> f64 {
        let j = ((-self.spec.re_min) / self.spec.spacing_re()).round() as usize;
        let i = ((-self.spec.im_min) / self.spec.spacing_im()).round() as usize;
        self.values[[i.min(self.spec.n_im - 1), j.min(self.spec.n_re - 1)]]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV rendering: two `#` header lines with the axis metadata, then
    /// `n_im` rows of `n_re` comma-separated values (row = fixed Im α).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# {},{},{}\n",
            self.spec.re_min, self.spec.re_max, self.spec.n_re
        ));
        out.push_str(&format!(
            "# {},{},{}\n",
            self.spec.im_min, self.spec.im_max, self.spec.n_im
        ));
        for i in 0..self.spec.n_im {
            let row: Vec<String> = (0..self.spec.n_re)
                .map(|j| format!("{:.12e}", self.values[[i, j]]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn field_matrix<'a>(rho_f: &'a DensityMatrix, what: &str) -> Result<(&'a [C64], usize)> {
    match rho_f.space() {
        Space::Field(n) => Ok((
            rho_f
                .matrix()
                .as_slice()
                .expect("states are contiguous row-major"),
            n,
        )),
        other => Err(Error::SpaceMismatch(format!(
            "{what} needs a field-only state, got {other:?} (partial-trace joint states first)"
        ))),
    }
}

fn check_coverage(grid: &PhaseSpaceGrid) -> Result<()> {
    let integral = grid.integral();
    if (integral - 1.0).abs() > COVERAGE_TOL {
        return Err(Error::GridCoverage {
            integral,
            tol: COVERAGE_TOL,
        });
    }
    Ok(())
}

/// Husimi-Kano Q function Q(α) = (1/π)⟨α|ρ_f|α⟩ on a grid.
pub fn q_function(rho_f: &DensityMatrix, spec: GridSpec) -> Result<PhaseSpaceGrid> {
    let spec = spec.validated()?;
    let (rho, n) = field_matrix(rho_f, "q_function")?;
    let mut values: Array2<f64> = Array2::zeros((spec.n_im, spec.n_re));
    let vals = values.as_slice_mut().expect("contiguous grid values");
    let worst_imag = vals
        .par_chunks_exact_mut(spec.n_re)
        .enumerate()
        .map(|(i, row)| {
            let mut v = vec![C64::new(0.0, 0.0); n];
            let mut worst = 0.0_f64;
            for (j, slot) in row.iter_mut().enumerate() {
                let alpha = spec.alpha(i, j);
                // v_k = e^{-|α|²/2} α^k/√k!
                v[0] = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
                for k in 1..n {
                    v[k] = v[k - 1] * alpha / C64::new((k as f64).sqrt(), 0.0);
                }
                let mut q = C64::new(0.0, 0.0);
                for m in 0..n {
                    let mut w = C64::new(0.0, 0.0);
                    let rrow = &rho[m * n..(m + 1) * n];
                    for k in 0..n {
                        w += rrow[k] * v[k];
                    }
                    q += v[m].conj() * w;
                }
                worst = worst.max(q.im.abs());
                *slot = q.re / std::f64::consts::PI;
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    if worst_imag > IMAG_RESIDUE_TOL {
        return Err(Error::NotAState(format!(
            "Q function has imaginary residue {worst_imag:.3e} (input not Hermitian?)"
        )));
    }
    let grid = PhaseSpaceGrid {
        spec,
        values,
        cell_area: spec.cell_area(),
    };
    check_coverage(&grid)?;
    Ok(grid)
}

/// Scaled kernel column g_n = √(n!/(n+k)!) (2r)^k e^{-2r²} L_n^(k)(4r²) for
/// n = 0..len, via upward recurrence from the log-space seed `g0`.
fn scaled_laguerre_terms(k: usize, x: f64, g0: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = g0;
    if out.len() == 1 {
        return;
    }
    let kf = k as f64;
    out[1] = g0 * (1.0 + kf - x) / (1.0 + kf).sqrt();
    for n in 1..out.len() - 1 {
        let nf = n as f64;
        out[n + 1] = ((2.0 * nf + kf + 1.0 - x) * out[n]
            - (nf + kf).sqrt() * (nf).sqrt() * out[n - 1])
            / ((nf + 1.0) * (nf + kf + 1.0)).sqrt();
    }
}

/// Wigner function on a grid, evaluated from the Fock-basis kernel.
pub fn wigner_function(rho_f: &DensityMatrix, spec: GridSpec) -> Result<PhaseSpaceGrid> {
    let spec = spec.validated()?;
    let (rho, n) = field_matrix(rho_f, "wigner_function")?;

    // Pull out the sub-diagonals ρ[n+k, n] once; most evolved field states
    // are diagonal and the k > 0 work is skipped entirely.
    let mut diags: Vec<Vec<C64>> = Vec::with_capacity(n);
    for k in 0..n {
        let d: Vec<C64> = (0..n - k).map(|m| rho[(m + k) * n + m]).collect();
        diags.push(d);
    }
    let active: Vec<bool> = diags
        .iter()
        .map(|d| d.iter().any(|z| *z != C64::new(0.0, 0.0)))
        .collect();
    // ln m! table for the log-space prefactors.
    let mut ln_fact = vec![0.0_f64; n + 1];
    for m in 1..=n {
        ln_fact[m] = ln_fact[m - 1] + (m as f64).ln();
    }

    let mut values: Array2<f64> = Array2::zeros((spec.n_im, spec.n_re));
    let vals = values.as_slice_mut().expect("contiguous grid values");
    vals.par_chunks_exact_mut(spec.n_re)
        .enumerate()
        .for_each(|(i, row)| {
            let mut g = vec![0.0_f64; n];
            for (j, slot) in row.iter_mut().enumerate() {
                let alpha = spec.alpha(i, j);
                let r2 = alpha.norm_sqr();
                let x = 4.0 * r2;
                let r = r2.sqrt();

                // k = 0: ordinary Laguerre terms against the populations.
                scaled_laguerre_terms(0, x, (-2.0 * r2).exp(), &mut g[..n]);
                let mut w = 0.0;
                let mut sign = 1.0;
                for (m, &p) in diags[0].iter().enumerate() {
                    w += sign * p.re * g[m];
                    sign = -sign;
                }

                // k > 0: coherence diagonals, each carrying (2α*)^k.
                if r > 0.0 {
                    let unit_phase = alpha.conj() / C64::new(r, 0.0);
                    for (k, d) in diags.iter().enumerate().skip(1) {
                        if !active[k] {
                            continue;
                        }
                        let ln_g0 =
                            k as f64 * (2.0 * r).ln() - 0.5 * ln_fact[k] - 2.0 * r2;
                        let g0 = ln_g0.exp();
                        if g0 == 0.0 {
                            continue;
                        }
                        let len = n - k;
                        scaled_laguerre_terms(k, x, g0, &mut g[..len]);
                        let phase = unit_phase.powi(k as i32);
                        let mut s = 0.0;
                        let mut sign = 1.0;
                        for (m, z) in d.iter().enumerate() {
                            s += sign * (z * phase).re * g[m];
                            sign = -sign;
                        }
                        w += 2.0 * s;
                    }
                }
                *slot = w * 2.0 / std::f64::consts::PI;
            }
        });

    let grid = PhaseSpaceGrid {
        spec,
        values,
        cell_area: spec.cell_area(),
    };
    check_coverage(&grid)?;
    Ok(grid)
}

/// ⟨Π_f⟩ = Σ_n (-1)^n ⟨n|ρ_f|n⟩. Equals (π/2)·W(0) exactly.
pub fn parity_expectation(rho_f: &DensityMatrix) -> Result<f64> {
    let (rho, n) = field_matrix(rho_f, "parity_expectation")?;
    let mut p = C64::new(0.0, 0.0);
    let mut sign = 1.0;
    for m in 0..n {
        p += rho[m * n + m] * sign;
        sign = -sign;
    }
    if p.im.abs() > IMAG_RESIDUE_TOL {
        return Err(Error::NotAState(format!(
            "parity has imaginary part {:.3e}",
            p.im
        )));
    }
    Ok(p.re)
}

/// Negativity diagnostics of a Wigner grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityMetrics {
    pub min_value: f64,
    /// (Re α, Im α) of the minimum cell.
    pub min_location: (f64, f64),
    /// Σ max(0, -W)·cell_area.
    pub negative_volume: f64,
}

pub fn negativity_metrics(grid: &PhaseSpaceGrid) -> NegativityMetrics {
    let mut min_value = f64::INFINITY;
    let mut min_ij = (0usize, 0usize);
    let mut neg = 0.0;
    for i in 0..grid.spec.n_im {
        for j in 0..grid.spec.n_re {
            let v = grid.values[[i, j]];
            if v < min_value {
                min_value = v;
                min_ij = (i, j);
            }
            if v < 0.0 {
                neg -= v;
            }
        }
    }
    let a = grid.spec.alpha(min_ij.0, min_ij.1);
    NegativityMetrics {
        min_value,
        min_location: (a.re, a.im),
        negative_volume: neg * grid.cell_area,
    }
}

/// Distance measures between grids of identical specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridNorm {
    MaxAbs,
    IntegratedAbs,
}

pub fn grid_distance(a: &PhaseSpaceGrid, b: &PhaseSpaceGrid, norm: GridNorm) -> Result<f64> {
    if a.spec != b.spec {
        return Err(Error::GridMismatch(format!(
            "{:?} vs {:?}",
            a.spec, b.spec
        )));
    }
    let d = match norm {
        GridNorm::MaxAbs => a
            .values
            .iter()
            .zip(b.values.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0_f64, f64::max),
        GridNorm::IntegratedAbs => {
            a.values
                .iter()
                .zip(b.values.iter())
                .map(|(x, y)| (x - y).abs())
                .sum::<f64>()
                * a.cell_area
        }
    };
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{build_field_state, FieldStateSpec};
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fock(n: usize, dim: usize) -> DensityMatrix {
        build_field_state(&FieldStateSpec::Fock(n), dim).unwrap().rho
    }

    /// Ordinary Laguerre polynomials for n ≤ 4, written out.
    fn laguerre_small(n: usize, x: f64) -> f64 {
        match n {
            0 => 1.0,
            1 => 1.0 - x,
            2 => 1.0 - 2.0 * x + x * x / 2.0,
            3 => 1.0 - 3.0 * x + 1.5 * x * x - x * x * x / 6.0,
            4 => 1.0 - 4.0 * x + 3.0 * x * x - 2.0 * x * x * x / 3.0 + x.powi(4) / 24.0,
            _ => unreachable!(),
        }
    }

    /// Generalized Laguerre via the exact binomial series,
    /// L_n^(k)(x) = Σ_i (-1)^i C(n+k, n-i) x^i / i!.
    fn laguerre_series(n: usize, k: usize, x: f64) -> f64 {
        let binom = |top: u128, bot: u128| -> f64 {
            let mut v = 1.0f64;
            for i in 0..bot {
                v *= (top - i) as f64 / (i + 1) as f64;
            }
            v
        };
        let mut s = 0.0;
        let mut xi = 1.0;
        let mut fact = 1.0;
        for i in 0..=n {
            if i > 0 {
                xi *= x;
                fact *= i as f64;
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binom((n + k) as u128, (n - i) as u128) * xi / fact;
        }
        s
    }

    #[test]
    fn scaled_recurrence_matches_series() {
        let mut out = vec![0.0; 7];
        for k in 0..5usize {
            for &r in &[0.3, 0.9, 1.7, 2.4] {
                let r2: f64 = r * r;
                let x = 4.0 * r2;
                let g0 = ((k as f64) * (2.0 * r).ln()
                    - 0.5 * (1..=k).map(|m| (m as f64).ln()).sum::<f64>()
                    - 2.0 * r2)
                    .exp();
                scaled_laguerre_terms(k, x, g0, &mut out);
                for n in 0..7usize {
                    // √(n!/(n+k)!) (2r)^k e^{-2r²} L_n^(k)(x)
                    let mut ratio = 1.0;
                    for m in n + 1..=n + k {
                        ratio /= m as f64;
                    }
                    let expect =
                        ratio.sqrt() * (2.0 * r).powi(k as i32) * (-2.0 * r2).exp()
                            * laguerre_series(n, k, x);
                    assert_abs_diff_eq!(out[n], expect, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn vacuum_q_and_w() {
        let rho = fock(0, 12);
        let spec = GridSpec::square(6.0, 121);
        let q = q_function(&rho, spec).unwrap();
        let w = wigner_function(&rho, spec).unwrap();
        assert_abs_diff_eq!(q.origin_value(), 1.0 / PI, epsilon = 1e-12);
        assert_abs_diff_eq!(w.origin_value(), 2.0 / PI, epsilon = 1e-12);
        // Pointwise Gaussians.
        let a = spec.alpha(70, 44);
        let r2 = a.norm_sqr();
        assert_abs_diff_eq!(
            q.values[[70, 44]],
            (-r2).exp() / PI,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            w.values[[70, 44]],
            2.0 / PI * (-2.0 * r2).exp(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(q.integral(), 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(w.integral(), 1.0, epsilon = 1e-3);

        let neg = negativity_metrics(&w);
        assert!(neg.min_value >= 0.0);
        assert_eq!(neg.negative_volume, 0.0);
    }

    #[test]
    fn coherent_state_q_and_w_gaussians() {
        let beta = c(1.3, -0.7);
        let rho = build_field_state(&FieldStateSpec::Coherent(beta), 40)
            .unwrap()
            .rho;
        let spec = GridSpec::square(6.5, 131);
        let q = q_function(&rho, spec).unwrap();
        let w = wigner_function(&rho, spec).unwrap();
        for &(i, j) in &[(65usize, 65usize), (80, 70), (50, 91), (72, 55)] {
            let a = spec.alpha(i, j);
            let d2 = (a - beta).norm_sqr();
            assert_abs_diff_eq!(q.values[[i, j]], (-d2).exp() / PI, epsilon = 1e-9);
            assert_abs_diff_eq!(
                w.values[[i, j]],
                2.0 / PI * (-2.0 * d2).exp(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn fock_wigner_values() {
        let spec = GridSpec::square(4.0, 161);
        for n in 0..=4usize {
            let rho = fock(n, 24);
            let w = wigner_function(&rho, spec).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(w.origin_value(), sign * 2.0 / PI, epsilon = 1e-11);
            for &(i, j) in &[(80usize, 100usize), (95, 88), (60, 60)] {
                let r2 = spec.alpha(i, j).norm_sqr();
                let expect = 2.0 / PI * sign * (-2.0 * r2).exp() * laguerre_small(n, 4.0 * r2);
                assert_abs_diff_eq!(w.values[[i, j]], expect, epsilon = 1e-11);
            }
        }

        // fock(1) minimum sits at the origin.
        let w1 = wigner_function(&fock(1, 24), spec).unwrap();
        let neg = negativity_metrics(&w1);
        assert_abs_diff_eq!(neg.min_value, -2.0 / PI, epsilon = 1e-12);
        assert_abs_diff_eq!(neg.min_location.0, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(neg.min_location.1, 0.0, epsilon = 1e-12);
        assert!(neg.negative_volume > 0.0);
    }

    #[test]
    fn fock4_minimum_is_a_ring_off_origin() {
        // Scan the radial closed form (2/π)e^{-2r²}L_4(4r²) for the true
        // minimum, then compare with the grid scan.
        let mut best = (0.0_f64, f64::INFINITY);
        let mut r = 0.0_f64;
        while r < 4.0 {
            let v = 2.0 / PI * (-2.0 * r * r).exp() * laguerre_small(4, 4.0 * r * r);
            if v < best.1 {
                best = (r, v);
            }
            r += 1e-4;
        }
        assert!(best.0 > 0.2, "minimum should sit away from the origin");

        let spec = GridSpec::square(4.0, 401);
        let w = wigner_function(&fock(4, 24), spec).unwrap();
        assert_abs_diff_eq!(w.origin_value(), 2.0 / PI, epsilon = 1e-11);
        let neg = negativity_metrics(&w);
        let r_min = (neg.min_location.0.powi(2) + neg.min_location.1.powi(2)).sqrt();
        assert_abs_diff_eq!(r_min, best.0, epsilon = 2.0 * spec.spacing_re());
        assert_abs_diff_eq!(neg.min_value, best.1, epsilon = 1e-4);
    }

    #[test]
    fn parity_values() {
        assert_abs_diff_eq!(parity_expectation(&fock(3, 12)).unwrap(), -1.0);
        assert_abs_diff_eq!(parity_expectation(&fock(0, 12)).unwrap(), 1.0);
        let poisson = build_field_state(&FieldStateSpec::PoissonMixed(4.0), 40)
            .unwrap()
            .rho;
        assert_abs_diff_eq!(
            parity_expectation(&poisson).unwrap(),
            (-8.0f64).exp(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn origin_parity_identity_random_diagonal_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let n = 24;
        let spec = GridSpec::square(7.0, 141);
        for _ in 0..5 {
            let mut weights: Vec<f64> = (0..n)
                .map(|k| rng.random::<f64>() * (-(k as f64) / 6.0).exp())
                .collect();
            let z: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= z;
            }
            let mut m: Array2<C64> = Array2::zeros((n, n));
            for (k, &w) in weights.iter().enumerate() {
                m[[k, k]] = c(w, 0.0);
            }
            let rho = DensityMatrix::try_new(Space::Field(n), m).unwrap();
            let w = wigner_function(&rho, spec).unwrap();
            let parity = parity_expectation(&rho).unwrap();
            assert_abs_diff_eq!(w.origin_value(), 2.0 / PI * parity, epsilon = 1e-9);
        }
    }

    #[test]
    fn diagonal_states_are_rotationally_symmetric() {
        let rho = build_field_state(&FieldStateSpec::PoissonMixed(4.0), 40)
            .unwrap()
            .rho;
        let spec = GridSpec::square(7.0, 141);
        let q = q_function(&rho, spec).unwrap();
        // Compare the four axis points at the same radius.
        let mid = 70usize;
        let k = 28usize;
        let vals = [
            q.values[[mid, mid + k]],
            q.values[[mid, mid - k]],
            q.values[[mid + k, mid]],
            q.values[[mid - k, mid]],
        ];
        for v in &vals[1..] {
            assert_abs_diff_eq!(vals[0], *v, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(q.integral(), 1.0, epsilon = 1e-3);
    }

    #[test]
    fn grid_distance_basics() {
        let rho = fock(2, 16);
        let spec = GridSpec::square(5.0, 81);
        let w = wigner_function(&rho, spec).unwrap();
        assert_eq!(grid_distance(&w, &w, GridNorm::MaxAbs).unwrap(), 0.0);
        assert_eq!(grid_distance(&w, &w, GridNorm::IntegratedAbs).unwrap(), 0.0);

        let other = wigner_function(&rho, GridSpec::square(5.0, 91)).unwrap();
        assert!(grid_distance(&w, &other, GridNorm::MaxAbs).is_err());

        // fock(1) vs vacuum: the parity gap 4/π at the origin dominates the
        // max-abs distance.
        let w1 = wigner_function(&fock(1, 16), spec).unwrap();
        let w0 = wigner_function(&fock(0, 16), spec).unwrap();
        let d = grid_distance(&w1, &w0, GridNorm::MaxAbs).unwrap();
        assert_abs_diff_eq!(d, 4.0 / PI, epsilon = 1e-9);
    }

    #[test]
    fn undersized_grid_is_rejected() {
        let rho = build_field_state(&FieldStateSpec::PoissonMixed(4.0), 40)
            .unwrap()
            .rho;
        let spec = GridSpec::square(1.5, 41);
        assert!(matches!(
            q_function(&rho, spec),
            Err(Error::GridCoverage { .. })
        ));
    }

    #[test]
    fn joint_states_are_rejected() {
        use crate::hilbert::{build_joint_state, AtomStateSpec, HilbertLayout};
        let layout = HilbertLayout::new(8).unwrap();
        let joint = build_joint_state(
            &AtomStateSpec::Level(1),
            &FieldStateSpec::Vacuum,
            layout,
        )
        .unwrap()
        .rho;
        assert!(q_function(&joint, GridSpec::square(4.0, 41)).is_err());
        assert!(parity_expectation(&joint).is_err());
    }
}

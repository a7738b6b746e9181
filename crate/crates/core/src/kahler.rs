//! Fubini–Study potentials, finite-difference Kähler metrics, potential
//! gluing and ball-packing volumes.
//!
//! Metrics are complex Hessians `g_{jk̄} = ∂²φ/∂z_j∂z̄_k` with no `i/2π`
//! factor. Volumes use the normalisation in which `(ℙⁿ, ω_FS)` and the
//! standard unit ball both have volume 1.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::interpolation::{form_count, monomial_basis, Exponents};
use crate::picard::SeshadriBounds;
use crate::rational::{to_f64, Rational};

/// One term `c · |Y^α|² |T|^{2β}` of `(|Y|² + |T|²)^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsTerm {
    pub alpha: Exponents,
    pub beta: u32,
    pub c: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsExpansion {
    pub m: u32,
    pub n: usize,
    pub terms: Vec<FsTerm>,
}

/// `(Σ aᵢ)! / Π aᵢ!`.
pub fn multinomial(parts: &[u32]) -> BigInt {
    let mut acc = BigInt::one();
    let mut total = 0u64;
    for &a in parts {
        for j in 1..=u64::from(a) {
            total += 1;
            acc = acc * BigInt::from(total) / BigInt::from(j);
        }
    }
    acc
}

/// Multinomial expansion of `(|Y₁|² + … + |Yₙ|² + |T|²)^m`, terms ordered by
/// `monomial_basis(n, m)` on `(Y₁, …, Yₙ, T)`.
pub fn fs_expansion(m: u32, n: usize) -> FsExpansion {
    let terms: Vec<FsTerm> = monomial_basis(n, m)
        .into_iter()
        .map(|e| FsTerm {
            c: multinomial(&e),
            beta: e[n],
            alpha: e[..n].to_vec(),
        })
        .collect();
    debug_assert_eq!(terms.len(), form_count(n, m));
    debug_assert_eq!(
        terms.iter().map(|t| t.c.clone()).sum::<BigInt>(),
        num_traits::pow(BigInt::from(n + 1), m as usize)
    );
    FsExpansion { m, n, terms }
}

/// `log Σ c |Y^α|²` in the chart `T = 1`.
pub fn potential_from_sections(exp: &FsExpansion, y: &[Complex64]) -> Result<f64> {
    if y.len() != exp.n {
        return Err(Error::DimensionMismatch(format!("point has {} coordinates, expected {}", y.len(), exp.n)));
    }
    if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Range("point is not finite".into()));
    }
    let norms: Vec<f64> = y.iter().map(|z| z.norm_sqr()).collect();
    // the constant term is split off so that small |Y| keeps full precision
    let mut rest = 0.0;
    for t in &exp.terms {
        if t.alpha.iter().all(|&a| a == 0) {
            continue;
        }
        let c = t.c.to_f64().unwrap_or(f64::INFINITY);
        rest += t
            .alpha
            .iter()
            .zip(&norms)
            .fold(c, |acc, (&a, &r)| acc * libm::pow(r, f64::from(a)));
    }
    if !rest.is_finite() {
        return Err(Error::Range("sum of squared sections overflows".into()));
    }
    Ok(libm::log1p(rest))
}

/// `m · log(1 + |z|²)`.
pub fn fs_potential(m: u32, z: &[Complex64]) -> f64 {
    f64::from(m) * libm::log1p(z.iter().map(Complex64::norm_sqr).sum())
}

/// `|z|²`, the potential of the standard form.
pub fn flat_potential(z: &[Complex64]) -> f64 {
    z.iter().map(Complex64::norm_sqr).sum()
}

pub const HERMITIAN_TOLERANCE: f64 = 1e-8;

/// A Hermitian `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    matrix: DMatrix<Complex64>,
}

impl Metric {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.matrix[(j, k)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn max_abs_diff(&self, other: &Metric) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Diagonally pivoted Cholesky elimination; every pivot must be positive.
    pub fn is_positive_definite(&self) -> bool {
        let mut a = self.matrix.clone();
        let n = a.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        for step in 0..n {
            let (best, pivot) = order[step..]
                .iter()
                .map(|&i| (i, a[(i, i)].re))
                .fold((usize::MAX, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pivot.is_nan() || pivot <= 0.0 {
                return false;
            }
            let pos = order.iter().position(|&i| i == best).expect("pivot index");
            order.swap(step, pos);
            for &i in &order[step + 1..] {
                let l = a[(i, best)] / pivot;
                for &j in &order[step + 1..] {
                    let update = l * a[(best, j)];
                    a[(i, j)] -= update;
                }
            }
        }
        true
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Second derivative of `f` at `p` along `dir`, fourth-order central stencil.
fn second_directional(f: &impl Fn(&[f64]) -> f64, p: &[f64], dir: &[(usize, f64)], h: f64) -> f64 {
    let at = |s: f64| {
        let mut q = p.to_vec();
        for &(i, w) in dir {
            q[i] += s * w;
        }
        f(&q)
    };
    (-at(2.0 * h) + 16.0 * at(h) - 30.0 * at(0.0) + 16.0 * at(-h) - at(-2.0 * h)) / (12.0 * h * h)
}

/// Complex Hessian of a real potential by central finite differences in the
/// real coordinates `x_j = Re z_j`, `y_j = Im z_j`.
pub fn metric_fd(potential: impl Fn(&[Complex64]) -> f64, point: &[Complex64], h: f64) -> Result<Metric> {
    if !(1e-6..=1e-2).contains(&h) {
        return Err(Error::InvalidParameter(format!("step {h} outside [1e-6, 1e-2]")));
    }
    let n = point.len();
    let real = |q: &[f64]| {
        let z: Vec<Complex64> = (0..n).map(|j| Complex64::new(q[2 * j], q[2 * j + 1])).collect();
        potential(&z)
    };
    let p: Vec<f64> = point.iter().flat_map(|z| [z.re, z.im]).collect();
    let dim = 2 * n;
    let mut hess = DMatrix::<f64>::zeros(dim, dim);
    for a in 0..dim {
        hess[(a, a)] = second_directional(&real, &p, &[(a, 1.0)], h);
        for b in 0..a {
            let plus = second_directional(&real, &p, &[(a, 1.0), (b, 1.0)], h);
            let minus = second_directional(&real, &p, &[(a, 1.0), (b, -1.0)], h);
            hess[(a, b)] = (plus - minus) / 4.0;
            hess[(b, a)] = hess[(a, b)];
        }
    }
    let (x, y) = (|j: usize| 2 * j, |j: usize| 2 * j + 1);
    let m = DMatrix::from_fn(n, n, |j, k| {
        let re = hess[(x(j), x(k))] + hess[(y(j), y(k))];
        let im = hess[(x(j), y(k))] - hess[(y(j), x(k))];
        Complex64::new(re, im) / 4.0
    });
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for j in 0..n {
        for k in 0..=j {
            let skew = (m[(j, k)] - m[(k, j)].conj()).norm();
            if !skew.is_finite() || skew > HERMITIAN_TOLERANCE * scale {
                return Err(Error::NumericalInstability(format!(
                    "metric not Hermitian at ({j}, {k}): defect {skew:e}"
                )));
            }
        }
    }
    Ok(Metric { matrix: m })
}

/// Quintic smoothstep: 0 for `x ≤ 0`, 1 for `x ≥ 1`, `C²` in between.
pub fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

/// `(ρ₁, ρ₂)` at radius `r`: `ρ₂ = 1` on `|z| ≤ R′`, `ρ₂ = 0` on `|z| ≥ R`.
pub fn partition_of_unity(r: f64, r_inner: f64, r_outer: f64) -> (f64, f64) {
    let rho2 = 1.0 - smoothstep((r - r_inner) / (r_outer - r_inner));
    (1.0 - rho2, rho2)
}

/// Square sampling grid in the `z₁` plane, other coordinates zero, keeping
/// only samples with `|z₁| ≤ radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub side: usize,
    pub radius: f64,
    pub h: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n: 2,
            side: 21,
            radius: 2.0,
            h: 1e-4,
        }
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<Vec<Complex64>> {
        let step = if self.side > 1 {
            2.0 * self.radius / (self.side - 1) as f64
        } else {
            0.0
        };
        let coord = |i: usize| if self.side > 1 { -self.radius + step * i as f64 } else { 0.0 };
        let mut out = Vec::new();
        for a in 0..self.side {
            for b in 0..self.side {
                let z1 = Complex64::new(coord(a), coord(b));
                if z1.norm() <= self.radius * (1.0 + 1e-12) {
                    let mut z = vec![Complex64::new(0.0, 0.0); self.n];
                    z[0] = z1;
                    out.push(z);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub n: usize,
    pub points: Vec<Vec<Complex64>>,
    pub values: Vec<f64>,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub point: Vec<Complex64>,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlueReport {
    pub grid: PotentialGrid,
    pub r_inner: f64,
    pub r_outer: f64,
    /// Smallest eigenvalue of the glued metric over the grid.
    pub min_eigenvalue: f64,
    /// Smallest eigenvalue of the metric of `log s_outer` over the grid.
    pub unglued_min_eigenvalue: f64,
    /// `sup |s_inner − s_outer| / s_outer` over grid samples with
    /// `R′ ≤ |z| ≤ R`.
    pub sup_perturbation: f64,
    /// Grid sample with the smallest eigenvalue among those where the glued
    /// metric fails to be positive definite.
    pub violation: Option<Violation>,
}

impl GlueReport {
    pub fn positive_definite(&self) -> bool {
        self.violation.is_none()
    }

    pub fn eigenvalue_gap(&self) -> f64 {
        (self.min_eigenvalue - self.unglued_min_eigenvalue).abs()
    }
}

/// Samples `log(ρ₁(s_inner − s_outer) + s_outer)` on the grid and checks that
/// its complex Hessian is positive definite at every sample.
pub fn glue_potentials(
    s_inner: impl Fn(&[Complex64]) -> f64,
    s_outer: impl Fn(&[Complex64]) -> f64,
    r_inner: f64,
    r_outer: f64,
    grid: &GridSpec,
) -> Result<GlueReport> {
    if !(r_inner > 0.0 && r_inner < r_outer) {
        return Err(Error::InvalidParameter(format!("radii must satisfy 0 < R' < R, got {r_inner}, {r_outer}")));
    }
    let mix = |z: &[Complex64]| {
        let (rho1, _) = partition_of_unity(norm(z), r_inner, r_outer);
        let (si, so) = (s_inner(z), s_outer(z));
        rho1 * (si - so) + so
    };
    let glued = |z: &[Complex64]| libm::log(mix(z));
    let unglued = |z: &[Complex64]| libm::log(s_outer(z));

    let points = grid.points();
    let mut values = Vec::with_capacity(points.len());
    let mut min_eigenvalue = f64::INFINITY;
    let mut unglued_min_eigenvalue = f64::INFINITY;
    let mut sup_perturbation: f64 = 0.0;
    let mut violation = None;
    for z in &points {
        let mixed = mix(z);
        if !(mixed > 0.0 && mixed.is_finite()) {
            return Err(Error::Precondition(format!("glued section sum {mixed} is not positive at {z:?}")));
        }
        values.push(libm::log(mixed));
        let r = norm(z);
        if r >= r_inner && r <= r_outer {
            let so = s_outer(z);
            sup_perturbation = sup_perturbation.max(((s_inner(z) - so) / so).abs());
        }
        let g = metric_fd(glued, z, grid.h)?;
        let lambda = g.min_eigenvalue();
        min_eigenvalue = min_eigenvalue.min(lambda);
        let worse = violation.as_ref().is_none_or(|v: &Violation| lambda < v.min_eigenvalue);
        if worse && !g.is_positive_definite() {
            violation = Some(Violation {
                point: z.clone(),
                min_eigenvalue: lambda,
            });
        }
        unglued_min_eigenvalue = unglued_min_eigenvalue.min(metric_fd(unglued, z, grid.h)?.min_eigenvalue());
    }
    Ok(GlueReport {
        grid: PotentialGrid {
            n: grid.n,
            points,
            values,
            h: grid.h,
        },
        r_inner,
        r_outer,
        min_eigenvalue,
        unglued_min_eigenvalue,
        sup_perturbation,
        violation,
    })
}

fn norm(z: &[Complex64]) -> f64 {
    libm::sqrt(z.iter().map(Complex64::norm_sqr).sum())
}

/// `(1 + |z|²)^m`.
pub fn fs_section_sum(m: u32, z: &[Complex64]) -> f64 {
    libm::pow(1.0 + z.iter().map(Complex64::norm_sqr).sum::<f64>(), f64::from(m))
}

/// `(1 + |z|²)^m (1 + a sin |z|²)`.
pub fn perturbed_section_sum(m: u32, amplitude: f64, z: &[Complex64]) -> f64 {
    let r2: f64 = z.iter().map(Complex64::norm_sqr).sum();
    fs_section_sum(m, z) * (1.0 + amplitude * libm::sin(r2))
}

/// Supremal radius of a standard ball embedding into `(ℙⁿ, (m/d) ω_FS)`.
pub fn max_ball_radius(m: u32, d: u32) -> f64 {
    libm::sqrt(f64::from(m) / f64::from(d))
}

/// Volume of the radius-`r` ball in `ℂⁿ`, normalised so the unit ball has
/// volume 1.
pub fn ball_volume(r: f64, n: u32) -> f64 {
    libm::pow(r, f64::from(2 * n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingReport {
    pub k: usize,
    pub n: u32,
    pub epsilon: SeshadriBounds,
    pub gamma_lower: f64,
    pub gamma_upper: f64,
    /// Radius of each of the `k` balls, `γ_lower`.
    pub per_ball_radius: f64,
    /// `k · ε_upperⁿ`.
    pub total_ball_volume: f64,
    pub ambient_volume: f64,
}

/// Packing radii `γ = √ε` and the volume they occupy.
pub fn packing_report(k: usize, bounds: SeshadriBounds, n: u32) -> Result<PackingReport> {
    if bounds.k != k {
        return Err(Error::InvalidParameter(format!("bounds are for {} points, not {k}", bounds.k)));
    }
    let total = Rational::from_integer(BigInt::from(k)) * num_traits::pow(bounds.upper.clone(), n as usize);
    if total > Rational::one() {
        return Err(Error::BoundInconsistency(format!(
            "{k} balls of volume ({})^{n} exceed the ambient volume 1",
            bounds.upper
        )));
    }
    let gamma_lower = libm::sqrt(to_f64(&bounds.lower));
    let gamma_upper = libm::sqrt(to_f64(&bounds.upper));
    Ok(PackingReport {
        k,
        n,
        gamma_lower,
        gamma_upper,
        per_ball_radius: gamma_lower,
        total_ball_volume: to_f64(&total),
        ambient_volume: 1.0,
        epsilon: bounds,
    })
}

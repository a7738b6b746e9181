//! Fat-point linear systems on `Pⁿ` over the rationals.
//!
//! Degree-`d` forms are coordinate vectors over [`monomial_basis`]. A point
//! carries an affine chart (the coordinate set to 1) and local coordinates
//! `y = u − p` on the remaining affine coordinates `u`; jets are Taylor
//! coefficients of the dehomogenised form in `y`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::{abs_numer_cmp, Rational};

/// A degree-`d` form as coordinates over `monomial_basis(n, d)`.
pub type Form = Vec<Rational>;

/// Exponent vector of a monomial.
pub type Exponents = Vec<u32>;

/// Random coordinates are drawn from `[-COORD_RANGE, COORD_RANGE]`.
pub const COORD_RANGE: i64 = 1_000_000;

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of degree-`d` monomials in `n + 1` variables.
pub fn form_count(n: usize, d: u32) -> usize {
    binomial(u64::from(d) + n as u64, n as u64) as usize
}

/// Exponent vectors of total degree `d` in `n + 1` variables, graded
/// lexicographic (first variable highest).
pub fn monomial_basis(n: usize, d: u32) -> Vec<Exponents> {
    let mut out = Vec::with_capacity(form_count(n, d));
    let mut cur = vec![0u32; n + 1];
    fill_monomials(&mut cur, 0, d, &mut out);
    out
}

fn fill_monomials(cur: &mut [u32], pos: usize, left: u32, out: &mut Vec<Exponents>) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.to_vec());
        return;
    }
    for e in (0..=left).rev() {
        cur[pos] = e;
        fill_monomials(cur, pos + 1, left - e, out);
    }
}

/// Local monomials `y^β` in `n` variables with `|β| ≤ max_degree`, by degree
/// and then graded lexicographic.
pub fn jet_monomials(n: usize, max_degree: u32) -> Vec<Exponents> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (0..=max_degree).flat_map(|e| monomial_basis(n - 1, e)).collect()
}

/// `k` distinct points of `Pⁿ` with exact homogeneous coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConfiguration {
    ambient_dim: usize,
    points: Vec<Vec<Rational>>,
    charts: Vec<usize>,
    /// Affine coordinates of each point in its chart (chart coordinate dropped).
    affine: Vec<Vec<Rational>>,
    seed: Option<u64>,
}

impl PointConfiguration {
    pub fn new(ambient_dim: usize, points: Vec<Vec<Rational>>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidConfiguration("ambient dimension must be positive".into()));
        }
        let mut charts = Vec::with_capacity(points.len());
        let mut affine = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.len() != ambient_dim + 1 {
                return Err(Error::InvalidConfiguration(format!(
                    "point {} has {} coordinates, expected {}",
                    i + 1,
                    p.len(),
                    ambient_dim + 1
                )));
            }
            if p.iter().all(Zero::is_zero) {
                return Err(Error::InvalidConfiguration(format!("point {} is all zero", i + 1)));
            }
            // largest |numerator|, ties to the lowest index
            let chart = (0..p.len()).fold(0, |best, j| {
                if abs_numer_cmp(&p[j], &p[best]).is_gt() {
                    j
                } else {
                    best
                }
            });
            let scale = p[chart].recip();
            affine.push(
                p.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != chart)
                    .map(|(_, x)| x * &scale)
                    .collect(),
            );
            charts.push(chart);
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if projectively_equal(&points[i], &points[j]) {
                    return Err(Error::InvalidConfiguration(format!(
                        "points {} and {} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self {
            ambient_dim,
            points,
            charts,
            affine,
            seed: None,
        })
    }

    pub fn from_integers(ambient_dim: usize, points: &[&[i64]]) -> Result<Self> {
        Self::new(
            ambient_dim,
            points
                .iter()
                .map(|p| p.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
                .collect(),
        )
    }

    /// `k` points with integer coordinates drawn uniformly from
    /// `[-10⁶, 10⁶]` by a ChaCha8 generator seeded with `seed`.
    pub fn random(ambient_dim: usize, k: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..k)
            .map(|_| {
                (0..=ambient_dim)
                    .map(|_| Rational::from_integer(BigInt::from(rng.gen_range(-COORD_RANGE..=COORD_RANGE))))
                    .collect()
            })
            .collect();
        let mut cfg = Self::new(ambient_dim, points)?;
        cfg.seed = Some(seed);
        Ok(cfg)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[Rational] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    pub fn chart(&self, i: usize) -> usize {
        self.charts[i]
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// The first `i` points.
    pub fn prefix(&self, i: usize) -> Self {
        Self {
            ambient_dim: self.ambient_dim,
            points: self.points[..i].to_vec(),
            charts: self.charts[..i].to_vec(),
            affine: self.affine[..i].to_vec(),
            seed: self.seed,
        }
    }

    /// Row functionals `f ↦ [y^β] f(p + y)` for `|β| ≤ max_order`, in jet
    /// order, on degree-`d` forms.
    pub fn jet_rows(&self, i: usize, d: u32, max_order: u32) -> Vec<Vec<Rational>> {
        let n = self.ambient_dim;
        let chart = self.charts[i];
        let p = &self.affine[i];
        let table = |x: &BigInt| {
            let mut v = Vec::with_capacity(d as usize + 1);
            let mut acc = BigInt::one();
            for _ in 0..=d {
                v.push(acc.clone());
                acc *= x;
            }
            v
        };
        let numer_powers: Vec<Vec<BigInt>> = p.iter().map(|x| table(x.numer())).collect();
        let denom_powers: Vec<Vec<BigInt>> = p.iter().map(|x| table(x.denom())).collect();
        let monomials = monomial_basis(n, d);
        jet_monomials(n, max_order)
            .into_iter()
            .map(|beta| {
                monomials
                    .iter()
                    .map(|a| {
                        let local = a.iter().enumerate().filter(|&(j, _)| j != chart).map(|(_, &e)| e);
                        let mut numer = BigInt::one();
                        let mut denom = BigInt::one();
                        for (j, (e, &b)) in local.zip(&beta).enumerate() {
                            if b > e {
                                return Rational::zero();
                            }
                            let k = (e - b) as usize;
                            numer *= &numer_powers[j][k] * binomial(u64::from(e), u64::from(b));
                            denom *= &denom_powers[j][k];
                        }
                        Rational::new(numer, denom)
                    })
                    .collect()
            })
            .collect()
    }

    /// Taylor coefficients `(β, [y^β] f(p + y))` of a degree-`d` form at point
    /// `i`, for all `|β| ≤ d`, in jet order.
    pub fn taylor_coefficients(&self, i: usize, d: u32, form: &[Rational]) -> Vec<(Exponents, Rational)> {
        let rows = self.jet_rows(i, d, d);
        jet_monomials(self.ambient_dim, d)
            .into_iter()
            .zip(rows)
            .map(|(beta, row)| (beta, dot(&row, form)))
            .collect()
    }

    /// Vanishing order of a nonzero form at point `i`; `None` for the zero form.
    pub fn vanishing_order(&self, i: usize, d: u32, form: &[Rational]) -> Option<u32> {
        self.taylor_coefficients(i, d, form)
            .into_iter()
            .find(|(_, c)| !c.is_zero())
            .map(|(beta, _)| beta.iter().sum())
    }
}

fn projectively_equal(p: &[Rational], q: &[Rational]) -> bool {
    (0..p.len()).all(|a| (a + 1..p.len()).all(|b| &p[a] * &q[b] == &p[b] * &q[a]))
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Matrix whose kernel is the space of degree-`d` forms vanishing to order
/// at least `mult_requirements[i]` at each point: one row per Taylor
/// coefficient of order `< mult_requirements[i]`, grouped by point.
pub fn conditions_matrix(pts: &PointConfiguration, d: u32, mult_requirements: &[u32]) -> Result<Matrix> {
    if mult_requirements.len() != pts.len() {
        return Err(Error::InvalidParameter(format!(
            "{} multiplicity requirements for {} points",
            mult_requirements.len(),
            pts.len()
        )));
    }
    if let Some(i) = mult_requirements.iter().position(|&m| m == 0) {
        return Err(Error::InvalidParameter(format!(
            "multiplicity requirement at point {} must be at least 1",
            i + 1
        )));
    }
    let rows = mult_requirements
        .iter()
        .enumerate()
        .flat_map(|(i, &m)| pts.jet_rows(i, d, m - 1))
        .collect();
    Ok(Matrix::from_rows(form_count(pts.ambient_dim(), d), rows))
}

/// The linear system of degree-`d` forms with prescribed vanishing orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub degree: u32,
    pub mult_requirements: Vec<u32>,
    pub matrix: Matrix,
    pub rank: usize,
    pub kernel_basis: Vec<Form>,
}

impl LinearSystem {
    pub fn h0(&self) -> usize {
        self.kernel_basis.len()
    }
}

/// `h⁰` of the system (the kernel dimension) together with a kernel basis.
pub fn h0_linear_system(pts: &PointConfiguration, d: u32, mult_requirements: &[u32]) -> Result<LinearSystem> {
    let matrix = conditions_matrix(pts, d, mult_requirements)?;
    let kernel_basis = matrix.kernel();
    let rank = matrix.cols() - kernel_basis.len();
    Ok(LinearSystem {
        degree: d,
        mult_requirements: mult_requirements.to_vec(),
        matrix,
        rank,
        kernel_basis,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surjectivity {
    Surjective,
    Deficient { corank: usize },
}

impl Surjectivity {
    pub fn is_surjective(&self) -> bool {
        matches!(self, Surjectivity::Surjective)
    }
}

/// Size of the jet target `⊕ O/𝔪^{mᵢ+1}`.
pub fn jet_target_dim(n: usize, mults: &[u32]) -> usize {
    mults.iter().map(|&m| form_count(n, m)).sum()
}

fn plus_one(mults: &[u32]) -> Vec<u32> {
    mults.iter().map(|m| m + 1).collect()
}

/// Whether evaluation of degree-`d` forms onto jets of order `≤ mᵢ` at every
/// point is onto.
pub fn evaluation_surjective(pts: &PointConfiguration, d: u32, mults: &[u32]) -> Result<Surjectivity> {
    let m = conditions_matrix(pts, d, &plus_one(mults))?;
    let target = jet_target_dim(pts.ambient_dim(), mults);
    let rank = m.rank();
    Ok(if rank == target {
        Surjective
    } else {
        Deficient { corank: target - rank }
    })
}

use Surjectivity::{Deficient, Surjective};

/// A form realising a single monomial jet at its point and zero jets at the
/// other points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetSection {
    pub form: Form,
    pub jet: Exponents,
}

impl JetSection {
    pub fn jet_degree(&self) -> u32 {
        self.jet.iter().sum()
    }
}

/// Basis of degree-`d` forms adapted to the points: `B₀` vanishes to order
/// `mᵢ + 1` everywhere, `Bᵢ` realises each monomial jet of degree `≤ mᵢ` at
/// `Pᵢ` alone, and `B̃ᵢ ⊆ Bᵢ` are the members of jet degree exactly `mᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionBasisSplit {
    pub ambient_dim: usize,
    pub degree: u32,
    pub mults: Vec<u32>,
    pub b0: Vec<Form>,
    pub b: Vec<Vec<JetSection>>,
}

impl SectionBasisSplit {
    pub fn point_count(&self) -> usize {
        self.mults.len()
    }

    pub fn btilde(&self, i: usize) -> impl Iterator<Item = &JetSection> {
        let m = self.mults[i];
        self.b[i].iter().filter(move |s| s.jet_degree() == m)
    }

    pub fn btilde_len(&self, i: usize) -> usize {
        self.btilde(i).count()
    }

    /// All members, `B₀` first, then each `Bᵢ`.
    pub fn all_forms(&self) -> Vec<Form> {
        self.b0
            .iter()
            .cloned()
            .chain(self.b.iter().flatten().map(|s| s.form.clone()))
            .collect()
    }
}

/// Builds the adapted basis; requires the evaluation map to be onto.
pub fn basis_split(pts: &PointConfiguration, d: u32, mults: &[u32]) -> Result<SectionBasisSplit> {
    let n = pts.ambient_dim();
    let phi = conditions_matrix(pts, d, &plus_one(mults))?;
    let target = jet_target_dim(n, mults);
    let (solutions, b0) = phi
        .right_inverse_and_kernel()
        .ok_or_else(|| Error::SurjectivityRequired {
            corank: target - phi.rank(),
        })?;
    let mut solutions = solutions.into_iter();
    let b: Vec<Vec<JetSection>> = mults
        .iter()
        .map(|&m| {
            jet_monomials(n, m)
                .into_iter()
                .map(|jet| JetSection {
                    form: solutions.next().expect("one solution per jet row"),
                    jet,
                })
                .collect()
        })
        .collect();
    let split = SectionBasisSplit {
        ambient_dim: n,
        degree: d,
        mults: mults.to_vec(),
        b0,
        b,
    };
    check_split(&split, &phi)?;
    Ok(split)
}

/// Checks the cardinalities and that the members form a basis: `Φ` sends the
/// members of the `Bᵢ` to distinct unit vectors and annihilates `B₀`, and
/// `B₀` restricted to its free coordinates (the last nonzero entry of each
/// member) is the identity.
fn check_split(split: &SectionBasisSplit, phi: &Matrix) -> Result<()> {
    let n = split.ambient_dim;
    for (i, &m) in split.mults.iter().enumerate() {
        let full = form_count(n, m);
        let exact = if n == 0 { 1 } else { form_count(n - 1, m) };
        if split.b[i].len() != full || split.btilde_len(i) != exact {
            return Err(Error::InvariantViolation(format!(
                "point {}: |B| = {}, |B~| = {}, expected {full} and {exact}",
                i + 1,
                split.b[i].len(),
                split.btilde_len(i)
            )));
        }
    }
    let total = form_count(n, split.degree);
    let count = split.b0.len() + split.b.iter().map(Vec::len).sum::<usize>();
    if count != total {
        return Err(Error::InvariantViolation(format!("split has {count} members, expected {total}")));
    }
    for (r, s) in split.b.iter().flatten().enumerate() {
        let image = phi.mul_vec(&s.form);
        if image.iter().enumerate().any(|(j, v)| if j == r { !v.is_one() } else { !v.is_zero() }) {
            return Err(Error::InvariantViolation(format!("member {r} does not realise its jet")));
        }
    }
    let free: Vec<usize> = split
        .b0
        .iter()
        .map(|f| f.iter().rposition(|v| !v.is_zero()).unwrap_or(usize::MAX))
        .collect();
    for (idx, f) in split.b0.iter().enumerate() {
        let unit = free.iter().enumerate().all(|(j, &c)| c < f.len() && f[c] == if j == idx { Rational::one() } else { Rational::zero() });
        if !unit || phi.mul_vec(f).iter().any(|v| !v.is_zero()) {
            return Err(Error::InvariantViolation(format!("B0 member {idx} is not a reduced kernel vector")));
        }
    }
    Ok(())
}

/// `B₀ ∪ ⋃_{j≤i} B̃ⱼ ∪ ⋃_{j>i} Bⱼ`: a basis of the forms vanishing to order
/// `≥ mⱼ` at the first `i` points.
pub fn select_subbasis_for_blowup(split: &SectionBasisSplit, i: usize) -> Result<Vec<Form>> {
    let k = split.point_count();
    if i > k {
        return Err(Error::Index { index: i, max: k });
    }
    let mut out = split.b0.clone();
    for j in 0..k {
        if j < i {
            out.extend(split.btilde(j).map(|s| s.form.clone()));
        } else {
            out.extend(split.b[j].iter().map(|s| s.form.clone()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn monomial_counts_and_order() {
        assert_eq!(monomial_basis(2, 1), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(monomial_basis(2, 3).len(), 10);
        assert_eq!(monomial_basis(3, 2).len(), 10);
        assert_eq!(monomial_basis(2, 0), vec![vec![0, 0, 0]]);
        assert_eq!(jet_monomials(2, 1), vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn configuration_validation() {
        assert!(matches!(
            PointConfiguration::from_integers(2, &[&[1, 2, 3], &[2, 4, 6]]),
            Err(Error::InvalidConfiguration(_))
        ));
        assert!(PointConfiguration::from_integers(2, &[&[0, 0, 0]]).is_err());
        assert!(PointConfiguration::from_integers(2, &[&[0, 1]]).is_err());
        let p = PointConfiguration::from_integers(2, &[&[3, -5, 5], &[0, 0, 1]]).unwrap();
        assert_eq!(p.chart(0), 1);
        assert_eq!(p.chart(1), 2);
    }

    #[test]
    fn random_configuration_is_reproducible() {
        let a = PointConfiguration::random(2, 4, 7).unwrap();
        let b = PointConfiguration::random(2, 4, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, PointConfiguration::random(2, 4, 8).unwrap());
        assert!(a
            .points()
            .iter()
            .flatten()
            .all(|x| x.is_integer() && x.numer().magnitude() <= &BigInt::from(COORD_RANGE).magnitude().clone()));
    }

    #[test]
    fn conditions_matrix_shapes() {
        let pts = PointConfiguration::random(2, 5, 1).unwrap();
        let m = conditions_matrix(&pts, 2, &[1; 5]).unwrap();
        assert_eq!((m.rows(), m.cols(), m.rank()), (5, 6, 5));
        let one = PointConfiguration::random(2, 1, 2).unwrap();
        let m = conditions_matrix(&one, 1, &[2]).unwrap();
        assert_eq!((m.rows(), m.cols(), m.rank()), (3, 3, 3));
        let m = conditions_matrix(&one, 0, &[1]).unwrap();
        assert_eq!((m.rows(), m.cols(), m.rank()), (1, 1, 1));
        assert!(matches!(conditions_matrix(&one, 1, &[0]), Err(Error::InvalidParameter(_))));
        assert!(matches!(conditions_matrix(&one, 1, &[1, 1]), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn h0_examples() {
        let five = PointConfiguration::random(2, 5, 3).unwrap();
        assert_eq!(h0_linear_system(&five, 2, &[1; 5]).unwrap().h0(), 1);
        let two = PointConfiguration::random(2, 2, 3).unwrap();
        assert_eq!(h0_linear_system(&two, 3, &[1, 1]).unwrap().h0(), 8);
        let none = PointConfiguration::random(2, 0, 3).unwrap();
        assert_eq!(h0_linear_system(&none, 1, &[]).unwrap().h0(), 3);
    }

    #[test]
    fn surjectivity_examples() {
        let one = PointConfiguration::random(2, 1, 11).unwrap();
        assert_eq!(evaluation_surjective(&one, 1, &[1]).unwrap(), Surjective);
        let two = PointConfiguration::random(2, 2, 11).unwrap();
        assert_eq!(evaluation_surjective(&two, 1, &[1, 1]).unwrap(), Deficient { corank: 3 });
        assert_eq!(evaluation_surjective(&two, 4, &[1, 1]).unwrap(), Surjective);
    }

    #[test]
    fn split_examples() {
        let one = PointConfiguration::random(2, 1, 5).unwrap();
        let s = basis_split(&one, 3, &[1]).unwrap();
        assert_eq!((s.b0.len(), s.b[0].len(), s.btilde_len(0)), (7, 3, 2));
        assert_eq!(select_subbasis_for_blowup(&s, 1).unwrap().len(), 9);
        assert_eq!(select_subbasis_for_blowup(&s, 0).unwrap().len(), 10);

        let s = basis_split(&one, 2, &[2]).unwrap();
        assert_eq!((s.b0.len(), s.b[0].len(), s.btilde_len(0)), (0, 6, 3));
        assert_eq!(select_subbasis_for_blowup(&s, 1).unwrap().len(), 3);
        assert!(matches!(select_subbasis_for_blowup(&s, 2), Err(Error::Index { index: 2, max: 1 })));

        let none = PointConfiguration::random(2, 0, 5).unwrap();
        let s = basis_split(&none, 2, &[]).unwrap();
        assert_eq!(s.b0.len(), 6);

        let two = PointConfiguration::random(2, 2, 5).unwrap();
        assert_eq!(basis_split(&two, 1, &[1, 1]), Err(Error::SurjectivityRequired { corank: 3 }));
    }

    #[test]
    fn split_members_realise_their_jets() {
        let pts = PointConfiguration::random(2, 2, 9).unwrap();
        let s = basis_split(&pts, 4, &[1, 2]).unwrap();
        for (i, members) in s.b.iter().enumerate() {
            for member in members {
                assert_eq!(pts.vanishing_order(i, 4, &member.form), Some(member.jet_degree()));
                let other = 1 - i;
                assert!(pts.vanishing_order(other, 4, &member.form).unwrap() > s.mults[other]);
            }
        }
        for f in &s.b0 {
            assert!(pts.vanishing_order(0, 4, f).unwrap() > 1);
            assert!(pts.vanishing_order(1, 4, f).unwrap() > 2);
        }
    }

    #[test]
    fn vanishing_order_at_origin() {
        let p = PointConfiguration::from_integers(2, &[&[0, 0, 1]]).unwrap();
        // x², xy + y³z⁻¹... use degree 2 forms over x², xy, xz, y², yz, z²
        let x2 = vec![int(1), int(0), int(0), int(0), int(0), int(0)];
        let z2 = vec![int(0), int(0), int(0), int(0), int(0), int(1)];
        assert_eq!(p.vanishing_order(0, 2, &x2), Some(2));
        assert_eq!(p.vanishing_order(0, 2, &z2), Some(0));
        assert_eq!(p.vanishing_order(0, 2, &vec![int(0); 6]), None);
    }
}

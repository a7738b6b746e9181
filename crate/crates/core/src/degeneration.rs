//! Sections of a one-parameter degeneration to the normal cone of a point.
//!
//! A family section is a form together with a power of the base parameter
//! `t`. Its central fibre splits into a section of the blow-up and a
//! homogeneous polynomial on the exceptional component in variables
//! `Y₁, …, Yₙ, T` (coordinates ordered `Y₁, …, Yₙ, T`), glued along `T = 0`.

use alloc::vec;
use alloc::vec::Vec;
use alloc::{format, string::String};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interpolation::{
    basis_split, form_count, h0_linear_system, monomial_basis, select_subbasis_for_blowup, Exponents, Form,
    PointConfiguration,
};
use crate::kahler::fs_expansion;
use crate::linalg::rank_of;
use crate::rational::{int, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySection {
    pub degree: u32,
    pub form: Form,
    /// Zero-based index of the centre point.
    pub center: usize,
    pub mult_at_center: u32,
    pub base_power: u32,
}

/// Multiplies a section by the power of `t` needed for it to vanish to order
/// `m` along the centre of the family.
pub fn lift_section(form: &[Rational], d: u32, center: usize, m: u32, pts: &PointConfiguration) -> Result<FamilySection> {
    check_form(form, d, pts)?;
    if center >= pts.len() {
        return Err(Error::Index {
            index: center + 1,
            max: pts.len(),
        });
    }
    let mult = pts.vanishing_order(center, d, form).ok_or(Error::ZeroSection)?;
    Ok(FamilySection {
        degree: d,
        form: form.to_vec(),
        center,
        mult_at_center: mult,
        base_power: m.saturating_sub(mult),
    })
}

fn check_form(form: &[Rational], d: u32, pts: &PointConfiguration) -> Result<()> {
    let expected = form_count(pts.ambient_dim(), d);
    if form.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "form has {} coefficients, degree {d} needs {expected}",
            form.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PairKind {
    /// Section of the blow-up vanishing on `E`, zero on the exceptional part.
    BlowupOnly,
    /// Both parts nonzero, agreeing on `E`.
    Matching,
    /// Zero on the blow-up, a multiple of `T` on the exceptional part.
    ExceptionalOnly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralFiberPair {
    pub kind: PairKind,
    /// Degree-`d` form, or all zeros.
    pub on_blowup: Form,
    /// Degree-`m` form over `monomial_basis(n, m)` in `(Y₁, …, Yₙ, T)`.
    pub on_exceptional: Form,
    /// Degree-`m` form over `monomial_basis(n − 1, m)` in `Y`.
    pub agreement_jet: Form,
}

impl CentralFiberPair {
    /// Coordinates in the product of the two section spaces.
    pub fn coordinates(&self) -> Vec<Rational> {
        self.on_blowup.iter().chain(&self.on_exceptional).cloned().collect()
    }
}

/// Homogeneous part of degree `e` of the local expansion at `center`, over
/// `monomial_basis(n − 1, e)`.
fn homogeneous_jet(pts: &PointConfiguration, center: usize, d: u32, form: &[Rational], e: u32) -> Form {
    let n = pts.ambient_dim();
    if e > d {
        return vec![Rational::zero(); form_count(n - 1, e)];
    }
    pts.taylor_coefficients(center, d, form)
        .into_iter()
        .filter(|(beta, _)| beta.iter().sum::<u32>() == e)
        .map(|(_, c)| c)
        .collect()
}

/// Embeds a `Y`-form of degree `e` as `T^{m−e}` times it, over
/// `monomial_basis(n, m)`.
fn homogenize(jet: &[Rational], n: usize, e: u32, m: u32) -> Form {
    let target = monomial_basis(n, m);
    let mut out = vec![Rational::zero(); target.len()];
    for (beta, c) in monomial_basis(n - 1, e).into_iter().zip(jet) {
        if c.is_zero() {
            continue;
        }
        let mut exps = beta;
        exps.push(m - e);
        let pos = target.iter().position(|a| *a == exps).expect("homogenised monomial");
        out[pos] = c.clone();
    }
    out
}

/// Restriction of `on_exceptional` to `T = 0`, over `monomial_basis(n − 1, m)`.
pub fn restrict_to_e(on_exceptional: &[Rational], n: usize, m: u32) -> Form {
    monomial_basis(n, m)
        .into_iter()
        .zip(on_exceptional)
        .filter(|(a, _)| a[n] == 0)
        .map(|(_, c)| c.clone())
        .collect()
}

pub fn restrict_central(fs: &FamilySection, m: u32, pts: &PointConfiguration) -> Result<CentralFiberPair> {
    check_form(&fs.form, fs.degree, pts)?;
    let n = pts.ambient_dim();
    let mult = fs.mult_at_center;
    if fs.base_power != m.saturating_sub(mult) {
        return Err(Error::InvariantViolation(format!(
            "base power {} with multiplicity {mult} at the centre, expected {}",
            fs.base_power,
            m.saturating_sub(mult)
        )));
    }
    let zero_blowup = || vec![Rational::zero(); fs.form.len()];
    let (kind, on_blowup, on_exceptional) = if mult > m {
        (PairKind::BlowupOnly, fs.form.clone(), vec![Rational::zero(); form_count(n, m)])
    } else {
        let lowest = homogeneous_jet(pts, fs.center, fs.degree, &fs.form, mult);
        let exceptional = homogenize(&lowest, n, mult, m);
        if mult == m {
            (PairKind::Matching, fs.form.clone(), exceptional)
        } else {
            (PairKind::ExceptionalOnly, zero_blowup(), exceptional)
        }
    };
    let agreement_jet = restrict_to_e(&on_exceptional, n, m);
    let blowup_jet = homogeneous_jet(pts, fs.center, fs.degree, &on_blowup, m);
    if agreement_jet != blowup_jet {
        return Err(Error::InvariantViolation("parts disagree on the exceptional divisor".into()));
    }
    if on_blowup.iter().all(Zero::is_zero) && on_exceptional.iter().all(Zero::is_zero) {
        return Err(Error::InvariantViolation("both parts of the central pair vanish".into()));
    }
    Ok(CentralFiberPair {
        kind,
        on_blowup,
        on_exceptional,
        agreement_jet,
    })
}

/// `t^{base_power} · form` on the fibre over `t ≠ 0`.
pub fn restrict_general(fs: &FamilySection, t: &Rational) -> Result<Form> {
    if t.is_zero() {
        return Err(Error::CentralParameter);
    }
    let scale = num_traits::pow(t.clone(), fs.base_power as usize);
    Ok(fs.form.iter().map(|c| c * &scale).collect())
}

/// Per-line scales `δⱼ` and sampled base parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerationPath {
    pub deltas: Vec<Rational>,
    pub sample_ts: Vec<Vec<Rational>>,
}

impl DegenerationPath {
    pub const DEFAULT_SAMPLES: [(i64, i64); 4] = [(1, 1), (1, 2), (1, 3), (1, 7)];

    /// `δⱼ = 1` and samples `t ∈ {1, 1/2, 1/3, 1/7}` on each of `k` lines.
    pub fn standard(k: usize) -> Self {
        let ts: Vec<Rational> = Self::DEFAULT_SAMPLES.iter().map(|&(p, q)| ratio(p, q)).collect();
        Self {
            deltas: vec![int(1); k],
            sample_ts: vec![ts; k],
        }
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.deltas.len() != k || self.sample_ts.len() != k {
            return Err(Error::InvalidParameter(format!(
                "path has {} scales and {} sample lists for {k} points",
                self.deltas.len(),
                self.sample_ts.len()
            )));
        }
        if self.deltas.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidParameter("scales must be positive".into()));
        }
        if self.sample_ts.iter().flatten().any(Zero::is_zero) {
            return Err(Error::InvalidParameter("sampled parameters must be nonzero".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairCounts {
    pub blowup_only: usize,
    pub matching: usize,
    pub exceptional_only: usize,
}

impl PairCounts {
    fn tally(pairs: &[CentralFiberPair]) -> Self {
        let mut c = Self::default();
        for p in pairs {
            match p.kind {
                PairKind::BlowupOnly => c.blowup_only += 1,
                PairKind::Matching => c.matching += 1,
                PairKind::ExceptionalOnly => c.exceptional_only += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.blowup_only + self.matching + self.exceptional_only
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberCheck {
    /// Base parameter; zero for the central fibre.
    pub t: Rational,
    pub rank: usize,
    pub expected: usize,
    pub pair_counts: PairCounts,
}

impl FiberCheck {
    pub fn passed(&self) -> bool {
        self.rank == self.expected
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivializationReport {
    /// One-based stage index.
    pub stage: usize,
    pub degree: u32,
    pub mults: Vec<u32>,
    /// `Nᵢ`, the size of the lifted basis.
    pub section_count: usize,
    /// Dimension of `{(u, v) : u|_E = v|_E}` on the central fibre.
    pub pair_space_dim: usize,
    /// Counts predicted from the basis split.
    pub expected_counts: PairCounts,
    /// Central fibre first, then the sampled fibres in order.
    pub fibers: Vec<FiberCheck>,
    /// Whether the exceptional parts of the non-vanishing pairs are exactly
    /// the degree-`mᵢ` monomials in `(Y, T)`.
    pub exceptional_monomial_basis: bool,
    pub pairs: Vec<CentralFiberPair>,
}

impl TrivializationReport {
    pub fn passed(&self) -> bool {
        self.section_count == self.pair_space_dim
            && self.fibers.iter().all(FiberCheck::passed)
            && self.fibers.iter().all(|f| f.pair_counts == self.expected_counts)
            && self.exceptional_monomial_basis
    }

    pub fn failure(&self) -> Option<String> {
        if self.section_count != self.pair_space_dim {
            return Some(format!(
                "{} sections for a pair space of dimension {}",
                self.section_count, self.pair_space_dim
            ));
        }
        if let Some(f) = self.fibers.iter().find(|f| !f.passed()) {
            return Some(format!("rank {} at t = {}, expected {}", f.rank, f.t, f.expected));
        }
        if self.fibers.iter().any(|f| f.pair_counts != self.expected_counts) {
            return Some("pair classification counts differ from the basis split".into());
        }
        if !self.exceptional_monomial_basis {
            return Some("exceptional parts are not the monomial basis".into());
        }
        None
    }
}

fn stage_h0(pts: &PointConfiguration, d: u32, mults: &[u32], stage: usize) -> Result<usize> {
    let (idx, reqs): (Vec<usize>, Vec<u32>) = mults[..stage]
        .iter()
        .enumerate()
        .filter(|&(_, &m)| m > 0)
        .map(|(j, &m)| (j, m))
        .unzip();
    let sub = PointConfiguration::new(pts.ambient_dim(), idx.iter().map(|&j| pts.point(j).to_vec()).collect())?;
    Ok(h0_linear_system(&sub, d, &reqs)?.h0())
}

/// Lifts the stage-`(i−1)` basis through the degeneration at `Pᵢ` and checks
/// that it stays independent on every sampled fibre and on the central one.
pub fn trivialization_check(
    pts: &PointConfiguration,
    d: u32,
    mults: &[u32],
    stage: usize,
    path: &DegenerationPath,
) -> Result<TrivializationReport> {
    let k = pts.len();
    if stage == 0 || stage > k {
        return Err(Error::Index { index: stage, max: k });
    }
    path.validate(k)?;
    let n = pts.ambient_dim();
    let center = stage - 1;
    let m = mults.get(center).copied().ok_or_else(|| {
        Error::InvalidParameter(format!("{} multiplicities for {k} points", mults.len()))
    })?;
    let split = basis_split(pts, d, mults)?;
    let basis = select_subbasis_for_blowup(&split, stage - 1)?;
    let lifts = basis
        .iter()
        .map(|f| lift_section(f, d, center, m, pts))
        .collect::<Result<Vec<_>>>()?;
    let pairs = lifts
        .iter()
        .map(|fs| restrict_central(fs, m, pts))
        .collect::<Result<Vec<_>>>()?;
    let counts = PairCounts::tally(&pairs);

    let btilde = split.btilde_len(center);
    let expected_counts = PairCounts {
        blowup_only: basis.len() - split.b[center].len(),
        matching: btilde,
        exceptional_only: split.b[center].len() - btilde,
    };
    let pair_space_dim = stage_h0(pts, d, mults, stage)? + form_count(n, m) - form_count(n - 1, m);

    let mut fibers = Vec::new();
    let central: Vec<Vec<Rational>> = pairs.iter().map(CentralFiberPair::coordinates).collect();
    fibers.push(FiberCheck {
        t: Rational::zero(),
        rank: rank_of(&central),
        expected: basis.len(),
        pair_counts: counts,
    });
    let delta = &path.deltas[center];
    for t in &path.sample_ts[center] {
        let s = delta * t;
        let forms = lifts
            .iter()
            .map(|fs| restrict_general(fs, &s))
            .collect::<Result<Vec<_>>>()?;
        fibers.push(FiberCheck {
            t: t.clone(),
            rank: rank_of(&forms),
            expected: basis.len(),
            pair_counts: counts,
        });
    }

    let mut exceptional: Vec<Exponents> = pairs
        .iter()
        .filter(|p| p.kind != PairKind::BlowupOnly)
        .filter_map(|p| single_monomial(&p.on_exceptional, n, m))
        .collect();
    exceptional.sort();
    let mut all = monomial_basis(n, m);
    all.sort();
    let exceptional_monomial_basis = exceptional == all;

    Ok(TrivializationReport {
        stage,
        degree: d,
        mults: mults.to_vec(),
        section_count: basis.len(),
        pair_space_dim,
        expected_counts,
        fibers,
        exceptional_monomial_basis,
        pairs,
    })
}

/// The exponent of `v` if it is a single monomial with coefficient 1.
fn single_monomial(v: &[Rational], n: usize, m: u32) -> Option<Exponents> {
    let mut nonzero = v.iter().enumerate().filter(|(_, c)| !c.is_zero());
    let (pos, c) = nonzero.next()?;
    if nonzero.next().is_some() || !c.is_one() {
        return None;
    }
    monomial_basis(n, m).into_iter().nth(pos)
}

/// `√c · Y^α T^β` with `c` the multinomial coefficient of the monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledMonomial {
    /// Exponents of `(Y₁, …, Yₙ, T)`.
    pub exponents: Exponents,
    /// The scale is `√c`.
    pub c: BigInt,
}

/// Degree-`m` monomials in `(Y₁, …, Yₙ, T)` scaled so that the sum of their
/// squared moduli is `(|Y|² + |T|²)^m`.
pub fn exceptional_section_targets(m: u32, n: usize) -> Vec<ScaledMonomial> {
    fs_expansion(m, n)
        .terms
        .into_iter()
        .map(|t| {
            let mut exponents = t.alpha;
            exponents.push(t.beta);
            ScaledMonomial { exponents, c: t.c }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> PointConfiguration {
        PointConfiguration::from_integers(2, &[&[0, 0, 1]]).unwrap()
    }

    fn linear(x: i64, y: i64, z: i64) -> Form {
        vec![int(x), int(y), int(z)]
    }

    #[test]
    fn lift_examples() {
        let p = origin();
        let fs = lift_section(&linear(1, 0, 0), 1, 0, 1, &p).unwrap();
        assert_eq!((fs.base_power, fs.mult_at_center), (0, 1));
        let fs = lift_section(&linear(0, 0, 1), 1, 0, 1, &p).unwrap();
        assert_eq!((fs.base_power, fs.mult_at_center), (1, 0));
        let x2 = vec![int(1), int(0), int(0), int(0), int(0), int(0)];
        let fs = lift_section(&x2, 2, 0, 1, &p).unwrap();
        assert_eq!((fs.base_power, fs.mult_at_center), (0, 2));
        assert_eq!(lift_section(&linear(0, 0, 0), 1, 0, 1, &p), Err(Error::ZeroSection));
    }

    #[test]
    fn central_examples() {
        let p = origin();
        let z = lift_section(&linear(0, 0, 1), 1, 0, 1, &p).unwrap();
        let pair = restrict_central(&z, 1, &p).unwrap();
        assert_eq!(pair.kind, PairKind::ExceptionalOnly);
        assert_eq!(pair.on_blowup, linear(0, 0, 0));
        assert_eq!(pair.on_exceptional, linear(0, 0, 1));

        let x = lift_section(&linear(1, 0, 0), 1, 0, 1, &p).unwrap();
        let pair = restrict_central(&x, 1, &p).unwrap();
        assert_eq!(pair.kind, PairKind::Matching);
        assert_eq!(pair.on_exceptional, linear(1, 0, 0));
        assert_eq!(pair.agreement_jet, vec![int(1), int(0)]);

        let x2 = vec![int(1), int(0), int(0), int(0), int(0), int(0)];
        let fs = lift_section(&x2, 2, 0, 1, &p).unwrap();
        let pair = restrict_central(&fs, 1, &p).unwrap();
        assert_eq!(pair.kind, PairKind::BlowupOnly);
        assert_eq!(pair.on_blowup, x2);
        assert!(pair.on_exceptional.iter().all(Zero::is_zero));

        let mut bad = x.clone();
        bad.base_power = 2;
        assert!(matches!(restrict_central(&bad, 1, &p), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn general_restriction() {
        let p = origin();
        let z = lift_section(&linear(0, 0, 1), 1, 0, 1, &p).unwrap();
        assert_eq!(restrict_general(&z, &ratio(1, 2)).unwrap(), vec![int(0), int(0), ratio(1, 2)]);
        let x = lift_section(&linear(1, 0, 0), 1, 0, 1, &p).unwrap();
        assert_eq!(restrict_general(&x, &ratio(5, 3)).unwrap(), linear(1, 0, 0));
        assert_eq!(restrict_general(&x, &int(0)), Err(Error::CentralParameter));
    }

    #[test]
    fn trivialization_examples() {
        let p = origin();
        let r = trivialization_check(&p, 1, &[1], 1, &DegenerationPath::standard(1)).unwrap();
        assert!(r.passed(), "{:?}", r.failure());
        assert_eq!(r.section_count, 3);
        assert_eq!(r.fibers.len(), 5);
        assert_eq!(
            r.expected_counts,
            PairCounts {
                blowup_only: 0,
                matching: 2,
                exceptional_only: 1
            }
        );

        let two = PointConfiguration::random(2, 2, 17).unwrap();
        let r = trivialization_check(&two, 3, &[1, 1], 2, &DegenerationPath::standard(2)).unwrap();
        assert!(r.passed(), "{:?}", r.failure());
        assert_eq!(r.section_count, 9);

        let one = PointConfiguration::random(2, 1, 17).unwrap();
        let r = trivialization_check(&one, 2, &[2], 1, &DegenerationPath::standard(1)).unwrap();
        assert!(r.passed(), "{:?}", r.failure());
        assert_eq!(r.section_count, 6);
        assert_eq!((r.expected_counts.matching, r.expected_counts.exceptional_only), (3, 3));

        assert!(matches!(
            trivialization_check(&one, 2, &[2], 2, &DegenerationPath::standard(1)),
            Err(Error::Index { .. })
        ));
    }

    #[test]
    fn targets() {
        let t = exceptional_section_targets(1, 2);
        assert_eq!(t.len(), 3);
        assert!(t.iter().all(|s| s.c == BigInt::one()));
        let t = exceptional_section_targets(2, 1);
        let cs: Vec<BigInt> = t.iter().map(|s| s.c.clone()).collect();
        assert_eq!(cs, vec![BigInt::from(1), BigInt::from(2), BigInt::from(1)]);
        assert_eq!(t[1].exponents, vec![1, 1]);
        let cs: Vec<BigInt> = exceptional_section_targets(2, 2).into_iter().map(|s| s.c).collect();
        assert_eq!(cs, [1, 2, 2, 1, 2, 1].map(BigInt::from).to_vec());
    }
}

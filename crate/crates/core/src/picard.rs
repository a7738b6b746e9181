//! Divisor and curve classes on the blow-up of the projective plane at `k`
//! general points, and multipoint Seshadri constants of `O(1)`.
//!
//! A class `d·H − Σ mᵢEᵢ` is stored as its degree and multiplicity vector.
//! The intersection form is `H² = 1`, `Eᵢ² = −1`, `H·Eᵢ = 0`, so
//! `(d; m)·(d'; m') = d·d' − Σ mᵢm'ᵢ`.
//!
//! Nef testing at general points works in two regimes:
//!
//! * `k ≤ 8`: the blow-up is del Pezzo, its curve cone is spanned by the
//!   finitely many exceptional curves (plus `H − Eᵢ` and `H` for `k ≤ 1`).
//!   The verdict from pairing against that list is cross-checked by Cremona
//!   reduction into the fundamental chamber, which doubles as the certificate.
//! * `k ≥ 9`: candidate curve classes up to a degree bound are enumerated;
//!   a class is only used as an obstruction when it provably pairs
//!   nonnegatively with every nef class (self-intersection `≥ 0`), or when it
//!   is an exceptional class certified by Cremona reduction to some `Eⱼ`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, mediant, Rational};

/// Number of general points up to which the blow-up is del Pezzo.
pub const DEL_PEZZO_MAX_POINTS: usize = 8;

/// Default degree bound for obstruction searches at `k ≥ 9` points.
pub const DEFAULT_DEGREE_BOUND: i64 = 20;

const REDUCTION_STEP_LIMIT: usize = 512;

/// A divisor class `d·H − Σ mᵢEᵢ` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    degree: Rational,
    mults: Vec<Rational>,
    ambient_dim: u32,
}

impl DivisorClass {
    /// A class on the blow-up of `P²`.
    pub fn new(degree: Rational, mults: Vec<Rational>) -> Self {
        Self {
            degree,
            mults,
            ambient_dim: 2,
        }
    }

    /// A class on the blow-up of `Pⁿ`; only the bookkeeping generalises,
    /// the intersection form is defined for `n = 2` alone.
    pub fn in_dimension(ambient_dim: u32, degree: Rational, mults: Vec<Rational>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidParameter("ambient dimension must be positive".into()));
        }
        Ok(Self {
            degree,
            mults,
            ambient_dim,
        })
    }

    pub fn from_integers(degree: i64, mults: &[i64]) -> Self {
        Self::new(int(degree), mults.iter().map(|&m| int(m)).collect())
    }

    /// `π*O(1) − ε Σ Eᵢ`.
    pub fn uniform(k: usize, epsilon: Rational) -> Self {
        Self::new(Rational::one(), vec![epsilon; k])
    }

    /// The exceptional divisor `Eᵢ`, stored as `(0; −1 at i)`.
    pub fn exceptional(k: usize, i: usize) -> Self {
        let mut mults = vec![Rational::zero(); k];
        mults[i] = -Rational::one();
        Self::new(Rational::zero(), mults)
    }

    pub fn from_curve(c: &CurveClass) -> Self {
        Self::from_integers(c.degree, &c.mults)
    }

    pub fn degree(&self) -> &Rational {
        &self.degree
    }

    pub fn mults(&self) -> &[Rational] {
        &self.mults
    }

    pub fn point_count(&self) -> usize {
        self.mults.len()
    }

    pub fn ambient_dim(&self) -> u32 {
        self.ambient_dim
    }

    /// Intersection number with a curve class on the same surface.
    pub fn pair(&self, c: &CurveClass) -> Rational {
        debug_assert_eq!(self.mults.len(), c.mults.len());
        self.mults
            .iter()
            .zip(&c.mults)
            .fold(&self.degree * int(c.degree), |acc, (m, cm)| acc - m * int(*cm))
    }

    fn padded(&self, k: usize) -> Self {
        let mut mults = self.mults.clone();
        mults.resize(k.max(mults.len()), Rational::zero());
        Self::new(self.degree.clone(), mults)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.degree)?;
        for (i, m) in self.mults.iter().enumerate() {
            write!(f, "{}{}", if i == 0 { " " } else { ", " }, m)?;
        }
        write!(f, ")")
    }
}

/// An integral class `d·H − Σ mᵢEᵢ`, normally that of the strict transform
/// of a plane curve of degree `d` with multiplicity `mᵢ` at `Pᵢ`.
///
/// The exceptional curve `Eᵢ` itself is the class `(0; −1 at i)`; Cremona
/// images of arbitrary classes may likewise leave the effective range.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveClass {
    degree: i64,
    mults: Vec<i64>,
    label: Option<String>,
}

impl CurveClass {
    pub fn new(degree: i64, mults: Vec<i64>) -> Result<Self> {
        if degree == 0 && mults.iter().all(|&m| m == 0) {
            return Err(Error::InvalidParameter("curve class is zero".into()));
        }
        Ok(Self {
            degree,
            mults,
            label: None,
        })
    }

    pub fn exceptional(k: usize, i: usize) -> Self {
        let mut mults = vec![0; k];
        mults[i] = -1;
        Self {
            degree: 0,
            mults,
            label: Some(format!("exceptional curve E{}", i + 1)),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn mults(&self) -> &[i64] {
        &self.mults
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn point_count(&self) -> usize {
        self.mults.len()
    }

    pub fn total_multiplicity(&self) -> i64 {
        self.mults.iter().sum()
    }

    pub fn self_intersection(&self) -> i64 {
        self.degree * self.degree - self.mults.iter().map(|m| m * m).sum::<i64>()
    }

    /// `−K·C = 3d − Σ mᵢ`.
    pub fn anticanonical_degree(&self) -> i64 {
        3 * self.degree - self.total_multiplicity()
    }

    /// Arithmetic genus `(d−1)(d−2)/2 − Σ mᵢ(mᵢ−1)/2` of the strict transform.
    pub fn arithmetic_genus(&self) -> i64 {
        ((self.degree - 1) * (self.degree - 2) - self.mults.iter().map(|m| m * (m - 1)).sum::<i64>()) / 2
    }

    /// A human-readable description such as `"conic through P1,P2,P3,P4,P5"`.
    pub fn describe(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        if self.degree == 0 {
            if let Some(i) = self.mults.iter().position(|&m| m == -1) {
                if self.mults.iter().filter(|&&m| m != 0).count() == 1 {
                    return format!("exceptional curve E{}", i + 1);
                }
            }
        }
        let name = match self.degree {
            1 => String::from("line"),
            2 => String::from("conic"),
            3 => String::from("cubic"),
            4 => String::from("quartic"),
            5 => String::from("quintic"),
            6 => String::from("sextic"),
            d => format!("degree-{d} curve"),
        };
        let through: Vec<String> = self
            .mults
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0)
            .map(|(i, &m)| if m == 1 { format!("P{}", i + 1) } else { format!("{}P{}", m, i + 1) })
            .collect();
        if through.is_empty() {
            name
        } else {
            format!("{name} through {}", through.join(","))
        }
    }

    fn lex_key(&self) -> (i64, &[i64]) {
        (self.degree, &self.mults)
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.degree)?;
        for (i, m) in self.mults.iter().enumerate() {
            write!(f, "{}{}", if i == 0 { " " } else { ", " }, m)?;
        }
        write!(f, ")")
    }
}

/// Intersection number of two divisor classes on the blow-up of `P²`.
pub fn intersect(a: &DivisorClass, b: &DivisorClass) -> Result<Rational> {
    if a.ambient_dim != 2 || b.ambient_dim != 2 {
        return Err(Error::DimensionMismatch(
            "the intersection form is defined on blow-ups of the plane only".into(),
        ));
    }
    if a.mults.len() != b.mults.len() {
        return Err(Error::DimensionMismatch(format!(
            "classes on {} and {} points",
            a.mults.len(),
            b.mults.len()
        )));
    }
    Ok(a
        .mults
        .iter()
        .zip(&b.mults)
        .fold(&a.degree * &b.degree, |acc, (x, y)| acc - x * y))
}

/// Upper bound `(L·H)·deg C / Σ multᵢ C` on the multipoint Seshadri constant
/// of `L` contributed by the curve `C`.
pub fn seshadri_ratio(l: &DivisorClass, c: &CurveClass) -> Result<Rational> {
    if l.mults.iter().any(|m| !m.is_zero()) {
        return Err(Error::InvalidParameter(
            "Seshadri ratio needs a pulled-back class with no exceptional part".into(),
        ));
    }
    let total = c.total_multiplicity();
    if total <= 0 {
        return Err(Error::NotAnObstruction);
    }
    Ok(&l.degree * int(c.degree) / int(total))
}

/// Classes acted on by the quadratic Cremona transformation based at three
/// of the blown-up points.
pub trait CremonaAction: Sized {
    /// `d' = 2d − mᵢ − mⱼ − mₗ`, `m'ᵢ = d − mⱼ − mₗ` (cyclically), other
    /// multiplicities unchanged. The transform is an involution.
    fn cremona(&self, i: usize, j: usize, l: usize) -> Result<Self>;
}

fn check_triple(k: usize, i: usize, j: usize, l: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::InvalidTransform(format!("needs at least 3 points, have {k}")));
    }
    if i == j || j == l || i == l {
        return Err(Error::InvalidTransform(format!("repeated index in ({i}, {j}, {l})")));
    }
    if i >= k || j >= k || l >= k {
        return Err(Error::InvalidTransform(format!("index out of range for {k} points")));
    }
    Ok(())
}

impl CremonaAction for DivisorClass {
    fn cremona(&self, i: usize, j: usize, l: usize) -> Result<Self> {
        check_triple(self.mults.len(), i, j, l)?;
        let d = &self.degree;
        let (a, b, c) = (&self.mults[i], &self.mults[j], &self.mults[l]);
        let mut mults = self.mults.clone();
        mults[i] = d - b - c;
        mults[j] = d - a - c;
        mults[l] = d - a - b;
        Ok(Self {
            degree: d * int(2) - a - b - c,
            mults,
            ambient_dim: self.ambient_dim,
        })
    }
}

impl CremonaAction for CurveClass {
    fn cremona(&self, i: usize, j: usize, l: usize) -> Result<Self> {
        check_triple(self.mults.len(), i, j, l)?;
        let d = self.degree;
        let (a, b, c) = (self.mults[i], self.mults[j], self.mults[l]);
        let mut mults = self.mults.clone();
        mults[i] = d - b - c;
        mults[j] = d - a - c;
        mults[l] = d - a - b;
        Ok(Self {
            degree: 2 * d - a - b - c,
            mults,
            label: None,
        })
    }
}

pub fn cremona<T: CremonaAction>(c: &T, i: usize, j: usize, l: usize) -> Result<T> {
    c.cremona(i, j, l)
}

/// All exceptional classes (Weyl orbit of `E₁`) on the blow-up at `k ≤ 8`
/// general points, sorted by `(d, mults)`. Includes the `Eᵢ` themselves.
pub fn exceptional_classes(k: usize) -> Result<Vec<CurveClass>> {
    if k > DEL_PEZZO_MAX_POINTS {
        return Err(Error::InvalidParameter(format!(
            "the exceptional-class orbit is finite only for k ≤ 8, got {k}"
        )));
    }
    let kk = k.max(3);
    let mut seen: BTreeSet<(i64, Vec<i64>)> = BTreeSet::new();
    let mut queue: Vec<CurveClass> = Vec::new();
    for i in 0..kk {
        let e = CurveClass::exceptional(kk, i);
        seen.insert((e.degree, e.mults.clone()));
        queue.push(e);
    }
    while let Some(c) = queue.pop() {
        for i in 0..kk {
            for j in i + 1..kk {
                for l in j + 1..kk {
                    let next = c.cremona(i, j, l)?;
                    if seen.insert((next.degree, next.mults.clone())) {
                        queue.push(next);
                    }
                }
            }
        }
    }
    Ok(seen
        .into_iter()
        .filter(|(_, m)| m[k..].iter().all(|&x| x == 0))
        .map(|(d, mut m)| {
            m.truncate(k);
            CurveClass {
                degree: d,
                mults: m,
                label: None,
            }
        })
        .collect())
}

/// Whether an integral class with nonnegative multiplicities reduces under
/// Cremona transformations to some `Eⱼ`, i.e. is an exceptional class and
/// hence the class of an irreducible curve at general points.
pub fn is_exceptional_class(c: &CurveClass) -> bool {
    if c.self_intersection() != -1 || c.anticanonical_degree() != 1 {
        return false;
    }
    let mut d = c.degree;
    let mut m = c.mults.clone();
    m.resize(m.len().max(3), 0);
    loop {
        if m.iter().any(|&x| x < 0) || d < 0 {
            return d == 0 && m.iter().filter(|&&x| x != 0).count() == 1 && m.contains(&-1);
        }
        let top = top_three(&m, |a, b| a.cmp(b));
        let s = m[top[0]] + m[top[1]] + m[top[2]];
        if d >= s {
            return false;
        }
        let (a, b, cc) = (m[top[0]], m[top[1]], m[top[2]]);
        m[top[0]] = d - b - cc;
        m[top[1]] = d - a - cc;
        m[top[2]] = d - a - b;
        d = 2 * d - s;
    }
}

fn top_three<T>(m: &[T], cmp: impl Fn(&T, &T) -> Ordering) -> [usize; 3] {
    let mut idx: Vec<usize> = (0..m.len()).collect();
    idx.sort_by(|&a, &b| cmp(&m[b], &m[a]).then(a.cmp(&b)));
    [idx[0], idx[1], idx[2]]
}

/// How a Cremona reduction of a divisor class ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionEnd {
    /// `d ≥ m₁ + m₂ + m₃` for the three largest multiplicities, all `mᵢ ≥ 0`.
    Standard,
    /// A multiplicity became negative at this index.
    NegativeMultiplicity(usize),
    NegativeDegree,
    StepLimit,
}

/// Sequence of Cremona transforms (as index triples) applied to a class, and
/// the class reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CremonaReduction {
    pub transforms: Vec<[usize; 3]>,
    pub reduced: DivisorClass,
    pub end: ReductionEnd,
}

impl CremonaReduction {
    /// Pulls a class on the reduced side back to the original one by undoing
    /// the transforms in reverse order.
    pub fn pull_back(&self, c: &CurveClass) -> Result<CurveClass> {
        self.transforms
            .iter()
            .rev()
            .try_fold(c.clone(), |acc, t| acc.cremona(t[0], t[1], t[2]))
    }
}

/// Repeatedly applies the Cremona transform at the three largest
/// multiplicities while `d < m₁ + m₂ + m₃`. The class is padded with zero
/// multiplicities to at least three points.
pub fn cremona_reduce(c: &DivisorClass, step_limit: usize) -> Result<CremonaReduction> {
    let mut cur = c.padded(3);
    let mut transforms = Vec::new();
    loop {
        if let Some(i) = first_most_negative(&cur.mults) {
            return Ok(CremonaReduction {
                transforms,
                reduced: cur,
                end: ReductionEnd::NegativeMultiplicity(i),
            });
        }
        if cur.degree.is_negative() {
            return Ok(CremonaReduction {
                transforms,
                reduced: cur,
                end: ReductionEnd::NegativeDegree,
            });
        }
        let top = top_three(&cur.mults, |a, b| a.cmp(b));
        let s = &cur.mults[top[0]] + &cur.mults[top[1]] + &cur.mults[top[2]];
        if cur.degree >= s {
            return Ok(CremonaReduction {
                transforms,
                reduced: cur,
                end: ReductionEnd::Standard,
            });
        }
        if transforms.len() == step_limit {
            return Ok(CremonaReduction {
                transforms,
                reduced: cur,
                end: ReductionEnd::StepLimit,
            });
        }
        cur = cur.cremona(top[0], top[1], top[2])?;
        transforms.push(top);
    }
}

fn first_most_negative(m: &[Rational]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, x) in m.iter().enumerate() {
        if x.is_negative() && best.is_none_or(|b| *x < m[b]) {
            best = Some(i);
        }
    }
    best
}

/// Evidence that a class is nef at general points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NefCertificate {
    /// Cremona-equivalent to a class in the fundamental chamber with
    /// nonnegative multiplicities (`k ≤ 8`).
    FundamentalChamber(CremonaReduction),
    /// Cremona-equivalent to `(d − Σmᵢ)·H + Σ mᵢ(H − Eᵢ)` with all
    /// coefficients nonnegative, a sum of nef classes.
    PencilSum(CremonaReduction),
}

impl NefCertificate {
    pub fn reduction(&self) -> &CremonaReduction {
        match self {
            NefCertificate::FundamentalChamber(r) | NefCertificate::PencilSum(r) => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NefVerdict {
    Nef(NefCertificate),
    /// An effective curve at general points meeting the class negatively.
    NotNef(CurveClass),
    /// No obstruction among candidates of degree at most the bound, and no
    /// certificate found.
    UnknownUpTo(i64),
}

impl NefVerdict {
    pub fn is_nef(&self) -> bool {
        matches!(self, NefVerdict::Nef(_))
    }

    pub fn is_not_nef(&self) -> bool {
        matches!(self, NefVerdict::NotNef(_))
    }

    pub fn witness(&self) -> Option<&CurveClass> {
        match self {
            NefVerdict::NotNef(w) => Some(w),
            _ => None,
        }
    }
}

/// Tracks the obstruction with the most negative pairing per unit degree,
/// ties broken by the lexicographically least `(d, mults)`.
struct BestWitness {
    best: Option<(Rational, CurveClass)>,
}

impl BestWitness {
    fn new() -> Self {
        Self { best: None }
    }

    fn offer(&mut self, normalized: Rational, c: CurveClass) {
        let better = match &self.best {
            None => true,
            Some((b, bc)) => match normalized.cmp(b) {
                Ordering::Less => true,
                Ordering::Equal => c.lex_key() < bc.lex_key(),
                Ordering::Greater => false,
            },
        };
        if better {
            self.best = Some((normalized, c));
        }
    }

    fn into_witness(self) -> Option<CurveClass> {
        self.best.map(|(_, c)| {
            let label = c.describe();
            c.with_label(label)
        })
    }
}

/// Nef test for `c` on the blow-up of `P²` at `k` general points.
///
/// For `k ≤ 8` the answer is exact and `degree_bound` is unused. For
/// `k ≥ 9` obstructions are searched among curve classes of degree at most
/// `degree_bound`; a verdict of [`NefVerdict::NotNef`] is always sound.
pub fn is_nef_general(c: &DivisorClass, k: usize, degree_bound: i64) -> Result<NefVerdict> {
    if degree_bound < 0 {
        return Err(Error::InvalidParameter(format!("degree bound {degree_bound} is negative")));
    }
    if c.ambient_dim != 2 {
        return Err(Error::DimensionMismatch("nef testing is implemented for the plane".into()));
    }
    if c.mults.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "class has {} multiplicities but k = {k}",
            c.mults.len()
        )));
    }
    if let Some(i) = first_most_negative(&c.mults) {
        return Ok(NefVerdict::NotNef(CurveClass::exceptional(k, i)));
    }
    if k <= DEL_PEZZO_MAX_POINTS {
        del_pezzo_nef(c, k)
    } else {
        searched_nef(c, k, degree_bound)
    }
}

fn del_pezzo_nef(c: &DivisorClass, k: usize) -> Result<NefVerdict> {
    let mut best = BestWitness::new();
    let mut offer = |cc: CurveClass| {
        let p = c.pair(&cc);
        if p.is_negative() {
            best.offer(p / int(cc.degree), cc);
        }
    };
    offer(CurveClass::new(1, vec![0; k])?);
    for i in 0..k {
        let mut m = vec![0; k];
        m[i] = 1;
        offer(CurveClass::new(1, m)?);
    }
    for e in exceptional_classes(k)? {
        if e.degree > 0 {
            offer(e);
        }
    }
    let reduction = cremona_reduce(c, usize::MAX)?;
    match (best.into_witness(), &reduction.end) {
        (None, ReductionEnd::Standard) => Ok(NefVerdict::Nef(NefCertificate::FundamentalChamber(reduction))),
        (Some(w), ReductionEnd::NegativeMultiplicity(_) | ReductionEnd::NegativeDegree) => {
            Ok(NefVerdict::NotNef(w))
        }
        (w, end) => Err(Error::InvariantViolation(format!(
            "Cremona reduction ({end:?}) disagrees with exceptional-curve pairing (witness {w:?})"
        ))),
    }
}

fn searched_nef(c: &DivisorClass, k: usize, degree_bound: i64) -> Result<NefVerdict> {
    if let Some(w) = candidate_search(c, k, degree_bound)? {
        return Ok(NefVerdict::NotNef(w));
    }
    let reduction = cremona_reduce(c, REDUCTION_STEP_LIMIT)?;
    match reduction.end {
        ReductionEnd::Standard => {
            let total = reduction.reduced.mults.iter().fold(Rational::zero(), |a, m| a + m);
            if reduction.reduced.degree >= total {
                return Ok(NefVerdict::Nef(NefCertificate::PencilSum(reduction)));
            }
        }
        ReductionEnd::NegativeMultiplicity(j) => {
            let kk = reduction.reduced.mults.len();
            let w = reduction.pull_back(&CurveClass::exceptional(kk, j))?;
            return Ok(NefVerdict::NotNef(restrict_witness(w, k)));
        }
        ReductionEnd::NegativeDegree => {
            let kk = reduction.reduced.mults.len();
            let w = reduction.pull_back(&CurveClass::new(1, vec![0; kk])?)?;
            return Ok(NefVerdict::NotNef(restrict_witness(w, k)));
        }
        ReductionEnd::StepLimit => {}
    }
    Ok(NefVerdict::UnknownUpTo(degree_bound))
}

fn restrict_witness(mut w: CurveClass, k: usize) -> CurveClass {
    w.mults.truncate(k);
    let label = w.describe();
    w.with_label(label)
}

/// Integer scaling of a divisor class: `common·(d; m)` with the
/// multiplicities in decreasing order.
struct Scaled<T> {
    degree: T,
    sorted: Vec<T>,
    order: Vec<usize>,
}

fn scaled<T>(c: &DivisorClass, conv: impl Fn(&BigInt) -> Option<T>) -> Option<Scaled<T>> {
    let lcm = c
        .mults
        .iter()
        .fold(c.degree.denom().clone(), |acc, m| acc.lcm(m.denom()));
    let scale = |x: &Rational| conv(&(x.numer() * (&lcm / x.denom())));
    // ties put higher indices first so equal weights receive multiplicities in
    // increasing order, giving the lexicographically least witness
    let mut order: Vec<usize> = (0..c.mults.len()).collect();
    order.sort_by(|&a, &b| c.mults[b].cmp(&c.mults[a]).then(b.cmp(&a)));
    Some(Scaled {
        degree: scale(&c.degree)?,
        sorted: order.iter().map(|&i| scale(&c.mults[i])).collect::<Option<Vec<_>>>()?,
        order,
    })
}

/// Candidate obstructions of degree `1..=bound`: nonincreasing multiplicity
/// vectors with `C² ≥ −1` and arithmetic genus `≥ 0`; `C² = −1` classes must
/// be exceptional. Each multiset is placed against the class's weights in
/// the order minimising the pairing.
fn candidate_search(c: &DivisorClass, k: usize, bound: i64) -> Result<Option<CurveClass>> {
    if let Some(s) = scaled(c, |x| x.to_i64().map(i128::from)) {
        search_with(&s, k, bound, |x| int_to_rational(*x))
    } else {
        let s = scaled(c, |x| Some(x.clone())).expect("BigInt scaling cannot fail");
        search_with(&s, k, bound, |x| Rational::from_integer(x.clone()))
    }
}

fn int_to_rational(x: i128) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

trait Ring: Clone + Ord + Zero + core::ops::Mul<Output = Self> + core::ops::Sub<Output = Self> + From<i64> {}
impl Ring for i128 {}
impl Ring for BigInt {}

fn search_with<T: Ring>(
    s: &Scaled<T>,
    k: usize,
    bound: i64,
    to_rational: impl Fn(&T) -> Rational,
) -> Result<Option<CurveClass>> {
    let mut best = BestWitness::new();
    let mut seq = vec![0i64; k];
    for d in 1..=bound {
        let budget = d * d + 1;
        enumerate_multisets(&mut seq, 0, d, budget, &mut |m: &[i64]| {
            let sum_sq: i64 = m.iter().map(|x| x * x).sum();
            let self_int = d * d - sum_sq;
            let genus2 = (d - 1) * (d - 2) - m.iter().map(|x| x * (x - 1)).sum::<i64>();
            if genus2 < 0 {
                return;
            }
            let mut pairing = s.degree.clone() * T::from(d);
            for (w, &x) in s.sorted.iter().zip(m) {
                if x != 0 {
                    pairing = pairing - w.clone() * T::from(x);
                }
            }
            if pairing >= T::zero() {
                return;
            }
            let mut mults = vec![0; k];
            for (j, &x) in m.iter().enumerate() {
                mults[s.order[j]] = x;
            }
            let cand = CurveClass {
                degree: d,
                mults,
                label: None,
            };
            if self_int == -1 && !is_exceptional_class(&cand) {
                return;
            }
            best.offer(to_rational(&pairing) / int(d), cand);
        });
    }
    Ok(best.into_witness())
}

/// Visits every nonincreasing `seq[pos..]` with entries `≤ cap` whose squares
/// sum to at most `budget`.
fn enumerate_multisets(seq: &mut [i64], pos: usize, cap: i64, budget: i64, visit: &mut impl FnMut(&[i64])) {
    if pos == seq.len() {
        visit(seq);
        return;
    }
    let mut x = cap;
    while x * x > budget {
        x -= 1;
    }
    loop {
        seq[pos] = x;
        enumerate_multisets(seq, pos + 1, x, budget - x * x, visit);
        if x == 0 {
            break;
        }
        x -= 1;
    }
}

/// Where a Seshadri lower bound comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowerWitness {
    /// `ε = 0`: the pulled-back hyperplane class is nef.
    Trivial,
    /// The uniform class at the lower bound is certified nef.
    Nef(NefCertificate),
    /// No obstruction of degree at most this bound; the value is conditional.
    SearchBound(i64),
}

/// Certified bounds on the uniform-weight multipoint Seshadri constant of
/// `O(1)` at `k` general points of the plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeshadriBounds {
    pub k: usize,
    pub lower: Rational,
    pub upper: Rational,
    pub lower_witness: LowerWitness,
    pub upper_witness: CurveClass,
    /// Lower equals upper and the lower bound is certified, not conditional.
    pub exact: bool,
}

impl SeshadriBounds {
    /// Whether the lower bound depends on the finite obstruction search.
    pub fn is_conditional(&self) -> bool {
        matches!(self.lower_witness, LowerWitness::SearchBound(_))
    }
}

/// Computes the Seshadri constant `sup{ε : H − εΣEᵢ nef}` for `k` general
/// points by descending through obstruction witnesses and bisecting the
/// remaining bracket at Farey mediants.
pub fn seshadri_constant_general(k: usize, degree_bound: i64) -> Result<SeshadriBounds> {
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one point".into()));
    }
    if degree_bound < 0 {
        return Err(Error::InvalidParameter(format!("degree bound {degree_bound} is negative")));
    }
    let line = {
        let mut m = vec![0; k];
        m[0] = 1;
        let c = CurveClass::new(1, m)?;
        let label = c.describe();
        c.with_label(label)
    };
    let tolerance = Rational::new(BigInt::one(), BigInt::from(1_000_000));
    let hyperplane = DivisorClass::uniform(k, Rational::zero());
    let mut lo = Rational::zero();
    let mut lo_witness = LowerWitness::Trivial;
    let mut hi = seshadri_ratio(&DivisorClass::uniform(k, Rational::zero()), &line)?;
    let mut hi_witness = line;

    loop {
        match is_nef_general(&DivisorClass::uniform(k, hi.clone()), k, degree_bound)? {
            NefVerdict::Nef(cert) => return Ok(finish(k, hi.clone(), hi, LowerWitness::Nef(cert), hi_witness)),
            NefVerdict::UnknownUpTo(b) => {
                return Ok(finish(k, hi.clone(), hi, LowerWitness::SearchBound(b), hi_witness));
            }
            NefVerdict::NotNef(w) => {
                let r = seshadri_ratio(&hyperplane, &w)?;
                debug_assert!(r < hi, "witness must lower the upper bound");
                hi = r;
                hi_witness = w;
            }
        }
        if &hi - &lo < tolerance {
            return Ok(finish(k, lo, hi, lo_witness, hi_witness));
        }
        let mid = mediant(&lo, &hi);
        match is_nef_general(&DivisorClass::uniform(k, mid.clone()), k, degree_bound)? {
            NefVerdict::Nef(cert) => {
                lo = mid;
                lo_witness = LowerWitness::Nef(cert);
            }
            NefVerdict::UnknownUpTo(b) => {
                lo = mid;
                lo_witness = LowerWitness::SearchBound(b);
            }
            NefVerdict::NotNef(w) => {
                hi = seshadri_ratio(&hyperplane, &w)?;
                hi_witness = w;
            }
        }
    }
}

fn finish(k: usize, lower: Rational, upper: Rational, lower_witness: LowerWitness, upper_witness: CurveClass) -> SeshadriBounds {
    let exact = lower == upper && !matches!(lower_witness, LowerWitness::SearchBound(_));
    SeshadriBounds {
        k,
        lower,
        upper,
        lower_witness,
        upper_witness,
        exact,
    }
}

/// Checks that shrinking the exceptional coefficients of a nef class keeps
/// it nef: requires `c` nef and `0 < m'ᵢ ≤ mᵢ` with equal degrees, and
/// returns whether `c'` is not refuted.
pub fn downward_closure_check(c: &DivisorClass, c_prime: &DivisorClass, k: usize, degree_bound: i64) -> Result<bool> {
    if c.degree != c_prime.degree || c.mults.len() != k || c_prime.mults.len() != k {
        return Err(Error::Precondition("classes must share degree and point count".into()));
    }
    if let Some(i) = (0..k).find(|&i| !c_prime.mults[i].is_positive() || c_prime.mults[i] > c.mults[i]) {
        return Err(Error::Precondition(format!(
            "need 0 < m'ᵢ ≤ mᵢ, fails at index {i}: {} vs {}",
            c_prime.mults[i], c.mults[i]
        )));
    }
    if !is_nef_general(c, k, degree_bound)?.is_nef() {
        return Err(Error::Precondition(format!("{c} is not certified nef")));
    }
    Ok(!is_nef_general(c_prime, k, degree_bound)?.is_not_nef())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn dc(d: i64, m: &[i64]) -> DivisorClass {
        DivisorClass::from_integers(d, m)
    }

    fn cc(d: i64, m: &[i64]) -> CurveClass {
        CurveClass::new(d, m.to_vec()).unwrap()
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(intersect(&dc(3, &[1, 1]), &dc(1, &[1, 0])).unwrap(), int(2));
        assert_eq!(intersect(&dc(5, &[2, 3]), &DivisorClass::exceptional(2, 1)).unwrap(), int(3));
        assert_eq!(intersect(&dc(1, &[1, 1]), &dc(1, &[1, 1])).unwrap(), int(-1));
    }

    #[test]
    fn intersect_errors() {
        assert!(matches!(intersect(&dc(1, &[1]), &dc(1, &[1, 0])), Err(Error::DimensionMismatch(_))));
        let p3 = DivisorClass::in_dimension(3, int(1), vec![int(0)]).unwrap();
        assert!(matches!(intersect(&p3, &p3), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn seshadri_ratio_examples() {
        let h2 = DivisorClass::from_integers(1, &[0, 0]);
        assert_eq!(seshadri_ratio(&h2, &cc(1, &[1, 1])).unwrap(), ratio(1, 2));
        let h5 = DivisorClass::from_integers(1, &[0; 5]);
        assert_eq!(seshadri_ratio(&h5, &cc(2, &[1; 5])).unwrap(), ratio(2, 5));
        let h9 = DivisorClass::from_integers(1, &[0; 9]);
        assert_eq!(seshadri_ratio(&h9, &cc(3, &[1; 9])).unwrap(), ratio(1, 3));
        assert_eq!(seshadri_ratio(&h2, &cc(1, &[0, 0])), Err(Error::NotAnObstruction));
    }

    #[test]
    fn cremona_examples() {
        assert_eq!(dc(1, &[1, 1, 0]).cremona(0, 1, 2).unwrap(), dc(0, &[0, 0, -1]));
        assert_eq!(dc(0, &[0, 0, -1]).cremona(0, 1, 2).unwrap(), dc(1, &[1, 1, 0]));
        assert_eq!(
            dc(6, &[3, 2, 2, 2, 2, 2, 2, 2]).cremona(0, 1, 2).unwrap(),
            dc(5, &[2, 1, 1, 2, 2, 2, 2, 2])
        );
        assert_eq!(cc(1, &[1, 1, 0]).cremona(0, 1, 2).unwrap().mults(), &[0, 0, -1]);
    }

    #[test]
    fn cremona_errors() {
        assert!(matches!(dc(1, &[1, 1]).cremona(0, 1, 0), Err(Error::InvalidTransform(_))));
        assert!(matches!(dc(1, &[1, 1, 1]).cremona(0, 1, 1), Err(Error::InvalidTransform(_))));
        assert!(matches!(dc(1, &[1, 1, 1]).cremona(0, 1, 3), Err(Error::InvalidTransform(_))));
    }

    #[test]
    fn exceptional_class_counts() {
        // classical counts of lines on del Pezzo surfaces
        let counts: Vec<usize> = (1..=8).map(|k| exceptional_classes(k).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 3, 6, 10, 16, 27, 56, 240]);
        for k in 1..=8 {
            for e in exceptional_classes(k).unwrap() {
                assert_eq!(e.self_intersection(), -1);
                assert_eq!(e.anticanonical_degree(), 1);
            }
        }
    }

    #[test]
    fn exceptional_class_recognition() {
        assert!(is_exceptional_class(&cc(6, &[3, 2, 2, 2, 2, 2, 2, 2])));
        assert!(is_exceptional_class(&cc(1, &[1, 1, 0, 0, 0, 0, 0, 0, 0])));
        assert!(!is_exceptional_class(&cc(3, &[1; 9])));
        // C² = −1 but genus 1: not an exceptional class
        assert!(!is_exceptional_class(&cc(3, &[1; 10])));
    }

    #[test]
    fn nef_examples() {
        let half = DivisorClass::new(int(1), vec![ratio(1, 2), ratio(1, 2)]);
        assert!(is_nef_general(&half, 2, 20).unwrap().is_nef());

        let c = DivisorClass::new(int(1), vec![ratio(3, 5); 5]);
        let v = is_nef_general(&c, 5, 20).unwrap();
        assert_eq!(v.witness().unwrap().mults(), &[1, 1, 1, 1, 1]);
        assert_eq!(v.witness().unwrap().degree(), 2);

        for k in [0, 1, 4, 8, 9, 12] {
            let h = DivisorClass::uniform(k, int(0));
            assert!(is_nef_general(&h, k, 20).unwrap().is_nef(), "k = {k}");
        }
        assert!(matches!(is_nef_general(&half, 2, -1), Err(Error::InvalidParameter(_))));
        assert!(matches!(is_nef_general(&half, 3, 1), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn negative_coefficients_are_caught() {
        let c = DivisorClass::new(int(1), vec![int(0), ratio(-1, 2)]);
        let w = is_nef_general(&c, 2, 5).unwrap();
        assert_eq!(w.witness().unwrap(), &CurveClass::exceptional(2, 1));
        let neg = DivisorClass::uniform(10, int(0));
        let neg = DivisorClass::new(int(-1), neg.mults().to_vec());
        assert!(is_nef_general(&neg, 10, 3).unwrap().is_not_nef());
    }

    #[test]
    fn seshadri_small_k() {
        let expected = [ratio(1, 1), ratio(1, 2), ratio(1, 2), ratio(1, 2), ratio(2, 5), ratio(2, 5), ratio(3, 8), ratio(6, 17)];
        for (k, e) in (1..=8).zip(expected) {
            let b = seshadri_constant_general(k, DEFAULT_DEGREE_BOUND).unwrap();
            assert!(b.exact, "k = {k}");
            assert_eq!(b.lower, e);
            assert_eq!(b.upper, e);
            let h = DivisorClass::uniform(k, int(0));
            assert_eq!(seshadri_ratio(&h, &b.upper_witness).unwrap(), e);
        }
        let five = seshadri_constant_general(5, 20).unwrap();
        assert_eq!(five.upper_witness.mults(), &[1, 1, 1, 1, 1]);
        assert!(matches!(seshadri_constant_general(0, 20), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn seshadri_beyond_del_pezzo_is_conditional() {
        let b = seshadri_constant_general(10, 6).unwrap();
        assert!(b.lower <= b.upper);
        assert!(b.is_conditional());
        assert!(!b.exact);
    }

    #[test]
    fn downward_closure_examples() {
        let c = DivisorClass::new(int(1), vec![ratio(1, 2), ratio(1, 2)]);
        let cp = DivisorClass::new(int(1), vec![ratio(1, 4), ratio(1, 2)]);
        assert!(downward_closure_check(&c, &cp, 2, 20).unwrap());
        let c5 = DivisorClass::uniform(5, ratio(2, 5));
        let c5p = DivisorClass::uniform(5, ratio(1, 5));
        assert!(downward_closure_check(&c5, &c5p, 5, 20).unwrap());
        assert!(downward_closure_check(&c5, &c5, 5, 20).unwrap());
    }

    #[test]
    fn downward_closure_preconditions() {
        let nef = DivisorClass::uniform(5, ratio(2, 5));
        let not_nef = DivisorClass::uniform(5, ratio(3, 5));
        assert!(matches!(downward_closure_check(&not_nef, &nef, 5, 20), Err(Error::Precondition(_))));
        let bigger = DivisorClass::uniform(5, ratio(1, 2));
        assert!(matches!(downward_closure_check(&nef, &bigger, 5, 20), Err(Error::Precondition(_))));
        let zero = DivisorClass::uniform(5, int(0));
        assert!(matches!(downward_closure_check(&nef, &zero, 5, 20), Err(Error::Precondition(_))));
    }

    #[test]
    fn descriptions() {
        assert_eq!(cc(2, &[1, 1, 1, 1, 1]).describe(), "conic through P1,P2,P3,P4,P5");
        assert_eq!(cc(3, &[2, 1, 0]).describe(), "cubic through 2P1,P2");
        assert_eq!(CurveClass::exceptional(3, 2).describe(), "exceptional curve E3");
    }
}

//! Serializable views of library results. Rationals are `"p/q"` strings and
//! reals use the shortest round-trip decimal.

use num_complex::Complex64;
use serde::Serialize;
use seshadri_core::degeneration::{FiberCheck, PairCounts, TrivializationReport};
use seshadri_core::interpolation::PointConfiguration;
use seshadri_core::kahler::{GlueReport, PackingReport};
use seshadri_core::picard::{CurveClass, LowerWitness, NefCertificate, SeshadriBounds};
use seshadri_core::rational::{to_f64, to_pq, Rational};

pub fn pq(x: &Rational) -> String {
    to_pq(x)
}

pub fn points(pts: &PointConfiguration) -> Vec<Vec<String>> {
    pts.points().iter().map(|p| p.iter().map(pq).collect()).collect()
}

#[derive(Debug, Serialize)]
pub struct Curve {
    pub degree: i64,
    pub mults: Vec<i64>,
    pub self_intersection: i64,
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl From<&CurveClass> for Curve {
    fn from(c: &CurveClass) -> Self {
        Curve {
            degree: c.degree(),
            mults: c.mults().to_vec(),
            self_intersection: c.self_intersection(),
            class: c.to_string(),
            label: c.label().map(str::to_string),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Lower {
    Trivial,
    Nef {
        certificate: &'static str,
        cremona_steps: usize,
        reduced_class: String,
    },
    SearchBound {
        degree_bound: i64,
    },
}

impl From<&LowerWitness> for Lower {
    fn from(w: &LowerWitness) -> Self {
        match w {
            LowerWitness::Trivial => Lower::Trivial,
            LowerWitness::Nef(cert) => Lower::Nef {
                certificate: match cert {
                    NefCertificate::FundamentalChamber(_) => "fundamental-chamber",
                    NefCertificate::PencilSum(_) => "pencil-sum",
                },
                cremona_steps: cert.reduction().transforms.len(),
                reduced_class: cert.reduction().reduced.to_string(),
            },
            LowerWitness::SearchBound(b) => Lower::SearchBound { degree_bound: *b },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Bounds {
    pub k: usize,
    pub lower: String,
    pub upper: String,
    pub lower_value: f64,
    pub upper_value: f64,
    pub exact: bool,
    pub conditional: bool,
    pub lower_witness: Lower,
    pub upper_witness: Curve,
}

impl From<&SeshadriBounds> for Bounds {
    fn from(b: &SeshadriBounds) -> Self {
        Bounds {
            k: b.k,
            lower: pq(&b.lower),
            upper: pq(&b.upper),
            lower_value: to_f64(&b.lower),
            upper_value: to_f64(&b.upper),
            exact: b.exact,
            conditional: b.is_conditional(),
            lower_witness: (&b.lower_witness).into(),
            upper_witness: (&b.upper_witness).into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Packing {
    pub k: usize,
    pub n: u32,
    pub epsilon: Bounds,
    pub gamma_lower: f64,
    pub gamma_upper: f64,
    pub per_ball_radius: f64,
    pub total_ball_volume: f64,
    pub ambient_volume: f64,
}

impl From<&PackingReport> for Packing {
    fn from(r: &PackingReport) -> Self {
        Packing {
            k: r.k,
            n: r.n,
            epsilon: (&r.epsilon).into(),
            gamma_lower: r.gamma_lower,
            gamma_upper: r.gamma_upper,
            per_ball_radius: r.per_ball_radius,
            total_ball_volume: r.total_ball_volume,
            ambient_volume: r.ambient_volume,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Counts {
    pub blowup_only: usize,
    pub matching: usize,
    pub exceptional_only: usize,
}

impl From<&PairCounts> for Counts {
    fn from(c: &PairCounts) -> Self {
        Counts {
            blowup_only: c.blowup_only,
            matching: c.matching,
            exceptional_only: c.exceptional_only,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Fiber {
    pub t: String,
    pub rank: usize,
    pub expected: usize,
    pub pair_counts: Counts,
    pub passed: bool,
}

impl From<&FiberCheck> for Fiber {
    fn from(f: &FiberCheck) -> Self {
        Fiber {
            t: pq(&f.t),
            rank: f.rank,
            expected: f.expected,
            pair_counts: (&f.pair_counts).into(),
            passed: f.passed(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Trivialization {
    pub stage: usize,
    pub degree: u32,
    pub mults: Vec<u32>,
    pub section_count: usize,
    pub pair_space_dim: usize,
    pub ranks: Vec<usize>,
    pub expected_counts: Counts,
    pub fibers: Vec<Fiber>,
    pub exceptional_monomial_basis: bool,
    pub passed: bool,
    pub failure: Option<String>,
}

impl From<&TrivializationReport> for Trivialization {
    fn from(r: &TrivializationReport) -> Self {
        Trivialization {
            stage: r.stage,
            degree: r.degree,
            mults: r.mults.clone(),
            section_count: r.section_count,
            pair_space_dim: r.pair_space_dim,
            ranks: r.fibers.iter().map(|f| f.rank).collect(),
            expected_counts: (&r.expected_counts).into(),
            fibers: r.fibers.iter().map(Fiber::from).collect(),
            exceptional_monomial_basis: r.exceptional_monomial_basis,
            passed: r.passed(),
            failure: r.failure(),
        }
    }
}

fn complex(z: &[Complex64]) -> Vec<[f64; 2]> {
    z.iter().map(|c| [c.re, c.im]).collect()
}

#[derive(Debug, Serialize)]
pub struct Violation {
    pub point: Vec<[f64; 2]>,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Serialize)]
pub struct Glue {
    pub samples: usize,
    pub r_inner: f64,
    pub r_outer: f64,
    pub min_eigenvalue: f64,
    pub unglued_min_eigenvalue: f64,
    pub eigenvalue_gap: f64,
    pub sup_perturbation: f64,
    pub positive_definite: bool,
    pub violation: Option<Violation>,
}

impl From<&GlueReport> for Glue {
    fn from(r: &GlueReport) -> Self {
        Glue {
            samples: r.grid.points.len(),
            r_inner: r.r_inner,
            r_outer: r.r_outer,
            min_eigenvalue: r.min_eigenvalue,
            unglued_min_eigenvalue: r.unglued_min_eigenvalue,
            eigenvalue_gap: r.eigenvalue_gap(),
            sup_perturbation: r.sup_perturbation,
            positive_definite: r.positive_definite(),
            violation: r.violation.as_ref().map(|v| Violation {
                point: complex(&v.point),
                min_eigenvalue: v.min_eigenvalue,
            }),
        }
    }
}

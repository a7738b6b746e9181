#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use seshadri_core::interpolation::{monomial_basis, PointConfiguration};
use seshadri_core::rational::Rational;

/// Curve classes `(d; m₁ ≥ … ≥ m_k)` with `d ≤ max_degree` that can carry an
/// irreducible curve on a blow-up of the plane at general points: `(−1)`-curves
/// (`C² = −1`, `K·C = −1`) and classes with `C² ≥ 0` and genus `≥ 0`.
pub fn brute_force_curves(k: usize, max_degree: i64) -> Vec<(i64, Vec<i64>)> {
    let mut out = Vec::new();
    for d in 1..=max_degree {
        let mut mults = vec![0i64; k];
        sorted_tuples(&mut mults, 0, d, &mut |m| {
            let sq: i64 = m.iter().map(|x| x * x).sum();
            let sum: i64 = m.iter().sum();
            if sum == 0 {
                return;
            }
            let self_int = d * d - sq;
            let genus2 = (d - 1) * (d - 2) - m.iter().map(|x| x * (x - 1)).sum::<i64>();
            let minus_one = self_int == -1 && sum == 3 * d - 1;
            if minus_one || (self_int >= 0 && genus2 >= 0) {
                out.push((d, m.to_vec()));
            }
        });
    }
    out
}

fn sorted_tuples(m: &mut [i64], pos: usize, cap: i64, f: &mut impl FnMut(&[i64])) {
    if pos == m.len() {
        f(m);
        return;
    }
    for v in (0..=cap).rev() {
        m[pos] = v;
        sorted_tuples(m, pos + 1, v, f);
    }
}

/// `min d / Σmᵢ` over [`brute_force_curves`].
pub fn seshadri_oracle(k: usize, max_degree: i64) -> Rational {
    brute_force_curves(k, max_degree)
        .into_iter()
        .map(|(d, m)| Rational::new(BigInt::from(d), BigInt::from(m.iter().sum::<i64>())))
        .min()
        .expect("the line through a point is always a candidate")
}

pub const PRIME: u64 = 2_147_483_647;

fn to_mod(x: &Rational) -> u64 {
    assert!(x.is_integer());
    let r = x.numer() % BigInt::from(PRIME);
    let r = if r.is_negative() { r + BigInt::from(PRIME) } else { r };
    r.to_u64().unwrap()
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    b %= PRIME;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % PRIME;
        }
        b = b * b % PRIME;
        e >>= 1;
    }
    acc
}

/// Rank modulo a prime of the conditions "all partial derivatives of order
/// `mᵢ − 1` vanish at `Pᵢ`" on degree-`d` forms, for integral points. By
/// Euler's formula these cut out vanishing to order `mᵢ` when `mᵢ ≤ d + 1`.
pub fn derivative_rank_mod_p(pts: &PointConfiguration, d: u32, requirements: &[u32]) -> usize {
    let n = pts.ambient_dim();
    let monomials = monomial_basis(n, d);
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for (i, &m) in requirements.iter().enumerate() {
        let p: Vec<u64> = pts.point(i).iter().map(to_mod).collect();
        if m == 0 {
            continue;
        }
        if m - 1 > d {
            // no nonzero form of degree d vanishes to order above d
            return monomials.len();
        }
        for gamma in monomial_basis(n, m - 1) {
            rows.push(
                monomials
                    .iter()
                    .map(|a| {
                        let mut v = 1u64;
                        for j in 0..=n {
                            if a[j] < gamma[j] {
                                return 0;
                            }
                            for t in 0..gamma[j] {
                                v = v * u64::from(a[j] - t) % PRIME;
                            }
                            v = v * pow_mod(p[j], u64::from(a[j] - gamma[j])) % PRIME;
                        }
                        v
                    })
                    .collect(),
            );
        }
    }
    rank_mod_p(rows, monomials.len())
}

/// Rank modulo [`PRIME`] of rational vectors. It never exceeds the rank over
/// the rationals, so a full rank here certifies full rank.
pub fn rational_rank_mod_p(vectors: &[Vec<Rational>]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let reduce = |x: &Rational| {
        let num = to_mod(&Rational::from_integer(x.numer().clone()));
        let den = to_mod(&Rational::from_integer(x.denom().clone()));
        assert_ne!(den, 0, "denominator divisible by the prime");
        num * pow_mod(den, PRIME - 2) % PRIME
    };
    rank_mod_p(vectors.iter().map(|v| v.iter().map(reduce).collect()).collect(), first.len())
}

pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, r);
        let inv = pow_mod(rows[rank][c], PRIME - 2);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c] * inv % PRIME;
                for cc in c..cols {
                    rows[r][cc] = (rows[r][cc] + PRIME - f * rows[rank][cc] % PRIME) % PRIME;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `m ((1 + |z|²) δ_{jk} − z̄_j z_k) / (1 + |z|²)²`.
pub fn fs_metric_closed_form(m: u32, z: &[Complex64]) -> Vec<Vec<Complex64>> {
    let s = 1.0 + z.iter().map(Complex64::norm_sqr).sum::<f64>();
    let m = f64::from(m);
    (0..z.len())
        .map(|j| {
            (0..z.len())
                .map(|k| {
                    let delta = if j == k { s } else { 0.0 };
                    (Complex64::new(delta, 0.0) - z[j].conj() * z[k]) * m / (s * s)
                })
                .collect()
        })
        .collect()
}

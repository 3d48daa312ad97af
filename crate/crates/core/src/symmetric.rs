//! Chern classes of a tensor product of two bundles, expressed through the
//! Chern classes of the factors.
//!
//! With Chern roots `x_1..x_r` and `y_1..y_s`, the total Chern class of
//! `E ⊗ F` is `∏ (1 + x_a + y_b)`. Each homogeneous part is symmetric in
//! the `x` and in the `y` separately, so it is a polynomial in the
//! elementary symmetric functions `e_k(x) = c_k(E)` and `e_k(y) = c_k(F)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

type Monomial = Vec<u32>;
type Poly = BTreeMap<Monomial, BigInt>;

/// One term `coeff · ∏ c_k(E)^{e[k-1]} · ∏ c_k(F)^{f[k-1]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernMonomial {
    pub e_exponents: Vec<u32>,
    pub f_exponents: Vec<u32>,
    pub coeff: BigInt,
}

fn add_into(target: &mut Poly, key: Monomial, value: BigInt) {
    let entry = target.entry(key.clone()).or_insert_with(BigInt::zero);
    *entry += value;
    if entry.is_zero() {
        target.remove(&key);
    }
}

fn multiply(p: &Poly, q: &Poly, max_degree: Option<u32>) -> Poly {
    let mut out = Poly::new();
    for (a, ca) in p {
        for (b, cb) in q {
            let m: Monomial = a.iter().zip(b).map(|(u, v)| u + v).collect();
            if max_degree.is_some_and(|d| m.iter().sum::<u32>() > d) {
                continue;
            }
            add_into(&mut out, m, ca * cb);
        }
    }
    out
}

fn constant(nvars: usize) -> Poly {
    Poly::from([(vec![0; nvars], BigInt::one())])
}

/// `e_k` in the variables `offset..offset+count` of an `nvars`-variable ring.
fn elementary(k: u32, offset: usize, count: usize, nvars: usize) -> Poly {
    fn choose(start: usize, left: u32, offset: usize, count: usize, acc: &mut Monomial, out: &mut Poly) {
        if left == 0 {
            out.insert(acc.clone(), BigInt::one());
            return;
        }
        for v in start..count {
            acc[offset + v] = 1;
            choose(v + 1, left - 1, offset, count, acc, out);
            acc[offset + v] = 0;
        }
    }
    let mut out = Poly::new();
    choose(0, k, offset, count, &mut vec![0; nvars], &mut out);
    out
}

/// Exponents `m_k = α_k − α_{k+1}` so that `∏ e_k^{m_k}` has leading term `x^α`.
fn elementary_exponents(alpha: &[u32]) -> Vec<u32> {
    (0..alpha.len())
        .map(|k| alpha[k] - alpha.get(k + 1).copied().unwrap_or(0))
        .collect()
}

/// `c_i(E ⊗ F)` for bundles of ranks `r` and `s`, as a polynomial in the
/// Chern classes of `E` and `F`. Terms are sorted by exponent vectors.
pub fn tensor_chern_polynomial(r: usize, s: usize, i: u32) -> Vec<ChernMonomial> {
    let nvars = r + s;
    let mut product = constant(nvars);
    for a in 0..r {
        for b in 0..s {
            let mut factor = constant(nvars);
            let mut xa = vec![0; nvars];
            xa[a] = 1;
            let mut yb = vec![0; nvars];
            yb[r + b] = 1;
            factor.insert(xa, BigInt::one());
            factor.insert(yb, BigInt::one());
            product = multiply(&product, &factor, Some(i));
        }
    }
    let mut remainder: Poly = product
        .into_iter()
        .filter(|(m, _)| m.iter().sum::<u32>() == i)
        .collect();

    let mut result = Vec::new();
    while let Some((lead, coeff)) = remainder.last_key_value().map(|(m, c)| (m.clone(), c.clone())) {
        let e_exponents = elementary_exponents(&lead[..r]);
        let f_exponents = elementary_exponents(&lead[r..]);
        let mut basis = constant(nvars);
        for (k, &m) in e_exponents.iter().enumerate() {
            let e = elementary(k as u32 + 1, 0, r, nvars);
            for _ in 0..m {
                basis = multiply(&basis, &e, None);
            }
        }
        for (k, &m) in f_exponents.iter().enumerate() {
            let f = elementary(k as u32 + 1, r, s, nvars);
            for _ in 0..m {
                basis = multiply(&basis, &f, None);
            }
        }
        for (m, c) in basis {
            add_into(&mut remainder, m, -(&coeff * c));
        }
        result.push(ChernMonomial { e_exponents, f_exponents, coeff });
    }
    result.sort_by(|a, b| (&a.e_exponents, &a.f_exponents).cmp(&(&b.e_exponents, &b.f_exponents)));
    result
}

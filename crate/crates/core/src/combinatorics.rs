//! Partitions in a box and the generating polynomials built from them.
//!
//! Polynomials here are in a single formal variable `z`, which plays the
//! role of the Lefschetz twist when counting summands of a motive.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive integers.
///
/// Trailing zeros are trimmed on construction, so `(2,1,0)` and `(2,1)` are
/// the same partition. Partitions are ordered by weight first and then
/// reverse-lexicographically, so `(2)` sorts before `(1,1)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(parts));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// The one-row partition `(m)`.
    pub fn row(m: u32) -> Self {
        if m == 0 {
            Self::empty()
        } else {
            Partition(vec![m])
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The `i`-th part (0-based), zero past the end.
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn fits_in(&self, rows: u32, cols: u32) -> bool {
        self.0.len() <= rows as usize && self.part(0) <= cols
    }

    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && (0..other.len()).all(|i| other.part(i) <= self.part(i))
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions with at most `rows` parts, each at most `cols`, in the
/// canonical order (graded, then reverse-lexicographic within a grade).
pub fn partitions_in_box(rows: u32, cols: u32) -> Vec<Partition> {
    fn extend(rows: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        out.push(Partition(prefix.clone()));
        if prefix.len() as u32 == rows {
            return;
        }
        for part in 1..=max {
            prefix.push(part);
            extend(rows, part, prefix, out);
            prefix.pop();
        }
    }

    let mut out = Vec::new();
    extend(rows, cols, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// The complementary partition `λ^op_i = cols − λ_{rows+1−i}` in the box.
pub fn complement(lambda: &Partition, rows: u32, cols: u32) -> Result<Partition> {
    if !lambda.fits_in(rows, cols) {
        return Err(Error::OutsideBox {
            partition: lambda.to_string(),
            rows,
            cols,
        });
    }
    let parts = (0..rows as usize)
        .map(|i| cols - lambda.part(rows as usize - 1 - i))
        .collect();
    Partition::new(parts)
}

/// A univariate polynomial in `z` with integer coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: BTreeMap<u32, BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(coeff: impl Into<BigInt>, degree: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(degree, coeff.into());
        p
    }

    /// Builds a polynomial from its coefficient list, constant term first.
    pub fn from_coeffs<T: Into<BigInt> + Clone>(coeffs: &[T]) -> Self {
        let mut p = Self::zero();
        for (deg, c) in coeffs.iter().enumerate() {
            p.add_term(deg as u32, c.clone().into());
        }
        p
    }

    /// `1 + z + … + z^{k−1}`.
    pub fn q_integer(k: u32) -> Self {
        Self::from_coeffs(&vec![1; k as usize])
    }

    fn add_term(&mut self, degree: u32, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(degree).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&degree);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, degree: u32) -> BigInt {
        self.coeffs.get(&degree).cloned().unwrap_or_default()
    }

    /// Nonzero coefficients in increasing degree.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigInt)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    pub fn eval(&self, z: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .map(|(d, c)| c * num_traits::pow(z.clone(), *d as usize))
            .sum()
    }

    pub fn value_at_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    /// `z^shift · self`.
    pub fn shift(&self, shift: u32) -> Self {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|(d, c)| (d + shift, c.clone())).collect(),
        }
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        let mut p = Self::zero();
        for (d, c) in &self.coeffs {
            p.add_term(*d, c * factor);
        }
        p
    }

    pub fn all_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// True when the coefficient list read from degree 0 to the top degree is
    /// symmetric.
    pub fn is_palindromic(&self) -> bool {
        match self.degree() {
            None => true,
            Some(top) => (0..=top).all(|i| self.coeff(i) == self.coeff(top - i)),
        }
    }

    /// Exact division; fails unless `divisor` divides `self` in `Z[z]`.
    pub fn div_exact(&self, divisor: &IntPolynomial) -> Result<IntPolynomial> {
        let top = divisor
            .degree()
            .ok_or_else(|| Error::InvalidArgument("division by the zero polynomial".into()))?;
        let lead = divisor.coeff(top);
        let mut rem = self.clone();
        let mut quotient = IntPolynomial::zero();
        while let Some(deg) = rem.degree() {
            if deg < top {
                return Err(Error::NonDivisible);
            }
            let (q, r) = rem.coeff(deg).div_rem(&lead);
            if !r.is_zero() {
                return Err(Error::NonDivisible);
            }
            let step = IntPolynomial::monomial(q, deg - top);
            rem = &rem - &(&step * divisor);
            quotient = &quotient + &step;
        }
        Ok(quotient)
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let mut out = self.clone();
        for (d, c) in &rhs.coeffs {
            out.add_term(*d, c.clone());
        }
        out
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        self.scale(&BigInt::from(-1))
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        let mut out = IntPolynomial::zero();
        for (da, ca) in &self.coeffs {
            for (db, cb) in &rhs.coeffs {
                out.add_term(da + db, ca * cb);
            }
        }
        out
    }
}

impl std::iter::Product for IntPolynomial {
    fn product<I: Iterator<Item = IntPolynomial>>(iter: I) -> Self {
        iter.fold(IntPolynomial::one(), |acc, p| &acc * &p)
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (deg, c)) in self.coeffs.iter().enumerate() {
            let magnitude = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = magnitude.is_one();
            match deg {
                0 => write!(f, "{magnitude}")?,
                1 if unit => write!(f, "z")?,
                1 => write!(f, "{magnitude}z")?,
                _ if unit => write!(f, "z^{deg}")?,
                _ => write!(f, "{magnitude}z^{deg}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coeffs.len()))?;
        for (deg, c) in &self.coeffs {
            match c.to_i64() {
                Some(small) => map.serialize_entry(&deg.to_string(), &small)?,
                None => map.serialize_entry(&deg.to_string(), &c.to_string())?,
            }
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct PolyVisitor;

        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Coefficient {
            Small(i64),
            Big(String),
        }

        impl<'de> Visitor<'de> for PolyVisitor {
            type Value = IntPolynomial;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a map from degree to integer coefficient")
            }

            fn visit_map<M: MapAccess<'de>>(self, mut access: M) -> std::result::Result<Self::Value, M::Error> {
                let mut p = IntPolynomial::zero();
                while let Some((deg, c)) = access.next_entry::<String, Coefficient>()? {
                    let deg: u32 = deg.parse().map_err(de::Error::custom)?;
                    let c = match c {
                        Coefficient::Small(v) => BigInt::from(v),
                        Coefficient::Big(s) => s.parse().map_err(de::Error::custom)?,
                    };
                    p.add_term(deg, c);
                }
                Ok(p)
            }
        }

        deserializer.deserialize_map(PolyVisitor)
    }
}

/// Generating function `Σ_{λ ⊆ b×(a−b)} z^{|λ|}` of partitions in a box.
pub fn gaussian_binomial(a: u32, b: u32) -> Result<IntPolynomial> {
    if b > a {
        return Err(Error::InvalidArgument(format!(
            "gaussian_binomial({a},{b}) needs b <= a"
        )));
    }
    // q-Pascal: [i, j] = [i−1, j−1] + z^j [i−1, j]
    let mut row = vec![IntPolynomial::one()];
    for i in 1..=a {
        let mut next = Vec::with_capacity(i as usize + 1);
        for j in 0..=i {
            let upper_left = if j >= 1 { row[j as usize - 1].clone() } else { IntPolynomial::zero() };
            let upper = if j < i { row[j as usize].shift(j) } else { IntPolynomial::zero() };
            next.push(&upper_left + &upper);
        }
        row = next;
    }
    Ok(row.swap_remove(b as usize))
}

fn cyclotomic_quotient(k: u32) -> IntPolynomial {
    let numerator = &IntPolynomial::monomial(1, k) - &IntPolynomial::one();
    let denominator = IntPolynomial::from_coeffs(&[-1, 1]);
    numerator
        .div_exact(&denominator)
        .expect("z - 1 divides z^k - 1")
}

/// `φ_n(z) = ∏_{k=2}^{n} (z^k − 1)/(z − 1)`; `φ_1 = 1`.
pub fn phi(n: u32) -> Result<IntPolynomial> {
    if n < 1 {
        return Err(Error::InvalidArgument("phi(n) needs n >= 1".into()));
    }
    Ok((2..=n).map(cyclotomic_quotient).product())
}

/// `ψ_n(z) = ∏_{k=1}^{n−1} (z^{2k} − 1)/(z − 1)`.
pub fn psi(n: u32) -> Result<IntPolynomial> {
    if n < 1 {
        return Err(Error::InvalidArgument("psi(n) needs n >= 1".into()));
    }
    Ok((1..n).map(|k| cyclotomic_quotient(2 * k)).product())
}

/// `φ_n / (φ_d · φ_{n+1−d})`, whose coefficients count the twists of
/// `SB(A)` in `SB_d(A)` when Krull–Schmidt holds.
pub fn gensb_polynomial(n: u32, d: u32) -> Result<IntPolynomial> {
    if !(1 < d && d < n) {
        return Err(Error::InvalidArgument(format!(
            "gensb_polynomial({n},{d}) needs 1 < d < n"
        )));
    }
    let denominator = &phi(d)? * &phi(n + 1 - d)?;
    phi(n)?.div_exact(&denominator)
}

/// Checks `φ_n/(φ_{d−1}φ_{n+1−d}) = [d]_z · φ_n/(φ_d φ_{n+1−d})` as an
/// identity of rational functions, by cross-multiplying denominators. The
/// individual quotients need not be polynomials (for instance `n = 5,
/// d = 2`).
pub fn proofgensb_identity(n: u32, d: u32) -> bool {
    let check = || -> Result<bool> {
        if !(1 < d && d < n) {
            return Ok(false);
        }
        let lhs = &(&phi(n)? * &phi(d)?) * &phi(n + 1 - d)?;
        let rhs = &(&(&IntPolynomial::q_integer(d) * &phi(n)?) * &phi(d - 1)?) * &phi(n + 1 - d)?;
        Ok(lhs == rhs)
    };
    check().unwrap_or(false)
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_coeffs(c)
    }

    // Independent oracle: Σ z^{|λ|} over an explicit enumeration that does not
    // share code with `partitions_in_box`.
    fn box_generating_function(rows: u32, cols: u32) -> IntPolynomial {
        let mut acc = IntPolynomial::zero();
        let total = (cols + 1).pow(rows);
        for code in 0..total {
            let mut digits = Vec::new();
            let mut c = code;
            for _ in 0..rows {
                digits.push(c % (cols + 1));
                c /= cols + 1;
            }
            if digits.windows(2).all(|w| w[0] >= w[1]) {
                acc = &acc + &IntPolynomial::monomial(1, digits.iter().sum());
            }
        }
        acc
    }

    #[test]
    fn partition_trims_and_rejects() {
        assert_eq!(p(&[2, 1, 0, 0]).parts(), &[2, 1]);
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(p(&[]).is_empty());
    }

    #[test]
    fn box_enumeration_examples() {
        assert_eq!(partitions_in_box(1, 1), vec![p(&[]), p(&[1])]);
        assert_eq!(partitions_in_box(2, 3).len(), 10);
        assert_eq!(partitions_in_box(3, 0), vec![p(&[])]);
        let grade2: Vec<_> = partitions_in_box(2, 3).into_iter().filter(|l| l.weight() == 2).collect();
        assert_eq!(grade2, vec![p(&[2]), p(&[1, 1])]);
    }

    #[test]
    fn box_counts_are_binomials() {
        for rows in 0..6u32 {
            for cols in 0..6u32 {
                let count = partitions_in_box(rows, cols).len();
                assert_eq!(BigInt::from(count), binomial((rows + cols) as u64, rows as u64));
            }
        }
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement(&p(&[1, 1]), 2, 3).unwrap(), p(&[2, 2]));
        assert_eq!(complement(&p(&[]), 3, 2).unwrap(), p(&[2, 2, 2]));
        assert_eq!(complement(&p(&[3, 2]), 2, 3).unwrap(), p(&[1]));
        assert!(matches!(complement(&p(&[4]), 2, 3), Err(Error::OutsideBox { .. })));
        assert!(complement(&p(&[1, 1, 1]), 2, 3).is_err());
    }

    #[test]
    fn complement_is_an_involution() {
        for rows in 0..=6 {
            for cols in 0..=6 {
                for l in partitions_in_box(rows, cols) {
                    let c = complement(&l, rows, cols).unwrap();
                    assert_eq!(complement(&c, rows, cols).unwrap(), l);
                    assert_eq!(c.weight() + l.weight(), rows * cols);
                }
            }
        }
    }

    #[test]
    fn gaussian_binomial_examples() {
        assert_eq!(gaussian_binomial(2, 1).unwrap(), poly(&[1, 1]));
        assert_eq!(gaussian_binomial(4, 2).unwrap(), poly(&[1, 1, 2, 1, 1]));
        assert_eq!(gaussian_binomial(7, 0).unwrap(), IntPolynomial::one());
        assert!(gaussian_binomial(2, 3).is_err());
    }

    #[test]
    fn gaussian_binomial_matches_box_oracle() {
        for a in 0..=8 {
            for b in 0..=a {
                let g = gaussian_binomial(a, b).unwrap();
                assert_eq!(g, box_generating_function(b, a - b), "[{a} choose {b}]");
                assert!(g.is_palindromic());
                assert_eq!(g.value_at_one(), binomial(a as u64, b as u64));
            }
        }
    }

    #[test]
    fn box_twists_are_palindromic() {
        for r in 0..=5 {
            for c in 0..=5 {
                let mut twists = IntPolynomial::zero();
                for l in partitions_in_box(r, c) {
                    twists = &twists + &IntPolynomial::monomial(1, r * c - l.weight());
                }
                assert_eq!(twists, gaussian_binomial(r + c, r).unwrap());
            }
        }
    }

    #[test]
    fn phi_and_psi_examples() {
        assert_eq!(phi(1).unwrap(), IntPolynomial::one());
        assert_eq!(phi(2).unwrap(), poly(&[1, 1]));
        assert_eq!(phi(3).unwrap(), poly(&[1, 2, 2, 1]));
        assert!(phi(0).is_err());
        assert_eq!(psi(1).unwrap(), IntPolynomial::one());
        assert_eq!(psi(2).unwrap(), poly(&[1, 1]));
        assert_eq!(psi(3).unwrap(), poly(&[1, 2, 2, 2, 1]));
        assert!(psi(0).is_err());
    }

    #[test]
    fn phi_degree_and_value() {
        let mut factorial = BigInt::one();
        for n in 1..=8u32 {
            factorial *= n;
            let f = phi(n).unwrap();
            assert_eq!(f.degree(), Some(n * (n - 1) / 2));
            assert_eq!(f.value_at_one(), factorial);
            assert_eq!(psi(n).unwrap().degree(), Some((n - 1) * (n - 1)));
        }
    }

    #[test]
    fn gensb_examples() {
        assert_eq!(gensb_polynomial(4, 2).unwrap(), poly(&[1, 0, 1]));
        assert_eq!(gensb_polynomial(4, 3).unwrap(), poly(&[1, 0, 1]));
        assert_eq!(gensb_polynomial(6, 2).unwrap(), poly(&[1, 0, 1, 0, 1]));
        assert!(gensb_polynomial(4, 1).is_err());
        assert!(gensb_polynomial(4, 4).is_err());
        // [5 choose 2]_z = [5]_z (1 + z²)
        assert_eq!(
            gaussian_binomial(5, 2).unwrap(),
            &IntPolynomial::q_integer(5) * &gensb_polynomial(4, 2).unwrap()
        );
    }

    #[test]
    fn gensb_relates_to_gaussian_binomial() {
        for n in 3..=8u32 {
            for d in 2..n {
                if num_integer::gcd(n + 1, d) == 1 {
                    let g = gensb_polynomial(n, d).unwrap();
                    assert!(g.all_nonnegative());
                    assert_eq!(gaussian_binomial(n + 1, d).unwrap(), &IntPolynomial::q_integer(n + 1) * &g);
                } else {
                    assert_eq!(gensb_polynomial(n, d), Err(Error::NonDivisible), "({n},{d})");
                }
            }
        }
    }

    #[test]
    fn proofgensb_holds() {
        assert!(proofgensb_identity(4, 2));
        assert!(proofgensb_identity(5, 2));
        assert!(proofgensb_identity(6, 3));
        assert!(proofgensb_identity(7, 4));
        assert!(!proofgensb_identity(4, 1));
    }

    #[test]
    fn exact_division_rejects_remainders() {
        let f = poly(&[1, 0, 1]);
        assert_eq!(f.div_exact(&poly(&[1, 1])), Err(Error::NonDivisible));
        assert_eq!(poly(&[1, 2, 1]).div_exact(&poly(&[1, 1])).unwrap(), poly(&[1, 1]));
        assert_eq!(poly(&[2, 2]).div_exact(&poly(&[2])).unwrap(), poly(&[1, 1]));
        assert_eq!(poly(&[1, 1]).div_exact(&poly(&[2])), Err(Error::NonDivisible));
    }

    #[test]
    fn polynomial_text_and_json() {
        assert_eq!(poly(&[1, 2, 0, 1]).to_string(), "1 + 2z + z^3");
        assert_eq!(poly(&[0, -1, 3]).to_string(), "-z + 3z^2");
        assert_eq!(IntPolynomial::zero().to_string(), "0");
        let f = poly(&[1, 0, 1]);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"0":1,"2":1}"#);
        assert_eq!(serde_json::from_str::<IntPolynomial>(&json).unwrap(), f);
    }
}

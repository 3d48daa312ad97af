//! Correspondences: classes on a product `X×Y` of Grassmannians.
//!
//! `CH(X×Y)` is free on the external products `Δ_λ×Δ_μ`. A class on `X×Y`
//! acts as a morphism from `X` to `Y`; composition uses the degree pairing
//! on the middle factor,
//! `(f_b×g_b)∘(f_a×g_a) = deg(g_a·f_b)·(f_a×g_b)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chow_ring::{multiply, render_sum, ChowClass, GrassmannSpace};
use crate::combinatorics::{binomial, Partition};
use crate::error::{Error, Result};
use crate::ring::{coeff_serde, prime_factors, Coeff, CoefficientRing, Combination};
use crate::symmetric::tensor_chern_polynomial;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductClass {
    left: GrassmannSpace,
    right: GrassmannSpace,
    inner: Combination<(Partition, Partition)>,
}

impl ProductClass {
    pub fn zero(left: GrassmannSpace, right: GrassmannSpace, ring: CoefficientRing) -> Self {
        ProductClass { left, right, inner: Combination::zero(ring) }
    }

    /// The unit `1×1`.
    pub fn one(left: GrassmannSpace, right: GrassmannSpace, ring: CoefficientRing) -> Self {
        let mut out = Self::zero(left, right, ring);
        out.inner.terms.insert((Partition::empty(), Partition::empty()), Coeff::one());
        out
    }

    pub fn from_terms(
        left: GrassmannSpace,
        right: GrassmannSpace,
        ring: CoefficientRing,
        terms: impl IntoIterator<Item = ((Partition, Partition), Coeff)>,
    ) -> Result<Self> {
        let mut out = Self::zero(left, right, ring);
        for ((l, r), c) in terms {
            left.check(&l)?;
            right.check(&r)?;
            out.inner.add_term((l, r), c)?;
        }
        Ok(out)
    }

    pub fn left(&self) -> GrassmannSpace {
        self.left
    }

    pub fn right(&self) -> GrassmannSpace {
        self.right
    }

    pub fn ring(&self) -> CoefficientRing {
        self.inner.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Partition, Partition), &Coeff)> {
        self.inner.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.inner.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    pub fn coeff(&self, l: &Partition, r: &Partition) -> Coeff {
        self.inner
            .terms
            .get(&(l.clone(), r.clone()))
            .cloned()
            .unwrap_or_else(Coeff::zero)
    }

    fn check_same_spaces(&self, other: &Self) -> Result<()> {
        if self.left != other.left || self.right != other.right {
            return Err(Error::SpaceMismatch(format!(
                "{}×{} vs {}×{}",
                self.left, self.right, other.left, other.right
            )));
        }
        self.inner.check_ring(&other.inner)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_spaces(other)?;
        Ok(ProductClass { left: self.left, right: self.right, inner: self.inner.add(&other.inner)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Coeff::one()).expect("negation stays in the ring")
    }

    pub fn scale(&self, factor: &Coeff) -> Result<Self> {
        Ok(ProductClass { left: self.left, right: self.right, inner: self.inner.scale(factor)? })
    }

    pub fn scale_int(&self, factor: i64) -> Self {
        self.scale(&Coeff::from_integer(BigInt::from(factor)))
            .expect("integer scaling stays in the ring")
    }

    pub fn cast(&self, ring: CoefficientRing) -> Result<Self> {
        Ok(ProductClass { left: self.left, right: self.right, inner: self.inner.cast(ring)? })
    }

    /// `Ok(None)` for zero, `Ok(Some(k))` if every term has codimension `k`.
    pub fn homogeneous_degree(&self) -> Result<Option<u32>> {
        let mut degrees = self.terms().map(|((l, r), _)| l.weight() + r.weight());
        let Some(first) = degrees.next() else {
            return Ok(None);
        };
        if degrees.all(|d| d == first) {
            Ok(Some(first))
        } else {
            Err(Error::Inhomogeneous)
        }
    }

    pub fn homogeneous_part(&self, k: u32) -> Self {
        let mut out = Self::zero(self.left, self.right, self.ring());
        for ((l, r), c) in self.terms() {
            if l.weight() + r.weight() == k {
                out.inner.terms.insert((l.clone(), r.clone()), c.clone());
            }
        }
        out
    }

    /// Groups the terms as `Σ_μ (class on the left) × Δ_μ`.
    pub fn by_right_factor(&self) -> BTreeMap<Partition, ChowClass> {
        let mut groups: BTreeMap<Partition, ChowClass> = BTreeMap::new();
        for ((l, r), c) in self.terms() {
            let entry = groups
                .entry(r.clone())
                .or_insert_with(|| ChowClass::zero(self.left, self.ring()));
            let term = ChowClass::from_terms(self.left, self.ring(), [(l.clone(), c.clone())])
                .expect("term already validated");
            *entry = entry.add(&term).expect("same space and ring");
        }
        groups
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::one(self.left, self.right, self.ring());
        for _ in 0..k {
            acc = intersection(&acc, self)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for ProductClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let groups = self.by_right_factor();
        let mut pieces = Vec::new();
        for (r, left_class) in groups.iter().rev() {
            let right_name = self.right.class_name(r);
            let terms: Vec<_> = left_class.terms().collect();
            let piece = if terms.len() == 1 {
                let (l, c) = terms[0];
                if l.is_empty() && c.abs() != Coeff::one() {
                    let magnitude = render_sum(std::iter::once(("1".to_string(), c)), true);
                    format!("{magnitude}(1×{right_name})")
                } else {
                    let left = render_sum(std::iter::once((self.left.class_name(l), c)), true);
                    format!("{left}×{right_name}")
                }
            } else {
                format!("({left_class})×{right_name}")
            };
            pieces.push(piece);
        }
        let mut out = String::new();
        for (i, piece) in pieces.into_iter().enumerate() {
            match (i, piece.strip_prefix('-')) {
                (0, _) => out.push_str(&piece),
                (_, Some(rest)) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                (_, None) => {
                    out.push_str(" + ");
                    out.push_str(&piece);
                }
            }
        }
        write!(f, "{out}")
    }
}

#[derive(Serialize, Deserialize)]
struct ProductTermRepr {
    left_partition: Partition,
    right_partition: Partition,
    #[serde(with = "coeff_serde")]
    coefficient: Coeff,
}

#[derive(Serialize, Deserialize)]
struct ProductClassRepr {
    left: GrassmannSpace,
    right: GrassmannSpace,
    ring: CoefficientRing,
    terms: Vec<ProductTermRepr>,
}

impl Serialize for ProductClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProductClassRepr {
            left: self.left,
            right: self.right,
            ring: self.ring(),
            terms: self
                .terms()
                .map(|((l, r), c)| ProductTermRepr {
                    left_partition: l.clone(),
                    right_partition: r.clone(),
                    coefficient: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProductClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ProductClassRepr::deserialize(d)?;
        ProductClass::from_terms(
            repr.left,
            repr.right,
            repr.ring,
            repr
                .terms
                .into_iter()
                .map(|t| ((t.left_partition, t.right_partition), t.coefficient)),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// `x×y`, bilinear in both factors.
pub fn external_product(x: &ChowClass, y: &ChowClass) -> Result<ProductClass> {
    if x.ring() != y.ring() {
        return Err(Error::RingMismatch(x.ring().to_string(), y.ring().to_string()));
    }
    let mut out = ProductClass::zero(x.space(), y.space(), x.ring());
    for (l, a) in x.terms() {
        for (r, b) in y.terms() {
            out.inner.add_term((l.clone(), r.clone()), a * b)?;
        }
    }
    Ok(out)
}

pub fn transpose(a: &ProductClass) -> ProductClass {
    let mut out = ProductClass::zero(a.right, a.left, a.ring());
    for ((l, r), c) in a.terms() {
        out.inner.terms.insert((r.clone(), l.clone()), c.clone());
    }
    out
}

/// `b∘a` for `a` on `X×Y` and `b` on `Y×Z`.
pub fn compose(b: &ProductClass, a: &ProductClass) -> Result<ProductClass> {
    if a.right != b.left {
        return Err(Error::SpaceMismatch(format!(
            "cannot compose {}×{} after {}×{}",
            b.left, b.right, a.left, a.right
        )));
    }
    a.inner.check_ring(&b.inner)?;
    let middle = a.right;
    let mut by_left: BTreeMap<&Partition, Vec<(&Partition, &Coeff)>> = BTreeMap::new();
    for ((nu, kappa), c) in b.terms() {
        by_left.entry(nu).or_default().push((kappa, c));
    }
    let mut out = ProductClass::zero(a.left, b.right, a.ring());
    for ((lambda, mu), ca) in a.terms() {
        if mu.weight() > middle.dim() {
            continue;
        }
        let nu = middle.complement(mu).expect("term fits the middle box");
        if let Some(row) = by_left.get(&nu) {
            for (kappa, cb) in row {
                out.inner.add_term((lambda.clone(), (*kappa).clone()), ca * *cb)?;
            }
        }
    }
    Ok(out)
}

/// The class of the diagonal, `Σ_λ Δ_λ × Δ_{λ^op}`.
pub fn diagonal(space: GrassmannSpace) -> ProductClass {
    let mut out = ProductClass::zero(space, space, CoefficientRing::Integers);
    for lambda in space.basis() {
        let op = space.complement(&lambda).expect("basis partitions fit");
        out.inner.terms.insert((lambda, op), Coeff::one());
    }
    out
}

/// Ring product in `CH(X×Y)`, factorwise.
pub fn intersection(a: &ProductClass, b: &ProductClass) -> Result<ProductClass> {
    a.check_same_spaces(b)?;
    let ring = a.ring();
    let mut out = ProductClass::zero(a.left, a.right, ring);
    for ((l1, r1), c1) in a.terms() {
        for ((l2, r2), c2) in b.terms() {
            let left = multiply(
                &ChowClass::basis(a.left, l1.clone())?.cast(ring)?,
                &ChowClass::basis(a.left, l2.clone())?.cast(ring)?,
            )?;
            if left.is_zero() {
                continue;
            }
            let right = multiply(
                &ChowClass::basis(a.right, r1.clone())?.cast(ring)?,
                &ChowClass::basis(a.right, r2.clone())?.cast(ring)?,
            )?;
            let coefficient = c1 * c2;
            for (l, x) in left.terms() {
                for (r, y) in right.terms() {
                    out.inner.add_term((l.clone(), r.clone()), &coefficient * x * y)?;
                }
            }
        }
    }
    Ok(out)
}

pub fn is_projector(p: &ProductClass) -> Result<bool> {
    if p.left != p.right {
        return Err(Error::SpaceMismatch(format!(
            "{}×{} is not an endo-correspondence",
            p.left, p.right
        )));
    }
    Ok(compose(p, p)? == *p)
}

/// Source and target Tate twists of a morphism `(X,p)(i) → (Y,q)(j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistFrame {
    pub source_twist: i64,
    pub target_twist: i64,
}

impl TwistFrame {
    pub fn new(source_twist: i64, target_twist: i64) -> Self {
        TwistFrame { source_twist, target_twist }
    }

    /// Codimension of a morphism `X(i) → Y(j)` in `CH(X×Y)`.
    pub fn expected_codim(&self, left: GrassmannSpace) -> i64 {
        left.dim() as i64 + self.source_twist - self.target_twist
    }

    /// The frame of the inverse morphism `Y(j) → X(i)`.
    pub fn inverse(&self) -> Self {
        TwistFrame { source_twist: self.target_twist, target_twist: self.source_twist }
    }

    pub fn conforms(&self, a: &ProductClass) -> Result<()> {
        let expected = self.expected_codim(a.left);
        match a.homogeneous_degree() {
            Ok(None) => Ok(()),
            Ok(Some(k)) if k as i64 == expected => Ok(()),
            Ok(Some(k)) => Err(Error::CodimMismatch { expected, found: k.to_string() }),
            Err(_) => Err(Error::CodimMismatch { expected, found: "inhomogeneous".to_string() }),
        }
    }
}

/// Whether `j1: (X,p)(i) → (Y,q)(j)` and `j2` in the opposite direction are
/// mutually inverse morphisms of motives: `q∘j1 = j1∘p`, `p∘j2 = j2∘q`,
/// `j1∘j2 = q` and `j2∘j1 = p`.
pub fn check_iso_pair(
    j1: &ProductClass,
    j2: &ProductClass,
    p: &ProductClass,
    q: &ProductClass,
    frame: TwistFrame,
) -> Result<bool> {
    let (x, y) = (j1.left, j1.right);
    if j2.left != y || j2.right != x || p.left != x || p.right != x || q.left != y || q.right != y {
        return Err(Error::SpaceMismatch(format!(
            "j1 on {x}×{y} needs j2 on {y}×{x}, p on {x}×{x} and q on {y}×{y}"
        )));
    }
    frame.conforms(j1)?;
    frame.inverse().conforms(j2)?;
    Ok(compose(q, j1)? == compose(j1, p)?
        && compose(p, j2)? == compose(j2, q)?
        && compose(j1, j2)? == *q
        && compose(j2, j1)? == *p)
}

/// Coefficientwise reduction of an integral class modulo `m`.
pub fn reduce_mod(a: &ProductClass, m: u64) -> Result<ProductClass> {
    if a.ring() != CoefficientRing::Integers {
        return Err(Error::UnsupportedRing { ring: a.ring().to_string(), what: "reduction mod m".into() });
    }
    a.cast(CoefficientRing::integers_mod(m)?)
}

/// `a ≡ b (mod m)`, i.e. `a − b ∈ m·CH`.
pub fn eq_mod(a: &ProductClass, b: &ProductClass, m: u64) -> Result<bool> {
    Ok(reduce_mod(&a.sub(b)?, m)?.is_zero())
}

/// Primes dividing some reduced denominator of a rational class.
pub fn denominator_support(a: &ProductClass) -> Result<BTreeSet<u64>> {
    if a.ring() != CoefficientRing::Rationals {
        return Err(Error::UnsupportedRing {
            ring: a.ring().to_string(),
            what: "denominator support needs rational coefficients".into(),
        });
    }
    Ok(a.terms().flat_map(|(_, c)| prime_factors(c.denom())).collect())
}

fn require_unit(c: &ChowClass) -> Result<()> {
    if c.constant_term().is_one() {
        Ok(())
    } else {
        Err(Error::NotAUnit)
    }
}

/// `c_i(pr₁*E ⊗ pr₂*L) = Σ_j C(rank−j, i−j)·c_j(E)×c₁(L)^{i−j}` for a bundle
/// `E` with total Chern class `e_total` and a line bundle `L` with first
/// Chern class `l_c1`.
pub fn tensor_line_chern(e_total: &ChowClass, rank: u32, l_c1: &ChowClass, i: u32) -> Result<ProductClass> {
    if i > rank {
        return Err(Error::RankOutOfRange { index: i, rank });
    }
    require_unit(e_total)?;
    match l_c1.homogeneous_degree() {
        Ok(Some(1)) | Ok(None) => {}
        Ok(Some(k)) => return Err(Error::CodimMismatch { expected: 1, found: k.to_string() }),
        Err(_) => return Err(Error::CodimMismatch { expected: 1, found: "inhomogeneous".into() }),
    }
    let mut out = ProductClass::zero(e_total.space(), l_c1.space(), e_total.ring());
    for j in 0..=i {
        let c_j = e_total.homogeneous_part(j);
        let weight = Coeff::from_integer(binomial((rank - j) as u64, (i - j) as u64));
        let term = external_product(&c_j, &l_c1.pow(i - j)?)?.scale(&weight)?;
        out = out.add(&term)?;
    }
    Ok(out)
}

/// `c_i(pr₁*E ⊗ pr₂*F)` for bundles of arbitrary ranks, through the
/// expansion of `∏(1 + x_a + y_b)` in elementary symmetric functions.
pub fn tensor_chern(
    e_total: &ChowClass,
    e_rank: u32,
    f_total: &ChowClass,
    f_rank: u32,
    i: u32,
) -> Result<ProductClass> {
    if i > e_rank * f_rank {
        return Err(Error::RankOutOfRange { index: i, rank: e_rank * f_rank });
    }
    require_unit(e_total)?;
    require_unit(f_total)?;
    let mut out = ProductClass::zero(e_total.space(), f_total.space(), e_total.ring());
    for term in tensor_chern_polynomial(e_rank as usize, f_rank as usize, i) {
        let mut left = ChowClass::one(e_total.space(), e_total.ring());
        for (k, &m) in term.e_exponents.iter().enumerate() {
            left = multiply(&left, &e_total.homogeneous_part(k as u32 + 1).pow(m)?)?;
        }
        let mut right = ChowClass::one(f_total.space(), f_total.ring());
        for (k, &m) in term.f_exponents.iter().enumerate() {
            right = multiply(&right, &f_total.homogeneous_part(k as u32 + 1).pow(m)?)?;
        }
        let piece = external_product(&left, &right)?.scale(&Coeff::from_integer(term.coeff))?;
        out = out.add(&piece)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow_ring::{chern_quotient, invert_total_chern, named_generator};
    use crate::ring::{frac, int};

    fn gr25() -> GrassmannSpace {
        GrassmannSpace::new(2, 5).unwrap()
    }

    fn p4() -> GrassmannSpace {
        GrassmannSpace::projective(4).unwrap()
    }

    fn named(space: GrassmannSpace, name: &str) -> ChowClass {
        named_generator(space, name).unwrap()
    }

    fn h(k: u32) -> ChowClass {
        ChowClass::basis(p4(), Partition::row(k)).unwrap()
    }

    fn tau2() -> ChowClass {
        invert_total_chern(&chern_quotient(gr25())).unwrap()
    }

    fn minus_h() -> ChowClass {
        h(1).neg()
    }

    fn x(a: &ChowClass, b: &ChowClass) -> ProductClass {
        external_product(a, b).unwrap()
    }

    fn rho() -> ProductClass {
        tensor_line_chern(&tau2(), 2, &minus_h(), 2).unwrap()
    }

    #[test]
    fn external_products() {
        let one = ChowClass::one(p4(), CoefficientRing::Integers);
        let g2 = named(gr25(), "g2");
        assert_eq!(x(&g2, &one).to_string(), "g₂×1");
        assert_eq!(x(&named(gr25(), "sigma1"), &h(1)).to_string(), "σ₁×H");
        assert!(x(&ChowClass::zero(gr25(), CoefficientRing::Integers), &h(2)).is_zero());
        let q = one.cast(CoefficientRing::Rationals).unwrap();
        assert!(matches!(external_product(&g2, &q), Err(Error::RingMismatch(..))));
    }

    #[test]
    fn segre_classes_of_tautological_tensor_line() {
        let r = tensor_line_chern(&tau2(), 2, &minus_h(), 1).unwrap();
        let one_p = ChowClass::one(p4(), CoefficientRing::Integers);
        let one_g = ChowClass::one(gr25(), CoefficientRing::Integers);
        let expected_r = x(&named(gr25(), "sigma1"), &one_p).neg().sub(&x(&one_g, &h(1)).scale_int(2)).unwrap();
        assert_eq!(r, expected_r);
        let expected_rho = x(&named(gr25(), "g2"), &one_p)
            .add(&x(&named(gr25(), "sigma1"), &h(1)))
            .unwrap()
            .add(&x(&one_g, &h(2)))
            .unwrap();
        assert_eq!(rho(), expected_rho);
        assert_eq!(rho().to_string(), "1×H² + σ₁×H + g₂×1");
        assert_eq!(r.to_string(), "-2(1×H) - σ₁×1");
        assert_eq!(tensor_line_chern(&tau2(), 2, &minus_h(), 0).unwrap(), ProductClass::one(gr25(), p4(), CoefficientRing::Integers));
        assert!(matches!(tensor_line_chern(&tau2(), 2, &minus_h(), 3), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(tensor_line_chern(&named(gr25(), "g2"), 2, &minus_h(), 1), Err(Error::NotAUnit)));
        assert!(matches!(tensor_line_chern(&tau2(), 2, &h(2), 1), Err(Error::CodimMismatch { .. })));
    }

    #[test]
    fn general_tensor_chern_agrees_with_line_formula() {
        let line = ChowClass::one(p4(), CoefficientRing::Integers).add(&minus_h()).unwrap();
        for i in 0..=2 {
            assert_eq!(
                tensor_chern(&tau2(), 2, &line, 1, i).unwrap(),
                tensor_line_chern(&tau2(), 2, &minus_h(), i).unwrap()
            );
        }
        let c1 = tensor_chern(&tau2(), 2, &tau2(), 2, 1).unwrap();
        let sigma1 = named(gr25(), "sigma1");
        let one = ChowClass::one(gr25(), CoefficientRing::Integers);
        assert_eq!(c1, x(&sigma1, &one).add(&x(&one, &sigma1)).unwrap().scale_int(-2));
        assert!(tensor_chern(&tau2(), 2, &tau2(), 2, 5).is_err());
    }

    #[test]
    fn rho_square_matches_display_mod_5() {
        let sq = rho().pow(2).unwrap();
        let s = |n: &str| named(gr25(), n);
        let one_g = ChowClass::one(gr25(), CoefficientRing::Integers);
        let one_p = ChowClass::one(p4(), CoefficientRing::Integers);
        let display = x(&one_g, &h(4))
            .add(&x(&s("sigma1"), &h(3)).scale_int(2)).unwrap()
            .add(&x(&s("sigma2").add(&s("g2").scale_int(3)).unwrap(), &h(2))).unwrap()
            .add(&x(&s("g3"), &h(1)).scale_int(2)).unwrap()
            .add(&x(&s("g4"), &one_p)).unwrap();
        assert_eq!(sq, display);
        assert!(eq_mod(&sq, &display, 5).unwrap());
        assert_eq!(sq.to_string(), "1×H⁴ + 2σ₁×H³ + (σ₂+3g₂)×H² + 2g₃×H + g₄×1");
    }

    #[test]
    fn diagonal_is_identity() {
        for space in [gr25(), p4()] {
            let d = diagonal(space);
            assert_eq!(compose(&d, &d).unwrap(), d);
            assert_eq!(transpose(&d), d);
            assert!(is_projector(&d).unwrap());
        }
        assert_eq!(diagonal(p4()).len(), 5);
        assert_eq!(diagonal(gr25()).len(), 10);
        let r = rho();
        assert_eq!(compose(&r, &diagonal(gr25())).unwrap(), r);
        assert_eq!(compose(&diagonal(p4()), &r).unwrap(), r);
        assert!(matches!(is_projector(&r), Err(Error::SpaceMismatch(_))));
        assert!(matches!(compose(&r, &r), Err(Error::SpaceMismatch(_))));
    }

    #[test]
    fn composition_of_rho_powers() {
        let r2 = rho().pow(2).unwrap();
        let r3 = rho().pow(3).unwrap();
        let forward = compose(&r3, &transpose(&r2)).unwrap();
        assert!(eq_mod(&forward, &diagonal(p4()), 5).unwrap());
        assert_eq!(forward.coeff(&Partition::empty(), &Partition::row(4)), int(6));
        assert_eq!(forward.coeff(&Partition::row(2), &Partition::row(2)), int(21));
        let p = compose(&transpose(&r2), &r3).unwrap();
        assert_eq!(p.homogeneous_degree().unwrap(), Some(6));
        let p5 = reduce_mod(&p, 5).unwrap();
        assert_eq!(compose(&p5, &p5).unwrap(), p5);
    }

    #[test]
    fn transpose_reverses_composition() {
        let r2 = rho().pow(2).unwrap();
        let r3 = rho().pow(3).unwrap();
        let a = transpose(&r2);
        assert_eq!(transpose(&compose(&r3, &a).unwrap()), compose(&transpose(&a), &transpose(&r3)).unwrap());
        assert_eq!(transpose(&transpose(&r3)), r3);
        assert_eq!(transpose(&r2).coeff(&Partition::row(4), &Partition::empty()), int(1));
    }

    #[test]
    fn modular_and_denominator_queries() {
        let r = rho();
        assert!(eq_mod(&r, &r, 7).unwrap());
        assert!(reduce_mod(&r.scale_int(5), 5).unwrap().is_zero());
        let q = r.cast(CoefficientRing::Rationals).unwrap();
        assert!(reduce_mod(&q, 5).is_err());
        assert!(denominator_support(&q).unwrap().is_empty());
        assert!(denominator_support(&r).is_err());
        let half = q.scale(&frac(5, 2)).unwrap();
        assert_eq!(denominator_support(&half).unwrap().into_iter().collect::<Vec<_>>(), vec![2]);
        let sixth = q.scale(&frac(1, 6)).unwrap();
        assert_eq!(denominator_support(&sixth).unwrap().into_iter().collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn iso_pair_on_diagonals() {
        let d = diagonal(gr25());
        let frame = TwistFrame::new(0, 0);
        assert!(check_iso_pair(&d, &d, &d, &d, frame).unwrap());
        assert!(matches!(check_iso_pair(&d, &d, &d, &d, TwistFrame::new(1, 0)), Err(Error::CodimMismatch { .. })));
        let doubled = d.scale_int(2);
        assert!(!check_iso_pair(&doubled, &d, &d, &d, frame).unwrap());
        assert_eq!(frame.expected_codim(gr25()), 6);
        assert_eq!(TwistFrame::new(2, 0).expected_codim(gr25()), 8);
    }

    #[test]
    fn json_round_trip() {
        let r = rho();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("left_partition"));
        let back: ProductClass = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}

//! Witnesses certifying that a correspondence is rational, i.e. defined over
//! the base field.
//!
//! Rational cycles are generated by the Chern classes of external tensor
//! products of tautological bundles and by diagonals, and are closed under
//! sums, integer multiples, intersection products, composition and
//! transposition. A witness records such a derivation together with its
//! conclusion so that it can be replayed. `ModAdjust` nodes change a cycle
//! by a multiple `m·z`; a witness containing them only certifies
//! rationality modulo `m`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::chow_ring::{chern_quotient, invert_total_chern, GrassmannSpace};
use crate::correspondence::{compose, diagonal, intersection, tensor_chern, tensor_line_chern, transpose, ProductClass};
use crate::error::{Error, Result};
use crate::ring::{Coeff, CoefficientRing};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Derivation {
    /// `c_i(pr₁*τ_d ⊗ pr₂*τ_{d2})` on `Gr(d,n) × Gr(d2,n)`.
    SegreChern { d: u32, d2: u32, n: u32, i: u32 },
    Diagonal { space: GrassmannSpace },
    Sum { inputs: Vec<Derivation> },
    IntegerScale { factor: i64, input: Box<Derivation> },
    IntersectionProduct { left: Box<Derivation>, right: Box<Derivation> },
    /// `outer ∘ inner`.
    Compose { outer: Box<Derivation>, inner: Box<Derivation> },
    Transpose { input: Box<Derivation> },
    /// `input − modulus·adjustment`.
    ModAdjust { modulus: u64, adjustment: ProductClass, input: Box<Derivation> },
}

/// Operations that build a new witness from existing ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Combinator {
    Sum,
    IntegerScale(i64),
    IntersectionProduct,
    Compose,
    Transpose,
    ModAdjust { modulus: u64, adjustment: ProductClass },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lineage {
    Integral,
    Modulo { moduli: BTreeSet<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalWitness {
    pub conclusion: ProductClass,
    pub derivation: Derivation,
}

/// `c_i(pr₁*τ_d ⊗ pr₂*τ_{d2})` on `Gr(d,n) × Gr(d2,n)`.
pub fn segre_chern_class(d: u32, d2: u32, n: u32, i: u32) -> Result<ProductClass> {
    let left = GrassmannSpace::new(d, n)?;
    let right = GrassmannSpace::new(d2, n)?;
    if i > d * d2 {
        return Err(Error::RankOutOfRange { index: i, rank: d * d2 });
    }
    let tau_left = invert_total_chern(&chern_quotient(left))?;
    let tau_right = invert_total_chern(&chern_quotient(right))?;
    if d2 == 1 {
        tensor_line_chern(&tau_left, d, &tau_right.homogeneous_part(1), i)
    } else {
        tensor_chern(&tau_left, d, &tau_right, d2, i)
    }
}

impl Derivation {
    /// Recomputes the cycle described by this derivation.
    pub fn replay(&self) -> Result<ProductClass> {
        match self {
            Derivation::SegreChern { d, d2, n, i } => segre_chern_class(*d, *d2, *n, *i),
            Derivation::Diagonal { space } => Ok(diagonal(*space)),
            Derivation::Sum { inputs } => {
                let mut values = inputs.iter().map(Derivation::replay);
                let first = values
                    .next()
                    .ok_or_else(|| Error::InvalidArgument("empty sum".into()))??;
                values.try_fold(first, |acc, v| acc.add(&v?))
            }
            Derivation::IntegerScale { factor, input } => Ok(input.replay()?.scale_int(*factor)),
            Derivation::IntersectionProduct { left, right } => intersection(&left.replay()?, &right.replay()?),
            Derivation::Compose { outer, inner } => compose(&outer.replay()?, &inner.replay()?),
            Derivation::Transpose { input } => Ok(transpose(&input.replay()?)),
            Derivation::ModAdjust { modulus, adjustment, input } => {
                input.replay()?.sub(&adjustment.scale_int(*modulus as i64))
            }
        }
    }

    fn collect_moduli(&self, out: &mut BTreeSet<u64>) {
        match self {
            Derivation::SegreChern { .. } | Derivation::Diagonal { .. } => {}
            Derivation::Sum { inputs } => inputs.iter().for_each(|d| d.collect_moduli(out)),
            Derivation::IntegerScale { input, .. } | Derivation::Transpose { input } => input.collect_moduli(out),
            Derivation::IntersectionProduct { left, right } => {
                left.collect_moduli(out);
                right.collect_moduli(out);
            }
            Derivation::Compose { outer, inner } => {
                outer.collect_moduli(out);
                inner.collect_moduli(out);
            }
            Derivation::ModAdjust { modulus, input, .. } => {
                out.insert(*modulus);
                input.collect_moduli(out);
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self {
            Derivation::SegreChern { .. } | Derivation::Diagonal { .. } => 0,
            Derivation::Sum { inputs } => inputs.iter().map(Derivation::size).sum(),
            Derivation::IntegerScale { input, .. }
            | Derivation::Transpose { input }
            | Derivation::ModAdjust { input, .. } => input.size(),
            Derivation::IntersectionProduct { left, right } => left.size() + right.size(),
            Derivation::Compose { outer, inner } => outer.size() + inner.size(),
        }
    }
}

impl RationalWitness {
    pub fn segre_chern(d: u32, d2: u32, n: u32, i: u32) -> Result<Self> {
        let derivation = Derivation::SegreChern { d, d2, n, i };
        Ok(RationalWitness { conclusion: derivation.replay()?, derivation })
    }

    pub fn diagonal(space: GrassmannSpace) -> Self {
        RationalWitness { conclusion: diagonal(space), derivation: Derivation::Diagonal { space } }
    }

    /// Applies `op` to the conclusions of `inputs` and records the step.
    pub fn combine(op: Combinator, inputs: &[RationalWitness]) -> Result<Self> {
        let name = format!("{op:?}");
        let name = name.split(['(', ' ']).next().unwrap_or_default().to_string();
        let arity = |expected: usize| -> Result<()> {
            if inputs.len() == expected {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} takes {expected} input(s), got {}",
                    inputs.len()
                )))
            }
        };
        let boxed = |k: usize| Box::new(inputs[k].derivation.clone());
        let (conclusion, derivation) = match op {
            Combinator::Sum => {
                let (first, rest) = inputs
                    .split_first()
                    .ok_or_else(|| Error::InvalidArgument("empty sum".into()))?;
                let value = rest
                    .iter()
                    .try_fold(first.conclusion.clone(), |acc, w| acc.add(&w.conclusion))?;
                let derivation = Derivation::Sum { inputs: inputs.iter().map(|w| w.derivation.clone()).collect() };
                (value, derivation)
            }
            Combinator::IntegerScale(factor) => {
                arity(1)?;
                (inputs[0].conclusion.scale_int(factor), Derivation::IntegerScale { factor, input: boxed(0) })
            }
            Combinator::IntersectionProduct => {
                arity(2)?;
                (
                    intersection(&inputs[0].conclusion, &inputs[1].conclusion)?,
                    Derivation::IntersectionProduct { left: boxed(0), right: boxed(1) },
                )
            }
            Combinator::Compose => {
                arity(2)?;
                (
                    compose(&inputs[0].conclusion, &inputs[1].conclusion)?,
                    Derivation::Compose { outer: boxed(0), inner: boxed(1) },
                )
            }
            Combinator::Transpose => {
                arity(1)?;
                (transpose(&inputs[0].conclusion), Derivation::Transpose { input: boxed(0) })
            }
            Combinator::ModAdjust { modulus, adjustment } => {
                arity(1)?;
                if modulus < 2 {
                    return Err(Error::InvalidArgument(format!("modulus must be >= 2, got {modulus}")));
                }
                let value = inputs[0].conclusion.sub(&adjustment.scale_int(modulus as i64))?;
                (value, Derivation::ModAdjust { modulus, adjustment, input: boxed(0) })
            }
        };
        Ok(RationalWitness { conclusion, derivation })
    }

    pub fn sum(inputs: &[RationalWitness]) -> Result<Self> {
        Self::combine(Combinator::Sum, inputs)
    }

    pub fn scale(&self, factor: i64) -> Self {
        Self::combine(Combinator::IntegerScale(factor), std::slice::from_ref(self))
            .expect("integer scaling never fails")
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        Self::combine(Combinator::IntersectionProduct, &[self.clone(), other.clone()])
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("zeroth power has no generator derivation".into()));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.intersect(self)?;
        }
        Ok(acc)
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &Self) -> Result<Self> {
        Self::combine(Combinator::Compose, &[outer.clone(), self.clone()])
    }

    pub fn transpose(&self) -> Self {
        Self::combine(Combinator::Transpose, std::slice::from_ref(self)).expect("transpose never fails")
    }

    pub fn mod_adjust(&self, modulus: u64, adjustment: ProductClass) -> Result<Self> {
        Self::combine(Combinator::ModAdjust { modulus, adjustment }, std::slice::from_ref(self))
    }

    /// Replays the derivation and compares with the stored conclusion.
    pub fn verify(&self) -> bool {
        self.derivation.replay().is_ok_and(|v| v == self.conclusion)
    }

    pub fn lineage(&self) -> Lineage {
        let mut moduli = BTreeSet::new();
        self.derivation.collect_moduli(&mut moduli);
        if moduli.is_empty() {
            Lineage::Integral
        } else {
            Lineage::Modulo { moduli }
        }
    }

    pub fn is_integral(&self) -> bool {
        self.lineage() == Lineage::Integral
    }
}

/// Rewrites `witness` into a witness for `target` through a single
/// `ModAdjust(m, z)` step with `z = (conclusion − target)/m`.
pub fn adjust_to(witness: &RationalWitness, target: &ProductClass, m: u64) -> Result<RationalWitness> {
    let diff = witness.conclusion.sub(target)?;
    if diff.is_zero() {
        return Ok(witness.clone());
    }
    if diff.ring() != CoefficientRing::Integers {
        return Err(Error::UnsupportedRing { ring: diff.ring().to_string(), what: "modular adjustment".into() });
    }
    let modulus = BigInt::from(m);
    let divisible = diff
        .terms()
        .all(|(_, c)| c.is_integer() && c.to_integer().mod_floor(&modulus).is_zero());
    if !divisible {
        return Err(Error::InvalidArgument(format!("target is not congruent to the conclusion modulo {m}")));
    }
    let adjustment = diff.scale(&Coeff::new(1.into(), modulus))?;
    witness.mod_adjust(m, adjustment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow_ring::named_generator;
    use crate::correspondence::{eq_mod, external_product};
    use crate::ring::int;
    use crate::ChowClass;

    fn rho() -> RationalWitness {
        RationalWitness::segre_chern(2, 1, 5, 2).unwrap()
    }

    #[test]
    fn segre_chern_generators() {
        let r = RationalWitness::segre_chern(2, 1, 5, 1).unwrap();
        assert_eq!(r.conclusion.to_string(), "-2(1×H) - σ₁×1");
        assert_eq!(rho().conclusion.to_string(), "1×H² + σ₁×H + g₂×1");
        let unit = RationalWitness::segre_chern(2, 1, 5, 0).unwrap();
        let gr = GrassmannSpace::new(2, 5).unwrap();
        let p4 = GrassmannSpace::projective(4).unwrap();
        assert_eq!(unit.conclusion, ProductClass::one(gr, p4, CoefficientRing::Integers));
        assert!(RationalWitness::segre_chern(2, 1, 5, 3).is_err());
        assert!(RationalWitness::segre_chern(5, 1, 5, 1).is_err());
        let square = RationalWitness::segre_chern(2, 2, 5, 4).unwrap();
        assert!(square.verify());
        assert_eq!(square.conclusion.homogeneous_degree().unwrap(), Some(4));
    }

    #[test]
    fn compose_reduces_to_diagonal() {
        let r2 = rho().pow(2).unwrap();
        let r3 = rho().pow(3).unwrap();
        let w = r2.transpose().then(&r3).unwrap();
        let p4 = GrassmannSpace::projective(4).unwrap();
        assert!(eq_mod(&w.conclusion, &diagonal(p4), 5).unwrap());
        assert!(w.verify());
        assert!(w.is_integral());
    }

    #[test]
    fn scale_and_adjust() {
        let three = rho().scale(3);
        assert_eq!(three.conclusion, rho().conclusion.scale_int(3));
        let gr = GrassmannSpace::new(2, 5).unwrap();
        let p4 = GrassmannSpace::projective(4).unwrap();
        let z = external_product(&named_generator(gr, "g2").unwrap(), &ChowClass::one(p4, CoefficientRing::Integers)).unwrap();
        let adjusted = rho().mod_adjust(5, z.clone()).unwrap();
        assert_eq!(adjusted.conclusion, rho().conclusion.sub(&z.scale_int(5)).unwrap());
        assert!(adjusted.verify());
        assert_eq!(adjusted.lineage(), Lineage::Modulo { moduli: BTreeSet::from([5]) });
    }

    #[test]
    fn adjust_to_target() {
        let r = rho();
        let target = r.conclusion.sub(&r.conclusion.scale_int(5)).unwrap();
        let w = adjust_to(&r, &target, 5).unwrap();
        assert_eq!(w.conclusion, target);
        assert!(w.verify());
        assert!(adjust_to(&r, &r.conclusion.scale_int(2), 5).is_err());
        assert_eq!(adjust_to(&r, &r.conclusion, 5).unwrap(), r);
    }

    #[test]
    fn tampering_is_detected() {
        let mut w = rho().pow(2).unwrap();
        assert!(w.verify());
        let key = w.conclusion.terms().next().map(|(k, _)| k.clone()).unwrap();
        let bump = ProductClass::from_terms(w.conclusion.left(), w.conclusion.right(), CoefficientRing::Integers, [(key, int(1))]).unwrap();
        w.conclusion = w.conclusion.add(&bump).unwrap();
        assert!(!w.verify());
    }

    #[test]
    fn arity_errors() {
        assert!(RationalWitness::combine(Combinator::Compose, &[rho()]).is_err());
        assert!(RationalWitness::combine(Combinator::Sum, &[]).is_err());
        assert!(RationalWitness::combine(Combinator::Compose, &[rho(), rho()]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let w = rho().pow(2).unwrap().transpose();
        let json = serde_json::to_string(&w).unwrap();
        assert!(json.contains(r#""node":"transpose""#));
        let back: RationalWitness = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
        assert!(back.verify());
    }
}

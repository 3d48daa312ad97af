//! The Chow ring of a split Grassmannian in the Schubert basis.
//!
//! `Gr(d,n)` is the variety of `d`-planes in an `n`-dimensional space. Its
//! Chow ring is free on the Schubert classes `Δ_λ`, `λ` running over the
//! partitions in the `d × (n−d)` box, with `Δ_λ` of codimension `|λ|`.
//! Projective space `P^{n−1}` is `Gr(1,n)`, where `Δ_(i) = H^i`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{complement, partitions_in_box, Partition};
use crate::error::{Error, Result};
use crate::ring::{coeff_serde, Coeff, CoefficientRing, Combination};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct GrassmannSpace {
    d: u32,
    n: u32,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    d: u32,
    n: u32,
}

impl TryFrom<SpaceRepr> for GrassmannSpace {
    type Error = Error;

    fn try_from(r: SpaceRepr) -> Result<Self> {
        GrassmannSpace::new(r.d, r.n)
    }
}

impl From<GrassmannSpace> for SpaceRepr {
    fn from(s: GrassmannSpace) -> Self {
        SpaceRepr { d: s.d, n: s.n }
    }
}

impl GrassmannSpace {
    /// `d`-planes in `n`-space; requires `1 ≤ d ≤ n−1`.
    pub fn new(d: u32, n: u32) -> Result<Self> {
        if d < 1 || d >= n {
            return Err(Error::InvalidArgument(format!("Gr({d},{n}) needs 1 <= d <= n-1")));
        }
        Ok(GrassmannSpace { d, n })
    }

    /// `P^dim = Gr(1, dim+1)`.
    pub fn projective(dim: u32) -> Result<Self> {
        Self::new(1, dim + 1)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of rows of the Schubert box.
    pub fn rows(&self) -> u32 {
        self.d
    }

    /// Number of columns of the Schubert box.
    pub fn cols(&self) -> u32 {
        self.n - self.d
    }

    pub fn dim(&self) -> u32 {
        self.d * (self.n - self.d)
    }

    pub fn is_projective(&self) -> bool {
        self.d == 1
    }

    pub fn basis(&self) -> Vec<Partition> {
        partitions_in_box(self.rows(), self.cols())
    }

    pub fn point(&self) -> Partition {
        Partition::new(vec![self.cols(); self.rows() as usize]).expect("constant sequence")
    }

    pub fn contains(&self, lambda: &Partition) -> bool {
        lambda.fits_in(self.rows(), self.cols())
    }

    pub fn check(&self, lambda: &Partition) -> Result<()> {
        if self.contains(lambda) {
            Ok(())
        } else {
            Err(Error::OutsideBox {
                partition: lambda.to_string(),
                rows: self.rows(),
                cols: self.cols(),
            })
        }
    }

    pub fn complement(&self, lambda: &Partition) -> Result<Partition> {
        complement(lambda, self.rows(), self.cols())
    }

    /// `deg(Δ_μ · Δ_ν)`: 1 exactly when `ν` is the complement of `μ`.
    pub fn pairing(&self, mu: &Partition, nu: &Partition) -> bool {
        mu.weight() + nu.weight() == self.dim()
            && self.complement(mu).map(|c| &c == nu).unwrap_or(false)
    }

    /// Display name of a Schubert class: the classical names on `Gr(2,5)`,
    /// powers of `H` on projective spaces, `σ_m` for special classes.
    pub fn class_name(&self, lambda: &Partition) -> String {
        if lambda.is_empty() {
            return "1".to_string();
        }
        if self.is_projective() {
            return match lambda.part(0) {
                1 => "H".to_string(),
                k => format!("H{}", superscript(k)),
            };
        }
        if self.d == 2 && self.n == 5 {
            let name = match (lambda.part(0), lambda.part(1)) {
                (1, 1) => Some("g₂"),
                (2, 1) => Some("g₃"),
                (3, 1) => Some("h₄"),
                (2, 2) => Some("g₄"),
                (3, 2) => Some("g₅"),
                (3, 3) => Some("pt"),
                _ => None,
            };
            if let Some(name) = name {
                return name.to_string();
            }
        }
        if lambda.len() == 1 {
            return format!("σ{}", subscript(lambda.part(0)));
        }
        format!("Δ{lambda}")
    }
}

impl fmt::Display for GrassmannSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gr({},{})", self.d, self.n)
    }
}

fn digits_with(k: u32, table: [char; 10]) -> String {
    k.to_string()
        .chars()
        .map(|c| table[c.to_digit(10).expect("decimal digit") as usize])
        .collect()
}

pub(crate) fn superscript(k: u32) -> String {
    digits_with(k, ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'])
}

pub(crate) fn subscript(k: u32) -> String {
    digits_with(k, ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'])
}

/// Renders `Σ c·name` with `+`/`-` separators. `compact` drops the spaces
/// around the signs, for use inside parentheses.
pub(crate) fn render_sum<'a>(terms: impl Iterator<Item = (String, &'a Coeff)>, compact: bool) -> String {
    let mut out = String::new();
    for (i, (name, c)) in terms.enumerate() {
        let negative = c.is_negative();
        let magnitude = c.abs();
        match (i, negative, compact) {
            (0, true, _) => out.push('-'),
            (0, false, _) => {}
            (_, true, true) => out.push('-'),
            (_, false, true) => out.push('+'),
            (_, true, false) => out.push_str(" - "),
            (_, false, false) => out.push_str(" + "),
        }
        if magnitude.is_one() {
            out.push_str(&name);
        } else if name == "1" {
            out.push_str(&magnitude.to_string());
        } else if magnitude.is_integer() {
            out.push_str(&format!("{magnitude}{name}"));
        } else {
            out.push_str(&format!("{magnitude}·{name}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// A finitely supported combination of Schubert classes of one
/// Grassmannian over a fixed coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChowClass {
    space: GrassmannSpace,
    inner: Combination<Partition>,
}

impl ChowClass {
    pub fn zero(space: GrassmannSpace, ring: CoefficientRing) -> Self {
        ChowClass { space, inner: Combination::zero(ring) }
    }

    pub fn one(space: GrassmannSpace, ring: CoefficientRing) -> Self {
        let mut c = Self::zero(space, ring);
        c.inner.terms.insert(Partition::empty(), Coeff::one());
        c
    }

    /// The Schubert class `Δ_λ` with integer coefficients.
    pub fn basis(space: GrassmannSpace, lambda: Partition) -> Result<Self> {
        Self::from_terms(space, CoefficientRing::Integers, [(lambda, Coeff::one())])
    }

    pub fn from_terms(
        space: GrassmannSpace,
        ring: CoefficientRing,
        terms: impl IntoIterator<Item = (Partition, Coeff)>,
    ) -> Result<Self> {
        let mut c = Self::zero(space, ring);
        for (lambda, v) in terms {
            space.check(&lambda)?;
            c.inner.add_term(lambda, v)?;
        }
        Ok(c)
    }

    pub fn space(&self) -> GrassmannSpace {
        self.space
    }

    pub fn ring(&self) -> CoefficientRing {
        self.inner.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Coeff)> {
        self.inner.terms.iter()
    }

    pub fn coeff(&self, lambda: &Partition) -> Coeff {
        self.inner.terms.get(lambda).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch(format!("{} vs {}", self.space, other.space)));
        }
        self.inner.check_ring(&other.inner)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(ChowClass { space: self.space, inner: self.inner.add(&other.inner)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Coeff::one()).expect("negation stays in the ring")
    }

    pub fn scale(&self, factor: &Coeff) -> Result<Self> {
        Ok(ChowClass { space: self.space, inner: self.inner.scale(factor)? })
    }

    pub fn scale_int(&self, factor: i64) -> Self {
        self.scale(&Coeff::from_integer(BigInt::from(factor)))
            .expect("integer scaling stays in the ring")
    }

    /// Explicit change of coefficient ring (`Z → Z/m`, `Z → Q`, `Z/m → Z/k`
    /// for `k | m`).
    pub fn cast(&self, ring: CoefficientRing) -> Result<Self> {
        Ok(ChowClass { space: self.space, inner: self.inner.cast(ring)? })
    }

    /// The codimension-`k` component.
    pub fn homogeneous_part(&self, k: u32) -> Self {
        let mut out = Self::zero(self.space, self.ring());
        for (l, v) in self.terms() {
            if l.weight() == k {
                out.inner.terms.insert(l.clone(), v.clone());
            }
        }
        out
    }

    /// `Ok(None)` for the zero class, `Ok(Some(k))` when every term has
    /// codimension `k`.
    pub fn homogeneous_degree(&self) -> Result<Option<u32>> {
        let mut degrees = self.terms().map(|(l, _)| l.weight());
        let Some(first) = degrees.next() else {
            return Ok(None);
        };
        if degrees.all(|d| d == first) {
            Ok(Some(first))
        } else {
            Err(Error::Inhomogeneous)
        }
    }

    pub fn constant_term(&self) -> Coeff {
        self.coeff(&Partition::empty())
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = ChowClass::one(self.space, self.ring());
        for _ in 0..k {
            acc = multiply(&acc, self)?;
        }
        Ok(acc)
    }
}

/// `3σ₂+g₂`; the alternate form `{:#}` spaces the signs, `3σ₂ + g₂`.
impl fmt::Display for ChowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered = render_sum(self.terms().map(|(l, c)| (self.space.class_name(l), c)), !f.alternate());
        write!(f, "{rendered}")
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    partition: Partition,
    #[serde(with = "coeff_serde")]
    coefficient: Coeff,
}

#[derive(Serialize, Deserialize)]
struct ChowClassRepr {
    space: GrassmannSpace,
    ring: CoefficientRing,
    terms: Vec<TermRepr>,
}

impl Serialize for ChowClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChowClassRepr {
            space: self.space,
            ring: self.ring(),
            terms: self
                .terms()
                .map(|(l, c)| TermRepr { partition: l.clone(), coefficient: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChowClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ChowClassRepr::deserialize(d)?;
        ChowClass::from_terms(
            repr.space,
            repr.ring,
            repr.terms.into_iter().map(|t| (t.partition, t.coefficient)),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Resolves a generator name on a space.
///
/// Every space knows `1`, `sigma<m>` and `pt`; `Gr(2,5)` adds `g2`, `g3`,
/// `h4`, `g4`, `g5`; projective spaces add `H`.
pub fn named_generator(space: GrassmannSpace, name: &str) -> Result<ChowClass> {
    let unknown = || Error::UnknownName { name: name.to_string(), space: space.to_string() };
    let lambda = match name {
        "1" | "one" => Partition::empty(),
        "pt" => space.point(),
        "H" if space.is_projective() => Partition::row(1),
        _ if space.d == 2 && space.n == 5 && gr25_alias(name).is_some() => {
            Partition::new(gr25_alias(name).expect("checked").to_vec())?
        }
        _ => {
            let m = name
                .strip_prefix("sigma")
                .or_else(|| name.strip_prefix("σ"))
                .and_then(|rest| rest.parse::<u32>().ok())
                .ok_or_else(unknown)?;
            if m > space.cols() {
                return Err(unknown());
            }
            Partition::row(m)
        }
    };
    ChowClass::basis(space, lambda)
}

fn gr25_alias(name: &str) -> Option<&'static [u32]> {
    match name {
        "g2" | "g₂" => Some(&[1, 1]),
        "g3" | "g₃" => Some(&[2, 1]),
        "h4" | "h₄" => Some(&[3, 1]),
        "g4" | "g₄" => Some(&[2, 2]),
        "g5" | "g₅" => Some(&[3, 2]),
        _ => None,
    }
}

/// Horizontal strips `μ/λ` of size `m` with `μ` in the box.
fn horizontal_strips(lambda: &Partition, m: u32, rows: u32, cols: u32) -> Vec<Partition> {
    fn fill(i: usize, remaining: u32, lambda: &Partition, rows: u32, cols: u32, acc: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if i == rows as usize {
            if remaining == 0 {
                out.push(Partition::new(acc.clone()).expect("interlacing keeps parts decreasing"));
            }
            return;
        }
        let low = lambda.part(i);
        let high = if i == 0 { cols } else { lambda.part(i - 1) };
        for mu_i in low..=high.min(low + remaining) {
            acc.push(mu_i);
            fill(i + 1, remaining - (mu_i - low), lambda, rows, cols, acc, out);
            acc.pop();
        }
    }

    let mut out = Vec::new();
    fill(0, m, lambda, rows, cols, &mut Vec::new(), &mut out);
    out
}

/// Pieri rule: `Δ_λ · σ_m = Σ Δ_μ` over horizontal strips `μ/λ` of size `m`
/// inside the box.
pub fn pieri(space: GrassmannSpace, lambda: &Partition, m: u32) -> Result<ChowClass> {
    space.check(lambda)?;
    if m > space.cols() {
        return Err(Error::InvalidArgument(format!(
            "σ_{m} does not exist on {space} (at most σ_{})",
            space.cols()
        )));
    }
    let strips = horizontal_strips(lambda, m, space.rows(), space.cols());
    ChowClass::from_terms(space, CoefficientRing::Integers, strips.into_iter().map(|mu| (mu, Coeff::one())))
}

/// Multiplies a class by the special class `σ_m`, extending Pieri linearly.
/// `σ_0 = 1`; indices outside `0..=n−d` give zero.
pub fn apply_pieri(x: &ChowClass, m: i64) -> Result<ChowClass> {
    let space = x.space();
    if m < 0 || m > space.cols() as i64 {
        return Ok(ChowClass::zero(space, x.ring()));
    }
    let mut out = ChowClass::zero(space, x.ring());
    for (lambda, c) in x.terms() {
        for mu in horizontal_strips(lambda, m as u32, space.rows(), space.cols()) {
            out.inner.add_term(mu, c.clone())?;
        }
    }
    Ok(out)
}

/// Littlewood–Richardson coefficient `c^ν_{λμ}`: the number of semistandard
/// fillings of `ν/λ` with content `μ` whose reading word (right to left,
/// top to bottom) is a lattice word.
pub fn lr_coefficient(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    if !nu.contains(lambda) || nu.weight() != lambda.weight() + mu.weight() {
        return 0;
    }
    let cells: Vec<(usize, u32)> = (0..nu.len())
        .flat_map(|r| (lambda.part(r)..nu.part(r)).rev().map(move |c| (r, c)))
        .collect();
    let mut filling: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    let mut counts = vec![0u32; mu.len() + 1];

    fn search(
        idx: usize,
        cells: &[(usize, u32)],
        mu: &Partition,
        lambda: &Partition,
        filling: &mut BTreeMap<(usize, u32), usize>,
        counts: &mut Vec<u32>,
    ) -> u64 {
        if idx == cells.len() {
            return 1;
        }
        let (r, c) = cells[idx];
        // Row weakly increasing: bounded above by the right neighbour.
        let upper = filling.get(&(r, c + 1)).copied().unwrap_or(mu.len());
        // Column strictly increasing: bounded below by the cell above, when
        // that cell is part of the skew shape.
        let lower = if r > 0 && c >= lambda.part(r - 1) {
            filling[&(r - 1, c)] + 1
        } else {
            1
        };
        let mut total = 0;
        for v in lower..=upper {
            if counts[v] >= mu.part(v - 1) {
                continue;
            }
            if v > 1 && counts[v] >= counts[v - 1] {
                continue;
            }
            counts[v] += 1;
            filling.insert((r, c), v);
            total += search(idx + 1, cells, mu, lambda, filling, counts);
            filling.remove(&(r, c));
            counts[v] -= 1;
        }
        total
    }

    search(0, &cells, mu, lambda, &mut filling, &mut counts)
}

/// Ring product via Littlewood–Richardson coefficients; partitions leaving
/// the box contribute zero.
pub fn multiply(x: &ChowClass, y: &ChowClass) -> Result<ChowClass> {
    x.check_compatible(y)?;
    let space = x.space();
    let basis = space.basis();
    let mut out = ChowClass::zero(space, x.ring());
    for (lambda, a) in x.terms() {
        for (mu, b) in y.terms() {
            let target = lambda.weight() + mu.weight();
            if target > space.dim() {
                continue;
            }
            let coefficient = a * b;
            for nu in basis.iter().filter(|nu| nu.weight() == target) {
                let c = lr_coefficient(lambda, mu, nu);
                if c > 0 {
                    out.inner.add_term(nu.clone(), &coefficient * Coeff::from_integer(BigInt::from(c)))?;
                }
            }
        }
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i64)>) {
        let n = used.len();
        if prefix.len() == n {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| prefix[i] > prefix[j])
                .count();
            out.push((prefix.clone(), if inversions % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for k in 0..n {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Applies `Δ_λ = det(σ_{λ_i+j−i})` to `x` by expanding the determinant
/// and multiplying with iterated Pieri steps.
fn apply_giambelli(x: &ChowClass, lambda: &Partition) -> Result<ChowClass> {
    let len = lambda.len();
    let mut out = ChowClass::zero(x.space(), x.ring());
    for (perm, sign) in permutations(len) {
        let mut term = x.clone();
        for (i, &j) in perm.iter().enumerate() {
            term = apply_pieri(&term, lambda.part(i) as i64 + j as i64 - i as i64)?;
            if term.is_zero() {
                break;
            }
        }
        out = out.add(&term.scale_int(sign))?;
    }
    Ok(out)
}

/// Recomputes `Δ_λ` from special classes through the Giambelli
/// determinant. Independent of [`multiply`]; the result must equal the
/// basis class.
pub fn giambelli_oracle(space: GrassmannSpace, lambda: &Partition) -> Result<ChowClass> {
    space.check(lambda)?;
    apply_giambelli(&ChowClass::one(space, CoefficientRing::Integers), lambda)
}

/// `Δ_λ · Δ_μ` computed with the Giambelli expansion of `Δ_μ` and iterated
/// Pieri steps on `Δ_λ`.
pub fn pieri_product_oracle(space: GrassmannSpace, lambda: &Partition, mu: &Partition) -> Result<ChowClass> {
    space.check(mu)?;
    apply_giambelli(&ChowClass::basis(space, lambda.clone())?, mu)
}

/// Coefficient of the point class. Components below top codimension
/// contribute nothing.
pub fn degree(x: &ChowClass) -> Coeff {
    x.coeff(&x.space().point())
}

/// Like [`degree`] but rejects inhomogeneous input.
pub fn degree_strict(x: &ChowClass) -> Result<Coeff> {
    x.homogeneous_degree()?;
    Ok(degree(x))
}

/// Total Chern class of the universal quotient bundle,
/// `c(Q) = 1 + σ_1 + … + σ_{n−d}`.
pub fn chern_quotient(space: GrassmannSpace) -> ChowClass {
    ChowClass::from_terms(
        space,
        CoefficientRing::Integers,
        (0..=space.cols()).map(|m| (Partition::row(m), Coeff::one())),
    )
    .expect("special classes lie in the box")
}

/// Multiplicative inverse of a class with constant term 1. The result is
/// exact because positive-codimension classes are nilpotent.
pub fn invert_total_chern(c: &ChowClass) -> Result<ChowClass> {
    if !c.constant_term().is_one() {
        return Err(Error::NotAUnit);
    }
    let unit = ChowClass::one(c.space(), c.ring());
    let nilpotent = c.sub(&unit)?.neg();
    let mut power = unit.clone();
    let mut acc = unit;
    loop {
        power = multiply(&power, &nilpotent)?;
        if power.is_zero() {
            return Ok(acc);
        }
        acc = acc.add(&power)?;
    }
}

/// Covering relations of the Bruhat order (add one box), in canonical order.
pub fn hasse_edges(space: GrassmannSpace) -> Vec<(Partition, Partition)> {
    let basis = space.basis();
    let mut edges = Vec::new();
    for lambda in &basis {
        for mu in &basis {
            if mu.weight() == lambda.weight() + 1 && mu.contains(lambda) {
                edges.push((lambda.clone(), mu.clone()));
            }
        }
    }
    edges
}

/// Polynomial-ring arithmetic for `CH(P^{n−1}) = Z[H]/(H^n)`, used as an
/// independent check on projective spaces.
pub fn truncated_power_product(a: u32, b: u32, n: u32) -> Option<u32> {
    (a + b < n).then_some(a + b)
}

//! Seeded randomized checks of the algebraic laws the verifier relies on,
//! and of the parser/renderer round trip.

use motive_workbench::correspondence::{compose, diagonal, reduce_mod, transpose};
use motive_workbench::ring::int;
use motive_workbench::{CoefficientRing, GrassmannSpace, ProductClass};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::expr::{parse, BinOp, Expr, ExprKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub trials: u32,
    pub failures: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub seed: u64,
    pub properties: Vec<PropertyResult>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.failures == 0)
    }
}

fn spaces() -> Vec<GrassmannSpace> {
    vec![
        GrassmannSpace::new(2, 5).expect("Gr(2,5)"),
        GrassmannSpace::projective(4).expect("P⁴"),
        GrassmannSpace::new(2, 4).expect("Gr(2,4)"),
    ]
}

pub fn random_product(rng: &mut ChaCha8Rng, left: GrassmannSpace, right: GrassmannSpace) -> ProductClass {
    let (lb, rb) = (left.basis(), right.basis());
    let terms: Vec<_> = (0..rng.gen_range(0..6))
        .map(|_| {
            let l = lb.choose(rng).expect("nonempty basis").clone();
            let r = rb.choose(rng).expect("nonempty basis").clone();
            ((l, r), int(rng.gen_range(-4..=4)))
        })
        .collect();
    ProductClass::from_terms(left, right, CoefficientRing::Integers, terms).expect("basis terms")
}

const NAMES: [&str; 9] = ["sigma1", "sigma2", "g2", "g3", "h4", "pt", "H", "rho", "r"];

/// A random syntax tree of depth at most `depth`.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    let kind = if leaf {
        match rng.gen_range(0..4) {
            0 => ExprKind::Int(BigInt::from(rng.gen_range(0..20))),
            1 => ExprKind::Fraction(BigInt::from(rng.gen_range(0..9)), BigInt::from(rng.gen_range(1..9))),
            2 => ExprKind::Schubert((0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..4)).collect()),
            _ => ExprKind::Name(NAMES.choose(rng).expect("names").to_string()),
        }
    } else {
        let sub = |rng: &mut ChaCha8Rng| Box::new(random_expr(rng, depth - 1));
        match rng.gen_range(0..5) {
            0 => ExprKind::Neg(sub(rng)),
            1 => ExprKind::Pow(sub(rng), rng.gen_range(0..4)),
            2 => ExprKind::Transpose(sub(rng)),
            3 => ExprKind::Mod(sub(rng), rng.gen_range(2..10)),
            _ => {
                let op = *[BinOp::Add, BinOp::Sub, BinOp::Compose, BinOp::External, BinOp::Mul].choose(rng).expect("ops");
                ExprKind::Binary(op, sub(rng), sub(rng))
            }
        }
    };
    Expr::new(kind)
}

struct Tally {
    result: PropertyResult,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally { result: PropertyResult { name: name.into(), trials: 0, failures: 0, counterexample: None } }
    }

    fn record(&mut self, ok: bool, example: impl FnOnce() -> String) {
        self.result.trials += 1;
        if !ok {
            self.result.failures += 1;
            if self.result.counterexample.is_none() {
                self.result.counterexample = Some(example());
            }
        }
    }
}

pub fn run_properties(seed: u64, trials: u32) -> PropertyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spaces = spaces();
    let mut assoc = Tally::new("composition_associative");
    let mut transpose_law = Tally::new("transpose_reverses_composition");
    let mut unit = Tally::new("diagonal_is_unit");
    let mut reduction = Tally::new("reduction_is_homomorphism");
    let mut round_trip = Tally::new("parse_render_round_trip");
    for _ in 0..trials {
        let pick = |rng: &mut ChaCha8Rng| *spaces.choose(rng).expect("spaces");
        let (x, y, z, w) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let a = random_product(&mut rng, x, y);
        let b = random_product(&mut rng, y, z);
        let c = random_product(&mut rng, z, w);
        let bc = |u: &ProductClass, v: &ProductClass| compose(u, v).expect("matching spaces");

        assoc.record(bc(&c, &bc(&b, &a)) == bc(&bc(&c, &b), &a), || format!("a = {a}; b = {b}; c = {c}"));
        transpose_law.record(transpose(&bc(&b, &a)) == bc(&transpose(&a), &transpose(&b)), || {
            format!("a = {a}; b = {b}")
        });
        unit.record(bc(&diagonal(y), &a) == a && bc(&a, &diagonal(x)) == a, || format!("a = {a}"));
        let m = rng.gen_range(2..=7u64);
        let red = |p: &ProductClass| reduce_mod(p, m).expect("integral class");
        reduction.record(bc(&red(&b), &red(&a)) == red(&bc(&b, &a)), || format!("m = {m}; a = {a}; b = {b}"));

        let e = random_expr(&mut rng, 4);
        let rendered = e.to_string();
        round_trip.record(parse(&rendered).map(|p| p == e).unwrap_or(false), || rendered.clone());
    }
    PropertyReport {
        seed,
        properties: [assoc, transpose_law, unit, reduction, round_trip].into_iter().map(|t| t.result).collect(),
    }
}

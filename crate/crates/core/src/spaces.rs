//! Concrete desk-scale represented spaces and their naming conventions.
//!
//! Conventions: a name of a natural (or of a point of a finite discrete
//! space) carries the value at position 0. Baire and Cantor space use the
//! identity representation. The unit interval uses fast dyadic Cauchy names:
//! position `n` encodes a dyadic `q_n` with `|q_n − x| ≤ 2^{−n}`. Function
//! spaces, opens, closed-negative, overt and compact sets all use the
//! explicit packed model ⟨machine code, oracle⟩.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{Dyadic, DyadicInterval};
use crate::machine::{self, prims, Halts, MachineCode, Realizer};
use crate::names::{nat, nat_to_u64, project, Fuel, FuelMeter, Name};

/// A membership predicate on test points, used by subspaces.
#[derive(Clone)]
pub struct MembershipOracle {
    pub label: String,
    pub pred: Arc<dyn Fn(&Point) -> bool + Send + Sync>,
}

impl MembershipOracle {
    pub fn new(label: impl Into<String>, pred: impl Fn(&Point) -> bool + Send + Sync + 'static) -> Self {
        MembershipOracle {
            label: label.into(),
            pred: Arc::new(pred),
        }
    }
}

impl fmt::Debug for MembershipOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MembershipOracle({})", self.label)
    }
}

#[derive(Clone, Debug)]
pub enum SpaceDescriptor {
    FiniteDiscrete(u64),
    Naturals,
    Sierpinski,
    Baire,
    Cantor,
    UnitInterval,
    Product(Box<SpaceDescriptor>, Box<SpaceDescriptor>),
    CountableProduct(Box<SpaceDescriptor>),
    Subspace(Box<SpaceDescriptor>, MembershipOracle),
    FunctionSpace(Box<SpaceDescriptor>, Box<SpaceDescriptor>),
    Opens(Box<SpaceDescriptor>),
    ClosedsNeg(Box<SpaceDescriptor>),
    Overts(Box<SpaceDescriptor>),
    Compacts(Box<SpaceDescriptor>),
}

/// A decoded point at finite precision.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Nat(u64),
    Sierp(bool),
    /// A stream prefix (Baire/Cantor at finite precision).
    Stream(Vec<u64>),
    /// A real at finite precision.
    Real(DyadicInterval),
    Pair(Box<Point>, Box<Point>),
    /// Finitely many leading coordinates of a countable product.
    Seq(Vec<Point>),
    /// A decoded subset of ℕ below some probe bound.
    Set(BTreeSet<u64>),
}

impl Point {
    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Point::Nat(n) => Some(*n),
            _ => None,
        }
    }
}

/// A concrete space together with its naming convention, a test-only
/// decoder, and seeded samplers for valid names.
#[derive(Clone)]
pub struct Representation {
    pub space: SpaceDescriptor,
    pub convention: String,
    decoder: Arc<dyn Fn(&Name, Fuel) -> Option<Point> + Send + Sync>,
    sampler: Option<Arc<dyn Fn(u64) -> Name + Send + Sync>>,
    namer: Option<Arc<dyn Fn(&Point, u64) -> Option<Name> + Send + Sync>>,
}

impl fmt::Debug for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Representation({:?}, {})", self.space, self.convention)
    }
}

impl Representation {
    pub fn new(
        space: SpaceDescriptor,
        convention: impl Into<String>,
        decoder: impl Fn(&Name, Fuel) -> Option<Point> + Send + Sync + 'static,
    ) -> Self {
        Representation {
            space,
            convention: convention.into(),
            decoder: Arc::new(decoder),
            sampler: None,
            namer: None,
        }
    }

    pub fn with_sampler(mut self, s: impl Fn(u64) -> Name + Send + Sync + 'static) -> Self {
        self.sampler = Some(Arc::new(s));
        self
    }

    pub fn with_namer(
        mut self,
        n: impl Fn(&Point, u64) -> Option<Name> + Send + Sync + 'static,
    ) -> Self {
        self.namer = Some(Arc::new(n));
        self
    }

    /// Decode a name at finite fuel; `None` is "unknown at this stage",
    /// never wrong data. Consistent across fuels.
    pub fn decode(&self, name: &Name, fuel: Fuel) -> Option<Point> {
        (self.decoder)(name, fuel)
    }

    /// A valid name chosen by seed.
    pub fn sample(&self, seed: u64) -> Option<Name> {
        self.sampler.as_ref().map(|s| s(seed))
    }

    /// A valid name of the given point, randomized by seed.
    pub fn name_of(&self, p: &Point, seed: u64) -> Option<Name> {
        self.namer.as_ref().and_then(|n| n(p, seed))
    }
}

// ---------------------------------------------------------------------------
// Standard representations
// ---------------------------------------------------------------------------

fn jitter_tail(rng: &mut ChaCha8Rng) -> Vec<u64> {
    (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..7)).collect()
}

/// Names of naturals: position 0 holds the value.
pub fn naturals() -> Representation {
    Representation::new(SpaceDescriptor::Naturals, "head-value", |name, fuel| {
        let meter = FuelMeter::new(fuel);
        let v = name.query_u64(0, &meter).ok()?;
        Some(Point::Nat(v))
    })
    .with_sampler(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = rng.gen_range(0..40u64);
        let mut w = vec![v];
        w.extend(jitter_tail(&mut rng));
        Name::from_word(&w)
    })
    .with_namer(|p, seed| {
        let v = p.as_nat()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ v.wrapping_mul(0x9e37));
        let mut w = vec![v];
        w.extend(jitter_tail(&mut rng));
        Some(Name::from_word(&w))
    })
}

pub fn finite_discrete(n: u64) -> Representation {
    Representation::new(
        SpaceDescriptor::FiniteDiscrete(n),
        "head-value",
        move |name, fuel| {
            let meter = FuelMeter::new(fuel);
            let v = name.query_u64(0, &meter).ok()?;
            (v < n).then_some(Point::Nat(v))
        },
    )
    .with_sampler(move |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = rng.gen_range(0..n);
        let mut w = vec![v];
        w.extend(jitter_tail(&mut rng));
        Name::from_word(&w)
    })
    .with_namer(move |p, seed| {
        let v = p.as_nat()?;
        if v >= n {
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ v.wrapping_mul(0x517c));
        let mut w = vec![v];
        w.extend(jitter_tail(&mut rng));
        Some(Name::from_word(&w))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SierpValue {
    Top,
    Unknown,
}

/// `c_S`: the zero stream names ⊥, anything else names ⊤. Monotone in fuel.
pub fn sierpinski_decode(name: &Name, fuel: Fuel) -> SierpValue {
    let meter = FuelMeter::new(fuel);
    let mut pos = 0;
    loop {
        match name.query(pos, &meter) {
            Err(_) => return SierpValue::Unknown,
            Ok(s) => {
                if s != nat(0) {
                    return SierpValue::Top;
                }
                pos += 1;
            }
        }
    }
}

pub fn sierpinski() -> Representation {
    Representation::new(SpaceDescriptor::Sierpinski, "c_S", |name, fuel| {
        match sierpinski_decode(name, fuel) {
            SierpValue::Top => Some(Point::Sierp(true)),
            SierpValue::Unknown => None,
        }
    })
    .with_sampler(|seed| {
        if seed % 2 == 0 {
            Name::zeros()
        } else {
            let t = seed % 7;
            Name::eventually_periodic(
                (0..t).map(|_| nat(0)).chain([nat(1)]).collect(),
                vec![nat(0)],
            )
        }
    })
    .with_namer(|p, seed| match p {
        Point::Sierp(true) => {
            let t = seed % 9;
            Some(Name::eventually_periodic(
                (0..t).map(|_| nat(0)).chain([nat(1)]).collect(),
                vec![nat(0)],
            ))
        }
        Point::Sierp(false) => Some(Name::zeros()),
        _ => None,
    })
}

/// A Sierpiński name of ⊤ with the given delay, `0^t 1 0^ω`.
pub fn sierp_top(delay: u64) -> Name {
    Name::eventually_periodic(
        (0..delay).map(|_| nat(0)).chain([nat(1)]).collect(),
        vec![nat(0)],
    )
}

pub fn baire(precision: u64) -> Representation {
    Representation::new(SpaceDescriptor::Baire, "identity", move |name, fuel| {
        let w = name.prefix(precision, fuel).word()?;
        Some(Point::Stream(
            w.iter().map(|s| nat_to_u64(s).unwrap_or(u64::MAX)).collect(),
        ))
    })
    .with_sampler(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prefix: Vec<u64> = (0..6).map(|_| rng.gen_range(0..5)).collect();
        let cycle = vec![rng.gen_range(0..5)];
        Name::eventually_periodic(
            prefix.into_iter().map(nat).collect(),
            cycle.into_iter().map(nat).collect(),
        )
    })
}

pub fn cantor(precision: u64) -> Representation {
    Representation::new(SpaceDescriptor::Cantor, "identity", move |name, fuel| {
        let w = name.prefix(precision, fuel).word()?;
        Some(Point::Stream(
            w.iter().map(|s| nat_to_u64(s).unwrap_or(u64::MAX)).collect(),
        ))
    })
    .with_sampler(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prefix: Vec<u64> = (0..8).map(|_| rng.gen_range(0..2)).collect();
        let cycle = vec![rng.gen_range(0..2)];
        Name::eventually_periodic(
            prefix.into_iter().map(nat).collect(),
            cycle.into_iter().map(nat).collect(),
        )
    })
}

// ---------------------------------------------------------------------------
// The unit interval
// ---------------------------------------------------------------------------

/// Decode a fast Cauchy name at the requested precision: the returned
/// interval `[q_k − 2^{−k}, q_k + 2^{−k}]` has width `≤ 2^{−k+1}` and
/// contains the named real.
pub fn real_decode(name: &Name, k: u32, fuel: Fuel) -> Option<DyadicInterval> {
    let meter = FuelMeter::new(fuel);
    let s = name.query(k as u64, &meter).ok()?;
    let q = Dyadic::from_code(&s)?;
    let eps = Dyadic::pow2_neg(k);
    Some(DyadicInterval::new(q.sub(&eps), q.add(&eps)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemiDecision {
    Yes,
    Unknown,
}

/// Semi-decide `x < 1` on a fast Cauchy name: scan for an approximation
/// certifying it.
pub fn lt_one_semidecide(name: &Name, fuel: Fuel) -> SemiDecision {
    let meter = FuelMeter::new(fuel);
    let mut n: u32 = 0;
    loop {
        match name.query(n as u64, &meter) {
            Err(_) => return SemiDecision::Unknown,
            Ok(s) => {
                if let Some(q) = Dyadic::from_code(&s) {
                    if q.add(&Dyadic::pow2_neg(n)) < Dyadic::one() {
                        return SemiDecision::Yes;
                    }
                }
                n += 1;
            }
        }
    }
}

/// The exact fast Cauchy name of a dyadic: constant at its code.
pub fn dyadic_name(d: &Dyadic) -> Name {
    let code = d.code();
    Name::stream("dyadic", move |_| code.clone())
}

/// A jittered fast Cauchy name of a dyadic: position `n` carries
/// `d ± 2^{−(n+1)}`.
pub fn dyadic_name_jittered(d: &Dyadic, seed: u64) -> Name {
    let d = d.clone();
    Name::stream("dyadic-jittered", move |n| {
        let n32 = u32::try_from(n).unwrap_or(u32::MAX - 1);
        let eps = Dyadic::pow2_neg(n32 + 1);
        let q = if (seed >> (n % 17)) & 1 == 0 {
            d.add(&eps)
        } else {
            d.sub(&eps)
        };
        q.code()
    })
}

pub fn unit_interval(precision: u32) -> Representation {
    Representation::new(
        SpaceDescriptor::UnitInterval,
        "fast-dyadic-cauchy",
        move |name, fuel| real_decode(name, precision, fuel).map(Point::Real),
    )
    .with_sampler(move |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let denom_exp = rng.gen_range(0..8u32);
        let k = rng.gen_range(0..=(1u64 << denom_exp));
        let d = Dyadic::ratio(k as i64, denom_exp);
        if rng.gen_bool(0.5) {
            dyadic_name(&d)
        } else {
            dyadic_name_jittered(&d, seed)
        }
    })
    .with_namer(|p, seed| match p {
        Point::Real(iv) => {
            let d = iv.mid();
            if seed % 2 == 0 {
                Some(dyadic_name(&d))
            } else {
                Some(dyadic_name_jittered(&d, seed))
            }
        }
        _ => None,
    })
}

// ---------------------------------------------------------------------------
// Composite spaces
// ---------------------------------------------------------------------------

/// Product names are 2-tuples.
pub fn product(r1: Representation, r2: Representation) -> Representation {
    let d1 = r1.clone();
    let d2 = r2.clone();
    let space = SpaceDescriptor::Product(Box::new(r1.space.clone()), Box::new(r2.space.clone()));
    Representation::new(space, "tuple2", move |name, fuel| {
        let a = d1.decode(&project(name, 0), fuel)?;
        let b = d2.decode(&project(name, 1), fuel)?;
        Some(Point::Pair(Box::new(a), Box::new(b)))
    })
    .with_namer(move |p, seed| match p {
        Point::Pair(a, b) => {
            let na = r1.name_of(a, seed)?;
            let nb = r2.name_of(b, seed.wrapping_add(1))?;
            Some(Name::tuple_vec(vec![na, nb]))
        }
        _ => None,
    })
}

/// Countable product names are tuples; decoding reports the first `coords`
/// coordinates.
pub fn countable_product(r: Representation, coords: u64) -> Representation {
    let d = r.clone();
    let space = SpaceDescriptor::CountableProduct(Box::new(r.space.clone()));
    Representation::new(space, "tuple", move |name, fuel| {
        let mut out = Vec::new();
        for i in 0..coords {
            out.push(d.decode(&project(name, i), fuel)?);
        }
        Some(Point::Seq(out))
    })
}

/// The Hilbert cube `[0,1]^ℕ`.
pub fn hilbert_cube(precision: u32, coords: u64) -> Representation {
    countable_product(unit_interval(precision), coords)
}

pub fn subspace(r: Representation, oracle: MembershipOracle) -> Representation {
    let d = r.clone();
    let pred = oracle.pred.clone();
    let space = SpaceDescriptor::Subspace(Box::new(r.space.clone()), oracle);
    Representation::new(space, "restriction", move |name, fuel| {
        let p = d.decode(name, fuel)?;
        pred(&p).then_some(p)
    })
}

/// Apply a packed function-space name to an argument name; evaluation is
/// deferred until the result is queried. Malformed code parts decode to the
/// canonical diverger, so the result is simply everywhere-insufficient.
pub fn apply(fn_name: &Name, arg: &Name) -> Name {
    Name::computed(
        MachineCode::Prim(prims::EVAL),
        vec![fn_name.clone(), arg.clone()],
    )
}

/// Pack a finite table `v ↦ table[v]` as a function-space name over
/// head-valued spaces.
pub fn table_fn_name(table: &[u64]) -> Name {
    let mut cfg = vec![nat(table.len() as u64)];
    cfg.extend(table.iter().map(|&v| nat(v)));
    Realizer::closed(MachineCode::partial_apply(
        MachineCode::Prim(prims::TABLE_FN),
        cfg,
    ))
    .pack()
}

/// Decode the accept set of a packed open name over a head-valued space by
/// probing canonical names of points below the bound.
pub fn accept_set(pack: &Name, bound: u64, fuel: Fuel) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for k in 0..bound {
        if machine::halts_packed(pack, &[Name::constant(k)], fuel) == Halts::Yes {
            out.insert(k);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::codes;

    #[test]
    fn sierpinski_conventions() {
        // 0^ω names ⊥ and is never decoded as ⊤.
        assert_eq!(sierpinski_decode(&Name::zeros(), Fuel(10_000)), SierpValue::Unknown);
        // 0001 0^ω is ⊤ once four symbols are readable.
        let u = Name::from_word(&[0, 0, 0, 1]);
        assert_eq!(sierpinski_decode(&u, Fuel(2)), SierpValue::Unknown);
        assert_eq!(sierpinski_decode(&u, Fuel(8)), SierpValue::Top);
        // persistence
        assert_eq!(sierpinski_decode(&u, Fuel(16)), SierpValue::Top);
        assert_eq!(sierpinski_decode(&u, Fuel(10_000)), SierpValue::Top);
    }

    #[test]
    fn apply_identity_on_naturals() {
        let id_fn = Realizer::closed(codes::copy_arg()).pack();
        let five = naturals().name_of(&Point::Nat(5), 3).unwrap();
        let out = apply(&id_fn, &five);
        assert_eq!(naturals().decode(&out, Fuel(10_000)), Some(Point::Nat(5)));
    }

    #[test]
    fn apply_is_extensional_on_finite_discrete() {
        // Two different names of x ↦ (x+3) mod 8 agree after application.
        let table: Vec<u64> = (0..8).map(|x| (x + 3) % 8).collect();
        let f1 = table_fn_name(&table);
        // A second name: same table machine behind a dovetail with a diverger.
        let mut cfg = vec![nat(8)];
        cfg.extend(table.iter().map(|&v| nat(v)));
        let f2 = Realizer::closed(MachineCode::dovetail(
            codes::diverge(),
            MachineCode::partial_apply(MachineCode::Prim(prims::TABLE_FN), cfg),
        ))
        .pack();
        let rep = finite_discrete(8);
        for seed in 0..50u64 {
            let x = Point::Nat(seed % 8);
            let xn = rep.name_of(&x, seed).unwrap();
            let a = rep.decode(&apply(&f1, &xn), Fuel(50_000));
            let b = rep.decode(&apply(&f2, &xn), Fuel(50_000));
            assert_eq!(a, b);
            assert_eq!(a, Some(Point::Nat((seed % 8 + 3) % 8)));
        }
    }

    #[test]
    fn real_decode_of_constant_zero() {
        let zero = dyadic_name(&Dyadic::zero());
        for k in [0u32, 3, 8] {
            let iv = real_decode(&zero, k, Fuel(10_000)).unwrap();
            assert!(iv.contains(&Dyadic::zero()));
            assert!(iv.width() <= Dyadic::ratio(2, k));
        }
    }

    #[test]
    fn lt_one_on_boundary_and_interior() {
        let one = dyadic_name(&Dyadic::one());
        assert_eq!(lt_one_semidecide(&one, Fuel(5_000)), SemiDecision::Unknown);

        // 1 − 2^{−3}: the Cauchy approximation at n = 5 certifies x < 1.
        let x = Dyadic::one().sub(&Dyadic::pow2_neg(3));
        let name = dyadic_name_jittered(&x, 7);
        assert_eq!(lt_one_semidecide(&name, Fuel(5_000)), SemiDecision::Yes);
    }

    #[test]
    fn fast_cauchy_decoding_is_sound() {
        for seed in 0..30u64 {
            let rep = unit_interval(8);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = rng.gen_range(0..6u32);
            let k = rng.gen_range(0..=(1u64 << e));
            let d = Dyadic::ratio(k as i64, e);
            let n1 = dyadic_name(&d);
            let n2 = dyadic_name_jittered(&d, seed);
            for name in [n1, n2] {
                let iv = rep.decode(&name, Fuel(10_000)).unwrap();
                match iv {
                    Point::Real(iv) => assert!(iv.contains(&d), "{iv:?} should contain {d:?}"),
                    _ => panic!("expected real"),
                }
            }
        }
    }

    #[test]
    fn decoder_consistency_across_fuels() {
        let rep = naturals();
        for seed in 0..40u64 {
            let name = rep.sample(seed).unwrap();
            let lo = rep.decode(&name, Fuel(5));
            let hi = rep.decode(&name, Fuel(10_000));
            if let Some(p) = lo {
                assert_eq!(Some(p), hi);
            }
        }
    }

    #[test]
    fn product_and_projection() {
        let rep = product(naturals(), finite_discrete(4));
        let p = Point::Pair(Box::new(Point::Nat(9)), Box::new(Point::Nat(2)));
        let name = rep.name_of(&p, 11).unwrap();
        assert_eq!(rep.decode(&name, Fuel(10_000)), Some(p));
    }
}

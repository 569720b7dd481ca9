//! Finite words, infinite names, Cantor pairing, countable tupling and
//! fuel-bounded prefix access. Everything else in the crate consumes streams
//! built from the types in this module.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::machine::{self, MachineCode, Task};

/// Unbounded natural number; the symbol alphabet of every stream.
pub type Nat = BigUint;

pub fn nat(x: u64) -> Nat {
    Nat::from(x)
}

pub fn nat_to_u64(n: &Nat) -> Option<u64> {
    n.to_u64()
}

/// A finite sequence of naturals.
pub type Word = Vec<Nat>;

pub fn word(symbols: &[u64]) -> Word {
    symbols.iter().map(|&s| nat(s)).collect()
}

pub fn word_to_u64(w: &Word) -> Option<Vec<u64>> {
    w.iter().map(nat_to_u64).collect()
}

// ---------------------------------------------------------------------------
// Fuel
// ---------------------------------------------------------------------------

/// Interpreter step budget. Every semi-decision in the crate is a monotone
/// three-valued observation at some finite fuel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fuel(pub u64);

impl Fuel {
    pub const DEFAULT: Fuel = Fuel(100_000);
}

/// Signals that the step budget ran out. Never carries wrong data: callers
/// translate it into `Insufficient` / `Unknown` answers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutOfFuel;

/// A shared countdown. All activity triggered by one evaluation session draws
/// from the same meter, which is what makes fuel-monotonicity a global
/// cut-off property rather than a per-component promise.
pub struct FuelMeter {
    left: std::cell::Cell<u64>,
}

impl FuelMeter {
    pub fn new(fuel: Fuel) -> Self {
        FuelMeter {
            left: std::cell::Cell::new(fuel.0),
        }
    }

    /// Consume one step.
    pub fn tick(&self) -> Result<(), OutOfFuel> {
        let l = self.left.get();
        if l == 0 {
            return Err(OutOfFuel);
        }
        self.left.set(l - 1);
        Ok(())
    }

    pub fn remaining(&self) -> u64 {
        self.left.get()
    }
}

// ---------------------------------------------------------------------------
// Cantor pairing
// ---------------------------------------------------------------------------

/// Cantor pairing `⟨a,b⟩ = (a+b)(a+b+1)/2 + b`, the one pairing used
/// everywhere in the crate; all downstream encodings inherit it.
pub fn pair(a: u64, b: u64) -> u64 {
    let s = (a as u128) + (b as u128);
    let p = s * (s + 1) / 2 + (b as u128);
    u64::try_from(p).expect("pair overflow")
}

pub fn unpair(n: u64) -> (u64, u64) {
    let n = n as u128;
    let t = (isqrt_u128(8 * n + 1) - 1) / 2;
    let s = t * (t + 1) / 2;
    let b = n - s;
    let a = t - b;
    (a as u64, b as u64)
}

/// Checked variant used where positions are computed from stream symbols.
pub fn pair_checked(a: u64, b: u64) -> Option<u64> {
    let s = (a as u128).checked_add(b as u128)?;
    let p = s.checked_mul(s + 1)? / 2 + (b as u128);
    u64::try_from(p).ok()
}

fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).map_or(true, |x2| x2 > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |x2| x2 <= n) {
        x += 1;
    }
    x
}

pub fn pair_nat(a: &Nat, b: &Nat) -> Nat {
    let s = a + b;
    (&s * (&s + 1u32)) / 2u32 + b
}

pub fn unpair_nat(n: &Nat) -> (Nat, Nat) {
    let t = ((n * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let s = (&t * (&t + 1u32)) / 2u32;
    let b = n - s;
    let a = &t - &b;
    (a, b)
}

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

/// A name: a total stream over the naturals, the universal currency of all
/// representations. `Computed` names are partial at finite fuel; querying a
/// position the generating machine never fills consumes the whole budget.
///
/// Names are immutable after construction; computed positions are memoized
/// behind a lock, which is unobservable except through fuel savings.
#[derive(Clone)]
pub struct Name {
    inner: Arc<NameInner>,
}

enum NameInner {
    EventuallyPeriodic {
        prefix: Word,
        cycle: Word,
    },
    /// Host-supplied total stream (oracle streams and friends).
    Stream {
        label: String,
        gen: Arc<dyn Fn(u64) -> Nat + Send + Sync>,
    },
    Computed {
        code: MachineCode,
        args: Vec<Name>,
        cache: Mutex<StreamCache>,
    },
    Tupled {
        component: Arc<dyn Fn(u64) -> Name + Send + Sync>,
        memo: Mutex<HashMap<u64, Name>>,
    },
    // Views. Observationally these are ordinary names; keeping them as
    // explicit nodes avoids a machine run for trivial reindexings.
    Suffix {
        base: Name,
        offset: u64,
    },
    Prepend {
        word: Word,
        base: Name,
    },
    Project {
        base: Name,
        index: u64,
    },
}

pub(crate) struct StreamCache {
    pub syms: Vec<Nat>,
    pub complete: bool,
    pub task: Option<Box<dyn Task>>,
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.inner {
            NameInner::EventuallyPeriodic { prefix, cycle } => {
                write!(f, "Name::ep({:?}, {:?})", prefix, cycle)
            }
            NameInner::Stream { label, .. } => write!(f, "Name::stream({label})"),
            NameInner::Computed { code, .. } => write!(f, "Name::computed({code:?})"),
            NameInner::Tupled { .. } => write!(f, "Name::tupled"),
            NameInner::Suffix { base, offset } => write!(f, "{base:?}[{offset}..]"),
            NameInner::Prepend { word, base } => write!(f, "{word:?}⌢{base:?}"),
            NameInner::Project { base, index } => write!(f, "{base:?}.{index}"),
        }
    }
}

impl Name {
    /// `prefix ⌢ cycle^ω`. The cycle must be nonempty.
    pub fn eventually_periodic(prefix: Word, cycle: Word) -> Name {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        Name {
            inner: Arc::new(NameInner::EventuallyPeriodic { prefix, cycle }),
        }
    }

    /// The constant stream `k^ω`.
    pub fn constant(k: u64) -> Name {
        Name::eventually_periodic(vec![], vec![nat(k)])
    }

    pub fn constant_nat(k: Nat) -> Name {
        Name::eventually_periodic(vec![], vec![k])
    }

    /// `0^ω`.
    pub fn zeros() -> Name {
        Name::constant(0)
    }

    /// A finite word followed by zeros.
    pub fn from_word(w: &[u64]) -> Name {
        Name::eventually_periodic(word(w), vec![nat(0)])
    }

    /// Host-supplied total stream; `label` identifies the generator (for
    /// oracle streams, the oracle id).
    pub fn stream(
        label: impl Into<String>,
        gen: impl Fn(u64) -> Nat + Send + Sync + 'static,
    ) -> Name {
        Name {
            inner: Arc::new(NameInner::Stream {
                label: label.into(),
                gen: Arc::new(gen),
            }),
        }
    }

    /// The output stream of `code` run on `args`, evaluated lazily.
    pub fn computed(code: MachineCode, args: Vec<Name>) -> Name {
        Name {
            inner: Arc::new(NameInner::Computed {
                code,
                args,
                cache: Mutex::new(StreamCache {
                    syms: Vec::new(),
                    complete: false,
                    task: None,
                }),
            }),
        }
    }

    /// Countable tupling: position `⟨i,j⟩` holds component `i` at `j`.
    pub fn tupled(component: impl Fn(u64) -> Name + Send + Sync + 'static) -> Name {
        Name {
            inner: Arc::new(NameInner::Tupled {
                component: Arc::new(component),
                memo: Mutex::new(HashMap::new()),
            }),
        }
    }

    /// Tuple of finitely many names; higher components are `0^ω`.
    pub fn tuple_vec(components: Vec<Name>) -> Name {
        Name::tupled(move |i| {
            components
                .get(usize::try_from(i).unwrap_or(usize::MAX))
                .cloned()
                .unwrap_or_else(Name::zeros)
        })
    }

    /// Drop the first `offset` symbols.
    pub fn suffix(&self, offset: u64) -> Name {
        if offset == 0 {
            return self.clone();
        }
        Name {
            inner: Arc::new(NameInner::Suffix {
                base: self.clone(),
                offset,
            }),
        }
    }

    /// Prepend a finite word.
    pub fn prepend(word: Word, base: Name) -> Name {
        if word.is_empty() {
            return base;
        }
        Name {
            inner: Arc::new(NameInner::Prepend { word, base }),
        }
    }

    /// Query one position under a meter. A query always costs at least one
    /// step; positions a `Computed` name never fills burn the whole budget.
    pub fn query(&self, pos: u64, meter: &FuelMeter) -> Result<Nat, OutOfFuel> {
        match &*self.inner {
            NameInner::EventuallyPeriodic { prefix, cycle } => {
                meter.tick()?;
                let p = prefix.len() as u64;
                if pos < p {
                    Ok(prefix[pos as usize].clone())
                } else {
                    let idx = ((pos - p) % cycle.len() as u64) as usize;
                    Ok(cycle[idx].clone())
                }
            }
            NameInner::Stream { gen, .. } => {
                meter.tick()?;
                Ok(gen(pos))
            }
            NameInner::Tupled { component, memo } => {
                meter.tick()?;
                let (i, j) = unpair(pos);
                let comp = {
                    let mut memo = memo.lock().unwrap();
                    memo.entry(i).or_insert_with(|| component(i)).clone()
                };
                comp.query(j, meter)
            }
            NameInner::Suffix { base, offset } => match pos.checked_add(*offset) {
                Some(p) => base.query(p, meter),
                None => diverge(meter),
            },
            NameInner::Prepend { word, base } => {
                let w = word.len() as u64;
                if pos < w {
                    meter.tick()?;
                    Ok(word[pos as usize].clone())
                } else {
                    base.query(pos - w, meter)
                }
            }
            NameInner::Project { base, index } => match pair_checked(*index, pos) {
                Some(p) => base.query(p, meter),
                None => diverge(meter),
            },
            NameInner::Computed { code, args, cache } => {
                let mut cache = cache.lock().unwrap();
                loop {
                    if (pos as usize) < cache.syms.len() {
                        meter.tick()?;
                        return Ok(cache.syms[pos as usize].clone());
                    }
                    if cache.complete {
                        drop(cache);
                        return diverge(meter);
                    }
                    if cache.task.is_none() {
                        cache.task = Some(machine::spawn(code, args));
                    }
                    let task = cache.task.as_mut().unwrap();
                    match task.poll(meter)? {
                        machine::Poll::Pending => {}
                        machine::Poll::Emit(s) => cache.syms.push(s),
                        machine::Poll::Halt => {
                            cache.complete = true;
                            cache.task = None;
                        }
                    }
                }
            }
        }
    }

    /// Convenience: query expecting a small value.
    pub fn query_u64(&self, pos: u64, meter: &FuelMeter) -> Result<u64, OutOfFuel> {
        let s = self.query(pos, meter)?;
        match nat_to_u64(&s) {
            Some(v) => Ok(v),
            // A symbol too large to act on is treated like divergence.
            None => diverge(meter),
        }
    }

    /// First `k` symbols within `fuel`, or `Insufficient`.
    pub fn prefix(&self, k: u64, fuel: Fuel) -> PrefixResult {
        let meter = FuelMeter::new(fuel);
        let mut out = Vec::with_capacity(k as usize);
        for i in 0..k {
            match self.query(i, &meter) {
                Ok(s) => out.push(s),
                Err(OutOfFuel) => return PrefixResult::Insufficient,
            }
        }
        PrefixResult::Word(out)
    }
}

/// Burn the remaining budget; the uniform picture of a divergent position.
pub(crate) fn diverge<T>(meter: &FuelMeter) -> Result<T, OutOfFuel> {
    loop {
        meter.tick()?;
    }
}

/// Outcome of resolving the view structure above a position.
pub(crate) enum ViewResolved {
    Immediate(Nat),
    /// Index arithmetic left the representable range; the position is dead.
    Diverges,
    /// Bottoms out in a machine-computed stream at the given position.
    Computed(Name, u64),
}

/// One step of progress on a `Computed` position.
pub(crate) enum CacheStep {
    Ready(Nat),
    Progress,
    /// The machine halted below this position; it will never fill.
    Never,
}

impl Name {
    /// Walk view nodes (suffix/prepend/project/tupled) without consuming
    /// fuel; the walk is bounded by construction depth.
    pub(crate) fn resolve_view(&self, pos: u64) -> ViewResolved {
        let mut cur = self.clone();
        let mut p = pos;
        loop {
            let next = match &*cur.inner {
                NameInner::EventuallyPeriodic { prefix, cycle } => {
                    let pl = prefix.len() as u64;
                    let s = if p < pl {
                        prefix[p as usize].clone()
                    } else {
                        cycle[((p - pl) % cycle.len() as u64) as usize].clone()
                    };
                    return ViewResolved::Immediate(s);
                }
                NameInner::Stream { gen, .. } => return ViewResolved::Immediate(gen(p)),
                NameInner::Computed { .. } => return ViewResolved::Computed(cur.clone(), p),
                NameInner::Suffix { base, offset } => match p.checked_add(*offset) {
                    Some(q) => {
                        p = q;
                        base.clone()
                    }
                    None => return ViewResolved::Diverges,
                },
                NameInner::Prepend { word, base } => {
                    let w = word.len() as u64;
                    if p < w {
                        return ViewResolved::Immediate(word[p as usize].clone());
                    }
                    p -= w;
                    base.clone()
                }
                NameInner::Project { base, index } => match pair_checked(*index, p) {
                    Some(q) => {
                        p = q;
                        base.clone()
                    }
                    None => return ViewResolved::Diverges,
                },
                NameInner::Tupled { component, memo } => {
                    let (i, j) = unpair(p);
                    let comp = {
                        let mut memo = memo.lock().unwrap();
                        memo.entry(i).or_insert_with(|| component(i)).clone()
                    };
                    p = j;
                    comp
                }
            };
            cur = next;
        }
    }

    /// Advance a `Computed` name's cache by at most one task poll. Must only
    /// be called on names that `resolve_view` reported as `Computed`.
    pub(crate) fn computed_step(&self, pos: u64, meter: &FuelMeter) -> Result<CacheStep, OutOfFuel> {
        let NameInner::Computed { code, args, cache } = &*self.inner else {
            unreachable!("computed_step on a non-computed name");
        };
        let mut cache = cache.lock().unwrap();
        if (pos as usize) < cache.syms.len() {
            meter.tick()?;
            return Ok(CacheStep::Ready(cache.syms[pos as usize].clone()));
        }
        if cache.complete {
            return Ok(CacheStep::Never);
        }
        if cache.task.is_none() {
            cache.task = Some(machine::spawn(code, args));
        }
        let task = cache.task.as_mut().unwrap();
        match task.poll(meter)? {
            machine::Poll::Pending => {}
            machine::Poll::Emit(s) => cache.syms.push(s),
            machine::Poll::Halt => {
                cache.complete = true;
                cache.task = None;
            }
        }
        Ok(CacheStep::Progress)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrefixResult {
    Word(Word),
    Insufficient,
}

impl PrefixResult {
    pub fn word(self) -> Option<Word> {
        match self {
            PrefixResult::Word(w) => Some(w),
            PrefixResult::Insufficient => None,
        }
    }
}

/// Countable tupling of names.
pub fn tuple(components: impl Fn(u64) -> Name + Send + Sync + 'static) -> Name {
    Name::tupled(components)
}

/// Component extraction: `project(tuple(u), i)` observationally equals `u_i`.
pub fn project(t: &Name, i: u64) -> Name {
    if let NameInner::Tupled { component, memo } = &*t.inner {
        let mut memo = memo.lock().unwrap();
        return memo.entry(i).or_insert_with(|| component(i)).clone();
    }
    Name {
        inner: Arc::new(NameInner::Project {
            base: t.clone(),
            index: i,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::codes;

    #[test]
    fn pair_origin() {
        assert_eq!(pair(0, 0), 0);
    }

    #[test]
    fn pair_against_diagonal_enumeration() {
        // Independent oracle: walk the diagonals in the order
        // (0,0),(1,0),(0,1),(2,0),(1,1),(0,2),... and record each pair's rank.
        let mut expected = std::collections::HashMap::new();
        let mut rank = 0u64;
        for s in 0..40u64 {
            for b in 0..=s {
                expected.insert((s - b, b), rank);
                rank += 1;
            }
        }
        assert_eq!(expected[&(1, 2)], 8);
        assert_eq!(pair(1, 2), 8);
        for (&(a, b), &n) in &expected {
            assert_eq!(pair(a, b), n, "pair({a},{b})");
        }
    }

    #[test]
    fn unpair_roundtrip_grid() {
        for a in 0..100 {
            for b in 0..100 {
                assert_eq!(unpair(pair(a, b)), (a, b));
            }
        }
    }

    #[test]
    fn pair_nat_matches_u64() {
        for n in 0..2000u64 {
            let (a, b) = unpair(n);
            assert_eq!(pair_nat(&nat(a), &nat(b)), nat(n));
            let (x, y) = unpair_nat(&nat(n));
            assert_eq!((x, y), (nat(a), nat(b)));
        }
    }

    #[test]
    fn tuple_position_law() {
        let t = tuple(|i| Name::from_word(&[i, i + 1, i + 2]));
        let meter = FuelMeter::new(Fuel(1_000_000));
        for i in 0..20 {
            let u_i = Name::from_word(&[i, i + 1, i + 2]);
            for j in 0..20 {
                let lhs = t.query(pair(i, j), &meter).unwrap();
                let rhs = u_i.query(j, &meter).unwrap();
                assert_eq!(lhs, rhs, "position law at ({i},{j})");
            }
        }
    }

    #[test]
    fn tuple_of_constants() {
        let t = tuple(|i| Name::constant(i));
        let meter = FuelMeter::new(Fuel(10_000));
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(t.query(pair(i, j), &meter).unwrap(), nat(i));
            }
        }
    }

    #[test]
    fn projection_observational() {
        let t = tuple(|i| Name::from_word(&[2 * i, 2 * i + 1]));
        let meter = FuelMeter::new(Fuel(100_000));
        for i in 0..8 {
            let p = project(&t, i);
            for j in 0..8 {
                assert_eq!(
                    p.query(j, &meter).unwrap(),
                    Name::from_word(&[2 * i, 2 * i + 1]).query(j, &meter).unwrap()
                );
            }
        }
    }

    #[test]
    fn short_tuple_prefix_touches_low_components() {
        // A prefix of length L only determines components i with pair(i,0) < L.
        let l = 12u64;
        let touched: Vec<u64> = (0..200).filter(|&i| pair(i, 0) < l).collect();
        for pos in 0..l {
            let (i, _) = unpair(pos);
            assert!(touched.contains(&i));
        }
        // and every touched component is actually hit at position pair(i,0)
        for &i in &touched {
            assert!(pair(i, 0) < l);
        }
    }

    #[test]
    fn prefix_of_eventually_periodic() {
        let u = Name::eventually_periodic(vec![], word(&[5]));
        assert_eq!(u.prefix(3, Fuel(10)).word().unwrap(), word(&[5, 5, 5]));
    }

    #[test]
    fn prefix_of_diverger_is_insufficient() {
        let u = Name::computed(codes::diverge(), vec![]);
        assert_eq!(u.prefix(1, Fuel(50)), PrefixResult::Insufficient);
    }

    #[test]
    fn prefix_monotone_in_fuel() {
        let u = Name::computed(codes::identity(), vec![Name::from_word(&[3, 1, 4, 1, 5])]);
        let w = u.prefix(4, Fuel(100)).word().unwrap();
        for extra in [0u64, 10, 1000] {
            assert_eq!(u.prefix(4, Fuel(100 + extra)).word().unwrap(), w);
        }
    }
}

//! Numbered families of basic open sets, strong inclusions, the five base
//! flavors as witness data, and the two representation constructions β* and
//! β^≺, plus induced bases and induced strong inclusions.
//!
//! Witness validation is sampling-based: a witness "holds" at desk scale
//! when no counterexample appears within the configured carrier, index
//! bound and fuel.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::machine::{
    self, halts_packed, pa_code, prims, Halts, MachineCode, Realizer,
};
use crate::names::{
    nat, nat_to_u64, pair, Fuel, FuelMeter, Name, Nat, Word,
};
use crate::spaces::{Point, Representation};

/// A totally numbered family of uniformly open subsets of a represented
/// space, with a machine-level membership realizer and a test-only
/// brute-force ground truth on the desk carrier.
///
/// The membership machine runs on `[[i]⌢aux, x]`: it reads the index from
/// the front of input 0, treats the rest as the family oracle, and
/// semi-decides `x ∈ B_i`.
#[derive(Clone)]
pub struct NumberedFamily {
    pub label: String,
    pub rep: Representation,
    pub member_code: MachineCode,
    pub aux: Name,
    pub ground_truth: Arc<dyn Fn(u64, &Point) -> bool + Send + Sync>,
    /// Desk-scale test points.
    pub carrier: Vec<Point>,
    /// Indices probed by validations and brute-force checks.
    pub index_bound: u64,
    /// Whether every point's index set below `index_bound` is the whole of
    /// `N_x` (lets β*-names be synthesized from truth vectors).
    pub nx_within_bound: bool,
}

impl fmt::Debug for NumberedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberedFamily({})", self.label)
    }
}

impl NumberedFamily {
    /// Packed open name of `B_i`.
    pub fn basic_pack(&self, i: u64) -> Name {
        Name::prepend(
            vec![pa_code(&self.e_member_code(), &[nat(i)])],
            self.aux.clone(),
        )
    }

    pub fn e_member_code(&self) -> Nat {
        machine::encode(&self.member_code)
    }

    /// Fuel-bounded membership semi-decision.
    pub fn member(&self, i: u64, x: &Name, fuel: Fuel) -> Halts {
        halts_packed(&self.basic_pack(i), &[x.clone()], fuel)
    }

    pub fn truth(&self, i: u64, p: &Point) -> bool {
        (self.ground_truth)(i, p)
    }

    /// Ground-truth index set of a point below the index bound.
    pub fn nx_truth(&self, p: &Point) -> BTreeSet<u64> {
        (0..self.index_bound).filter(|&i| self.truth(i, p)).collect()
    }
}

// ---------------------------------------------------------------------------
// Stock families
// ---------------------------------------------------------------------------

/// Singletons of ℕ: `B_i = {i}`.
pub fn nat_singletons(bound: u64) -> NumberedFamily {
    NumberedFamily {
        label: "nat-singletons".into(),
        rep: crate::spaces::naturals(),
        member_code: MachineCode::Prim(prims::NAT_SINGLETON_MEMBER),
        aux: Name::zeros(),
        ground_truth: Arc::new(|i, p| p.as_nat() == Some(i)),
        carrier: (0..bound).map(Point::Nat).collect(),
        index_bound: bound,
        nx_within_bound: true,
    }
}

/// An explicit finite list family over `FiniteDiscrete(n)`; indices beyond
/// the list denote the empty set.
pub fn finite_family(n: u64, sets: Vec<BTreeSet<u64>>, index_bound: u64) -> NumberedFamily {
    let data = sets.clone();
    let aux = Name::tupled(move |i| {
        let list: Vec<u64> = data
            .get(i as usize)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        let mut w = vec![list.len() as u64];
        w.extend(list);
        Name::from_word(&w)
    });
    let truth_sets = sets;
    NumberedFamily {
        label: format!("finite-family({n})"),
        rep: crate::spaces::finite_discrete(n),
        member_code: MachineCode::Prim(prims::FINITE_MEMBER),
        aux,
        ground_truth: Arc::new(move |i, p| {
            p.as_nat()
                .map(|v| truth_sets.get(i as usize).is_some_and(|s| s.contains(&v)))
                .unwrap_or(false)
        }),
        carrier: (0..n).map(Point::Nat).collect(),
        index_bound,
        nx_within_bound: true,
    }
}

pub fn finite_singletons(n: u64) -> NumberedFamily {
    let sets = (0..n).map(|k| BTreeSet::from([k])).collect();
    finite_family(n, sets, n)
}

/// Cylinders of Cantor space numbered by the word numbering.
pub fn cantor_cylinders(index_bound: u64, precision: u64) -> NumberedFamily {
    NumberedFamily {
        label: "cantor-cylinders".into(),
        rep: crate::spaces::cantor(precision),
        member_code: MachineCode::Prim(prims::CYLINDER_MEMBER),
        aux: Name::zeros(),
        ground_truth: Arc::new(|i, p| {
            let w = machine::word_decode(nat(i));
            match p {
                Point::Stream(s) => {
                    w.len() <= s.len()
                        && w.iter()
                            .zip(s)
                            .all(|(a, b)| nat_to_u64(a) == Some(*b))
                }
                _ => false,
            }
        }),
        carrier: cantor_carrier(precision),
        index_bound,
        nx_within_bound: false,
    }
}

/// Eventually-periodic Cantor test points, reported at `precision` symbols.
pub fn cantor_carrier(precision: u64) -> Vec<Point> {
    let mut out = Vec::new();
    for head in 0..8u64 {
        for tail in [0u64, 1] {
            let mut s = Vec::new();
            for b in 0..3 {
                s.push((head >> b) & 1);
            }
            while (s.len() as u64) < precision {
                s.push(tail);
            }
            out.push(Point::Stream(s));
        }
    }
    out
}

/// A canonical Cantor name for a carrier point (its reported prefix, then
/// constant).
pub fn cantor_point_name(p: &Point) -> Option<Name> {
    match p {
        Point::Stream(s) => {
            let last = *s.last()?;
            Some(Name::eventually_periodic(
                s.iter().map(|&v| nat(v)).collect(),
                vec![nat(last)],
            ))
        }
        _ => None,
    }
}

/// Dyadic open intervals of the unit interval, indexed by endpoint codes.
pub fn dyadic_intervals(precision: u32) -> NumberedFamily {
    NumberedFamily {
        label: "dyadic-intervals".into(),
        rep: crate::spaces::unit_interval(precision),
        member_code: MachineCode::Prim(prims::INTERVAL_MEMBER),
        aux: Name::zeros(),
        ground_truth: Arc::new(|i, p| {
            match (prims::interval_from_index(&nat(i)), p) {
                (Some((lo, hi)), Point::Real(iv)) => {
                    // A test real is identified with its interval midpoint.
                    let d = iv.mid();
                    lo < d && d < hi
                }
                _ => false,
            }
        }),
        carrier: (0..=16)
            .map(|k| {
                Point::Real(crate::dyadic::DyadicInterval::point(
                    crate::dyadic::Dyadic::ratio(k, 4),
                ))
            })
            .collect(),
        index_bound: 0,
        nx_within_bound: false,
    }
}

// ---------------------------------------------------------------------------
// Strong inclusions
// ---------------------------------------------------------------------------

/// A c.e. strong inclusion: a transitive, semi-decidable relation on basic
/// names with `p ≺ q ⟹ β(p) ⊆ β(q)`. The realizer runs on
/// `[aux, lhs, rhs]` and halts iff `lhs ≺ rhs`.
#[derive(Clone)]
pub struct StrongInclusion {
    pub label: String,
    pub code: MachineCode,
    pub aux: Name,
    pub truth: Arc<dyn Fn(u64, u64) -> bool + Send + Sync>,
}

impl StrongInclusion {
    pub fn semidecide(&self, lhs: u64, rhs: u64, fuel: Fuel) -> Halts {
        machine::halts(
            &self.code,
            &[self.aux.clone(), Name::constant(lhs), Name::constant(rhs)],
            fuel,
        )
    }
}

/// Equality of indices as strong inclusion (the totally numbered default).
pub fn equality_inclusion() -> StrongInclusion {
    StrongInclusion {
        label: "equality".into(),
        code: MachineCode::Prim(prims::EQ_PREC),
        aux: Name::zeros(),
        truth: Arc::new(|a, b| a == b),
    }
}

/// Strict nesting of dyadic intervals: `]x,y[ ≺ ]z,t[ ⟺ x>z & y<t`.
pub fn interval_inclusion() -> StrongInclusion {
    StrongInclusion {
        label: "interval-nesting".into(),
        code: MachineCode::Prim(prims::DYADIC_PREC),
        aux: Name::zeros(),
        truth: Arc::new(|a, b| {
            match (
                prims::interval_from_index(&nat(a)),
                prims::interval_from_index(&nat(b)),
            ) {
                (Some((p1, q1)), Some((p2, q2))) => p1 > p2 && q1 < q2,
                _ => false,
            }
        }),
    }
}

// ---------------------------------------------------------------------------
// Witnesses
// ---------------------------------------------------------------------------

/// A pair of name translators witnessing computable equivalence of two
/// representations. Each side runs on `[aux, source-name]` and emits the
/// translated name.
#[derive(Clone, Debug)]
pub struct Translator {
    pub forward: Realizer,
    pub backward: Realizer,
}

impl Translator {
    pub fn fwd(&self, name: &Name) -> Name {
        self.forward.apply(&[name.clone()])
    }

    pub fn bwd(&self, name: &Name) -> Name {
        self.backward.apply(&[name.clone()])
    }
}

/// Nogina witness: realizer on `[aux, x, O]` whose first output symbol is
/// the Δ-index (over the induced base) of a basic set with `x ∈ B ⊆ O`.
#[derive(Clone, Debug)]
pub struct NoginaWitness {
    pub realizer: Realizer,
}

/// Lacombe witness: realizer on `[aux, O]` emitting a pause-convention
/// enumeration of Δ-indices whose basic sets union to `O`.
#[derive(Clone, Debug)]
pub struct LacombeWitness {
    pub realizer: Realizer,
}

/// Local overt choice: realizer on `[aux, A, U]` (overt set of the index
/// space as an enumeration, open of the index space packed) emitting an
/// index name from `A ∩ U`.
#[derive(Clone, Debug)]
pub struct OvcWitness {
    pub realizer: Realizer,
}

#[derive(Clone, Debug)]
pub enum BaseWitness {
    /// The membership machine itself realizes the injection 𝔅 ↪ O(X).
    SemiEffective,
    Nogina(NoginaWitness),
    Lacombe(LacombeWitness),
    RepresentationSubbase(Translator),
    EnumerationSubbase(StrongInclusionTag, Translator),
    LocalOvertChoice(OvcWitness),
}

/// Re-exported label so witness values stay printable without dragging the
/// relation closure along.
#[derive(Clone, Debug)]
pub struct StrongInclusionTag(pub String);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseError {
    /// Two carrier points lie in exactly the same basic sets.
    NotT0(String),
    /// A carrier point lies in no basic set below the index bound.
    EmptyNeighborhoods(String),
    /// A carrier point admits no formal neighborhood base generator.
    NoFormalBase(String),
}

impl fmt::Display for BaseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseError::NotT0(s) => write!(f, "separation failure: {s}"),
            BaseError::EmptyNeighborhoods(s) => write!(f, "empty neighborhood set: {s}"),
            BaseError::NoFormalBase(s) => write!(f, "no formal neighborhood base: {s}"),
        }
    }
}

// ---------------------------------------------------------------------------
// β*: the subbase representation
// ---------------------------------------------------------------------------

/// Build the subbase representation β*: the name of a point is a packed
/// Sierpiński name of `N_x ∈ O(ℕ)` (its machine halts exactly on index
/// names of basics containing the point). Rejects carriers violating the
/// Galois conditions.
pub fn build_beta_star(fam: &NumberedFamily) -> Result<Representation, BaseError> {
    validate_conditions(fam)?;
    Ok(beta_star_representation(fam))
}

fn validate_conditions(fam: &NumberedFamily) -> Result<(), BaseError> {
    let mut seen: Vec<(BTreeSet<u64>, &Point)> = Vec::new();
    for p in &fam.carrier {
        let nx = fam.nx_truth(p);
        if nx.is_empty() {
            return Err(BaseError::EmptyNeighborhoods(format!(
                "point {p:?} lies in no basic set below index {}",
                fam.index_bound
            )));
        }
        if let Some((_, q)) = seen.iter().find(|(s, _)| *s == nx) {
            return Err(BaseError::NotT0(format!(
                "points {q:?} and {p:?} lie in exactly the same basic sets"
            )));
        }
        seen.push((nx, p));
    }
    Ok(())
}

/// The β* decoder: probe indices, keep the carrier points consistent with
/// everything fired so far, report when unique.
pub fn beta_star_decode(fam: &NumberedFamily, name: &Name, fuel: Fuel) -> Option<Point> {
    let per_index = Fuel(fuel.0 / (2 * fam.index_bound.max(1)));
    let mut fired = BTreeSet::new();
    for i in 0..fam.index_bound {
        if halts_packed(name, &[Name::constant(i)], per_index) == Halts::Yes {
            fired.insert(i);
        }
    }
    let candidates: Vec<&Point> = fam
        .carrier
        .iter()
        .filter(|p| fired.iter().all(|&i| fam.truth(i, p)))
        .collect();
    if candidates.len() == 1 {
        Some(candidates[0].clone())
    } else {
        None
    }
}

pub fn beta_star_representation(fam: &NumberedFamily) -> Representation {
    let dec_fam = fam.clone();
    let name_fam = fam.clone();
    let rep = Representation::new(
        fam.rep.space.clone(),
        format!("beta-star({})", fam.label),
        move |name, fuel| beta_star_decode(&dec_fam, name, fuel),
    );
    if fam.nx_within_bound {
        rep.with_namer(move |p, seed| beta_star_name(&name_fam, p, seed))
    } else {
        rep
    }
}

/// A valid β*-name of a carrier point, synthesized from its ground-truth
/// index set. Odd seeds hide the machine behind a dovetail for variety.
pub fn beta_star_name(fam: &NumberedFamily, p: &Point, seed: u64) -> Option<Name> {
    let nx: Vec<u64> = fam.nx_truth(p).into_iter().collect();
    if nx.is_empty() {
        return None;
    }
    Some(nx_set_pack(&nx, seed))
}

/// A packed semi-decider accepting exactly the index names whose head lies
/// in the given finite set.
pub fn nx_set_pack(indices: &[u64], seed: u64) -> Name {
    let mut w = vec![nat(indices.len() as u64)];
    w.extend(indices.iter().map(|&i| nat(i)));
    let data = Name::tuple_vec(vec![Name::eventually_periodic(w, vec![nat(0)])]);
    let base = MachineCode::partial_apply(
        MachineCode::Prim(prims::FINITE_MEMBER),
        vec![nat(0)],
    );
    let code = if seed % 2 == 1 {
        MachineCode::dovetail(machine::codes::diverge(), base)
    } else {
        base
    };
    Name::prepend(vec![machine::encode(&code)], data)
}

// ---------------------------------------------------------------------------
// β^≺: the enumeration subbase representation
// ---------------------------------------------------------------------------

/// Build β^≺: the name of a point is a countable tuple of index names
/// forming a formal neighborhood base under the strong inclusion. The
/// `fnb` closure supplies, for each carrier point, the k-th listed index.
pub fn build_beta_prec(
    fam: &NumberedFamily,
    inc: &StrongInclusion,
    fnb: impl Fn(&Point, u64, u64) -> Option<u64> + Send + Sync + 'static,
) -> Result<Representation, BaseError> {
    // Every carrier point must have at least one listed neighborhood.
    for p in &fam.carrier {
        match fnb(p, 0, 0) {
            Some(i) if fam.truth(i, p) => {}
            _ => {
                return Err(BaseError::NoFormalBase(format!(
                    "point {p:?} has no listed neighborhood"
                )))
            }
        }
    }
    let dec_fam = fam.clone();
    let namer_fam = fam.clone();
    let fnb = Arc::new(fnb);
    Ok(Representation::new(
        fam.rep.space.clone(),
        format!("beta-prec({}, {})", fam.label, inc.label),
        move |name, fuel| beta_prec_decode(&dec_fam, name, fuel),
    )
    .with_namer(move |p, seed| {
        if !namer_fam.carrier.iter().any(|q| q == p) {
            return None;
        }
        let fnb = fnb.clone();
        let p = p.clone();
        Some(Name::tupled(move |k| match fnb(&p, k, seed) {
            Some(i) => Name::constant(i),
            None => Name::zeros(),
        }))
    }))
}

/// Decode a β^≺ name: read listed indices off the tuple, narrow the carrier
/// to points contained in all of them.
pub fn beta_prec_decode(fam: &NumberedFamily, name: &Name, fuel: Fuel) -> Option<Point> {
    let meter = FuelMeter::new(fuel);
    let mut listed = Vec::new();
    for k in 0..16 {
        let Ok(s) = name.query(pair(k, 0), &meter) else {
            break;
        };
        if let Some(i) = nat_to_u64(&s) {
            listed.push(i);
        }
    }
    if listed.is_empty() {
        return None;
    }
    let candidates: Vec<&Point> = fam
        .carrier
        .iter()
        .filter(|p| listed.iter().all(|&i| fam.truth(i, p)))
        .collect();
    if candidates.len() == 1 {
        Some(candidates[0].clone())
    } else {
        None
    }
}

/// Membership of a β^≺-named point in a basic set: semi-decidable, since
/// `x ∈ B` iff some listed index refines `B`'s index.
pub fn beta_prec_member(
    inc: &StrongInclusion,
    x: &Name,
    basic_index: u64,
    fuel: Fuel,
) -> Halts {
    let member = MachineCode::partial_apply(
        MachineCode::Prim(prims::TUPLE_LISTED_PREC),
        vec![machine::encode(&inc.code)],
    );
    machine::halts(
        &member,
        &[
            Name::tuple_vec(vec![x.clone(), inc.aux.clone()]),
            Name::constant(basic_index),
        ],
        fuel,
    )
}

// ---------------------------------------------------------------------------
// Induced bases and inclusions
// ---------------------------------------------------------------------------

/// Replace a subbase by the base of its finite intersections, numbered by
/// bit sets: `B̃_m = ⋂_{j∈Δ_m} B_j` (so `B̃_0 = X`).
pub fn induced_base(fam: &NumberedFamily) -> NumberedFamily {
    let e_mc = fam.e_member_code();
    let inner = fam.clone();
    let index_bound = 1u64
        .checked_shl(fam.index_bound.min(10) as u32)
        .unwrap_or(u64::MAX);
    NumberedFamily {
        label: format!("induced({})", fam.label),
        rep: fam.rep.clone(),
        member_code: MachineCode::partial_apply(
            MachineCode::Prim(prims::INDUCED_MEMBER),
            vec![e_mc],
        ),
        aux: fam.aux.clone(),
        ground_truth: Arc::new(move |m, p| {
            prims::delta_set(m).into_iter().all(|j| inner.truth(j, p))
        }),
        carrier: fam.carrier.clone(),
        index_bound,
        nx_within_bound: fam.nx_within_bound,
    }
}

/// The same family viewed over the β^≺ representation of its space: the
/// membership machine becomes the strong-inclusion search through listed
/// indices (Prop: `x ∈ B` iff some listed index refines `B`'s).
pub fn beta_prec_family(
    fam: &NumberedFamily,
    inc: &StrongInclusion,
    rep: Representation,
) -> NumberedFamily {
    NumberedFamily {
        label: format!("{}@beta-prec", fam.label),
        rep,
        member_code: MachineCode::partial_apply(
            MachineCode::Prim(prims::PREC_MEMBER),
            vec![machine::encode(&inc.code)],
        ),
        aux: inc.aux.clone(),
        ground_truth: fam.ground_truth.clone(),
        carrier: fam.carrier.clone(),
        index_bound: fam.index_bound,
        nx_within_bound: fam.nx_within_bound,
    }
}

/// The induced strong inclusion on Δ-indices:
/// `⟨u⟩ ≺ ⟨v⟩ ⟺ ∀i∈Δ_v ∃j∈Δ_u: u_j ≺ v_i`.
pub fn induced_inclusion(inc: &StrongInclusion) -> StrongInclusion {
    let inner = inc.truth.clone();
    StrongInclusion {
        label: format!("induced({})", inc.label),
        code: MachineCode::partial_apply(
            MachineCode::Prim(prims::INDUCED_PREC),
            vec![machine::encode(&inc.code)],
        ),
        aux: inc.aux.clone(),
        truth: Arc::new(move |a, b| {
            prims::delta_set(b)
                .into_iter()
                .all(|i| prims::delta_set(a).into_iter().any(|j| inner(j, i)))
        }),
    }
}

// ---------------------------------------------------------------------------
// Witness executors
// ---------------------------------------------------------------------------

/// Run a Nogina witness: the returned Δ-index satisfies `x ∈ B̃ ⊆ O` when
/// the witness is valid; `None` is fuel exhaustion.
pub fn nogina_query(w: &NoginaWitness, x: &Name, o_pack: &Name, fuel: Fuel) -> Option<Nat> {
    let out = w.realizer.run(&[x.clone(), o_pack.clone()], fuel);
    out.first().cloned()
}

/// Run a Lacombe witness: the pause-convention enumeration of Δ-indices.
pub fn lacombe_decompose(w: &LacombeWitness, o_pack: &Name) -> Name {
    w.realizer.apply(&[o_pack.clone()])
}

/// Collect the Δ-indices enumerated within fuel.
pub fn enum_values(stream: &Name, fuel: Fuel) -> Vec<u64> {
    let meter = FuelMeter::new(fuel);
    let mut out = Vec::new();
    let mut pos = 0u64;
    loop {
        match stream.query(pos, &meter) {
            Err(_) => break,
            Ok(s) => {
                if s != nat(0) {
                    if let Some(v) = nat_to_u64(&(s - 1u32)) {
                        out.push(v);
                    }
                }
                pos += 1;
            }
        }
    }
    out
}

/// The union of the Δ-indexed basics enumerated by a decomposition, as a
/// ground-truth subset of the carrier.
pub fn decomposition_truth(
    fam: &NumberedFamily,
    deltas: &[u64],
) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for (pi, p) in fam.carrier.iter().enumerate() {
        if deltas
            .iter()
            .any(|&m| prims::delta_set(m).into_iter().all(|j| fam.truth(j, p)))
        {
            out.insert(pi);
        }
    }
    out
}

/// A Nogina witness built directly over an enumeration-subbase space: run
/// the open on truncations of the point's name (the generic conversion
/// lives in the conversions module; this is its realizer).
pub fn truncation_nogina_witness() -> NoginaWitness {
    NoginaWitness {
        realizer: Realizer::closed(MachineCode::Prim(prims::NOGINA_FROM_ENUM)),
    }
}

/// Canonical word-probing Lacombe witness over a β^≺-represented space.
pub fn word_lacombe_witness() -> LacombeWitness {
    LacombeWitness {
        realizer: Realizer::closed(MachineCode::Prim(prims::LACOMBE_WORDS)),
    }
}

/// Lacombe witness for head-valued spaces with singleton bases: enumerate
/// accepted points, mapped to Δ-codes.
pub fn head_singleton_lacombe_witness() -> LacombeWitness {
    LacombeWitness {
        realizer: Realizer::closed(MachineCode::compose(
            MachineCode::Prim(prims::MAP_POW2_ENUM),
            MachineCode::Prim(prims::ENUM_FROM_SIERP_NAT),
        )),
    }
}

/// OVC over ℕ-indexed bases by enumeration search.
pub fn nat_ovc_witness() -> OvcWitness {
    OvcWitness {
        realizer: Realizer::closed(MachineCode::Prim(prims::OVC_NAT)),
    }
}

/// Build the β^≺ name machinery as a plain tuple name from listed indices
/// (test helper).
pub fn tuple_name_of_indices(indices: Vec<u64>) -> Name {
    Name::tupled(move |k| {
        let i = indices[(k % indices.len() as u64) as usize];
        Name::constant(i)
    })
}

/// Word over the index alphabet → the Δ-code its tuple prefix determines.
pub fn word_to_delta(w: &[u64]) -> Option<Nat> {
    let word: Word = w.iter().map(|&v| nat(v)).collect();
    prims::word_delta_code(&word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{Dyadic, DyadicInterval};

    #[test]
    fn beta_star_singletons_accepts_only_own_index() {
        let fam = finite_singletons(4);
        let rep = build_beta_star(&fam).unwrap();
        for seed in [0u64, 1, 2] {
            let name = rep.name_of(&Point::Nat(2), seed).unwrap();
            for i in 0..4 {
                let got = halts_packed(&name, &[Name::constant(i)], Fuel(50_000));
                let expect = if i == 2 { Halts::Yes } else { Halts::Unknown };
                assert_eq!(got, expect, "index {i} seed {seed}");
            }
            assert_eq!(rep.decode(&name, Fuel(200_000)), Some(Point::Nat(2)));
        }
    }

    #[test]
    fn beta_star_rejects_non_separating_family() {
        // Two points in all the same sets: {0,1} and {} — points 0 and 1
        // are indistinguishable.
        let fam = finite_family(3, vec![BTreeSet::from([0, 1]), BTreeSet::from([2])], 2);
        match build_beta_star(&fam) {
            Err(BaseError::NotT0(msg)) => {
                assert!(msg.contains("Nat(0)") && msg.contains("Nat(1)"), "{msg}");
            }
            other => panic!("expected T0 rejection, got {other:?}"),
        }
    }

    #[test]
    fn beta_star_on_nat_singletons() {
        let fam = nat_singletons(32);
        let rep = build_beta_star(&fam).unwrap();
        let name = rep.name_of(&Point::Nat(7), 0).unwrap();
        for i in 0..32 {
            let got = halts_packed(&name, &[Name::constant(i)], Fuel(20_000));
            assert_eq!(got == Halts::Yes, i == 7);
        }
    }

    #[test]
    fn beta_prec_nat_singletons_with_equality() {
        let fam = nat_singletons(16);
        let rep = build_beta_prec(&fam, &equality_inclusion(), |p, _, _| p.as_nat())
            .unwrap();
        let name = rep.name_of(&Point::Nat(6), 1).unwrap();
        assert_eq!(rep.decode(&name, Fuel(100_000)), Some(Point::Nat(6)));
        // Constant-index tuples decode directly too.
        let direct = tuple_name_of_indices(vec![6]);
        assert_eq!(rep.decode(&direct, Fuel(100_000)), Some(Point::Nat(6)));
    }

    #[test]
    fn beta_prec_membership_via_inclusion_search() {
        let inc = equality_inclusion();
        let x = tuple_name_of_indices(vec![5]);
        assert_eq!(beta_prec_member(&inc, &x, 5, Fuel(50_000)), Halts::Yes);
        assert_eq!(beta_prec_member(&inc, &x, 6, Fuel(20_000)), Halts::Unknown);
    }

    #[test]
    fn beta_prec_dyadic_intervals() {
        // Cauchy-style names: listed indices are intervals shrinking on the
        // point; decoding pins the point at the carrier grid.
        let fam = dyadic_intervals(8);
        let inc = interval_inclusion();
        let fnb = |p: &Point, k: u64, _seed: u64| -> Option<u64> {
            let Point::Real(iv) = p else { return None };
            let d = iv.mid();
            let e = (k as u32) + 2;
            let lo = d.sub(&Dyadic::pow2_neg(e));
            let hi = d.add(&Dyadic::pow2_neg(e));
            nat_to_u64(&prims::interval_index(&lo, &hi))
        };
        let rep = build_beta_prec(&fam, &inc, fnb).unwrap();
        for k in 1..16i64 {
            let p = Point::Real(DyadicInterval::point(Dyadic::ratio(k, 4)));
            let name = rep.name_of(&p, 3).unwrap();
            // Membership from the name: the listed second interval refines
            // the coarse ]p-1/4, p+1/4[ one.
            let d = Dyadic::ratio(k, 4);
            let coarse = prims::interval_index(
                &d.sub(&Dyadic::pow2_neg(2)),
                &d.add(&Dyadic::pow2_neg(2)),
            );
            let got = beta_prec_member(
                &interval_inclusion(),
                &name,
                nat_to_u64(&coarse).unwrap(),
                Fuel(200_000),
            );
            assert_eq!(got, Halts::Yes, "at k={k}");
        }
    }

    #[test]
    fn induced_base_bit_sets() {
        // Overlapping sets so intersections matter.
        let fam = finite_family(
            6,
            vec![
                BTreeSet::from([0, 1, 2, 3]),
                BTreeSet::from([2, 3, 4]),
                BTreeSet::from([0, 2, 4]),
            ],
            3,
        );
        let ind = induced_base(&fam);
        // Δ_0 = ∅: the whole space.
        for p in &ind.carrier {
            assert!(ind.truth(0, p));
        }
        // Δ_5 = {0,2}: B_0 ∩ B_2, pointwise.
        for v in 0..6u64 {
            let p = Point::Nat(v);
            let expect = fam.truth(0, &p) && fam.truth(2, &p);
            assert_eq!(ind.truth(5, &p), expect);
            let got = ind.member(5, &Name::constant(v), Fuel(100_000));
            assert_eq!(got == Halts::Yes, expect, "machine at {v}");
        }
    }

    #[test]
    fn induced_inclusion_transitive_on_samples() {
        use rand::prelude::*;
        // A transitive base relation on small indices; the induced relation
        // on Δ-codes must stay transitive.
        let base = StrongInclusion {
            label: "geq".into(),
            code: machine::codes::diverge(),
            aux: Name::zeros(),
            truth: Arc::new(|a, b| a >= b),
        };
        let ind = induced_inclusion(&base);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut hits = 0;
        for _ in 0..200 {
            let a = rng.gen_range(1..256u64);
            let b = rng.gen_range(1..256u64);
            let c = rng.gen_range(1..256u64);
            if (ind.truth)(a, b) && (ind.truth)(b, c) {
                assert!((ind.truth)(a, c), "transitivity at Δ-codes {a},{b},{c}");
                hits += 1;
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn raw_interval_inclusion_transitivity_random() {
        use rand::prelude::*;
        let inc = interval_inclusion();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut idx = |_: ()| {
            let e = rng.gen_range(1..5u32);
            let a = rng.gen_range(0..(1 << e) as i64);
            let b = rng.gen_range(a + 1..=(1 << e) as i64);
            nat_to_u64(&prims::interval_index(
                &Dyadic::ratio(a, e),
                &Dyadic::ratio(b, e),
            ))
            .unwrap_or(0)
        };
        let items: Vec<u64> = (0..30).map(|_| idx(())).collect();
        let mut hits = 0;
        for &a in &items {
            for &b in &items {
                for &c in &items {
                    if (inc.truth)(a, b) && (inc.truth)(b, c) {
                        assert!((inc.truth)(a, c), "transitivity at {a},{b},{c}");
                        hits += 1;
                    }
                }
            }
        }
        assert!(hits > 0, "sample should contain chained inclusions");
    }

    #[test]
    fn word_probing_lacombe_on_beta_prec_nat() {
        // Decompose an open of ℕ-singletons under the β^≺ (tuple)
        // representation: O = {3, 5} as a union of listed basics.
        let fam = nat_singletons(16);
        let inc = equality_inclusion();
        let rep = build_beta_prec(&fam, &inc, |p, _, _| p.as_nat()).unwrap();
        let pfam = beta_prec_family(&fam, &inc, rep);
        // O = B_3 ∪ B_5 over the β^≺ family view.
        let mut cfg = vec![pfam.e_member_code(), nat(2), nat(3), nat(5)];
        let o_pack = Name::prepend(
            vec![machine::encode(&MachineCode::partial_apply(
                MachineCode::Prim(prims::UNION_LISTED),
                std::mem::take(&mut cfg),
            ))],
            pfam.aux.clone(),
        );
        let w = word_lacombe_witness();
        let stream = lacombe_decompose(&w, &o_pack);
        let deltas = enum_values(&stream, Fuel(400_000));
        assert!(!deltas.is_empty(), "decomposition should list something");
        // Everything listed is one of the two singletons (or intersections
        // inside them); the union covers exactly {3,5} on the carrier.
        let covered = decomposition_truth(&pfam, &deltas);
        let expect: BTreeSet<usize> = [3usize, 5].into();
        assert_eq!(covered, expect);
    }
}

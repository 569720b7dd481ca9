//! The fixed registry of built-in transducers.
//!
//! Every realizer the library constructs is a term over these primitives,
//! so "machine code as a natural" stays meaningful. Conventions:
//!
//! - Realizer layout: input 0 is the oracle/aux stream, inputs 1.. are the
//!   arguments. `PartialApply` prepends configuration words to input 0, so
//!   configured primitives consume their config from the front of input 0.
//! - Packed names: position 0 is a machine code, the tail is its oracle.
//! - Enumeration outputs use the pause convention: 0 pauses, n+1 lists n.
//! - Index names for a totally numbered family: position 0 is the index.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use super::task::*;
use super::{decode_cached, encode, pa_code, spawn, spawn_packed, MachineCode};
use crate::dyadic::Dyadic;
use super::word_code;
use crate::names::{nat, nat_to_u64, pair, unpair, FuelMeter, Name, Nat, OutOfFuel};

pub const DIVERGE: u64 = 0;
pub const ACCEPT: u64 = 1;
pub const COPY0: u64 = 2;
pub const COPY1: u64 = 3;
pub const TAIL0: u64 = 4;
pub const REPEAT: u64 = 5;
pub const EMIT_EP: u64 = 6;
pub const EVAL: u64 = 7;
pub const EVAL_SWAPPED: u64 = 8;
pub const CS_ACCEPT_ARG: u64 = 9;
pub const CS_ACCEPT_AUX: u64 = 10;
pub const TUPLE2: u64 = 11;
pub const EVAL_COMPONENT: u64 = 12;
pub const ZEROS: u64 = 13;
pub const ACCEPT_IF_HEAD: u64 = 14;
pub const ACCEPT_IF_HEAD_IN_PAIR: u64 = 15;
pub const ACCEPT_IF_CONTAINS: u64 = 16;
pub const ENUM_FROM_SIERP_NAT: u64 = 17;
pub const ENUM_MEMBER_NAT: u64 = 18;
pub const INTERSECT_LISTED: u64 = 19;
pub const BETA_STAR_MEMBER: u64 = 20;
pub const UNION_LISTED: u64 = 21;
pub const THETA_MEMBER: u64 = 22;
pub const LACOMBE_WORDS: u64 = 23;
pub const CHOICE_FROM_DENSE: u64 = 24;
pub const ASPACE_OCSTAR: u64 = 25;
pub const ASPACE_BACKWARD: u64 = 26;
pub const OVERT_ENUM: u64 = 27;
pub const OVC_NAT: u64 = 28;
pub const LT_ONE: u64 = 29;
pub const URYSOHN_EVAL: u64 = 30;
pub const TUPLE_EVAL_FAMILY: u64 = 31;
pub const HILBERT_INV_ENUM: u64 = 32;
pub const NONEMPTY_ENUM: u64 = 33;
pub const SUPERSET_ENUM: u64 = 34;
pub const ACCEPT_TOT_OPEN: u64 = 35;
pub const ACCEPT_TOT_COMPL: u64 = 36;
pub const TOT_PROBE: u64 = 37;
pub const PREFIX_MEMBER: u64 = 38;
pub const FIBER_MEET: u64 = 39;
pub const FIBER_TO_OPEN: u64 = 40;
pub const CYL_ACCEPT: u64 = 41;
pub const EVAL2: u64 = 42;
pub const NAT_SINGLETON_MEMBER: u64 = 43;
pub const FINITE_MEMBER: u64 = 44;
pub const CYLINDER_MEMBER: u64 = 45;
pub const INTERVAL_MEMBER: u64 = 46;
pub const HEAD_FN: u64 = 47;
pub const SQUARE_FN: u64 = 48;
pub const RACE_SEPARATE_MEMBER: u64 = 49;
pub const RACE_SEPARATE_EMIT: u64 = 50;
pub const STRONG_NORMALITY_MEMBER: u64 = 51;
pub const ARENS_POINT_MEMBER: u64 = 52;
pub const TOT_POINT_MEMBER: u64 = 53;
pub const PRUNE_CONVERT: u64 = 54;
pub const ENUM_TO_TUPLE: u64 = 55;
pub const DYADIC_PREC: u64 = 56;
pub const EQ_PREC: u64 = 57;
pub const TUPLE_LISTED_PREC: u64 = 58;
pub const NX_BASIC_ENUM: u64 = 59;
pub const TABLE_FN: u64 = 60;
pub const INJ_NX: u64 = 61;
pub const OVERT_UNION_FAM: u64 = 62;
pub const HEAD_OPEN_WITNESS: u64 = 63;
pub const COMPACT_FIN: u64 = 64;
pub const INDUCED_MEMBER: u64 = 65;
pub const INDUCED_PREC: u64 = 66;
pub const NOGINA_FROM_ENUM: u64 = 67;
pub const MAP_POW2_ENUM: u64 = 68;
pub const PREC_MEMBER: u64 = 69;

pub const PRIM_COUNT: u64 = 70;

pub fn prim_name(k: u64) -> &'static str {
    const NAMES: &[&str] = &[
        "diverge",
        "accept",
        "copy0",
        "copy1",
        "tail0",
        "repeat",
        "emit_ep",
        "eval",
        "eval_swapped",
        "cs_accept_arg",
        "cs_accept_aux",
        "tuple2",
        "eval_component",
        "zeros",
        "accept_if_head",
        "accept_if_head_in_pair",
        "accept_if_contains",
        "enum_from_sierp_nat",
        "enum_member_nat",
        "intersect_listed",
        "beta_star_member",
        "union_listed",
        "theta_member",
        "lacombe_words",
        "choice_from_dense",
        "aspace_ocstar",
        "aspace_backward",
        "overt_enum",
        "ovc_nat",
        "lt_one",
        "urysohn_eval",
        "tuple_eval_family",
        "hilbert_inv_enum",
        "nonempty_enum",
        "superset_enum",
        "accept_tot_open",
        "accept_tot_compl",
        "tot_probe",
        "prefix_member",
        "fiber_meet",
        "fiber_to_open",
        "cyl_accept",
        "eval2",
        "nat_singleton_member",
        "finite_member",
        "cylinder_member",
        "interval_member",
        "head_fn",
        "square_fn",
        "race_separate_member",
        "race_separate_emit",
        "strong_normality_member",
        "arens_point_member",
        "tot_point_member",
        "prune_convert",
        "enum_to_tuple",
        "dyadic_prec",
        "eq_prec",
        "tuple_listed_prec",
        "nx_basic_enum",
        "table_fn",
        "inj_nx",
        "overt_union_fam",
        "head_open_witness",
        "compact_fin",
        "induced_member",
        "induced_prec",
        "nogina_from_enum",
        "map_pow2_enum",
        "prec_member",
    ];
    NAMES.get(k as usize).copied().unwrap_or("<invalid>")
}

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

fn input(inputs: &[Name], i: usize) -> Name {
    inputs.get(i).cloned().unwrap_or_else(super::silent_name)
}

fn accept_task() -> Box<dyn Task> {
    Box::new(ConstOutputTask::new(vec![nat(0)], Box::new(HaltTask)))
}

fn diverge_task() -> Box<dyn Task> {
    Box::new(DivergeTask)
}

fn probe_packed(pack: &Name, args: &[Name]) -> RunProbe {
    RunProbe::new(Box::new(spawn_packed(pack, args)))
}

/// Decode the bit positions of a finite-set code (the Δ numbering).
pub fn delta_set(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut bit = 0u64;
    while m != 0 {
        if m & 1 == 1 {
            out.push(bit);
        }
        m >>= 1;
        bit += 1;
    }
    out
}

pub fn delta_code(set: &[u64]) -> Option<u64> {
    let mut m = 0u64;
    for &b in set {
        if b >= 64 {
            return None;
        }
        m |= 1 << b;
    }
    Some(m)
}

/// Reads a configuration prefix from input 0 cooperatively, then builds the
/// real task over the advanced inputs.
struct CfgTask {
    cursor: Cursor,
    collected: Vec<Nat>,
    shape: Box<dyn FnMut(&[Nat]) -> Option<usize> + Send>,
    build: Option<Box<dyn FnOnce(Vec<Nat>, Vec<Name>) -> Box<dyn Task> + Send>>,
    inputs: Vec<Name>,
    inner: Option<Box<dyn Task>>,
}

impl CfgTask {
    fn new(
        inputs: &[Name],
        shape: impl FnMut(&[Nat]) -> Option<usize> + Send + 'static,
        build: impl FnOnce(Vec<Nat>, Vec<Name>) -> Box<dyn Task> + Send + 'static,
    ) -> Self {
        CfgTask {
            cursor: Cursor::new(input(inputs, 0)),
            collected: Vec::new(),
            shape: Box::new(shape),
            build: Some(Box::new(build)),
            inputs: inputs.to_vec(),
            inner: None,
        }
    }

    fn fixed(
        n: usize,
        inputs: &[Name],
        build: impl FnOnce(Vec<Nat>, Vec<Name>) -> Box<dyn Task> + Send + 'static,
    ) -> Self {
        CfgTask::new(inputs, move |_| Some(n), build)
    }
}

impl Task for CfgTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if let Some(t) = self.inner.as_mut() {
            return t.poll(meter);
        }
        if (self.shape)(&self.collected) == Some(self.collected.len()) {
            let consumed = self.collected.len() as u64;
            let mut adv = self.inputs.clone();
            if !adv.is_empty() {
                adv[0] = adv[0].suffix(consumed);
            } else {
                adv.push(super::silent_name());
            }
            let build = self.build.take().unwrap();
            let collected = std::mem::take(&mut self.collected);
            self.inner = Some(build(collected, adv));
            return self.inner.as_mut().unwrap().poll(meter);
        }
        match self.cursor.poll_next(meter)? {
            Some(s) => {
                self.collected.push(s);
                Ok(Poll::Pending)
            }
            None => Ok(Poll::Pending),
        }
    }
}

fn cfg_u64(c: &Nat) -> Option<u64> {
    nat_to_u64(c)
}

/// Read one position of a name, then continue as a built task.
struct HeadThen {
    query: PosQuery,
    build: Option<Box<dyn FnOnce(Nat) -> Box<dyn Task> + Send>>,
    inner: Option<Box<dyn Task>>,
}

impl HeadThen {
    fn new(name: Name, pos: u64, build: impl FnOnce(Nat) -> Box<dyn Task> + Send + 'static) -> Self {
        HeadThen {
            query: PosQuery::new(name, pos),
            build: Some(Box::new(build)),
            inner: None,
        }
    }
}

impl Task for HeadThen {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if let Some(t) = self.inner.as_mut() {
            return t.poll(meter);
        }
        match self.query.poll(meter)? {
            Some(s) => {
                self.inner = Some(self.build.take().unwrap()(s));
                Ok(Poll::Pending)
            }
            None => Ok(Poll::Pending),
        }
    }
}

/// Scan a name sequentially; accept when the predicate first holds.
struct ScanAccept {
    cursor: Cursor,
    pred: Box<dyn FnMut(&Nat) -> bool + Send>,
    done: bool,
}

impl ScanAccept {
    fn new(name: Name, pred: impl FnMut(&Nat) -> bool + Send + 'static) -> Self {
        ScanAccept {
            cursor: Cursor::new(name),
            pred: Box::new(pred),
            done: false,
        }
    }
}

impl Task for ScanAccept {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if self.done {
            meter.tick()?;
            return Ok(Poll::Halt);
        }
        match self.cursor.poll_next(meter)? {
            Some(s) if (self.pred)(&s) => {
                self.done = true;
                Ok(Poll::Emit(nat(0)))
            }
            _ => Ok(Poll::Pending),
        }
    }
}

/// Scan an enumeration stream for `target`; fire with the number of
/// enumerated entries seen strictly before it.
struct ScanRank {
    cursor: Cursor,
    target: Nat,
    rank: u64,
    done: bool,
}

impl ScanRank {
    fn new(stream: Name, target: u64) -> Self {
        ScanRank {
            cursor: Cursor::new(stream),
            target: nat(target + 1),
            rank: 0,
            done: false,
        }
    }
}

impl Task for ScanRank {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if self.done {
            meter.tick()?;
            return Ok(Poll::Halt);
        }
        match self.cursor.poll_next(meter)? {
            Some(s) => {
                if s == self.target {
                    self.done = true;
                    return Ok(Poll::Emit(nat(self.rank)));
                }
                if s != nat(0) {
                    self.rank += 1;
                }
                Ok(Poll::Pending)
            }
            None => Ok(Poll::Pending),
        }
    }
}

/// Wait for a machine's first output symbol, then continue as a built task.
struct FirstEmitThen {
    task: Option<Box<dyn Task>>,
    build: Option<Box<dyn FnOnce(Option<Nat>) -> Box<dyn Task> + Send>>,
    inner: Option<Box<dyn Task>>,
}

impl FirstEmitThen {
    fn new(
        task: Box<dyn Task>,
        build: impl FnOnce(Option<Nat>) -> Box<dyn Task> + Send + 'static,
    ) -> Self {
        FirstEmitThen {
            task: Some(task),
            build: Some(Box::new(build)),
            inner: None,
        }
    }
}

impl Task for FirstEmitThen {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if let Some(t) = self.inner.as_mut() {
            return t.poll(meter);
        }
        match self.task.as_mut().unwrap().poll(meter)? {
            Poll::Emit(s) => {
                self.task = None;
                self.inner = Some(self.build.take().unwrap()(Some(s)));
                Ok(Poll::Pending)
            }
            Poll::Halt => {
                self.task = None;
                self.inner = Some(self.build.take().unwrap()(None));
                Ok(Poll::Pending)
            }
            Poll::Pending => Ok(Poll::Pending),
        }
    }
}

// ---------------------------------------------------------------------------
// Custom prim tasks
// ---------------------------------------------------------------------------

/// Strictly alternating race between two membership machines; accepts if the
/// configured side wins.
struct RaceMember {
    a: Box<dyn Task>,
    b: Box<dyn Task>,
    a_turn: bool,
    want_b_first: bool,
    decided: Option<bool>, // Some(accept)
    emitted: bool,
}

impl RaceMember {
    fn new(a: Box<dyn Task>, b: Box<dyn Task>, want_b_first: bool) -> Self {
        RaceMember {
            a,
            b,
            a_turn: true,
            want_b_first,
            decided: None,
            emitted: false,
        }
    }
}

impl Task for RaceMember {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        match self.decided {
            Some(true) => {
                meter.tick()?;
                if self.emitted {
                    return Ok(Poll::Halt);
                }
                self.emitted = true;
                return Ok(Poll::Emit(nat(0)));
            }
            Some(false) => {
                meter.tick()?;
                return Ok(Poll::Pending);
            }
            None => {}
        }
        let (task, is_a) = if self.a_turn {
            (&mut self.a, true)
        } else {
            (&mut self.b, false)
        };
        self.a_turn = !self.a_turn;
        match task.poll(meter)? {
            Poll::Emit(_) => {
                let b_won = !is_a;
                self.decided = Some(b_won == self.want_b_first);
                Ok(Poll::Pending)
            }
            _ => Ok(Poll::Pending),
        }
    }
}

/// Runs a machine under a step cap; accepts iff it produced no output within
/// the cap (the "has not stopped within k steps" probe).
struct CappedProbe {
    task: Option<Box<dyn Task>>,
    steps_left: u64,
    verdict: Option<bool>,
    emitted: bool,
}

impl CappedProbe {
    fn new(task: Box<dyn Task>, cap: u64) -> Self {
        CappedProbe {
            task: Some(task),
            steps_left: cap,
            verdict: None,
            emitted: false,
        }
    }
}

impl Task for CappedProbe {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        match self.verdict {
            Some(true) => {
                meter.tick()?;
                if self.emitted {
                    return Ok(Poll::Halt);
                }
                self.emitted = true;
                return Ok(Poll::Emit(nat(0)));
            }
            Some(false) => {
                meter.tick()?;
                return Ok(Poll::Pending);
            }
            None => {}
        }
        if self.steps_left == 0 {
            self.verdict = Some(true);
            meter.tick()?;
            return Ok(Poll::Pending);
        }
        self.steps_left -= 1;
        match self.task.as_mut().unwrap().poll(meter)? {
            Poll::Emit(_) => {
                self.verdict = Some(false);
                self.task = None;
                Ok(Poll::Pending)
            }
            Poll::Halt => {
                // Finished silently within the cap: it never stops, so the
                // probe accepts once the cap is spent.
                self.task = Some(diverge_task());
                Ok(Poll::Pending)
            }
            Poll::Pending => Ok(Poll::Pending),
        }
    }
}

/// Membership in the `{0,1}`-valued space of the restricted-domain example:
/// accepts iff some finite word extends the configured prefix into an
/// accepted input of the packed open name.
fn prefix_member_task(prefix: Vec<Nat>, pack: Name) -> Box<dyn Task> {
    let src = CounterSource::new(move |widx| {
        let mut w = prefix.clone();
        w.extend(super::word_decode(nat(widx)));
        Some(Box::new(spawn_packed(
            &pack,
            &[Name::prepend(w, super::silent_name())],
        )) as Box<dyn Task>)
    });
    Box::new(DovetailEnum::new(
        Box::new(src),
        FireMode::commit(|_| accept_task()),
    ))
}

/// Check that a stream starts with a fixed word; accept on full match.
struct PrefixCheck {
    cursor: Cursor,
    expect: Vec<Nat>,
    at: usize,
    state: Option<bool>,
    emitted: bool,
}

impl PrefixCheck {
    fn new(name: Name, expect: Vec<Nat>) -> Self {
        PrefixCheck {
            cursor: Cursor::new(name),
            expect,
            at: 0,
            state: None,
            emitted: false,
        }
    }
}

impl Task for PrefixCheck {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        match self.state {
            Some(true) => {
                meter.tick()?;
                if self.emitted {
                    return Ok(Poll::Halt);
                }
                self.emitted = true;
                return Ok(Poll::Emit(nat(0)));
            }
            Some(false) => {
                meter.tick()?;
                return Ok(Poll::Pending);
            }
            None => {}
        }
        if self.at >= self.expect.len() {
            self.state = Some(true);
            meter.tick()?;
            return Ok(Poll::Pending);
        }
        match self.cursor.poll_next(meter)? {
            Some(s) => {
                if s == self.expect[self.at] {
                    self.at += 1;
                } else {
                    self.state = Some(false);
                }
                Ok(Poll::Pending)
            }
            None => Ok(Poll::Pending),
        }
    }
}

/// Scan a fast Cauchy name; accept once an approximation certifies `x < 1`.
struct LtOneTask {
    cursor: Cursor,
    n: u32,
    done: bool,
}

impl LtOneTask {
    fn new(real: Name) -> Self {
        LtOneTask {
            cursor: Cursor::new(real),
            n: 0,
            done: false,
        }
    }
}

impl Task for LtOneTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if self.done {
            meter.tick()?;
            return Ok(Poll::Halt);
        }
        match self.cursor.poll_next(meter)? {
            Some(s) => {
                let n = self.n;
                self.n += 1;
                if let Some(q) = Dyadic::from_code(&s) {
                    if q.add(&Dyadic::pow2_neg(n)) < Dyadic::one() {
                        self.done = true;
                        return Ok(Poll::Emit(nat(0)));
                    }
                }
                Ok(Poll::Pending)
            }
            None => Ok(Poll::Pending),
        }
    }
}

/// Membership of a fast Cauchy name in a strict dyadic interval `]p,q[`.
struct IntervalMemberTask {
    cursor: Cursor,
    n: u32,
    p: Dyadic,
    q: Dyadic,
    done: bool,
}

impl Task for IntervalMemberTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if self.done {
            meter.tick()?;
            return Ok(Poll::Halt);
        }
        match self.cursor.poll_next(meter)? {
            Some(s) => {
                let n = self.n;
                self.n += 1;
                if let Some(a) = Dyadic::from_code(&s) {
                    let eps = Dyadic::pow2_neg(n);
                    if a.sub(&eps) > self.p && a.add(&eps) < self.q {
                        self.done = true;
                        return Ok(Poll::Emit(nat(0)));
                    }
                }
                Ok(Poll::Pending)
            }
            None => Ok(Poll::Pending),
        }
    }
}

/// Decode an interval index `⟨pcode, qcode⟩` into endpoints.
pub fn interval_from_index(i: &Nat) -> Option<(Dyadic, Dyadic)> {
    let (pc, qc) = crate::names::unpair_nat(i);
    let p = Dyadic::from_code(&pc)?;
    let q = Dyadic::from_code(&qc)?;
    if p < q {
        Some((p, q))
    } else {
        None
    }
}

pub fn interval_index(p: &Dyadic, q: &Dyadic) -> Nat {
    crate::names::pair_nat(&p.code(), &q.code())
}

/// Membership for list-valued families: component `i` of the data tuple is
/// `[len, e_1, ..., e_len]`; accept iff the argument's head is listed.
struct FiniteMemberTask {
    head: PosQuery,
    x: Option<Nat>,
    list: Cursor,
    remaining: Option<u64>,
    matched: Option<bool>,
    emitted: bool,
}

impl FiniteMemberTask {
    fn new(data_component: Name, arg: Name) -> Self {
        FiniteMemberTask {
            head: PosQuery::new(arg, 0),
            x: None,
            list: Cursor::new(data_component),
            remaining: None,
            matched: None,
            emitted: false,
        }
    }
}

impl Task for FiniteMemberTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        match self.matched {
            Some(true) => {
                meter.tick()?;
                if self.emitted {
                    return Ok(Poll::Halt);
                }
                self.emitted = true;
                return Ok(Poll::Emit(nat(0)));
            }
            Some(false) => {
                meter.tick()?;
                return Ok(Poll::Pending);
            }
            None => {}
        }
        if self.x.is_none() {
            if let Some(s) = self.head.poll(meter)? {
                self.x = Some(s);
            }
            return Ok(Poll::Pending);
        }
        match self.remaining {
            None => {
                if let Some(len) = self.list.poll_next(meter)? {
                    self.remaining = nat_to_u64(&len);
                    if self.remaining.is_none() {
                        self.matched = Some(false);
                    }
                }
                Ok(Poll::Pending)
            }
            Some(0) => {
                self.matched = Some(false);
                meter.tick()?;
                Ok(Poll::Pending)
            }
            Some(r) => {
                if let Some(e) = self.list.poll_next(meter)? {
                    self.remaining = Some(r - 1);
                    if Some(&e) == self.x.as_ref() {
                        self.matched = Some(true);
                    }
                }
                Ok(Poll::Pending)
            }
        }
    }
}

/// The β*-name of a point over the `{0,1}` base with an oracle-named member:
/// semi-decides `x ∈ β(b)` for base names `k^ω` and the characteristic
/// stream in the aux. Decides which kind `b` is by comparing against both
/// patterns; valid base names separate at finite depth.
struct TotPointMemberTask {
    n: u64,
    totbit: u64,
    aux: Name,
    b: Name,
    j: u64,
    b0: Option<Nat>,
    phase: TotPhase,
    verdict: Option<bool>,
    emitted: bool,
}

enum TotPhase {
    ReadB0(PosQuery),
    ReadB(PosQuery),
    ReadAux(PosQuery, Nat),
}

impl Task for TotPointMemberTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if let Some(v) = self.verdict {
            meter.tick()?;
            if v {
                if self.emitted {
                    return Ok(Poll::Halt);
                }
                self.emitted = true;
                return Ok(Poll::Emit(nat(0)));
            }
            return Ok(Poll::Pending);
        }
        match &mut self.phase {
            TotPhase::ReadB0(q) => {
                if let Some(s) = q.poll(meter)? {
                    self.b0 = Some(s);
                    self.j = 1;
                    self.phase = TotPhase::ReadB(PosQuery::new(self.b.clone(), 1));
                }
                Ok(Poll::Pending)
            }
            TotPhase::ReadB(q) => {
                if let Some(s) = q.poll(meter)? {
                    // got b(j); now read aux(j)
                    self.phase = TotPhase::ReadAux(PosQuery::new(self.aux.clone(), self.j), s);
                }
                Ok(Poll::Pending)
            }
            TotPhase::ReadAux(q, bj) => {
                if let Some(aj) = q.poll(meter)? {
                    let b0 = self.b0.clone().unwrap();
                    if *bj != b0 {
                        // non-constant: it is the characteristic name
                        self.verdict = Some(self.totbit == 1);
                    } else if aj != *bj {
                        // differs from the characteristic stream: constant k^ω
                        self.verdict = Some(b0 == nat(self.n));
                    } else {
                        self.j += 1;
                        self.phase = TotPhase::ReadB(PosQuery::new(self.b.clone(), self.j));
                    }
                }
                Ok(Poll::Pending)
            }
        }
    }
}

/// Convert a pause-convention enumeration into a countable tuple of index
/// names forming a formal neighborhood base (under reflexive/equality-style
/// strong inclusions every enumerated index is listed infinitely often).
struct EnumToTupleTask {
    cursor: Cursor,
    found: Vec<Nat>,
    assign: HashMap<u64, Nat>,
    out_pos: u64,
    read_turn: bool,
}

impl EnumToTupleTask {
    fn new(stream: Name) -> Self {
        EnumToTupleTask {
            cursor: Cursor::new(stream),
            found: Vec::new(),
            assign: HashMap::new(),
            out_pos: 0,
            read_turn: true,
        }
    }
}

impl Task for EnumToTupleTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        let read = self.read_turn;
        self.read_turn = !self.read_turn;
        if read {
            if let Some(s) = self.cursor.poll_next(meter)? {
                if s != nat(0) {
                    self.found.push(s - 1u32);
                }
            }
            return Ok(Poll::Pending);
        }
        // Emission turn: component k repeats a fixed enumerated value;
        // the schedule revisits every rank infinitely often.
        meter.tick()?;
        if self.found.is_empty() {
            return Ok(Poll::Pending);
        }
        let (k, _) = unpair(self.out_pos);
        let v = self
            .assign
            .entry(k)
            .or_insert_with(|| {
                let (r, _) = unpair(k);
                self.found[(r % self.found.len() as u64) as usize].clone()
            })
            .clone();
        self.out_pos += 1;
        Ok(Poll::Emit(v))
    }
}

/// Enumerate `k = 0, 1, 2, ...` and list those whose Δ-set contains the
/// configured union of two Δ-sets.
struct SupersetEnumTask {
    mask: u64,
    k: u64,
}

impl Task for SupersetEnumTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        meter.tick()?;
        let k = self.k;
        self.k = self.k.wrapping_add(1);
        if k & self.mask == self.mask {
            Ok(Poll::Emit(nat(k + 1)))
        } else {
            Ok(Poll::Emit(nat(0)))
        }
    }
}

// ---------------------------------------------------------------------------
// The Urysohn evaluator
// ---------------------------------------------------------------------------

/// Evaluates the dyadic-chain Urysohn function on a point, emitting a fast
/// Cauchy stream. The chain is a tuple indexed by `⟨level, k⟩` (k odd,
/// q = k/2^level) of pairs ⟨U_q pack, C_q-complement pack⟩ satisfying
/// `q < q' ⟹ U_q ⊆ C_q ⊆ U_{q'}`. A fired `U_q` probe bounds f(x) ≤ q, a
/// fired complement probe bounds f(x) ≥ q.
struct UrysohnEval {
    chain: Name,
    x: Name,
    lo: Dyadic,
    hi: Dyadic,
    probes: Vec<(Dyadic, bool, RunProbe)>, // (q, is_upper_bound_probe, probe)
    spawn_level: u32,
    spawn_k: u64,
    rr: usize,
    next_n: u32,
    broken: bool,
}

const URYSOHN_MAX_LEVEL: u32 = 48;

impl UrysohnEval {
    fn new(chain: Name, x: Name) -> Self {
        UrysohnEval {
            chain,
            x,
            lo: Dyadic::zero(),
            hi: Dyadic::one(),
            probes: Vec::new(),
            spawn_level: 1,
            spawn_k: 1,
            rr: 0,
            next_n: 0,
            broken: false,
        }
    }

    fn spawn_next(&mut self) {
        while self.spawn_level <= URYSOHN_MAX_LEVEL {
            if self.spawn_k >= 1u64 << self.spawn_level {
                self.spawn_level += 1;
                self.spawn_k = 1;
                continue;
            }
            let k = self.spawn_k;
            self.spawn_k += 2;
            let q = Dyadic::ratio(k as i64, self.spawn_level);
            if q < self.lo || q > self.hi {
                continue;
            }
            let idx = pair(self.spawn_level as u64, k);
            let entry = crate::names::project(&self.chain, idx);
            let u_pack = crate::names::project(&entry, 0);
            let c_pack = crate::names::project(&entry, 1);
            self.probes
                .push((q.clone(), true, probe_packed(&u_pack, &[self.x.clone()])));
            self.probes
                .push((q, false, probe_packed(&c_pack, &[self.x.clone()])));
            return;
        }
    }
}

impl Task for UrysohnEval {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if self.broken {
            meter.tick()?;
            return Ok(Poll::Pending);
        }
        // Emit whenever the window is tight enough for the next position.
        let width = self.hi.sub(&self.lo);
        let bound = if self.next_n == 0 {
            Dyadic::from_int(2)
        } else {
            Dyadic::pow2_neg(self.next_n - 1)
        };
        if width <= bound {
            meter.tick()?;
            let mid = self.lo.mid(&self.hi);
            self.next_n += 1;
            return Ok(Poll::Emit(mid.code()));
        }

        let slots = 1 + self.probes.len();
        if self.rr >= slots {
            self.rr = 0;
        }
        let slot = self.rr;
        self.rr += 1;
        if slot == 0 {
            meter.tick()?;
            self.spawn_next();
            return Ok(Poll::Pending);
        }
        let i = slot - 1;
        let (q, is_upper, probe) = &mut self.probes[i];
        if probe.poll_fire(meter)? {
            let q = q.clone();
            let upper = *is_upper;
            self.probes.remove(i);
            self.rr = self.rr.saturating_sub(1);
            if upper {
                if q < self.hi {
                    self.hi = q;
                }
            } else if q > self.lo {
                self.lo = q;
            }
            if self.lo > self.hi {
                // Contradictory chain data; stall rather than report wrong
                // values.
                self.broken = true;
                return Ok(Poll::Pending);
            }
            let lo = self.lo.clone();
            let hi = self.hi.clone();
            self.probes.retain(|(q, _, _)| q >= &lo && q <= &hi);
            self.rr = 0;
        }
        Ok(Poll::Pending)
    }
}

// ---------------------------------------------------------------------------
// Spawn table
// ---------------------------------------------------------------------------

/// Instantiate primitive `k` over inputs. Out-of-range indices diverge.
pub fn spawn_prim(k: u64, inputs: &[Name]) -> Box<dyn Task> {
    match k {
        DIVERGE => diverge_task(),
        ACCEPT => accept_task(),
        COPY0 => Box::new(CopyName::new(input(inputs, 0))),
        COPY1 => Box::new(CopyName::new(input(inputs, 1))),
        TAIL0 => Box::new(CopyName::from(input(inputs, 0), 1)),
        REPEAT => Box::new(CfgTask::new(
            inputs,
            |c| c.first().and_then(|k| nat_to_u64(k)).map(|k| 1 + k as usize),
            |c, _inputs| {
                let cycle: Vec<Nat> = c[1..].to_vec();
                if cycle.is_empty() {
                    return diverge_task();
                }
                Box::new(CopyName::new(Name::eventually_periodic(vec![], cycle)))
            },
        )),
        EMIT_EP => Box::new(CfgTask::new(
            inputs,
            |c| {
                let plen = nat_to_u64(c.first()?)? as usize;
                if c.len() < 1 + plen + 1 {
                    return None;
                }
                let clen = nat_to_u64(&c[1 + plen])? as usize;
                Some(1 + plen + 1 + clen)
            },
            |c, _| {
                let plen = nat_to_u64(&c[0]).unwrap() as usize;
                let prefix = c[1..1 + plen].to_vec();
                let cycle = c[2 + plen..].to_vec();
                if cycle.is_empty() {
                    return diverge_task();
                }
                Box::new(CopyName::new(Name::eventually_periodic(prefix, cycle)))
            },
        )),
        EVAL => Box::new(spawn_packed(&input(inputs, 0), &[input(inputs, 1)])),
        EVAL_SWAPPED => Box::new(spawn_packed(&input(inputs, 1), &[input(inputs, 0)])),
        CS_ACCEPT_ARG => Box::new(ScanAccept::new(input(inputs, 1), |s| *s != nat(0))),
        CS_ACCEPT_AUX => Box::new(ScanAccept::new(input(inputs, 0), |s| *s != nat(0))),
        TUPLE2 => Box::new(CopyName::new(Name::tuple_vec(vec![
            input(inputs, 0),
            input(inputs, 1),
        ]))),
        EVAL_COMPONENT => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let Some(i) = cfg_u64(&c[0]) else {
                return diverge_task();
            };
            let pack = crate::names::project(&input(&adv, 0), i);
            Box::new(spawn_packed(&pack, &adv[1..]))
        })),
        ZEROS => Box::new(CopyName::new(Name::zeros())),
        ACCEPT_IF_HEAD => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let k = c[0].clone();
            Box::new(HeadThen::new(input(&adv, 1), 0, move |h| {
                if h == k {
                    accept_task()
                } else {
                    diverge_task()
                }
            }))
        })),
        ACCEPT_IF_HEAD_IN_PAIR => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let lo = c[0].clone() * 2u32;
            let hi = lo.clone() + 1u32;
            Box::new(HeadThen::new(input(&adv, 1), 0, move |h| {
                if h == lo || h == hi {
                    accept_task()
                } else {
                    diverge_task()
                }
            }))
        })),
        ACCEPT_IF_CONTAINS => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let t = c[0].clone();
            Box::new(ScanAccept::new(input(&adv, 1), move |s| *s == t))
        })),
        ENUM_FROM_SIERP_NAT => {
            let pack = input(inputs, 1);
            let src = CounterSource::new(move |i| {
                Some(Box::new(spawn_packed(&pack, &[Name::constant(i)])) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::enumerate(|i, _| vec![nat(i + 1)]),
            ))
        }
        ENUM_MEMBER_NAT => {
            let p = input(inputs, 0);
            Box::new(HeadThen::new(input(inputs, 1), 0, move |i| {
                let target = i + 1u32;
                Box::new(ScanAccept::new(p, move |s| *s == target))
            }))
        }
        INTERSECT_LISTED => Box::new(CfgTask::new(
            inputs,
            |c| {
                if c.len() < 2 {
                    return None;
                }
                nat_to_u64(&c[1]).map(|k| 2 + k as usize)
            },
            |c, adv| {
                let e_mc = c[0].clone();
                let aux = input(&adv, 0);
                let x = input(&adv, 1);
                let probes = c[2..]
                    .iter()
                    .map(|u| {
                        let pack = Name::prepend(
                            vec![pa_code(&e_mc, std::slice::from_ref(u))],
                            aux.clone(),
                        );
                        probe_packed(&pack, &[x.clone()])
                    })
                    .collect();
                Box::new(AllOf::new(probes))
            },
        )),
        BETA_STAR_MEMBER => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let i = c[0].clone();
            Box::new(spawn_packed(
                &input(&adv, 1),
                &[Name::constant_nat(i)],
            ))
        })),
        UNION_LISTED => Box::new(CfgTask::new(
            inputs,
            |c| {
                if c.len() < 2 {
                    return None;
                }
                nat_to_u64(&c[1]).map(|k| 2 + k as usize)
            },
            |c, adv| {
                let e_mc = c[0].clone();
                let aux = input(&adv, 0);
                let x = input(&adv, 1);
                let indices: Vec<Nat> = c[2..].to_vec();
                let src = CounterSource::new(move |j| {
                    let u = indices.get(j as usize)?;
                    let pack = Name::prepend(
                        vec![pa_code(&e_mc, std::slice::from_ref(u))],
                        aux.clone(),
                    );
                    Some(Box::new(spawn_packed(&pack, &[x.clone()])) as Box<dyn Task>)
                });
                Box::new(DovetailEnum::new(
                    Box::new(src),
                    FireMode::commit(|_| accept_task()),
                ))
            },
        )),
        THETA_MEMBER => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let e_mc = c[0].clone();
            let pair_in = input(&adv, 0);
            let enum_stream = crate::names::project(&pair_in, 0);
            let aux = crate::names::project(&pair_in, 1);
            let x = input(&adv, 1);
            let src = EnumSource::new(enum_stream, move |m| {
                let probes = delta_set(m)
                    .into_iter()
                    .map(|j| {
                        let pack =
                            Name::prepend(vec![pa_code(&e_mc, &[nat(j)])], aux.clone());
                        probe_packed(&pack, &[x.clone()])
                    })
                    .collect();
                Some(Box::new(AllOf::new(probes)) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::commit(|_| accept_task()),
            ))
        })),
        LACOMBE_WORDS => {
            let pack = input(inputs, 1);
            let src = CounterSource::new(move |widx| {
                let w = super::word_decode(nat(widx));
                Some(Box::new(spawn_packed(
                    &pack,
                    &[Name::prepend(w, super::silent_name())],
                )) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::enumerate(|widx, _| {
                    let w = super::word_decode(nat(widx));
                    match word_delta_code(&w) {
                        Some(m) => vec![m + 1u32],
                        None => vec![],
                    }
                }),
            ))
        }
        CHOICE_FROM_DENSE => {
            let dense = input(inputs, 0);
            let pack = input(inputs, 1);
            let dense2 = dense.clone();
            let src = CounterSource::new(move |k| {
                Some(Box::new(spawn_packed(
                    &pack,
                    &[crate::names::project(&dense, k)],
                )) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::commit(move |k| {
                    Box::new(CopyName::new(crate::names::project(&dense2, k)))
                }),
            ))
        }
        ASPACE_OCSTAR => {
            let pack = input(inputs, 1);
            let src = CounterSource::new(move |k| {
                Some(Box::new(spawn_packed(&pack, &[Name::constant(k)])) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::commit(|k| Box::new(CopyName::new(Name::constant(k)))),
            ))
        }
        ASPACE_BACKWARD => {
            let pack = input(inputs, 1);
            let src = CounterSource::new(move |t| {
                let o_t = Name::prepend(
                    vec![encode(&MachineCode::partial_apply(
                        MachineCode::Prim(ACCEPT_IF_CONTAINS),
                        vec![nat(t)],
                    ))],
                    Name::zeros(),
                );
                Some(Box::new(spawn_packed(&pack, &[o_t])) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::enumerate_raw(|t, _| vec![nat(t)]),
            ))
        }
        OVERT_ENUM => {
            let pack = input(inputs, 1);
            let src = CounterSource::new(move |n| {
                let u_n = Name::prepend(
                    vec![encode(&MachineCode::partial_apply(
                        MachineCode::Prim(ACCEPT_IF_HEAD),
                        vec![nat(n)],
                    ))],
                    Name::zeros(),
                );
                Some(Box::new(spawn_packed(&pack, &[u_n])) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::enumerate(|n, _| vec![nat(n + 1)]),
            ))
        }
        OVC_NAT => {
            let a_enum = input(inputs, 1);
            let u_pack = input(inputs, 2);
            let src = EnumSource::new(a_enum, move |i| {
                Some(Box::new(spawn_packed(&u_pack, &[Name::constant(i)])) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::commit(|i| Box::new(CopyName::new(Name::constant(i)))),
            ))
        }
        LT_ONE => Box::new(LtOneTask::new(input(inputs, 1))),
        URYSOHN_EVAL => Box::new(UrysohnEval::new(input(inputs, 0), input(inputs, 1))),
        TUPLE_EVAL_FAMILY => {
            let fns = input(inputs, 0);
            let x = input(inputs, 1);
            Box::new(CopyName::new(Name::tupled(move |k| {
                Name::computed(
                    MachineCode::Prim(EVAL),
                    vec![crate::names::project(&fns, k), x.clone()],
                )
            })))
        }
        HILBERT_INV_ENUM => {
            let y = input(inputs, 1);
            let src = CounterSource::new(move |c| {
                let coord = crate::names::project(&y, c);
                Some(Box::new(LtOneTask::new(coord)) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::enumerate(|c, _| {
                    let (i, _) = unpair(c);
                    vec![nat(i + 1)]
                }),
            ))
        }
        NONEMPTY_ENUM => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let e_mc = c[0].clone();
            let pair_in = input(&adv, 0);
            let aux = crate::names::project(&pair_in, 0);
            let overt_x = crate::names::project(&pair_in, 1);
            let src = CounterSource::new(move |i| {
                let b_pack = Name::prepend(vec![pa_code(&e_mc, &[nat(i)])], aux.clone());
                Some(Box::new(spawn_packed(&overt_x, &[b_pack])) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::enumerate(|i, _| vec![nat(i + 1)]),
            ))
        })),
        SUPERSET_ENUM => Box::new(CfgTask::fixed(2, inputs, |c, _| {
            let (Some(i), Some(j)) = (cfg_u64(&c[0]), cfg_u64(&c[1])) else {
                return diverge_task();
            };
            Box::new(SupersetEnumTask {
                mask: i | j,
                k: 0,
            })
        })),
        ACCEPT_TOT_OPEN => Box::new(HeadThen::new(input(inputs, 1), 1, |b| {
            if b == nat(1) {
                accept_task()
            } else {
                diverge_task()
            }
        })),
        ACCEPT_TOT_COMPL => Box::new(HeadThen::new(input(inputs, 1), 1, |b| {
            if b == nat(0) {
                accept_task()
            } else {
                diverge_task()
            }
        })),
        TOT_PROBE => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let Some(i) = cfg_u64(&c[0]) else {
                return diverge_task();
            };
            Box::new(HeadThen::new(input(&adv, 1), 0, move |k| {
                let Some(cap) = nat_to_u64(&k) else {
                    return diverge_task();
                };
                let inner = spawn(&decode_cached(&nat(i)), &[Name::constant(i)]);
                Box::new(CappedProbe::new(inner, cap))
            }))
        })),
        PREFIX_MEMBER => Box::new(CfgTask::new(
            inputs,
            |c| {
                let l = nat_to_u64(c.first()?)? as usize;
                Some(1 + l)
            },
            |c, adv| {
                let prefix = c[1..].to_vec();
                prefix_member_task(prefix, input(&adv, 1))
            },
        )),
        FIBER_MEET => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let e_wit = c[0].clone();
            let pair_in = input(&adv, 0);
            let wit_aux = crate::names::project(&pair_in, 0);
            let x = crate::names::project(&pair_in, 1);
            let u_pack = input(&adv, 1);
            let src = CounterSource::new(move |widx| {
                let w = super::word_decode(nat(widx));
                let wcode = word_code(&w);
                let cyl_probe = probe_packed(
                    &u_pack,
                    &[Name::prepend(w, super::silent_name())],
                );
                let wit_pack =
                    Name::prepend(vec![pa_code(&e_wit, &[wcode])], wit_aux.clone());
                let open_probe = probe_packed(&wit_pack, &[x.clone()]);
                Some(Box::new(AllOf::new(vec![cyl_probe, open_probe])) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::commit(|_| accept_task()),
            ))
        })),
        FIBER_TO_OPEN => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let wcode = c[0].clone();
            let g_pack = input(&adv, 0);
            let x = input(&adv, 1);
            let fiber = Name::computed(MachineCode::Prim(EVAL), vec![g_pack, x]);
            let cyl = Name::prepend(
                vec![encode(&MachineCode::partial_apply(
                    MachineCode::Prim(CYL_ACCEPT),
                    vec![wcode],
                ))],
                Name::zeros(),
            );
            Box::new(spawn_packed(&fiber, &[cyl]))
        })),
        CYL_ACCEPT => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let w = super::word_decode(c[0].clone());
            Box::new(PrefixCheck::new(input(&adv, 1), w))
        })),
        EVAL2 => Box::new(spawn_packed(&input(inputs, 0), &[input(inputs, 2)])),
        NAT_SINGLETON_MEMBER => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let i = c[0].clone();
            Box::new(HeadThen::new(input(&adv, 1), 0, move |h| {
                if h == i {
                    accept_task()
                } else {
                    diverge_task()
                }
            }))
        })),
        FINITE_MEMBER => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let Some(i) = cfg_u64(&c[0]) else {
                return diverge_task();
            };
            let data = crate::names::project(&input(&adv, 0), i);
            Box::new(FiniteMemberTask::new(data, input(&adv, 1)))
        })),
        CYLINDER_MEMBER => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let w = super::word_decode(c[0].clone());
            Box::new(PrefixCheck::new(input(&adv, 1), w))
        })),
        INTERVAL_MEMBER => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let Some((p, q)) = interval_from_index(&c[0]) else {
                return diverge_task();
            };
            Box::new(IntervalMemberTask {
                cursor: Cursor::new(input(&adv, 1)),
                n: 0,
                p,
                q,
                done: false,
            })
        })),
        HEAD_FN => Box::new(HeadThen::new(input(inputs, 0), 0, |v| {
            Box::new(ConstOutputTask::new(vec![v], Box::new(HaltTask)))
        })),
        SQUARE_FN => Box::new(HeadThen::new(input(inputs, 0), 0, |v| {
            Box::new(ConstOutputTask::new(
                vec![v.clone() * v],
                Box::new(HaltTask),
            ))
        })),
        RACE_SEPARATE_MEMBER => Box::new(CfgTask::fixed(2, inputs, |c, adv| {
            let canon = c[0] == nat(1);
            let want_b_first = c[1] == nat(0);
            let pair_in = input(&adv, 0);
            let ac = crate::names::project(&pair_in, 0);
            let bc = crate::names::project(&pair_in, 1);
            let x = input(&adv, 1);
            if canon {
                Box::new(HeadThen::new(x, 0, move |h| {
                    let cx = Name::constant_nat(h);
                    Box::new(RaceMember::new(
                        Box::new(spawn_packed(&ac, &[cx.clone()])),
                        Box::new(spawn_packed(&bc, &[cx])),
                        want_b_first,
                    ))
                }))
            } else {
                Box::new(RaceMember::new(
                    Box::new(spawn_packed(&ac, &[x.clone()])),
                    Box::new(spawn_packed(&bc, &[x])),
                    want_b_first,
                ))
            }
        })),
        RACE_SEPARATE_EMIT => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let canon = c[0].clone();
            let a = input(&adv, 1);
            let b = input(&adv, 2);
            let oracles = Name::tuple_vec(vec![a, b]);
            let side_pack = |side: u64| {
                Name::prepend(
                    vec![encode(&MachineCode::partial_apply(
                        MachineCode::Prim(RACE_SEPARATE_MEMBER),
                        vec![canon.clone(), nat(side)],
                    ))],
                    oracles.clone(),
                )
            };
            Box::new(CopyName::new(Name::tuple_vec(vec![
                side_pack(0),
                side_pack(1),
            ])))
        })),
        STRONG_NORMALITY_MEMBER => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let Some(side) = cfg_u64(&c[0]) else {
                return diverge_task();
            };
            let pair_in = input(&adv, 0);
            let active = crate::names::project(&pair_in, side.min(1));
            let guard = crate::names::project(&pair_in, 1 - side.min(1));
            let x = input(&adv, 1);
            let src = CounterSource::new(move |n| {
                let mut probes = Vec::new();
                let entry = crate::names::project(&active, n);
                probes.push(probe_packed(
                    &crate::names::project(&entry, 0),
                    &[x.clone()],
                ));
                for m in 0..=n {
                    let g = crate::names::project(&guard, m);
                    probes.push(probe_packed(
                        &crate::names::project(&g, 1),
                        &[x.clone()],
                    ));
                }
                Some(Box::new(AllOf::new(probes)) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::commit(|_| accept_task()),
            ))
        })),
        ARENS_POINT_MEMBER => Box::new(CfgTask::fixed(3, inputs, |c, adv| {
            let (Some(ptag), Some(a), Some(b)) =
                (cfg_u64(&c[0]), cfg_u64(&c[1]), cfg_u64(&c[2]))
            else {
                return diverge_task();
            };
            Box::new(HeadThen::new(input(&adv, 1), 0, move |idx| {
                arens_membership(ptag, a, b, &idx)
            }))
        })),
        TOT_POINT_MEMBER => Box::new(CfgTask::fixed(2, inputs, |c, adv| {
            let (Some(n), Some(totbit)) = (cfg_u64(&c[0]), cfg_u64(&c[1])) else {
                return diverge_task();
            };
            let aux = input(&adv, 0);
            let b = input(&adv, 1);
            Box::new(TotPointMemberTask {
                n,
                totbit,
                aux,
                b: b.clone(),
                j: 0,
                b0: None,
                phase: TotPhase::ReadB0(PosQuery::new(b, 0)),
                verdict: None,
                emitted: false,
            })
        })),
        PRUNE_CONVERT => {
            let pair_in = input(inputs, 0);
            let prune_enum = crate::names::project(&pair_in, 0);
            let old_enum = crate::names::project(&pair_in, 1);
            let src = EnumSource::new(old_enum, move |i| {
                Some(Box::new(ScanRank::new(prune_enum.clone(), i)) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::enumerate(|_, rank| vec![rank + 1u32]),
            ))
        }
        ENUM_TO_TUPLE => Box::new(EnumToTupleTask::new(input(inputs, 0))),
        DYADIC_PREC => {
            let lhs = input(inputs, 1);
            let rhs = input(inputs, 2);
            Box::new(HeadThen::new(lhs, 0, move |l| {
                Box::new(HeadThen::new(rhs, 0, move |r| {
                    match (interval_from_index(&l), interval_from_index(&r)) {
                        (Some((p1, q1)), Some((p2, q2))) if p1 > p2 && q1 < q2 => accept_task(),
                        _ => diverge_task(),
                    }
                }))
            }))
        }
        EQ_PREC => {
            let lhs = input(inputs, 1);
            let rhs = input(inputs, 2);
            Box::new(HeadThen::new(lhs, 0, move |l| {
                Box::new(HeadThen::new(rhs, 0, move |r| {
                    if l == r {
                        accept_task()
                    } else {
                        diverge_task()
                    }
                }))
            }))
        }
        TUPLE_LISTED_PREC => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let e_inc = c[0].clone();
            let pair_in = input(&adv, 0);
            let x_tuple = crate::names::project(&pair_in, 0);
            let inc_aux = crate::names::project(&pair_in, 1);
            let b1 = input(&adv, 1);
            let inc_code = decode_cached(&e_inc);
            let src = CounterSource::new(move |k| {
                let listed = crate::names::project(&x_tuple, k);
                Some(spawn(
                    &inc_code,
                    &[inc_aux.clone(), listed, b1.clone()],
                ))
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::commit(|_| accept_task()),
            ))
        })),
        TABLE_FN => Box::new(CfgTask::new(
            inputs,
            |c| {
                let n = nat_to_u64(c.first()?)? as usize;
                Some(1 + n)
            },
            |c, adv| {
                let table: Vec<Nat> = c[1..].to_vec();
                Box::new(HeadThen::new(input(&adv, 1), 0, move |v| {
                    match nat_to_u64(&v).and_then(|v| table.get(v as usize)) {
                        Some(t) => Box::new(ConstOutputTask::new(
                            vec![t.clone()],
                            Box::new(CopyName::new(Name::zeros())),
                        )),
                        None => diverge_task(),
                    }
                }))
            },
        )),
        NX_BASIC_ENUM => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            let e_mc = c[0].clone();
            let aux = input(&adv, 0);
            let src_pack = input(&adv, 1);
            let src = CounterSource::new(move |i| {
                let b_pack = Name::prepend(vec![pa_code(&e_mc, &[nat(i)])], aux.clone());
                Some(Box::new(spawn_packed(&src_pack, &[b_pack])) as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::enumerate(|i, _| vec![nat(i + 1)]),
            ))
        })),
        INJ_NX => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            // The curried x ↦ N_x^𝔅 ∈ O(𝔅): semi-decides x ∈ i(b) from a
            // basic index name b.
            let e_mc = c[0].clone();
            let pair_in = input(&adv, 0);
            let fam_aux = crate::names::project(&pair_in, 0);
            let x = crate::names::project(&pair_in, 1);
            Box::new(HeadThen::new(input(&adv, 1), 0, move |i| {
                let mc = decode_cached(&pa_code(&e_mc, std::slice::from_ref(&i)));
                spawn(&mc, &[fam_aux, x])
            }))
        })),
        OVERT_UNION_FAM => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            // Overt union over a numbered base: apply the overt set's
            // machine to the open N_x^𝔅 built by INJ_NX.
            let e_mc = c[0].clone();
            let pair_in = input(&adv, 0);
            let a_pack = crate::names::project(&pair_in, 0);
            let fam_aux = crate::names::project(&pair_in, 1);
            let x = input(&adv, 1);
            let nx_pack = Name::prepend(
                vec![encode(&MachineCode::partial_apply(
                    MachineCode::Prim(INJ_NX),
                    vec![e_mc],
                ))],
                Name::tuple_vec(vec![fam_aux, x]),
            );
            Box::new(spawn_packed(&a_pack, &[nx_pack]))
        })),
        HEAD_OPEN_WITNESS => Box::new(CfgTask::fixed(2, inputs, |c, adv| {
            // ρ(wℕ^ℕ) for head-valued representations: X when w is empty,
            // {w₀} when the head is a valid point, ∅ otherwise. Config is
            // [bound, wcode] so the bound can be baked first.
            let Some(bound) = cfg_u64(&c[0]) else {
                return diverge_task();
            };
            let w = super::word_decode(c[1].clone());
            match w.first() {
                None => accept_task(),
                Some(h) => {
                    let valid = match nat_to_u64(h) {
                        Some(v) => bound == 0 || v < bound,
                        None => false,
                    };
                    if !valid {
                        return diverge_task();
                    }
                    let h = h.clone();
                    Box::new(HeadThen::new(input(&adv, 1), 0, move |x0| {
                        if x0 == h {
                            accept_task()
                        } else {
                            diverge_task()
                        }
                    }))
                }
            }
        })),
        COMPACT_FIN => Box::new(CfgTask::new(
            inputs,
            |c| {
                let k = nat_to_u64(c.first()?)? as usize;
                Some(1 + k)
            },
            |c, adv| {
                let o_pack = input(&adv, 1);
                let probes = c[1..]
                    .iter()
                    .map(|e| probe_packed(&o_pack, &[Name::constant_nat(e.clone())]))
                    .collect();
                Box::new(AllOf::new(probes))
            },
        )),
        INDUCED_MEMBER => Box::new(CfgTask::fixed(2, inputs, |c, adv| {
            // Membership in B̃_m = ⋂_{j∈Δ_m} B_j.
            let e_mc = c[0].clone();
            let Some(m) = cfg_u64(&c[1]) else {
                return diverge_task();
            };
            let aux = input(&adv, 0);
            let x = input(&adv, 1);
            let probes = delta_set(m)
                .into_iter()
                .map(|j| {
                    let pack = Name::prepend(vec![pa_code(&e_mc, &[nat(j)])], aux.clone());
                    probe_packed(&pack, &[x.clone()])
                })
                .collect();
            Box::new(AllOf::new(probes))
        })),
        INDUCED_PREC => Box::new(CfgTask::fixed(1, inputs, |c, adv| {
            // ⟨u⟩ ≺ ⟨v⟩ iff every v-component is refined by some u-component.
            let e_inc = c[0].clone();
            let inc_aux = input(&adv, 0);
            let lhs = input(&adv, 1);
            let rhs = input(&adv, 2);
            let inc_code = decode_cached(&e_inc);
            Box::new(HeadThen::new(lhs, 0, move |m1| {
                Box::new(HeadThen::new(rhs, 0, move |m2| {
                    let (Some(m1), Some(m2)) = (nat_to_u64(&m1), nat_to_u64(&m2)) else {
                        return diverge_task();
                    };
                    let js = delta_set(m1);
                    let probes = delta_set(m2)
                        .into_iter()
                        .map(|i| {
                            let js = js.clone();
                            let inc_code = inc_code.clone();
                            let inc_aux = inc_aux.clone();
                            let src = CounterSource::new(move |t| {
                                let j = *js.get(t as usize)?;
                                Some(spawn(
                                    &inc_code,
                                    &[
                                        inc_aux.clone(),
                                        Name::constant(j),
                                        Name::constant(i),
                                    ],
                                ))
                            });
                            RunProbe::new(Box::new(DovetailEnum::new(
                                Box::new(src),
                                FireMode::commit(|_| accept_task()),
                            )))
                        })
                        .collect();
                    Box::new(AllOf::new(probes))
                }))
            }))
        })),
        NOGINA_FROM_ENUM => {
            // Run the open's machine on growing truncations of the point's
            // name; a halting run determines finitely many listed indices
            // whose intersection is the witness. Emits its Δ-index.
            let x = input(inputs, 1);
            let o_pack = input(inputs, 2);
            let src = CounterSource::new(move |l| {
                Some(Box::new(TruncationProbe::new(x.clone(), o_pack.clone(), l))
                    as Box<dyn Task>)
            });
            Box::new(DovetailEnum::new(
                Box::new(src),
                FireMode::enumerate_raw(|_, sym| vec![sym]),
            ))
        }
        MAP_POW2_ENUM => {
            // Pause-convention map n ↦ 2^n (singleton indices to Δ-codes).
            let src = input(inputs, 0);
            Box::new(MapEnumTask {
                cursor: Cursor::new(src),
                map: Box::new(|v| nat(1) << v),
            })
        }
        PREC_MEMBER => Box::new(CfgTask::new(
            inputs,
            |_| Some(2), // [e_inc, i]
            |c, adv| {
                // Family membership over β^≺ names: x ∈ B_i iff some listed
                // index strongly refines i.
                let e_inc = c[0].clone();
                let i = c[1].clone();
                let inc_aux = input(&adv, 0);
                let x_tuple = input(&adv, 1);
                let inc_code = decode_cached(&e_inc);
                let src = CounterSource::new(move |k| {
                    let listed = crate::names::project(&x_tuple, k);
                    Some(spawn(
                        &inc_code,
                        &[inc_aux.clone(), listed, Name::constant_nat(i.clone())],
                    ))
                });
                Box::new(DovetailEnum::new(
                    Box::new(src),
                    FireMode::commit(|_| accept_task()),
                ))
            },
        )),
        _ => diverge_task(),
    }
}

/// Read a finite truncation of a point name, then probe the open's machine
/// on it; fire with the Δ-code of the determined intersection.
struct TruncationProbe {
    cursor: Cursor,
    collected: Vec<Nat>,
    want: u64,
    o_pack: Name,
    probe: Option<RunProbe>,
    done: bool,
}

impl TruncationProbe {
    fn new(x: Name, o_pack: Name, l: u64) -> Self {
        TruncationProbe {
            cursor: Cursor::new(x),
            collected: Vec::new(),
            want: l,
            o_pack,
            probe: None,
            done: false,
        }
    }
}

impl Task for TruncationProbe {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if self.done {
            meter.tick()?;
            return Ok(Poll::Halt);
        }
        if let Some(p) = self.probe.as_mut() {
            if p.poll_fire(meter)? {
                self.done = true;
                return match word_delta_code(&self.collected) {
                    Some(m) => Ok(Poll::Emit(m)),
                    None => Ok(Poll::Halt),
                };
            }
            return Ok(Poll::Pending);
        }
        if (self.collected.len() as u64) < self.want {
            if let Some(s) = self.cursor.poll_next(meter)? {
                self.collected.push(s);
            }
            return Ok(Poll::Pending);
        }
        let truncated = Name::prepend(self.collected.clone(), super::silent_name());
        self.probe = Some(probe_packed(&self.o_pack, &[truncated]));
        meter.tick()?;
        Ok(Poll::Pending)
    }
}

/// Symbol-wise map of a pause-convention enumeration.
struct MapEnumTask {
    cursor: Cursor,
    map: Box<dyn FnMut(u64) -> Nat + Send>,
}

impl Task for MapEnumTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        match self.cursor.poll_next(meter)? {
            None => Ok(Poll::Pending),
            Some(s) => {
                if s == nat(0) {
                    return Ok(Poll::Emit(nat(0)));
                }
                match nat_to_u64(&(s - 1u32)) {
                    Some(v) => Ok(Poll::Emit((self.map)(v) + 1u32)),
                    None => Ok(Poll::Emit(nat(0))),
                }
            }
        }
    }
}

/// Membership of an Arens–Fort point in the indexed basic set. Point tags:
/// 0 = (a,b) ∈ ℕ², 1 = (∞,b), 2 = (∞,∞). Index coding: ⟨1,⟨n,m⟩⟩ singleton,
/// ⟨2,⟨n,m⟩⟩ = D_{n,m}, ⟨3,⟨m,i⟩⟩ = E_{m,f_i} with f_i the registry
/// enumeration.
fn arens_membership(ptag: u64, a: u64, b: u64, idx: &Nat) -> Box<dyn Task> {
    let (tag, payload) = crate::names::unpair_nat(idx);
    let (Some(tag), (x, y)) = (tag.to_u64(), crate::names::unpair_nat(&payload)) else {
        return diverge_task();
    };
    let (Some(x), Some(y)) = (x.to_u64(), y.to_u64()) else {
        return diverge_task();
    };
    match (tag, ptag) {
        (1, 0) if a == x && b == y => accept_task(),
        (2, 0) if b == y && a >= x => accept_task(),
        (2, 1) if b == y => accept_task(),
        (3, 0) => {
            // (a,b) ∈ E_{m0,f} iff b ≥ m0 and a ≥ f(b).
            let (m0, i) = (x, y);
            if b < m0 {
                return diverge_task();
            }
            let inner = spawn(&decode_cached(&nat(i)), &[Name::constant(b)]);
            Box::new(FirstEmitThen::new(inner, move |v| match v {
                Some(v) if nat(a) >= v => accept_task(),
                _ => diverge_task(),
            }))
        }
        (3, 1) if b >= x => accept_task(),
        (3, 2) => accept_task(),
        _ => diverge_task(),
    }
}

/// Δ-index of the finite intersection determined by a tuple prefix: the
/// determined components are those `i` with `pair(i,0) < |w|`; their listed
/// indices are the bits.
pub fn word_delta_code(w: &[Nat]) -> Option<Nat> {
    let mut m = nat(0);
    let len = w.len() as u64;
    let mut i = 0u64;
    loop {
        let Some(p) = crate::names::pair_checked(i, 0) else {
            break;
        };
        if p >= len {
            break;
        }
        let v = nat_to_u64(&w[p as usize])?;
        if v >= 4096 {
            return None;
        }
        m |= nat(1) << v;
        i += 1;
    }
    Some(m)
}

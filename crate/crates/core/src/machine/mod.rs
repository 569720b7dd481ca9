//! The combinator language of monotone stream transducers, its numbering,
//! and the fuel-bounded universal interpreter.
//!
//! A machine term denotes a transducer from input names to an output stream.
//! Evaluation is deterministic; fuel only decides where the observation is
//! cut off, so outputs are monotone in fuel and halting is persistent.
//!
//! Fuel accounting: one step per leaf micro-op (input query, emitted symbol,
//! primitive transition). `Compose` charges both parts, since queries to the
//! inner machine's output run that machine under the same meter. `Dovetail`
//! alternates strictly.

pub mod generator;
pub mod prims;
pub mod task;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::ToPrimitive;

pub use task::{Poll, Task};

use crate::names::{nat, nat_to_u64, pair_nat, unpair_nat, Fuel, FuelMeter, Name, Nat, Word};

/// A serializable combinator term denoting a monotone stream transducer;
/// "code of a Type 2 machine" made concrete.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MachineCode {
    /// Index into the fixed registry of built-in transducers. Out-of-range
    /// indices run as the canonical diverger.
    Prim(u64),
    /// `Compose(f, g)`: run `f` with the output stream of `g` prepended to
    /// the input list (the originals stay visible at shifted positions).
    Compose(Box<MachineCode>, Box<MachineCode>),
    /// Zip outputs of two machines: even positions left, odd right.
    Interleave(Box<MachineCode>, Box<MachineCode>),
    /// The smn constructor: feed a finite word in front of input 0.
    PartialApply(Box<MachineCode>, Word),
    /// Fair race; halts iff either part halts.
    Dovetail(Box<MachineCode>, Box<MachineCode>),
    /// Uniform tupling: output position `⟨i,j⟩` is position `j` of
    /// `PartialApply(f, [i])`. The rule field is reserved; only rule 0 is
    /// live, other values diverge.
    TupleApply(Box<MachineCode>, u64),
    /// Emit a fixed word, then continue as the inner machine.
    ConstOutput(Word, Box<MachineCode>),
}

impl MachineCode {
    pub fn compose(f: MachineCode, g: MachineCode) -> MachineCode {
        MachineCode::Compose(Box::new(f), Box::new(g))
    }

    pub fn interleave(f: MachineCode, g: MachineCode) -> MachineCode {
        MachineCode::Interleave(Box::new(f), Box::new(g))
    }

    pub fn partial_apply(f: MachineCode, fed: Word) -> MachineCode {
        MachineCode::PartialApply(Box::new(f), fed)
    }

    pub fn dovetail(f: MachineCode, g: MachineCode) -> MachineCode {
        MachineCode::Dovetail(Box::new(f), Box::new(g))
    }

    pub fn tuple_apply(f: MachineCode) -> MachineCode {
        MachineCode::TupleApply(Box::new(f), 0)
    }

    pub fn const_output(w: Word, then: MachineCode) -> MachineCode {
        MachineCode::ConstOutput(w, Box::new(then))
    }
}

// ---------------------------------------------------------------------------
// Numbering
// ---------------------------------------------------------------------------

/// Word numbering: `[] ↦ 0`, `a:rest ↦ ⟨a, code(rest)⟩ + 1`.
pub fn word_code(w: &[Nat]) -> Nat {
    match w.split_first() {
        None => nat(0),
        Some((a, rest)) => pair_nat(a, &word_code(rest)) + 1u32,
    }
}

pub fn word_decode(mut n: Nat) -> Word {
    let mut out = Vec::new();
    while n != nat(0) {
        let (a, rest) = unpair_nat(&(n - 1u32));
        out.push(a);
        n = rest;
    }
    out
}

/// Term-tree numbering: constructor tag paired with child codes via Cantor
/// pairing, left-nested: `encode(t) = ⟨tag, payload⟩` with
///
/// - `Prim(k)            ↦ ⟨0, k⟩`
/// - `Compose(f,g)       ↦ ⟨1, ⟨encode f, encode g⟩⟩`
/// - `Interleave(f,g)    ↦ ⟨2, ⟨encode f, encode g⟩⟩`
/// - `PartialApply(f,w)  ↦ ⟨3, ⟨encode f, word_code w⟩⟩`
/// - `Dovetail(f,g)      ↦ ⟨4, ⟨encode f, encode g⟩⟩`
/// - `TupleApply(f,r)    ↦ ⟨5, ⟨encode f, r⟩⟩`
/// - `ConstOutput(w,t)   ↦ ⟨6, ⟨word_code w, encode t⟩⟩`
///
/// Tags ≥ 7 are outside the image and decode to the canonical diverger.
pub fn encode(code: &MachineCode) -> Nat {
    match code {
        MachineCode::Prim(k) => pair_nat(&nat(0), &nat(*k)),
        MachineCode::Compose(f, g) => pair_nat(&nat(1), &pair_nat(&encode(f), &encode(g))),
        MachineCode::Interleave(f, g) => pair_nat(&nat(2), &pair_nat(&encode(f), &encode(g))),
        MachineCode::PartialApply(f, w) => {
            pair_nat(&nat(3), &pair_nat(&encode(f), &word_code(w)))
        }
        MachineCode::Dovetail(f, g) => pair_nat(&nat(4), &pair_nat(&encode(f), &encode(g))),
        MachineCode::TupleApply(f, r) => pair_nat(&nat(5), &pair_nat(&encode(f), &nat(*r))),
        MachineCode::ConstOutput(w, t) => {
            pair_nat(&nat(6), &pair_nat(&word_code(w), &encode(t)))
        }
    }
}

/// Total: every natural decodes to some machine.
pub fn decode(n: &Nat) -> MachineCode {
    let (tag, payload) = unpair_nat(n);
    match tag.to_u64() {
        Some(0) => MachineCode::Prim(payload.to_u64().unwrap_or(u64::MAX)),
        Some(1) => {
            let (f, g) = unpair_nat(&payload);
            MachineCode::compose(decode(&f), decode(&g))
        }
        Some(2) => {
            let (f, g) = unpair_nat(&payload);
            MachineCode::interleave(decode(&f), decode(&g))
        }
        Some(3) => {
            let (f, w) = unpair_nat(&payload);
            MachineCode::partial_apply(decode(&f), word_decode(w))
        }
        Some(4) => {
            let (f, g) = unpair_nat(&payload);
            MachineCode::dovetail(decode(&f), decode(&g))
        }
        Some(5) => {
            let (f, r) = unpair_nat(&payload);
            MachineCode::TupleApply(Box::new(decode(&f)), r.to_u64().unwrap_or(u64::MAX))
        }
        Some(6) => {
            let (w, t) = unpair_nat(&payload);
            MachineCode::const_output(word_decode(w), decode(&t))
        }
        _ => codes::diverge(),
    }
}

/// `encode(PartialApply(decode(e), w))` computed directly on codes, without
/// decoding: `⟨3, ⟨e, word_code(w)⟩⟩`.
pub fn pa_code(e: &Nat, w: &[Nat]) -> Nat {
    pair_nat(&nat(3), &pair_nat(e, &word_code(w)))
}

/// Decode with memoization; packed names carry codes as single symbols and
/// the same code gets decoded at every application.
pub fn decode_cached(n: &Nat) -> MachineCode {
    static CACHE: OnceLock<Mutex<HashMap<Nat, MachineCode>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(n) {
        return c.clone();
    }
    let c = decode(n);
    cache.lock().unwrap().insert(n.clone(), c.clone());
    c
}

// ---------------------------------------------------------------------------
// Interpreter
// ---------------------------------------------------------------------------

/// Instantiate a term over concrete inputs as a pollable task.
pub fn spawn(code: &MachineCode, inputs: &[Name]) -> Box<dyn Task> {
    match code {
        MachineCode::Prim(k) => prims::spawn_prim(*k, inputs),
        MachineCode::Compose(f, g) => {
            let mut new_inputs = Vec::with_capacity(inputs.len() + 1);
            new_inputs.push(Name::computed((**g).clone(), inputs.to_vec()));
            new_inputs.extend_from_slice(inputs);
            spawn(f, &new_inputs)
        }
        MachineCode::Interleave(f, g) => Box::new(task::InterleaveTask::new(
            spawn(f, inputs),
            spawn(g, inputs),
        )),
        MachineCode::PartialApply(f, w) => {
            let first = inputs.first().cloned().unwrap_or_else(silent_name);
            let mut new_inputs = Vec::with_capacity(inputs.len().max(1));
            new_inputs.push(Name::prepend(w.clone(), first));
            new_inputs.extend_from_slice(inputs.get(1..).unwrap_or(&[]));
            spawn(f, &new_inputs)
        }
        MachineCode::Dovetail(f, g) => Box::new(task::DovetailTask::new(
            spawn(f, inputs),
            spawn(g, inputs),
        )),
        MachineCode::TupleApply(f, rule) => {
            if *rule != 0 {
                return Box::new(task::DivergeTask);
            }
            let f = (**f).clone();
            let inputs = inputs.to_vec();
            Box::new(task::CopyName::new(Name::tupled(move |i| {
                Name::computed(
                    MachineCode::partial_apply(f.clone(), vec![nat(i)]),
                    inputs.clone(),
                )
            })))
        }
        MachineCode::ConstOutput(w, then) => {
            Box::new(task::ConstOutputTask::new(w.clone(), spawn(then, inputs)))
        }
    }
}

/// A name with no information at any position: the missing-input convention.
pub fn silent_name() -> Name {
    Name::computed(codes::diverge(), vec![])
}

/// Output prefix produced within fuel. Monotone in fuel.
pub fn run(code: &MachineCode, inputs: &[Name], fuel: Fuel) -> Word {
    let meter = FuelMeter::new(fuel);
    let mut task = spawn(code, inputs);
    let mut out = Vec::new();
    loop {
        match task.poll(&meter) {
            Err(_) => break,
            Ok(Poll::Emit(s)) => out.push(s),
            Ok(Poll::Halt) => break,
            Ok(Poll::Pending) => {}
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Halts {
    Yes,
    Unknown,
}

/// Did the machine produce its first output symbol within fuel? `Yes` is
/// upward closed in fuel.
pub fn halts(code: &MachineCode, inputs: &[Name], fuel: Fuel) -> Halts {
    let meter = FuelMeter::new(fuel);
    let mut task = spawn(code, inputs);
    loop {
        match task.poll(&meter) {
            Err(_) => return Halts::Unknown,
            Ok(Poll::Emit(_)) => return Halts::Yes,
            Ok(Poll::Halt) => return Halts::Unknown,
            Ok(Poll::Pending) => {}
        }
    }
}

// ---------------------------------------------------------------------------
// smn / currying
// ---------------------------------------------------------------------------

/// The smn construction: bake a finite word in front of the first input.
/// `run(smn(c, w), [u] ++ rest)` behaves as `run(c, [w⌢u] ++ rest)`.
pub fn smn(code: &MachineCode, fed: Word) -> MachineCode {
    MachineCode::partial_apply(code.clone(), fed)
}

/// Turn a two-input machine into a one-input machine producing packed
/// function names: `curry(c)` on `[u]` emits `encode(c)` then copies `u`,
/// i.e. the pair ⟨code, oracle⟩ with the live input as the oracle.
pub fn curry(code: &MachineCode) -> MachineCode {
    MachineCode::const_output(vec![encode(code)], MachineCode::Prim(prims::COPY0))
}

/// Inverse direction: `uncurry(c)` on `[u, v]` applies the packed name
/// produced by `c` on `[u]` to the argument `v`.
pub fn uncurry(code: &MachineCode) -> MachineCode {
    MachineCode::compose(MachineCode::Prim(prims::EVAL2), code.clone())
}

// ---------------------------------------------------------------------------
// Realizers and packed names
// ---------------------------------------------------------------------------

/// A machine together with the oracle it needs: the explicit model of every
/// Sierpiński-style name in the crate. The machine runs on `[aux, args...]`.
#[derive(Clone, Debug)]
pub struct Realizer {
    pub code: MachineCode,
    pub aux: Name,
}

impl Realizer {
    pub fn new(code: MachineCode, aux: Name) -> Self {
        Realizer { code, aux }
    }

    /// A realizer with no oracle data.
    pub fn closed(code: MachineCode) -> Self {
        Realizer {
            code,
            aux: Name::zeros(),
        }
    }

    /// Serialize as a single name: position 0 is the code, the tail is the
    /// oracle.
    pub fn pack(&self) -> Name {
        Name::prepend(vec![encode(&self.code)], self.aux.clone())
    }

    /// The (lazy) output name of this realizer applied to arguments.
    pub fn apply(&self, args: &[Name]) -> Name {
        let mut inputs = Vec::with_capacity(args.len() + 1);
        inputs.push(self.aux.clone());
        inputs.extend_from_slice(args);
        Name::computed(self.code.clone(), inputs)
    }

    pub fn run(&self, args: &[Name], fuel: Fuel) -> Word {
        let mut inputs = Vec::with_capacity(args.len() + 1);
        inputs.push(self.aux.clone());
        inputs.extend_from_slice(args);
        run(&self.code, &inputs, fuel)
    }

    pub fn halts(&self, args: &[Name], fuel: Fuel) -> Halts {
        let mut inputs = Vec::with_capacity(args.len() + 1);
        inputs.push(self.aux.clone());
        inputs.extend_from_slice(args);
        halts(&self.code, &inputs, fuel)
    }
}

/// Run the machine encoded in a packed name on arguments (host-side view of
/// name application).
pub fn run_packed(pack: &Name, args: &[Name], fuel: Fuel) -> Word {
    let meter = FuelMeter::new(fuel);
    let mut task = spawn_packed(pack, args);
    let mut out = Vec::new();
    loop {
        match task.poll(&meter) {
            Err(_) => break,
            Ok(Poll::Emit(s)) => out.push(s),
            Ok(Poll::Halt) => break,
            Ok(Poll::Pending) => {}
        }
    }
    out
}

/// Does the packed name's machine halt on the arguments within fuel?
pub fn halts_packed(pack: &Name, args: &[Name], fuel: Fuel) -> Halts {
    let meter = FuelMeter::new(fuel);
    let mut task = spawn_packed(pack, args);
    loop {
        match task.poll(&meter) {
            Err(_) => return Halts::Unknown,
            Ok(Poll::Emit(_)) => return Halts::Yes,
            Ok(Poll::Halt) => return Halts::Unknown,
            Ok(Poll::Pending) => {}
        }
    }
}

/// Spawn the machine encoded at position 0 of a packed name, applied to
/// `args`, with the pack's tail as input 0. Used pervasively by prims.
pub(crate) fn spawn_packed(pack: &Name, args: &[Name]) -> PackedSpawn {
    PackedSpawn {
        head: task::PosQuery::new(pack.clone(), 0),
        pack: pack.clone(),
        args: args.to_vec(),
        inner: None,
    }
}

/// Cooperative "read the code symbol, then delegate" task.
pub(crate) struct PackedSpawn {
    head: task::PosQuery,
    pack: Name,
    args: Vec<Name>,
    inner: Option<Box<dyn Task>>,
}

impl Task for PackedSpawn {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, crate::names::OutOfFuel> {
        if let Some(t) = self.inner.as_mut() {
            return t.poll(meter);
        }
        match self.head.poll(meter)? {
            None => Ok(Poll::Pending),
            Some(code_sym) => {
                let code = decode_cached(&code_sym);
                let mut inputs = Vec::with_capacity(self.args.len() + 1);
                inputs.push(self.pack.suffix(1));
                inputs.extend_from_slice(&self.args);
                self.inner = Some(spawn(&code, &inputs));
                Ok(Poll::Pending)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// c.e. set codes
// ---------------------------------------------------------------------------

/// A c.e. subset of ℕ given by an enumerator term run with no inputs: the
/// denoted set is `{n : n+1 appears in the output}` (pause convention).
#[derive(Clone, Debug)]
pub struct CeSetCode {
    pub enumerator: MachineCode,
}

impl CeSetCode {
    pub fn new(enumerator: MachineCode) -> Self {
        CeSetCode { enumerator }
    }

    /// Elements observed below `bound` within fuel. Fuel-monotone.
    pub fn members(&self, bound: u64, fuel: Fuel) -> std::collections::BTreeSet<u64> {
        let out = run(&self.enumerator, &[], fuel);
        let mut set = std::collections::BTreeSet::new();
        for s in out {
            if s != nat(0) {
                if let Some(v) = nat_to_u64(&(s - 1u32)) {
                    if v < bound {
                        set.insert(v);
                    }
                }
            }
        }
        set
    }
}

// ---------------------------------------------------------------------------
// Stock terms
// ---------------------------------------------------------------------------

/// Frequently used terms.
pub mod codes {
    use super::prims;
    use super::MachineCode;
    use crate::names::{word, Word};

    /// The canonical diverging machine.
    pub fn diverge() -> MachineCode {
        MachineCode::Prim(prims::DIVERGE)
    }

    /// Halts immediately on any input (emits one symbol).
    pub fn accept() -> MachineCode {
        MachineCode::Prim(prims::ACCEPT)
    }

    /// Copies input 0.
    pub fn identity() -> MachineCode {
        MachineCode::Prim(prims::COPY0)
    }

    /// Copies input 1 (the first argument under the realizer convention).
    pub fn copy_arg() -> MachineCode {
        MachineCode::Prim(prims::COPY1)
    }

    pub fn zeros() -> MachineCode {
        MachineCode::Prim(prims::ZEROS)
    }

    /// Emit a fixed word then idle with zeros: a total, machine-generated
    /// eventually-constant stream.
    pub fn emit_then_zeros(w: &[u64]) -> MachineCode {
        MachineCode::const_output(word(w), zeros())
    }

    pub fn emit_word_then_zeros(w: Word) -> MachineCode {
        MachineCode::const_output(w, zeros())
    }

    /// Body of the union of two packed open names stored as a 2-tuple
    /// oracle: dovetails both membership machines.
    pub fn union_body() -> MachineCode {
        MachineCode::dovetail(
            MachineCode::partial_apply(MachineCode::Prim(prims::EVAL_COMPONENT), word(&[0])),
            MachineCode::partial_apply(MachineCode::Prim(prims::EVAL_COMPONENT), word(&[1])),
        )
    }

    /// The §8 union machine: takes two packed open names as inputs and
    /// emits the packed union name (code of the dovetail body, then the
    /// tupled oracles).
    pub fn union_machine() -> MachineCode {
        MachineCode::const_output(
            vec![super::encode(&union_body())],
            MachineCode::Prim(prims::TUPLE2),
        )
    }
}

/// Union of two open-set names (as packed names over the same space): the
/// result accepts exactly the names accepted by either input.
pub fn union_realizer(a: &Name, b: &Name) -> Name {
    Name::prepend(
        vec![encode(&codes::union_body())],
        Name::tuple_vec(vec![a.clone(), b.clone()]),
    )
}

#[cfg(test)]
mod tests;

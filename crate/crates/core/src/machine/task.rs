//! Cooperative, fuel-metered evaluation steps.
//!
//! Every running machine is a tree of tasks. A `poll` routes down to one leaf
//! micro-op which consumes at least one fuel tick; structural nodes forward
//! polls for free. This is what gives `Dovetail` genuine round-robin
//! fairness: alternating polls alternates leaf steps.

use std::collections::VecDeque;

use crate::names::{CacheStep, FuelMeter, Name, Nat, OutOfFuel, ViewResolved};

pub enum Poll {
    /// Made progress without output.
    Pending,
    Emit(Nat),
    /// Output complete; the machine terminated.
    Halt,
}

pub trait Task: Send {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel>;
}

// ---------------------------------------------------------------------------
// Elementary tasks
// ---------------------------------------------------------------------------

/// Never outputs; each poll burns one step.
pub struct DivergeTask;

impl Task for DivergeTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        meter.tick()?;
        Ok(Poll::Pending)
    }
}

/// Emits nothing and halts.
pub struct HaltTask;

impl Task for HaltTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        meter.tick()?;
        Ok(Poll::Halt)
    }
}

/// Resolves a single stream position cooperatively: one poll advances the
/// generating machine by one step instead of blocking on it.
pub struct PosQuery {
    state: QueryState,
}

enum QueryState {
    Fresh(Name, u64),
    Stepping(Name, u64),
    Diverged,
    Done,
}

impl PosQuery {
    pub fn new(name: Name, pos: u64) -> Self {
        PosQuery {
            state: QueryState::Fresh(name, pos),
        }
    }

    /// `Ok(Some(s))` once the symbol is available; otherwise one unit of
    /// progress was made.
    pub fn poll(&mut self, meter: &FuelMeter) -> Result<Option<Nat>, OutOfFuel> {
        loop {
            match &mut self.state {
                QueryState::Fresh(name, pos) => {
                    let resolved = name.resolve_view(*pos);
                    match resolved {
                        ViewResolved::Immediate(s) => {
                            meter.tick()?;
                            self.state = QueryState::Done;
                            return Ok(Some(s));
                        }
                        ViewResolved::Diverges => {
                            self.state = QueryState::Diverged;
                        }
                        ViewResolved::Computed(n, p) => {
                            self.state = QueryState::Stepping(n, p);
                        }
                    }
                }
                QueryState::Stepping(name, pos) => {
                    match name.computed_step(*pos, meter)? {
                        CacheStep::Ready(s) => {
                            self.state = QueryState::Done;
                            return Ok(Some(s));
                        }
                        CacheStep::Progress => return Ok(None),
                        CacheStep::Never => self.state = QueryState::Diverged,
                    }
                }
                QueryState::Diverged => {
                    meter.tick()?;
                    return Ok(None);
                }
                QueryState::Done => {
                    // Re-polling a finished query is a caller bug; stay safe.
                    meter.tick()?;
                    return Ok(None);
                }
            }
        }
    }
}

/// Sequential cooperative reader over a name.
pub struct Cursor {
    name: Name,
    next_pos: u64,
    query: Option<PosQuery>,
}

impl Cursor {
    pub fn new(name: Name) -> Self {
        Cursor {
            name,
            next_pos: 0,
            query: None,
        }
    }

    pub fn at(name: Name, start: u64) -> Self {
        Cursor {
            name,
            next_pos: start,
            query: None,
        }
    }

    pub fn position(&self) -> u64 {
        self.next_pos
    }

    /// One step towards the next symbol; `Some` when it arrived.
    pub fn poll_next(&mut self, meter: &FuelMeter) -> Result<Option<Nat>, OutOfFuel> {
        if self.query.is_none() {
            self.query = Some(PosQuery::new(self.name.clone(), self.next_pos));
        }
        match self.query.as_mut().unwrap().poll(meter)? {
            Some(s) => {
                self.next_pos += 1;
                self.query = None;
                Ok(Some(s))
            }
            None => Ok(None),
        }
    }
}

/// Copy a name to the output, position by position. Never halts on its own;
/// stalls forever on a position the name does not fill.
pub struct CopyName {
    cursor: Cursor,
}

impl CopyName {
    pub fn new(name: Name) -> Self {
        CopyName {
            cursor: Cursor::new(name),
        }
    }

    pub fn from(name: Name, start: u64) -> Self {
        CopyName {
            cursor: Cursor::at(name, start),
        }
    }
}

impl Task for CopyName {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        match self.cursor.poll_next(meter)? {
            Some(s) => Ok(Poll::Emit(s)),
            None => Ok(Poll::Pending),
        }
    }
}

/// Emit a fixed word, then delegate.
pub struct ConstOutputTask {
    word: VecDeque<Nat>,
    then: Box<dyn Task>,
}

impl ConstOutputTask {
    pub fn new(word: Vec<Nat>, then: Box<dyn Task>) -> Self {
        ConstOutputTask {
            word: word.into(),
            then,
        }
    }
}

impl Task for ConstOutputTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if let Some(s) = self.word.pop_front() {
            meter.tick()?;
            return Ok(Poll::Emit(s));
        }
        self.then.poll(meter)
    }
}

/// Strictly alternating zip of two outputs: even positions from the left,
/// odd from the right. Halts when the side whose turn it is halts.
pub struct InterleaveTask {
    left: Box<dyn Task>,
    right: Box<dyn Task>,
    left_turn: bool,
}

impl InterleaveTask {
    pub fn new(left: Box<dyn Task>, right: Box<dyn Task>) -> Self {
        InterleaveTask {
            left,
            right,
            left_turn: true,
        }
    }
}

impl Task for InterleaveTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        let side = if self.left_turn {
            &mut self.left
        } else {
            &mut self.right
        };
        match side.poll(meter)? {
            Poll::Emit(s) => {
                self.left_turn = !self.left_turn;
                Ok(Poll::Emit(s))
            }
            Poll::Pending => Ok(Poll::Pending),
            Poll::Halt => Ok(Poll::Halt),
        }
    }
}

/// Fair race of two machines; commits to whichever emits first (left checked
/// first on ties). If either branch halts at standalone fuel `t`, the race
/// halts within `2t + O(1)`.
pub struct DovetailTask {
    left: Option<Box<dyn Task>>,
    right: Option<Box<dyn Task>>,
    committed: Option<Box<dyn Task>>,
    left_turn: bool,
    queued: Option<Nat>,
}

impl DovetailTask {
    pub fn new(left: Box<dyn Task>, right: Box<dyn Task>) -> Self {
        DovetailTask {
            left: Some(left),
            right: Some(right),
            committed: None,
            left_turn: true,
            queued: None,
        }
    }
}

impl Task for DovetailTask {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if let Some(s) = self.queued.take() {
            meter.tick()?;
            return Ok(Poll::Emit(s));
        }
        if let Some(t) = self.committed.as_mut() {
            return t.poll(meter);
        }
        let slot = if self.left_turn && self.left.is_some() {
            &mut self.left
        } else if self.right.is_some() {
            &mut self.right
        } else if self.left.is_some() {
            &mut self.left
        } else {
            // Both branches halted without output: empty output.
            meter.tick()?;
            return Ok(Poll::Halt);
        };
        self.left_turn = !self.left_turn;
        let task = slot.as_mut().unwrap();
        match task.poll(meter)? {
            Poll::Emit(s) => {
                self.committed = Some(slot.take().unwrap());
                Ok(Poll::Emit(s))
            }
            Poll::Halt => {
                // Halted without ever emitting: this branch never fires.
                *slot = None;
                Ok(Poll::Pending)
            }
            Poll::Pending => Ok(Poll::Pending),
        }
    }
}

/// A probe watches a machine run for its first output symbol.
pub struct RunProbe {
    task: Option<Box<dyn Task>>,
    fired: bool,
}

impl RunProbe {
    pub fn new(task: Box<dyn Task>) -> Self {
        RunProbe {
            task: Some(task),
            fired: false,
        }
    }

    pub fn fired(&self) -> bool {
        self.fired
    }

    /// One step; true once the run has produced a symbol. A probe whose
    /// machine halted silently keeps answering false.
    pub fn poll_fire(&mut self, meter: &FuelMeter) -> Result<bool, OutOfFuel> {
        if self.fired {
            meter.tick()?;
            return Ok(true);
        }
        match self.task.as_mut() {
            None => {
                meter.tick()?;
                Ok(false)
            }
            Some(t) => match t.poll(meter)? {
                Poll::Emit(_) => {
                    self.fired = true;
                    self.task = None;
                    Ok(true)
                }
                Poll::Halt => {
                    self.task = None;
                    Ok(false)
                }
                Poll::Pending => Ok(false),
            },
        }
    }
}

/// Run a queue of probes to completion in order; fires (emits `0`) when all
/// have fired. Conjunction of semi-decisions.
pub struct AllOf {
    probes: VecDeque<RunProbe>,
    done: bool,
}

impl AllOf {
    pub fn new(probes: Vec<RunProbe>) -> Self {
        AllOf {
            probes: probes.into(),
            done: false,
        }
    }
}

impl Task for AllOf {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if self.done {
            meter.tick()?;
            return Ok(Poll::Halt);
        }
        match self.probes.front_mut() {
            None => {
                self.done = true;
                meter.tick()?;
                Ok(Poll::Emit(Nat::from(0u32)))
            }
            Some(p) => {
                if p.poll_fire(meter)? {
                    self.probes.pop_front();
                }
                Ok(Poll::Pending)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Countable dovetailing
// ---------------------------------------------------------------------------

/// What a branch source produced when stepped.
pub enum SourceStep {
    /// A new branch, tagged for the fire handler.
    Branch(u64, Box<dyn Task>),
    Nothing,
    Exhausted,
}

/// Supplies branches for a countable dovetail, possibly doing metered work
/// (e.g. reading an enumeration stream) to find the next one.
pub trait BranchSource: Send {
    fn step(&mut self, meter: &FuelMeter) -> Result<SourceStep, OutOfFuel>;
}

/// Source that yields one branch per counter value 0,1,2,...
pub struct CounterSource<F: FnMut(u64) -> Option<Box<dyn Task>> + Send> {
    next: u64,
    make: F,
}

impl<F: FnMut(u64) -> Option<Box<dyn Task>> + Send> CounterSource<F> {
    pub fn new(make: F) -> Self {
        CounterSource { next: 0, make }
    }
}

impl<F: FnMut(u64) -> Option<Box<dyn Task>> + Send> BranchSource for CounterSource<F> {
    fn step(&mut self, meter: &FuelMeter) -> Result<SourceStep, OutOfFuel> {
        meter.tick()?;
        let tag = self.next;
        self.next += 1;
        match (self.make)(tag) {
            Some(t) => Ok(SourceStep::Branch(tag, t)),
            None => Ok(SourceStep::Exhausted),
        }
    }
}

/// Source that reads a pause-convention enumeration stream and spawns one
/// branch per enumerated value.
pub struct EnumSource<F: FnMut(u64) -> Option<Box<dyn Task>> + Send> {
    cursor: Cursor,
    make: F,
}

impl<F: FnMut(u64) -> Option<Box<dyn Task>> + Send> EnumSource<F> {
    pub fn new(stream: Name, make: F) -> Self {
        EnumSource {
            cursor: Cursor::new(stream),
            make,
        }
    }
}

impl<F: FnMut(u64) -> Option<Box<dyn Task>> + Send> BranchSource for EnumSource<F> {
    fn step(&mut self, meter: &FuelMeter) -> Result<SourceStep, OutOfFuel> {
        match self.cursor.poll_next(meter)? {
            None => Ok(SourceStep::Nothing),
            Some(s) => {
                if s == Nat::from(0u32) {
                    return Ok(SourceStep::Nothing);
                }
                let v = match crate::names::nat_to_u64(&(s - 1u32)) {
                    Some(v) => v,
                    None => return Ok(SourceStep::Nothing),
                };
                match (self.make)(v) {
                    Some(t) => Ok(SourceStep::Branch(v, t)),
                    None => Ok(SourceStep::Nothing),
                }
            }
        }
    }
}

/// What to do once a branch fires. The handler receives the branch tag and
/// the branch's first emitted symbol.
pub enum FireMode {
    /// Emit the handler's symbols and keep going (enumeration realizers).
    Enumerate {
        on_fire: Box<dyn FnMut(u64, Nat) -> Vec<Nat> + Send>,
        /// Emit a pause symbol (`0`) once per round so output stays total.
        pause: bool,
        /// After the first fire, repeat the last emitted symbol instead of
        /// pausing (for raw streams where `0` is a meaningful symbol).
        filler_last: bool,
    },
    /// Replace the whole dovetail by a task built from the first fired tag.
    Commit {
        build: Box<dyn FnMut(u64) -> Box<dyn Task> + Send>,
    },
}

impl FireMode {
    pub fn enumerate(on_fire: impl FnMut(u64, Nat) -> Vec<Nat> + Send + 'static) -> FireMode {
        FireMode::Enumerate {
            on_fire: Box::new(on_fire),
            pause: true,
            filler_last: false,
        }
    }

    pub fn enumerate_raw(on_fire: impl FnMut(u64, Nat) -> Vec<Nat> + Send + 'static) -> FireMode {
        FireMode::Enumerate {
            on_fire: Box::new(on_fire),
            pause: false,
            filler_last: true,
        }
    }

    pub fn commit(build: impl FnMut(u64) -> Box<dyn Task> + Send + 'static) -> FireMode {
        FireMode::Commit {
            build: Box::new(build),
        }
    }
}

/// Fair dovetail over countably many branch runs. Each poll advances one
/// branch or the source by one step, round-robin, with the canonical order:
/// source first, then branches oldest-first.
pub struct DovetailEnum {
    source: Option<Box<dyn BranchSource>>,
    branches: Vec<(u64, Box<dyn Task>)>,
    rr: usize,
    mode: FireMode,
    committed: Option<Box<dyn Task>>,
    out_queue: VecDeque<Nat>,
    last_emitted: Option<Nat>,
}

impl DovetailEnum {
    pub fn new(source: Box<dyn BranchSource>, mode: FireMode) -> Self {
        DovetailEnum {
            source: Some(source),
            branches: Vec::new(),
            rr: 0,
            mode,
            committed: None,
            out_queue: VecDeque::new(),
            last_emitted: None,
        }
    }

    fn round_filler(&self) -> Option<Nat> {
        match &self.mode {
            FireMode::Enumerate {
                pause, filler_last, ..
            } => {
                if *pause {
                    Some(Nat::from(0u32))
                } else if *filler_last {
                    self.last_emitted.clone()
                } else {
                    None
                }
            }
            FireMode::Commit { .. } => None,
        }
    }
}

impl Task for DovetailEnum {
    fn poll(&mut self, meter: &FuelMeter) -> Result<Poll, OutOfFuel> {
        if let Some(s) = self.out_queue.pop_front() {
            meter.tick()?;
            self.last_emitted = Some(s.clone());
            return Ok(Poll::Emit(s));
        }
        if let Some(t) = self.committed.as_mut() {
            return t.poll(meter);
        }

        // Slot 0 is the source; slots 1.. are branches.
        let slots = 1 + self.branches.len();
        if self.rr >= slots {
            self.rr = 0;
            if let Some(f) = self.round_filler() {
                meter.tick()?;
                self.last_emitted = Some(f.clone());
                return Ok(Poll::Emit(f));
            }
        }
        let slot = self.rr;
        self.rr += 1;

        if slot == 0 {
            match self.source.as_mut() {
                None => {
                    meter.tick()?;
                    Ok(Poll::Pending)
                }
                Some(src) => match src.step(meter)? {
                    SourceStep::Branch(tag, t) => {
                        self.branches.push((tag, t));
                        Ok(Poll::Pending)
                    }
                    SourceStep::Nothing => Ok(Poll::Pending),
                    SourceStep::Exhausted => {
                        self.source = None;
                        Ok(Poll::Pending)
                    }
                },
            }
        } else {
            let idx = slot - 1;
            let (tag, task) = &mut self.branches[idx];
            let tag = *tag;
            match task.poll(meter)? {
                Poll::Emit(sym) => {
                    self.branches.remove(idx);
                    self.rr = self.rr.saturating_sub(1);
                    match &mut self.mode {
                        FireMode::Enumerate { on_fire, .. } => {
                            self.out_queue.extend(on_fire(tag, sym));
                            Ok(Poll::Pending)
                        }
                        FireMode::Commit { build } => {
                            self.committed = Some(build(tag));
                            self.branches.clear();
                            self.source = None;
                            Ok(Poll::Pending)
                        }
                    }
                }
                Poll::Halt => {
                    // Fired nothing and never will.
                    self.branches.remove(idx);
                    self.rr = self.rr.saturating_sub(1);
                    Ok(Poll::Pending)
                }
                Poll::Pending => Ok(Poll::Pending),
            }
        }
    }
}

/// Emit symbols produced by a closure-driven state machine one at a time.
/// Convenience for simple custom prims.
pub struct EmitQueue {
    pub queue: VecDeque<Nat>,
}

impl EmitQueue {
    pub fn new() -> Self {
        EmitQueue {
            queue: VecDeque::new(),
        }
    }

    pub fn push(&mut self, s: Nat) {
        self.queue.push_back(s);
    }

    pub fn pop_emit(&mut self, meter: &FuelMeter) -> Result<Option<Poll>, OutOfFuel> {
        if let Some(s) = self.queue.pop_front() {
            meter.tick()?;
            return Ok(Some(Poll::Emit(s)));
        }
        Ok(None)
    }
}

//! Seeded random machine terms and input names, shared by property tests
//! and the acceptance suite.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::{prims, MachineCode};
use crate::names::{nat, word, Name, Word};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sample_word(rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| nat(rng.gen_range(0..8))).collect()
}

/// A random term over the registry, biased towards small combinator trees.
pub fn sample_code(rng: &mut ChaCha8Rng, depth: u32) -> MachineCode {
    let leaf = depth == 0 || rng.gen_bool(0.4);
    if leaf {
        // Mostly cheap stream prims; occasionally an out-of-range index,
        // which must behave as a diverger.
        let pool = [
            prims::DIVERGE,
            prims::ACCEPT,
            prims::COPY0,
            prims::COPY1,
            prims::TAIL0,
            prims::ZEROS,
            prims::CS_ACCEPT_ARG,
            prims::CS_ACCEPT_AUX,
            prims::TUPLE2,
            prims::ACCEPT_IF_HEAD,
            prims::ACCEPT_IF_CONTAINS,
            prims::ENUM_MEMBER_NAT,
            prims::HEAD_FN,
            prims::SQUARE_FN,
            prims::REPEAT,
            prims::EMIT_EP,
            prims::PRIM_COUNT + 7,
        ];
        return MachineCode::Prim(*pool.choose(rng).unwrap());
    }
    match rng.gen_range(0..7) {
        0 => MachineCode::compose(sample_code(rng, depth - 1), sample_code(rng, depth - 1)),
        1 => MachineCode::interleave(sample_code(rng, depth - 1), sample_code(rng, depth - 1)),
        2 => MachineCode::partial_apply(sample_code(rng, depth - 1), sample_word(rng, 4)),
        3 => MachineCode::dovetail(sample_code(rng, depth - 1), sample_code(rng, depth - 1)),
        4 => MachineCode::tuple_apply(sample_code(rng, depth - 1)),
        5 => MachineCode::const_output(sample_word(rng, 3), sample_code(rng, depth - 1)),
        _ => MachineCode::compose(sample_code(rng, depth - 1), sample_code(rng, depth - 1)),
    }
}

/// A random total input name.
pub fn sample_name(rng: &mut ChaCha8Rng) -> Name {
    match rng.gen_range(0..4) {
        0 => Name::constant(rng.gen_range(0..6)),
        1 => {
            let prefix = sample_word(rng, 4);
            let mut cycle = sample_word(rng, 3);
            cycle.push(nat(rng.gen_range(0..5)));
            Name::eventually_periodic(prefix, cycle)
        }
        2 => {
            let a = rng.gen_range(0..4u64);
            let b = rng.gen_range(0..4u64);
            Name::tuple_vec(vec![Name::constant(a), Name::constant(b)])
        }
        _ => Name::from_word(&[
            rng.gen_range(0..6),
            rng.gen_range(0..6),
            rng.gen_range(0..6),
        ]),
    }
}

pub fn sample_inputs(rng: &mut ChaCha8Rng) -> Vec<Name> {
    let n = rng.gen_range(1..=3);
    (0..n).map(|_| sample_name(rng)).collect()
}

/// Prefix relation on words.
pub fn is_prefix(shorter: &[crate::names::Nat], longer: &[crate::names::Nat]) -> bool {
    shorter.len() <= longer.len() && shorter.iter().zip(longer).all(|(a, b)| a == b)
}

/// Words that exercise the smn law in tests.
pub fn sample_fed_word(rng: &mut ChaCha8Rng) -> Word {
    word(&(0..rng.gen_range(0..5)).map(|_| rng.gen_range(0..9)).collect::<Vec<_>>())
}

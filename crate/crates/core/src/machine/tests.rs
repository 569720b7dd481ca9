use super::generator::{is_prefix, rng, sample_code, sample_inputs};
use super::*;
use crate::names::{word, Fuel, Name};
use prims::*;

fn accept_all() -> MachineCode {
    codes::accept()
}

#[test]
fn identity_yields_prefix_of_input() {
    let u = Name::from_word(&[9, 8, 7, 6]);
    let out = run(&codes::identity(), &[u.clone()], Fuel(40));
    let full = u.prefix(out.len() as u64, Fuel(10_000)).word().unwrap();
    assert!(!out.is_empty());
    assert_eq!(out, full);
}

#[test]
fn const_output_emits_word() {
    let code = MachineCode::const_output(word(&[7]), codes::diverge());
    assert_eq!(run(&code, &[], Fuel(50)), word(&[7]));
    assert_eq!(run(&code, &[], Fuel(5_000)), word(&[7]));
}

#[test]
fn run_monotone_in_fuel_random_terms() {
    let mut r = rng(11);
    for _ in 0..150 {
        let code = sample_code(&mut r, 3);
        let inputs = sample_inputs(&mut r);
        let f = 400;
        let short = run(&code, &inputs, Fuel(f));
        let long = run(&code, &inputs, Fuel(2 * f));
        assert!(
            is_prefix(&short, &long),
            "not a prefix for {code:?}: {short:?} vs {long:?}"
        );
    }
}

#[test]
fn halting_persists_random_terms() {
    let mut r = rng(12);
    for _ in 0..150 {
        let code = sample_code(&mut r, 3);
        let inputs = sample_inputs(&mut r);
        if halts(&code, &inputs, Fuel(300)) == Halts::Yes {
            assert_eq!(halts(&code, &inputs, Fuel(600)), Halts::Yes);
            assert_eq!(halts(&code, &inputs, Fuel(5_000)), Halts::Yes);
        }
    }
}

#[test]
fn halts_basics() {
    let u = Name::constant(3);
    assert_eq!(halts(&accept_all(), &[u.clone()], Fuel(100)), Halts::Yes);
    assert_eq!(halts(&codes::diverge(), &[u.clone()], Fuel(100)), Halts::Unknown);
    assert_eq!(
        halts(
            &MachineCode::dovetail(codes::diverge(), accept_all()),
            &[u],
            Fuel(100)
        ),
        Halts::Yes
    );
}

#[test]
fn dovetail_fairness_bound() {
    // Find the standalone halting fuel of a slow accepter, then check the
    // dovetail against a diverger halts within 2t + small constant.
    // cs_accept_arg scans input 1 for a nonzero symbol.
    let slow = MachineCode::Prim(CS_ACCEPT_ARG);
    let inputs = vec![
        Name::zeros(),
        Name::eventually_periodic(word(&[0, 0, 0, 0, 0, 0, 1]), word(&[0])),
    ];
    let mut t = None;
    for f in 1..5_000 {
        if halts(&slow, &inputs, Fuel(f)) == Halts::Yes {
            t = Some(f);
            break;
        }
    }
    let t = t.expect("slow accepter should halt");
    let dove = MachineCode::dovetail(codes::diverge(), slow);
    assert_eq!(halts(&dove, &inputs, Fuel(2 * t + 8)), Halts::Yes);
}

#[test]
fn smn_on_projection_behaves_as_identity() {
    // copy1 projects the second input; feeding words into input 0 must not
    // disturb it.
    let mut r = rng(13);
    for _ in 0..20 {
        let fed = super::generator::sample_fed_word(&mut r);
        let code = smn(&MachineCode::Prim(COPY1), fed);
        let v = Name::from_word(&[4, 2, 4, 2]);
        let out = run(&code, &[Name::constant(9), v.clone()], Fuel(60));
        let expect = v.prefix(out.len() as u64, Fuel(1_000)).word().unwrap();
        assert!(!out.is_empty());
        assert_eq!(out, expect);
    }
}

#[test]
fn smn_agrees_with_prefix_extension() {
    let mut r = rng(14);
    for _ in 0..40 {
        let code = sample_code(&mut r, 2);
        let fed = super::generator::sample_fed_word(&mut r);
        let u = super::generator::sample_name(&mut r);
        let v = super::generator::sample_name(&mut r);
        let lhs = run(
            &smn(&code, fed.clone()),
            &[u.clone(), v.clone()],
            Fuel(800),
        );
        let rhs = run(
            &code,
            &[Name::prepend(fed, u), v],
            Fuel(1_600),
        );
        // Identical extensional behavior up to fuel accounting: the shorter
        // observation prefixes the longer one.
        assert!(is_prefix(&lhs, &rhs) || is_prefix(&rhs, &lhs));
    }
}

#[test]
fn membership_currying_preserves_accept_set() {
    // ∈ : X × O(X) → S is eval_swapped. Curry it at a fixed x by feeding
    // x's defining prefix; the accept set over open names is unchanged.
    let member = MachineCode::Prim(EVAL_SWAPPED);
    let x_word = [5u64, 0, 0];
    let x = Name::from_word(&x_word);
    let curried = smn(&member, word(&x_word));
    let mut r = rng(15);
    for _ in 0..50 {
        let k = r.gen_range(0..10u64);
        let which = r.gen_range(0..3);
        let open = match which {
            0 => Realizer::closed(MachineCode::partial_apply(
                MachineCode::Prim(ACCEPT_IF_HEAD),
                word(&[k]),
            )),
            1 => Realizer::closed(MachineCode::partial_apply(
                MachineCode::Prim(ACCEPT_IF_CONTAINS),
                word(&[k]),
            )),
            _ => Realizer::closed(codes::diverge()),
        };
        let pack = open.pack();
        let direct = halts(&member, &[x.clone(), pack.clone()], Fuel(100_000));
        let fixed = halts(&curried, &[Name::zeros(), pack], Fuel(100_000));
        assert_eq!(direct, fixed, "open {which} with k={k}");
    }
    use rand::Rng;
}

#[test]
fn uncurry_of_curry_is_observationally_identity() {
    let mut r = rng(16);
    let targets = [
        MachineCode::Prim(TUPLE2),
        MachineCode::Prim(COPY1),
        MachineCode::Prim(CS_ACCEPT_ARG),
        MachineCode::interleave(codes::identity(), MachineCode::Prim(COPY1)),
    ];
    let mut checked = 0;
    for code in &targets {
        for _ in 0..25 {
            let u = super::generator::sample_name(&mut r);
            let v = super::generator::sample_name(&mut r);
            let direct = run(code, &[u.clone(), v.clone()], Fuel(500));
            let through = run(&uncurry(&curry(code)), &[u, v], Fuel(4_000));
            let k = direct.len().min(through.len()).min(6);
            assert_eq!(direct[..k], through[..k], "mismatch for {code:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 100);
}

#[test]
fn encode_decode_roundtrip_random() {
    let mut r = rng(17);
    let mut seen = std::collections::HashSet::new();
    let mut codes_set = std::collections::HashSet::new();
    for _ in 0..1000 {
        let code = sample_code(&mut r, 3);
        let n = encode(&code);
        assert_eq!(decode(&n), code, "roundtrip failed");
        // Injectivity: distinct terms get distinct numbers.
        if codes_set.insert(code) {
            assert!(seen.insert(n), "encode collision");
        }
    }
}

#[test]
fn decode_outside_image_is_diverger() {
    use crate::names::{nat, pair_nat};
    for tag in 7u64..12 {
        let n = pair_nat(&nat(tag), &nat(5));
        assert_eq!(decode(&n), codes::diverge());
    }
}

#[test]
fn word_code_roundtrip() {
    use crate::names::nat;
    for n in 0..500u64 {
        let w = word_decode(nat(n));
        assert_eq!(word_code(&w), nat(n));
    }
}

#[test]
fn union_realizer_behaves_as_union() {
    let empty = Realizer::closed(codes::diverge()).pack();
    let whole = Realizer::closed(codes::accept()).pack();
    let v = Realizer::closed(MachineCode::partial_apply(
        MachineCode::Prim(ACCEPT_IF_HEAD),
        word(&[3]),
    ))
    .pack();

    let union_ev = union_realizer(&empty, &v);
    let union_wv = union_realizer(&whole, &v);

    let member = |pack: &Name, x: &Name| -> Halts {
        halts(
            &MachineCode::Prim(EVAL_SWAPPED),
            &[x.clone(), pack.clone()],
            Fuel(20_000),
        )
    };

    for k in 0..8u64 {
        let x = Name::constant(k);
        let expect_v = if k == 3 { Halts::Yes } else { Halts::Unknown };
        assert_eq!(member(&union_ev, &x), expect_v, "∅ ∪ V at {k}");
        assert_eq!(member(&union_wv, &x), Halts::Yes, "X ∪ V at {k}");
    }
}

#[test]
fn union_is_commutative_extensionally() {
    let a = Realizer::closed(MachineCode::partial_apply(
        MachineCode::Prim(ACCEPT_IF_HEAD),
        word(&[2]),
    ))
    .pack();
    let b = Realizer::closed(MachineCode::partial_apply(
        MachineCode::Prim(ACCEPT_IF_CONTAINS),
        word(&[5]),
    ))
    .pack();
    let ab = union_realizer(&a, &b);
    let ba = union_realizer(&b, &a);
    for k in 0..64u64 {
        let x = Name::from_word(&[k % 8, k / 8]);
        let lhs = halts(
            &MachineCode::Prim(EVAL_SWAPPED),
            &[x.clone(), ab.clone()],
            Fuel(50_000),
        );
        let rhs = halts(
            &MachineCode::Prim(EVAL_SWAPPED),
            &[x, ba.clone()],
            Fuel(50_000),
        );
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn union_machine_term_produces_packed_union() {
    // The §8 machine: run it on two packed opens, decode its output as a
    // packed name, and check membership.
    let v = Realizer::closed(MachineCode::partial_apply(
        MachineCode::Prim(ACCEPT_IF_HEAD),
        word(&[1]),
    ))
    .pack();
    let w = Realizer::closed(MachineCode::partial_apply(
        MachineCode::Prim(ACCEPT_IF_HEAD),
        word(&[4]),
    ))
    .pack();
    let out = Name::computed(codes::union_machine(), vec![v, w]);
    for k in 0..6u64 {
        let x = Name::constant(k);
        let got = halts(
            &MachineCode::Prim(EVAL_SWAPPED),
            &[x, out.clone()],
            Fuel(60_000),
        );
        let expect = if k == 1 || k == 4 {
            Halts::Yes
        } else {
            Halts::Unknown
        };
        assert_eq!(got, expect, "union membership at {k}");
    }
}

#[test]
fn ce_set_codes_enumerate() {
    // Enumerator for {2n, 2n+1} given n=2: emits 5 then 6 under the pause
    // convention, then pauses forever.
    let code = MachineCode::const_output(word(&[5, 6]), codes::zeros());
    let ce = CeSetCode::new(code);
    let members = ce.members(64, Fuel(500));
    assert_eq!(members.into_iter().collect::<Vec<_>>(), vec![4, 5]);

    let empty = CeSetCode::new(codes::zeros());
    assert!(empty.members(64, Fuel(500)).is_empty());
}

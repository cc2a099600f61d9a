use d2d_privcache::model::{rat, Bits, DemandVector, SubfileId, SystemParams, Transcript};
use d2d_privcache::scheme_a::SchemeAParams;
use d2d_privcache::scheme_b::SchemeBParams;
use d2d_privcache::sim::{self, Scheme};
use d2d_privcache::verify;
use d2d_privcache::Error;
use proptest::prelude::*;

fn scheme_a(k: usize, n: usize, t: usize, seed: u64) -> Scheme {
    Scheme::A(SchemeAParams::new(SystemParams::new(k, n, 1, seed).unwrap(), t).unwrap())
        .fit_file_bits(1)
}

fn scheme_b(n: usize, tp: usize, seed: u64) -> Scheme {
    let base = SystemParams::new(2, n, 1, seed).unwrap();
    let p = if tp == n {
        SchemeBParams::full_memory(base).unwrap()
    } else {
        SchemeBParams::new(base, tp).unwrap()
    };
    Scheme::B(p).fit_file_bits(1)
}

fn demands(s: &Scheme, v: &[usize]) -> DemandVector {
    DemandVector::new(v.to_vec(), s.params()).unwrap()
}

fn all_decode(t: &Transcript) -> bool {
    verify::check_decodability(t).unwrap().iter().all(|&x| x)
}

#[test]
fn virtual_user_small_run() {
    let s = scheme_a(2, 2, 2, 3);
    let t = sim::run_protocol(&s, &demands(&s, &[1, 2])).unwrap();
    assert_eq!(t.message_count(), 2);
    assert_eq!(sim::measure_load(&t), rat(1, 2));
    assert_eq!(sim::measure_memory(&t), rat(3, 2));
    assert!(all_decode(&t));
}

#[test]
fn two_user_run_t1() {
    let s = scheme_b(3, 1, 3);
    let t = sim::run_protocol(&s, &demands(&s, &[1, 1])).unwrap();
    assert_eq!(t.broadcasts[0].len(), 3);
    assert_eq!(t.broadcasts[1].len(), 3);
    assert!(t
        .all_messages()
        .all(|m| m.payload.len() as u64 * 6 == t.params.file_bits));
    assert_eq!(sim::measure_load(&t), rat(1, 1));
}

#[test]
fn measured_loads() {
    let s = scheme_a(3, 2, 2, 0);
    for d in DemandVector::all(s.params()) {
        assert_eq!(
            sim::measure_load(&sim::run_protocol(&s, &d).unwrap()),
            rat(5, 4)
        );
    }
    let s = scheme_b(2, 0, 0);
    for d in DemandVector::all(s.params()) {
        assert_eq!(
            sim::measure_load(&sim::run_protocol(&s, &d).unwrap()),
            rat(2, 1)
        );
    }
}

#[test]
fn full_memory_sends_nothing() {
    let s = scheme_a(2, 2, 3, 1);
    let b = scheme_b(3, 3, 1);
    for s in [s, b] {
        for d in DemandVector::all(s.params()) {
            let t = sim::run_protocol(&s, &d).unwrap();
            assert_eq!(t.payload_bits, 0);
            assert_eq!(sim::measure_load(&t), rat(0, 1));
            assert!(all_decode(&t));
        }
    }
}

#[test]
fn larger_file_sizes_decode() {
    let base = SystemParams::new(3, 3, 1, 8).unwrap();
    let s = Scheme::A(SchemeAParams::new(base, 3).unwrap()).fit_file_bits(1000);
    assert_eq!(s.params().file_bits % s.subpacketization(), 0);
    assert!(s.params().file_bits >= 1000);
    let t = sim::run_protocol(&s, &demands(&s, &[2, 3, 2])).unwrap();
    assert!(all_decode(&t));
    assert_eq!(sim::measure_load(&t), s.point().1);
}

fn flip_first_bit(t: &Transcript, k: usize, j: usize) -> Transcript {
    let mut bad = t.clone();
    let p = &mut bad.broadcasts[k][j].payload;
    let v = p.get(0);
    p.set(0, !v);
    bad
}

#[test]
fn flipped_payload_bit_breaks_decoding() {
    for s in [scheme_a(2, 2, 2, 4), scheme_a(2, 2, 2, 5)] {
        let t = sim::run_protocol(&s, &demands(&s, &[1, 2])).unwrap();
        for k in 0..2 {
            for j in 0..t.broadcasts[k].len() {
                let bad = flip_first_bit(&t, k, j);
                assert!(!all_decode(&bad), "{} msg {k}/{j}", s.tag());
                assert!(!sim::payloads_consistent(&bad));
            }
        }
    }
}

#[test]
fn some_flip_breaks_each_transmitter() {
    // a message may serve virtual users only, or be a dummy in the two-user scheme
    for s in [
        scheme_a(3, 2, 2, 4),
        scheme_a(2, 3, 2, 4),
        scheme_b(3, 1, 4),
        scheme_b(4, 2, 4),
    ] {
        for d in DemandVector::all(s.params()) {
            let t = sim::run_protocol(&s, &d).unwrap();
            for k in 0..s.params().users {
                let broken = (0..t.broadcasts[k].len())
                    .filter(|&j| !all_decode(&flip_first_bit(&t, k, j)))
                    .count();
                assert!(broken > 0, "{} d={d} transmitter {}", s.tag(), k + 1);
            }
        }
    }
}

#[test]
fn queries_only_name_cached_slots() {
    for s in [
        scheme_a(2, 3, 2, 2),
        scheme_a(3, 2, 3, 2),
        scheme_b(4, 2, 2),
    ] {
        for d in DemandVector::all(s.params()) {
            let t = sim::run_protocol(&s, &d).unwrap();
            assert!(sim::check_encoding(&t).unwrap());
            assert!(sim::payloads_consistent(&t));
        }
    }
}

#[test]
fn uncached_query_is_an_encoding_violation() {
    let s = scheme_a(2, 2, 2, 0);
    let t = sim::run_protocol(&s, &demands(&s, &[1, 2])).unwrap();
    let mut q = t.queries[0].clone();
    let missing = (1..=s.subpacketization() as usize)
        .map(|slot| SubfileId::new(1, slot))
        .find(|id| !t.cache(1).contains(id))
        .unwrap();
    q.plan[0].composition[0] = missing;
    let err = sim::user_broadcast(t.cache(1), &q, t.subfile_bits).unwrap_err();
    assert!(matches!(err, Error::EncodingViolation { user: 1, .. }));
}

#[test]
fn decoder_reports_missing_slot() {
    let s = scheme_a(2, 2, 2, 0);
    let mut t = sim::run_protocol(&s, &demands(&s, &[1, 2])).unwrap();
    t.broadcasts[1].clear();
    let err = s.decode(&t, 1).unwrap_err();
    assert!(matches!(
        err,
        Error::DecodingFailure {
            user: 1,
            file: 1,
            ..
        }
    ));
}

#[test]
fn runs_are_reproducible() {
    let s = scheme_a(3, 2, 2, 99);
    let d = demands(&s, &[2, 1, 2]);
    assert_eq!(
        sim::run_protocol(&s, &d).unwrap(),
        sim::run_protocol(&s, &d).unwrap()
    );
    let other = sim::run_protocol(&s.with_seed(100), &d).unwrap();
    assert_ne!(sim::run_protocol(&s, &d).unwrap().library, other.library);
}

#[test]
fn rejects_bad_demands() {
    let s = scheme_a(2, 2, 2, 0);
    assert!(DemandVector::new(vec![1, 3], s.params()).is_err());
    assert!(DemandVector::new(vec![1], s.params()).is_err());
    assert!(DemandVector::new(vec![0, 1], s.params()).is_err());
}

#[test]
fn rejects_undersized_systems() {
    assert!(SystemParams::new(1, 3, 1, 0).is_err());
    assert!(SystemParams::new(3, 1, 1, 0).is_err());
}

#[test]
fn transcript_text_roundtrip() {
    for s in [scheme_a(2, 3, 2, 6), scheme_b(3, 2, 6), scheme_b(2, 2, 6)] {
        let t = sim::run_protocol(&s, &demands(&s, &[2, 1])).unwrap();
        let text = t.to_text();
        let back = Transcript::from_text(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_text(), text);
        assert!(all_decode(&back));
    }
}

#[test]
fn transcript_text_shape() {
    let s = scheme_a(2, 2, 2, 0);
    let t = sim::run_protocol(&s, &demands(&s, &[1, 2])).unwrap();
    let text = t.to_text();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d2d-transcript v1");
    assert_eq!(
        lines.iter().filter(|l| l.starts_with("library ")).count(),
        2
    );
    assert_eq!(lines.iter().filter(|l| l.starts_with("cache ")).count(), 2);
    assert_eq!(lines.iter().filter(|l| l.starts_with("msg ")).count(), 2);
    assert!(Transcript::from_text("d2d-transcript v2\n").is_err());
    assert!(matches!(
        Transcript::from_text(&text.replace("msg 1", "msg x")),
        Err(Error::Parse { .. })
    ));
}

#[test]
fn bits_hex_roundtrip() {
    let b = Bits::from_bools([true, false, true, true, false]);
    assert_eq!(Bits::from_hex(&b.to_hex(), 5).unwrap(), b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn virtual_user_runs_decode(k in 2usize..4, n in 2usize..4, t_off in 0usize..8, seed in any::<u64>(), di in 0usize..64) {
        let u = (k - 1) * n;
        let t = 1 + t_off % (u + 1);
        let s = scheme_a(k, n, t, seed);
        let all = DemandVector::all(s.params());
        let d = &all[di % all.len()];
        let tr = sim::run_protocol(&s, d).unwrap();
        prop_assert!(all_decode(&tr));
        prop_assert_eq!(sim::measure_load(&tr), s.point().1);
        prop_assert!(sim::measure_memory(&tr) <= s.point().0);
    }

    #[test]
    fn two_user_runs_decode(n in 2usize..6, tp_off in 0usize..8, seed in any::<u64>(), d1 in 1usize..6, d2 in 1usize..6) {
        let tp = tp_off % n;
        let s = scheme_b(n, tp, seed);
        let d = demands(&s, &[1 + (d1 - 1) % n, 1 + (d2 - 1) % n]);
        let tr = sim::run_protocol(&s, &d).unwrap();
        prop_assert!(all_decode(&tr));
        prop_assert_eq!(sim::measure_load(&tr), s.point().1);
        prop_assert_eq!(sim::measure_memory(&tr), s.point().0);
    }
}

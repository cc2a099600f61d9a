use d2d_privcache::model::{
    Bits, CacheState, DemandVector, Library, SubfileId, SystemParams, Transcript,
};
use d2d_privcache::scheme_a::SchemeAParams;
use d2d_privcache::scheme_b::SchemeBParams;
use d2d_privcache::sim::{self, Scheme};
use d2d_privcache::verify::{self, ExactOptions, Mode};
use d2d_privcache::Error;

fn a(k: usize, n: usize, t: usize) -> SchemeAParams {
    SchemeAParams::new(SystemParams::new(k, n, 1, 0).unwrap(), t).unwrap()
}

fn b(n: usize, tp: usize) -> Scheme {
    Scheme::B(SchemeBParams::new(SystemParams::new(2, n, 1, 0).unwrap(), tp).unwrap())
}

#[test]
fn exact_virtual_user_singletons() {
    for t in 1..=2 {
        let s = Scheme::A(a(2, 2, t));
        for u in 1..=2 {
            let r = verify::check_privacy_exact(&s, &[u], ExactOptions::default()).unwrap();
            assert!(r.pass, "t={t} user {u}: {r}");
            assert_eq!(r.mode, Mode::Exact);
            assert_eq!(r.max_tv, 0.0);
        }
    }
}

#[test]
fn exact_two_user_singletons() {
    for tp in 0..=1 {
        let s = b(2, tp);
        for u in 1..=2 {
            assert!(
                verify::check_privacy_exact(&s, &[u], ExactOptions::default())
                    .unwrap()
                    .pass
            );
        }
    }
}

#[test]
fn exact_baseline_leaks() {
    let s = Scheme::A(a(2, 2, 2).non_private());
    let r = verify::check_privacy_exact(&s, &[1], ExactOptions::default()).unwrap();
    assert!(!r.pass);
    assert!(r.max_tv > 0.5);
}

#[test]
fn paranoid_mode_small_instance() {
    let s = Scheme::A(a(2, 2, 2)).fit_file_bits(1);
    let opts = ExactOptions {
        paranoid: true,
        ..ExactOptions::default()
    };
    for u in 1..=2 {
        let r = verify::check_privacy_exact(&s, &[u], opts).unwrap();
        assert!(r.pass, "{r}");
        assert!(r.samples > 1 << 8);
    }
    let base = Scheme::A(a(2, 2, 2).non_private()).fit_file_bits(1);
    assert!(!verify::check_privacy_exact(&base, &[1], opts).unwrap().pass);
}

#[test]
fn exact_refuses_large_instances() {
    let s = Scheme::A(a(3, 2, 2));
    let err = verify::check_privacy_exact(&s, &[1], ExactOptions::default()).unwrap_err();
    assert!(matches!(err, Error::InstanceTooLarge { .. }));
    let tiny = ExactOptions {
        cap: 10,
        paranoid: false,
    };
    assert!(verify::check_privacy_exact(&Scheme::A(a(2, 2, 2)), &[1], tiny).is_err());
}

#[test]
fn exact_is_repeatable() {
    let s = b(3, 1);
    let x = verify::check_privacy_exact(&s, &[2], ExactOptions::default()).unwrap();
    let y = verify::check_privacy_exact(&s, &[2], ExactOptions::default()).unwrap();
    assert_eq!(x, y);
}

#[test]
fn bad_coalitions_are_rejected() {
    let s = Scheme::A(a(2, 2, 2));
    assert!(verify::check_privacy_exact(&s, &[3], ExactOptions::default()).is_err());
    assert!(verify::check_privacy_exact(&s, &[], ExactOptions::default()).is_err());
}

#[test]
fn monte_carlo_singleton_passes() {
    let s = Scheme::A(a(3, 2, 2));
    let r = verify::check_privacy_mc(&s, &[1], 10_000, 0.05, 7).unwrap();
    assert!(r.pass, "{r}");
    assert!(!r.low_confidence);
    assert_eq!(r.mode, Mode::MonteCarlo);
}

#[test]
fn monte_carlo_baseline_fails() {
    let s = Scheme::A(a(3, 2, 2).non_private());
    let r = verify::check_privacy_mc(&s, &[1], 2_000, 0.05, 7).unwrap();
    assert!(!r.pass);
    assert!(r.max_tv > 0.5);
}

#[test]
fn monte_carlo_one_trial_is_flagged() {
    let s = Scheme::A(a(2, 2, 2));
    let r = verify::check_privacy_mc(&s, &[1], 1, 0.05, 3).unwrap();
    assert!(r.low_confidence);
    assert!(r.max_tv == 0.0 || r.max_tv == 1.0);
    assert!(r.to_string().contains("low confidence"));
}

#[test]
fn monte_carlo_agrees_with_exact_on_small_instances() {
    for s in [Scheme::A(a(2, 2, 2)), b(3, 1)] {
        let r = verify::check_privacy_mc(&s, &[1], 10_000, 0.05, 11).unwrap();
        assert!(r.pass, "{r}");
    }
}

#[test]
fn report_line_format() {
    let r =
        verify::check_privacy_exact(&Scheme::A(a(2, 2, 1)), &[2], ExactOptions::default()).unwrap();
    let line = r.to_string();
    assert!(
        line.starts_with("mode=exact coalition=[2] verdict=PASS max_tv="),
        "{line}"
    );
}

/// Swaps two slots of one `(file, block)` class everywhere they occur.
fn relabel(t: &Transcript, file: usize, x: usize, y: usize) -> Transcript {
    let swap = |id: SubfileId| {
        if id.file != file {
            id
        } else if id.slot == x {
            SubfileId::new(file, y)
        } else if id.slot == y {
            SubfileId::new(file, x)
        } else {
            id
        }
    };
    let sb = t.subfile_bits;
    let mut out = t.clone();
    let files: Vec<Bits> = (1..=t.params.files)
        .map(|i| {
            let mut f = Bits::zeros(0);
            let slots = t.library.file(i).len() / sb;
            for s in 1..=slots {
                let src = swap(SubfileId::new(i, s));
                f.extend(&t.library.subfile(src, sb));
            }
            f
        })
        .collect();
    out.library = Library::new(files);
    out.caches = t
        .caches
        .iter()
        .map(|c| {
            let mut n = CacheState::new(c.owner);
            for (id, bits) in c.entries() {
                n.insert(swap(*id), bits.clone());
            }
            n
        })
        .collect();
    for m in out.broadcasts.iter_mut().flatten() {
        m.composition = m.composition.iter().map(|&id| swap(id)).collect();
    }
    for q in &mut out.queries {
        for p in &mut q.plan {
            p.composition = p.composition.iter().map(|&id| swap(id)).collect();
        }
    }
    out
}

#[test]
fn views_ignore_slot_labels() {
    let s = Scheme::A(a(2, 2, 2)).fit_file_bits(8);
    let d = DemandVector::new(vec![1, 2], s.params()).unwrap();
    let t = sim::run_protocol(&s, &d).unwrap();
    // slots 3 and 4 of file 2 both lie in the second block
    assert_eq!(s.block_of(3), s.block_of(4));
    let r = relabel(&t, 2, 3, 4);
    assert_ne!(r, t);
    assert!(verify::check_decodability(&r).unwrap().iter().all(|&x| x));
    for paranoid in [false, true] {
        assert_eq!(
            verify::canonical_view(&t, &[1], paranoid).unwrap(),
            verify::canonical_view(&r, &[1], paranoid).unwrap()
        );
    }
}

#[test]
fn full_coalition_view_reveals_demands() {
    let s = Scheme::A(a(2, 2, 2));
    let mut seen = std::collections::HashMap::new();
    for d in DemandVector::all(s.params()) {
        for r in s.enumerate_randomness(1_000).unwrap() {
            let plan = s.plan(&d, &r);
            let v = verify::plan_view(&s, &plan, &[1, 2], &d);
            let prev = seen.insert(v, d.clone());
            assert!(prev.is_none_or(|p| p == d));
        }
    }
}

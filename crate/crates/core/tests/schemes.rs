use d2d_privcache::combinat::binom_u64;
use d2d_privcache::model::{rat, DemandVector, SystemParams};
use d2d_privcache::scheme_a::{self, PlacementA, RandomnessA, SchemeAParams};
use d2d_privcache::scheme_b::{self, SchemeBParams};
use d2d_privcache::sim::{self, Scheme};

fn a(k: usize, n: usize, t: usize) -> SchemeAParams {
    SchemeAParams::new(SystemParams::new(k, n, 1, 5).unwrap(), t)
        .unwrap()
        .fit_file_bits(1)
}

fn b(n: usize, tp: usize) -> SchemeBParams {
    SchemeBParams::new(SystemParams::new(2, n, 1, 5).unwrap(), tp)
        .unwrap()
        .fit_file_bits(1)
}

fn d(v: &[usize], p: &SystemParams) -> DemandVector {
    DemandVector::new(v.to_vec(), p).unwrap()
}

#[test]
fn virtual_user_count_and_sets() {
    let p = a(3, 2, 2);
    assert_eq!(p.virtual_users(), 4);
    assert_eq!(p.effective_users(3), vec![1, 2, 4, 5]);
    assert_eq!(p.effective_users(1), vec![2, 3, 4, 5]);
}

#[test]
fn placement_k2_n3_t3_splits_into_six() {
    let p = a(2, 3, 3);
    assert_eq!(p.subpacketization(), 6);
    let (pl, _) = scheme_a::place_a(&p).unwrap();
    for file in 1..=3 {
        let n = pl.cache_slots[0]
            .iter()
            .filter(|id| id.file == file)
            .count();
        assert_eq!(n, 5);
    }
}

#[test]
fn placement_k2_n2_t2_memory() {
    let p = a(2, 2, 2);
    let (pl, _) = scheme_a::place_a(&p).unwrap();
    assert_eq!(pl.cache_slots[0].len(), 6);
    assert_eq!(scheme_a::placement_memory(&pl), vec![rat(3, 2), rat(3, 2)]);
}

#[test]
fn placement_slot_count_formula() {
    for (k, n, t) in [(2, 2, 1), (2, 3, 2), (3, 2, 2), (3, 2, 4), (4, 2, 3)] {
        let p = a(k, n, t);
        let u = ((k - 1) * n) as i64;
        let t = t as i64;
        let want = (binom_u64(u, t - 1) + (k as u64 - 1) * binom_u64(u - 1, t - 2)) * n as u64;
        let (pl, _) = scheme_a::place_a(&p).unwrap();
        for slots in &pl.cache_slots {
            assert_eq!(slots.len() as u64, want, "K={k} N={n} t={t}");
        }
        assert!(scheme_a::placement_memory(&pl)
            .iter()
            .all(|m| *m == p.point().0));
    }
}

#[test]
fn t1_caches_own_block_only() {
    let p = a(3, 2, 1);
    let (pl, _) = scheme_a::place_a(&p).unwrap();
    for (u, slots) in pl.cache_slots.iter().enumerate() {
        assert!(slots.iter().all(|id| p.block_of(id.slot) == u + 1));
    }
    assert_eq!(scheme_a::placement_memory(&pl)[0], rat(2, 3));
}

#[test]
fn virtual_demands_k2() {
    let p = a(2, 2, 1);
    let m = scheme_a::assign_virtual_demands(1, &d(&[1, 1], &p.base), &p);
    assert_eq!(m.into_iter().collect::<Vec<_>>(), vec![(2, 1), (3, 2)]);
}

#[test]
fn virtual_demands_k3() {
    let p = a(3, 2, 2);
    for third in 1..=2 {
        let m = scheme_a::assign_virtual_demands(3, &d(&[1, 1, third], &p.base), &p);
        assert_eq!(m[&4], 2);
        assert_eq!(m[&5], 2);
        assert_eq!(m.values().filter(|&&f| f == 1).count(), 2);
    }
}

#[test]
fn virtual_demands_keep_real_users_and_balance() {
    let p = a(4, 3, 2);
    for dv in DemandVector::all(&p.base) {
        for k in 1..=4 {
            let m = scheme_a::assign_virtual_demands(k, &dv, &p);
            assert_eq!(m.len(), p.virtual_users());
            for u in (1..=4).filter(|&u| u != k) {
                assert_eq!(m[&u], dv.of(u));
            }
            for f in 1..=3 {
                assert_eq!(m.values().filter(|&&x| x == f).count(), 3);
            }
        }
    }
}

#[test]
fn leaders_demand_their_file() {
    let p = a(3, 3, 2);
    let r = RandomnessA::draw(&p, 9);
    for dv in DemandVector::all(&p.base) {
        for k in 1..=3 {
            let plan = scheme_a::DeliveryPlanA::new(k, &dv, &p, &r);
            assert_eq!(plan.leaders.len(), 3);
            for (i, l) in plan.leaders.iter().enumerate() {
                assert_eq!(plan.demands[l], i + 1);
            }
        }
    }
}

#[test]
fn message_count_per_transmitter() {
    for (k, n, t) in [(2, 2, 2), (2, 3, 1), (3, 2, 2), (3, 3, 3), (4, 2, 2)] {
        let p = a(k, n, t);
        let r = RandomnessA::draw(&p, 1);
        let pl = PlacementA::new(&p, &r);
        let u = ((k - 1) * n) as i64;
        let want = binom_u64(u, t as i64) - binom_u64(u - n as i64, t as i64);
        for dv in DemandVector::all(&p.base).iter().take(5) {
            for tx in 1..=k {
                let msgs = scheme_a::DeliveryPlanA::new(tx, dv, &p, &r).messages(&pl);
                assert_eq!(msgs.len() as u64, want);
                assert!(msgs.iter().all(|m| m.composition.len() == t));
            }
        }
    }
}

#[test]
fn small_instance_one_message_each() {
    let p = a(2, 3, 3);
    let t = sim::run_protocol(&Scheme::A(p), &d(&[1, 1], &p.base)).unwrap();
    let x1 = &t.broadcasts[0];
    assert_eq!(x1.len(), 1);
    let mut files: Vec<usize> = x1[0].composition.iter().map(|id| id.file).collect();
    files.sort();
    assert_eq!(files, vec![1, 2, 3]);
    assert!(x1[0].composition.iter().all(|id| p.block_of(id.slot) == 1));
    assert_eq!(x1[0].payload.len(), p.subfile_bits());
}

#[test]
fn load_a_examples() {
    assert_eq!(
        scheme_a::load_a_point(2, 3, 1).unwrap(),
        (rat(3, 2), rat(3, 1))
    );
    assert_eq!(
        scheme_a::load_a_point(2, 3, 2).unwrap(),
        (rat(2, 1), rat(1, 1))
    );
    assert_eq!(
        scheme_a::load_a_point(2, 3, 3).unwrap(),
        (rat(5, 2), rat(1, 3))
    );
    assert_eq!(scheme_a::load_a_point(2, 2, 2).unwrap().0, rat(3, 2));
    assert_eq!(
        scheme_a::load_a_point(3, 2, 2).unwrap(),
        (rat(1, 1), rat(5, 4))
    );
    assert!(scheme_a::load_a_point(2, 2, 4).is_err());
}

#[test]
fn load_a_upper_examples() {
    assert_eq!(scheme_a::load_a_upper(2, 3, 3).unwrap(), rat(1, 3));
    assert_eq!(scheme_a::load_a_upper(2, 3, 4).unwrap(), rat(0, 1));
    assert_eq!(scheme_a::load_a_upper(3, 2, 2).unwrap(), rat(3, 2));
    for (k, n) in [(2, 4), (3, 3), (5, 2)] {
        let u = (k - 1) * n;
        for t in 1..=u + 1 {
            assert!(
                scheme_a::load_a_point(k, n, t).unwrap().1
                    <= scheme_a::load_a_upper(k, n, t).unwrap()
            );
        }
    }
}

#[test]
fn scheme_a_rejects_bad_divisibility() {
    let base = SystemParams::new(2, 2, 3, 0).unwrap();
    let p = SchemeAParams::new(base, 2).unwrap();
    assert!(scheme_a::place_a(&p).is_err());
}

#[test]
fn two_user_small_example_placement() {
    let p = b(3, 2);
    assert_eq!(p.half_size(), 2);
    assert_eq!(p.subpacketization(), 4);
    let (pl, _) = scheme_b::place_b(&p).unwrap();
    for file in 1..=3 {
        assert_eq!(pl.cross_block(file, 1).len(), 1);
        assert_eq!(pl.private_block(file, 1).len(), 1);
        let mine = pl.cache_slots[0]
            .iter()
            .filter(|id| id.file == file)
            .count();
        assert_eq!(mine, 3);
    }
}

#[test]
fn two_user_t0_caches_own_half() {
    for n in 2..=4 {
        let p = b(n, 0);
        let (pl, _) = scheme_b::place_b(&p).unwrap();
        for (u, slots) in pl.cache_slots.iter().enumerate() {
            assert!(slots.iter().all(|id| p.block_of(id.slot) == u + 1));
        }
        assert_eq!(p.point().0, rat(n as i64, 2));
    }
}

#[test]
fn two_user_slot_count_formula() {
    for n in 2..=5usize {
        for tp in 0..n {
            let p = b(n, tp);
            let (pl, _) = scheme_b::place_b(&p).unwrap();
            let want = (binom_u64(n as i64 - 1, tp as i64)
                + 2 * binom_u64(n as i64 - 2, tp as i64 - 1))
                * n as u64;
            assert_eq!(pl.cache_slots[0].len() as u64, want);
            let mem = rat(want as i64, p.subpacketization() as i64);
            assert_eq!(mem, p.point().0);
        }
    }
}

#[test]
fn two_user_message_shape() {
    let p = b(3, 2);
    let (pl, lib) = scheme_b::place_b(&p).unwrap();
    let (x1, x2) = scheme_b::deliver_b(&d(&[1, 1], &p.base), &pl, &lib);
    assert_eq!(x1.len(), 1);
    assert_eq!(x2.len(), 1);
    assert_eq!(x1[0].header, vec![1, 2, 3]);
    // user 2 wants file 1: private part of file 1, cross parts of the others
    let comp = &x1[0].composition;
    assert!(pl.private_block(1, 1).contains(&comp[0]));
    assert!(pl.cross_block(2, 1).contains(&comp[1]));
    assert!(pl.cross_block(3, 1).contains(&comp[2]));
}

#[test]
fn two_user_message_counts() {
    for n in 2..=5usize {
        for tp in 0..n {
            let p = b(n, tp);
            let (pl, _) = scheme_b::place_b(&p).unwrap();
            for dv in DemandVector::all(&p.base) {
                for k in 1..=2 {
                    let msgs = scheme_b::plan_b(k, &dv, &pl);
                    assert_eq!(msgs.len() as u64, binom_u64(n as i64, tp as i64 + 1));
                    assert!(msgs.iter().all(|m| m.composition.len() == tp + 1));
                }
            }
        }
    }
}

#[test]
fn load_b_examples() {
    assert_eq!(
        scheme_b::load_b_point(3, 2).unwrap(),
        (rat(9, 4), rat(1, 2))
    );
    assert_eq!(
        scheme_b::load_b_point(2, 1).unwrap(),
        (rat(3, 2), rat(1, 2))
    );
    for n in 2..=9 {
        assert_eq!(
            scheme_b::load_b_point(n, 0).unwrap(),
            (rat(n as i64, 2), rat(n as i64, 1))
        );
    }
    assert!(scheme_b::load_b_point(3, 3).is_err());
}

#[test]
fn two_user_requires_k2() {
    let base = SystemParams::new(3, 3, 1, 0).unwrap();
    assert!(SchemeBParams::new(base, 1).is_err());
}

#[test]
fn dominance_alpha_at_t1_is_one() {
    for n in 2..=10 {
        assert_eq!(scheme_b::dominance_alpha(n, 1), rat(1, 1));
    }
}

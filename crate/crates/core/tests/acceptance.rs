//! Acceptance suite. One test per criterion; each prints a single
//! `criterion N (name): PASS|FAIL` line. Criterion 10 (CLI determinism)
//! lives in the CLI crate's own acceptance target.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};

use common::*;
use hillcalc::group::{quotient_type, AmbientObject, InvariantFactors, SubquotientPresentation};
use hillcalc::{
    cone, cpx_filtration, cycles, ext1_cs, intersection_filtration, is_acyclic,
    is_split_as_complexes, levels, null_homotopy, rebound, tilde_filtration, ChainComplex,
    Filtration, HillContext, IndexSet, Subobject,
};
use rand::Rng;

fn criterion(n: usize, name: &str, body: impl FnOnce()) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("criterion {n} ({name}): PASS"),
        Err(e) => {
            println!("criterion {n} ({name}): FAIL");
            std::panic::resume_unwind(e);
        }
    }
}

fn all_closed_sets(ctx: &HillContext) -> Vec<IndexSet> {
    let sigma = ctx.sigma();
    (0u32..1 << sigma)
        .map(|mask| (0..sigma).filter(|a| mask >> a & 1 == 1).collect::<IndexSet>())
        .filter(|s| ctx.is_closed(s).unwrap())
        .collect()
}

#[test]
fn criterion_01_hill_census() {
    criterion(1, "hill census", || {
        for (i, f) in census_instances(0, 200).iter().enumerate() {
            let ctx = HillContext::new(f).unwrap();
            let report = ctx.verify_hill(6, 0).unwrap();
            assert!(report.exhaustive, "instance {i} not exhaustive");
            assert!(report.all_pass(), "instance {i}: {report:?}");
            match i {
                0 => assert_eq!(report.census, Some(4)),
                1 => assert_eq!(report.census, Some(8)),
                _ => {}
            }
        }
    });
}

#[test]
fn criterion_02_h3_conservation() {
    criterion(2, "H3 conservation", || {
        for f in &census_instances(0, 200) {
            let ctx = HillContext::new(f).unwrap();
            let factors: Vec<InvariantFactors> = (0..f.sigma())
                .map(|a| quotient_type(f.step(a + 1), f.step(a)).unwrap())
                .collect();
            let closed = all_closed_sets(&ctx);
            for s in &closed {
                for t in &closed {
                    if !s.is_subset(t) {
                        continue;
                    }
                    let ind = ctx.induced_filtration(s, t).unwrap();
                    let got = factor_multiset(&ind.filtration.factors().unwrap());
                    let expected: Vec<InvariantFactors> =
                        t.difference(s).map(|&a| factors[a].clone()).collect();
                    assert_eq!(got, factor_multiset(&expected), "{s:?} ⊆ {t:?}");
                }
            }
        }
    });
}

#[test]
fn criterion_03_hull_properties() {
    criterion(3, "hull properties", || {
        let mut rng = rng(3);
        for _ in 0..100 {
            let f = rand_filtration(&mut rng, 3, 5);
            let ctx = HillContext::new(&f).unwrap();
            for _ in 0..10 {
                let y = rand_subobject(&mut rng, f.ambient());
                let hull = ctx.hull_of_subobject(&y).unwrap();
                assert!(ctx.is_closed(&hull).unwrap());
                assert!(y.leq(&ctx.ell(&hull).unwrap()).unwrap());
                assert_eq!(ctx.hull(&hull).unwrap(), hull);
            }
        }
    });
}

#[test]
fn criterion_04_relength_certificates() {
    criterion(4, "relength certificates", || {
        let instances = census_instances(0, 200);
        for f in &instances {
            let ctx = HillContext::new(f).unwrap();
            let cert = rebound(&ctx).unwrap();
            assert!(cert.filtration.validate().ok());
            // recompute the per-level factor identity from scratch
            let lev = &cert.assignment.lev;
            for beta in 0..cert.filtration.sigma() {
                let new_factor =
                    quotient_type(cert.filtration.step(beta + 1), cert.filtration.step(beta))
                        .unwrap();
                let olds: Vec<InvariantFactors> = (0..f.sigma())
                    .filter(|&a| lev[a] == beta)
                    .map(|a| quotient_type(f.step(a + 1), f.step(a)).unwrap())
                    .collect();
                let refs: Vec<&InvariantFactors> = olds.iter().collect();
                assert_eq!(new_factor, InvariantFactors::direct_sum(&refs), "level {beta}");
            }
        }
        let golden = |f: &Filtration, want: &[usize], len: usize| {
            let ctx = HillContext::new(f).unwrap();
            let lv = levels(&ctx).unwrap();
            assert_eq!(lv.lev, want);
            assert_eq!(lv.new_length(), len);
        };
        golden(&instances[0], &[0, 1, 2], 3);
        golden(&instances[1], &[0, 0, 0], 1);
        golden(&instances[2], &[0, 0, 1], 2);
    });
}

#[test]
fn criterion_05_kaplansky_witnesses() {
    criterion(5, "kaplansky witnesses", || {
        let mut rng = rng(5);
        for _ in 0..50 {
            let f = rand_filtration(&mut rng, 3, 4);
            let ctx = HillContext::new(&f).unwrap();
            let original = factor_multiset(&f.factors().unwrap());
            for _ in 0..10 {
                let y = rand_subobject(&mut rng, f.ambient());
                let k = ctx.kaplansky_witness(&y).unwrap();
                assert!(y.leq(&k.w).unwrap());
                assert!(k.inside.filtration.validate().ok());
                assert!(k.quotient.filtration.validate().ok());
                let mut combined = k.inside.filtration.factors().unwrap();
                combined.extend(k.quotient.filtration.factors().unwrap());
                assert_eq!(factor_multiset(&combined), original);
            }
        }
    });
}

#[test]
fn criterion_06_summand_and_intersection() {
    criterion(6, "summand and intersection", || {
        // goldens: coordinate projections of Z/4 ⊕ Z/2 through the M chain
        let m = golden_m();
        let ctx = HillContext::new(&m).unwrap();
        let a = m.ambient().clone();
        let px = hillcalc::Homomorphism::new(
            a.clone(),
            a.clone(),
            hillcalc::IntMatrix::from_i64(2, 2, &[1, 0, 0, 0]),
        )
        .unwrap();
        let py = hillcalc::Homomorphism::new(
            a.clone(),
            a.clone(),
            hillcalc::IntMatrix::from_i64(2, 2, &[0, 0, 0, 1]),
        )
        .unwrap();
        let sf = ctx.summand_filtration(&px, &py, 1000).unwrap();
        assert_eq!(sf.summand.ambient().invariants(), InvariantFactors::cyclic(4));
        let two = InvariantFactors::cyclic(2);
        let nonzero: Vec<InvariantFactors> =
            sf.summand.factors().unwrap().into_iter().filter(|t| !t.is_zero()).collect();
        assert_eq!(nonzero, vec![two.clone(), two.clone()]);

        let u8f = golden_u8();
        let u8a = HillContext::new(&u8f).unwrap();
        let u8b = HillContext::new(&u8f).unwrap();
        let u8c = HillContext::new(&u8f).unwrap();
        let res = intersection_filtration(&[&u8a, &u8b, &u8c], 1000).unwrap();
        assert_eq!(res.filtration.steps(), u8f.steps());

        // random split projections
        let mut rng = rng(6);
        for _ in 0..100 {
            let (amb, px, py) = rand_split_projections(&mut rng);
            let f = rand_filtration_on(&mut rng, &amb, 3);
            let ctx = HillContext::new(&f).unwrap();
            let sf = ctx.summand_filtration(&px, &py, 1000).unwrap();
            assert!(sf.chain.validate().ok());
            assert!(sf.summand.validate().ok());
        }

        // random intersections: every step is an image lattice of every context
        for _ in 0..30 {
            let amb = rand_finite_ambient(&mut rng, 2);
            let f1 = rand_filtration_on(&mut rng, &amb, 2);
            let f2 = rand_filtration_on(&mut rng, &amb, 2);
            let c1 = HillContext::new(&f1).unwrap();
            let c2 = HillContext::new(&f2).unwrap();
            let res = intersection_filtration(&[&c1, &c2], 1000).unwrap();
            assert!(res.filtration.validate().ok());
            assert!(res.fixpoint_certificates.iter().flatten().all(|&b| b));
            for ctx in [&c1, &c2] {
                let images: Vec<Subobject> = all_closed_sets(ctx)
                    .iter()
                    .map(|s| ctx.ell(s).unwrap())
                    .collect();
                for step in res.filtration.steps() {
                    assert!(images.contains(step), "step outside an image lattice");
                }
            }
        }
    });
}

#[test]
fn criterion_07_mapping_cone() {
    criterion(7, "mapping cone", || {
        let mut rng = rng(7);
        let (mut split_seen, mut nonsplit_seen) = (0usize, 0usize);
        for i in 0..300 {
            let s = rand_complex_bounded(&mut rng, 2, true);
            let t = rand_complex_bounded(&mut rng, 2, true);
            let f = rand_chain_map(&mut rng, &s, &t);
            let h = null_homotopy(&f).unwrap();
            if let Some(h) = &h {
                assert!(h.verify(&f).unwrap(), "instance {i}: bad homotopy certificate");
            }
            let (_, seq) = cone(&f).unwrap();
            let split = is_split_as_complexes(&seq).unwrap();
            assert_eq!(h.is_some(), split.is_some(), "instance {i}: iff violated");
            match split {
                Some(_) => split_seen += 1,
                None => nonsplit_seen += 1,
            }
        }
        assert!(split_seen > 0 && nonsplit_seen > 0, "iff never exercised both ways");
        for _ in 0..50 {
            let z = rand_complex_bounded(&mut rng, 2, true);
            let x = rand_acyclic_complex(&mut rng, 2);
            if !x.is_zero_complex() {
                assert!(ext1_cs(&z, &x).unwrap().is_zero());
            }
        }
        let z = AmbientObject::free(1);
        let ext = ext1_cs(&ChainComplex::stalk(-1, z.clone()), &ChainComplex::stalk(0, z))
            .unwrap();
        assert_eq!(ext, InvariantFactors::free(1));
    });
}

#[test]
fn criterion_08_complex_filtrations() {
    criterion(8, "complex filtrations", || {
        // goldens
        let z = AmbientObject::free(1);
        let double = ChainComplex::new(
            0,
            vec![z.clone(), z.clone()],
            vec![hillcalc::Homomorphism::new(
                z.clone(),
                z.clone(),
                hillcalc::IntMatrix::from_i64(1, 1, &[2]),
            )
            .unwrap()],
        )
        .unwrap();
        let cf = cpx_filtration(&double, &[None, None]).unwrap();
        cf.validate().unwrap();
        assert_eq!(cf.sigma(), 2);
        assert!(cf.step_component(1, 0).is_zero());
        assert!(cf.step_component(1, 1).is_full());

        let disks = ChainComplex::direct_sum(&[
            &ChainComplex::disk(0, &z),
            &ChainComplex::disk(1, &z),
        ]);
        let tf = tilde_filtration(&disks, &[None, None, None], 1000).unwrap();
        tf.validate().unwrap();
        assert_eq!(tf.sigma(), 2);

        // random instances with independent re-validation
        let mut rng = rng(8);
        for _ in 0..50 {
            let x = rand_complex_bounded(&mut rng, 2, true);
            let chains: Vec<Option<Filtration>> = x
                .degrees()
                .map(|n| {
                    rng.gen_bool(0.5).then(|| rand_filtration_on(&mut rng, &x.component(n), 2))
                })
                .collect();
            let cf = cpx_filtration(&x, &chains).unwrap();
            cf.validate().unwrap();
            for n in x.degrees() {
                assert!(cf.degreewise(n).unwrap().validate().ok());
            }
            for i in 0..cf.sigma() {
                let fc = cf.factor_complex(i).unwrap();
                assert!(fc.is_zero_complex() || fc.lo() == fc.hi(), "factor spans degrees");
            }
        }
        for _ in 0..50 {
            let x = rand_acyclic_complex(&mut rng, 2);
            let chains: Vec<Option<Filtration>> = x
                .degrees()
                .map(|n| {
                    rng.gen_bool(0.5).then(|| {
                        let q = SubquotientPresentation::of(
                            &cycles(&x, n).unwrap(),
                            &x.component(n).zero_subobject(),
                        )
                        .unwrap();
                        rand_filtration_on(&mut rng, q.object(), 2)
                    })
                })
                .collect();
            let tf = tilde_filtration(&x, &chains, 1000).unwrap();
            tf.validate().unwrap();
            for i in 0..tf.sigma() {
                assert!(is_acyclic(&tf.step_complex(i + 1).unwrap()).unwrap());
                assert!(is_acyclic(&tf.factor_complex(i).unwrap()).unwrap());
            }
        }
    });
}

#[test]
fn criterion_09_modular_law() {
    criterion(9, "modular law", || {
        let mut rng = rng(9);
        for _ in 0..1000 {
            let amb = rand_finite_ambient(&mut rng, 3);
            let a = rand_subobject(&mut rng, &amb);
            let b = rand_subobject(&mut rng, &amb);
            let c = a.join(&rand_subobject(&mut rng, &amb)).unwrap();
            let lhs = a.join(&b.meet(&c).unwrap()).unwrap();
            let rhs = a.join(&b).unwrap().meet(&c).unwrap();
            assert_eq!(lhs, rhs);
        }
    });
}

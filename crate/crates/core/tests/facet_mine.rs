// Facet-mining diagnostic: computes the true facets of a hull by double
// description of the polar polytope (extreme points translated around their
// centroid) and prints any facets the assembled system is missing. It is a
// research tool rather than an assertion and is ignored by default; run
// with `--ignored --nocapture`. A healthy assembly prints "0 missing".

use std::collections::BTreeSet;

use ucpoly_core::cuts::{assemble_hull, HullId};
use ucpoly_core::formulation::VariantId;
use ucpoly_core::model::{LinearInequality, Sense, UCInstance};
use ucpoly_core::oracle::hull_extreme_points;
use ucpoly_core::polycore::dd_enumerate;
use ucpoly_core::rational::{rat, Rat};
use num_traits::Zero;

fn variant_of(which: HullId) -> VariantId {
    match which {
        HullId::K1 | HullId::K2 => VariantId::Full,
        HullId::Up => VariantId::Up,
        HullId::Down => VariantId::Down,
    }
}

fn mine(label: &str, inst: &UCInstance, which: HullId) {
    let variant = variant_of(which);
    let pts = hull_extreme_points(inst, variant).unwrap();
    let dim = inst.space().dim();
    let n = rat(pts.len() as i64);
    let mut centroid = vec![Rat::zero(); dim];
    for p in &pts {
        for k in 0..dim {
            centroid[k] += &p.values[k];
        }
    }
    for c in centroid.iter_mut() {
        *c /= &n;
    }
    // Polar polytope of the translated hull: one row per extreme point.
    let space = inst.space();
    let mut polar = ucpoly_core::formulation::InequalitySystem::new(space, "polar");
    for (i, p) in pts.iter().enumerate() {
        let mut row = LinearInequality::new(format!("pt{i}"), Sense::Le, rat(1));
        for k in 0..dim {
            row.add(k, &p.values[k] - &centroid[k]);
        }
        polar.push(row);
    }
    let vs = dd_enumerate(&polar).unwrap();
    assert!(vs.rays.is_empty(), "polar should be bounded");
    let sys = assemble_hull(inst, which).unwrap();
    let have: BTreeSet<_> = sys.rows.iter().map(|r| r.normalized_key()).collect();
    let mut missing = Vec::new();
    for z in &vs.points {
        let mut facet = LinearInequality::new("facet", Sense::Le, rat(1));
        let mut shift = Rat::zero();
        for k in 0..dim {
            facet.add(k, z.values[k].clone());
            shift += &z.values[k] * &centroid[k];
        }
        facet.rhs = rat(1) + shift;
        if !have.contains(&facet.normalized_key()) {
            missing.push(facet);
        }
    }
    println!(
        "== {label} {which}: {} facets, {} missing from assembly",
        vs.points.len(),
        missing.len()
    );
    for f in &missing {
        println!("  {}", f.dump(&inst.space()));
    }
}

#[test]
#[ignore]
fn mine_one_sided() {
    let gen1 = UCInstance::new(4, 2, 1, rat(1), rat(3), Rat::new(3.into(), 2.into()), rat(1)).unwrap();
    mine("DOWN T=4 L=2 ell=1 C=[1,3] Vb=3/2 V=1", &gen1, HullId::Down);
    let gen2 = UCInstance::new(4, 3, 1, rat(1), rat(3), Rat::new(3.into(), 2.into()), rat(1)).unwrap();
    mine("DOWN T=4 L=3 ell=1", &gen2, HullId::Down);
    let gen3 = UCInstance::new(4, 1, 2, rat(1), rat(4), Rat::new(3.into(), 2.into()), rat(1)).unwrap();
    mine("DOWN T=4 L=1 ell=2 C=[1,4]", &gen3, HullId::Down);
    let gen4 = UCInstance::new(5, 2, 1, rat(1), rat(4), Rat::new(3.into(), 2.into()), rat(1)).unwrap();
    mine("DOWN T=5 L=2 ell=1 C=[1,4]", &gen4, HullId::Down);
    let gen5 = UCInstance::new(5, 2, 2, rat(2), rat(5), Rat::new(5.into(), 2.into()), rat(1)).unwrap();
    mine("DOWN T=5 L=2 ell=2 C=[2,5] Vb=5/2", &gen5, HullId::Down);
    mine("UP T=5 L=2 ell=1 C=[1,4]", &gen4, HullId::Up);
    mine("UP T=5 L=2 ell=2 C=[2,5] Vb=5/2", &gen5, HullId::Up);
    let gen6 = UCInstance::new(5, 1, 1, rat(1), rat(4), Rat::new(3.into(), 2.into()), rat(1)).unwrap();
    mine("DOWN T=5 L=1 ell=1 C=[1,4]", &gen6, HullId::Down);
    let frac7 = Rat::new(7.into(), 2.into());
    let gen7 = UCInstance::new(4, 1, 1, rat(1), frac7.clone(), Rat::new(3.into(), 2.into()), rat(1)).unwrap();
    mine("DOWN T=4 L=1 C=[1,7/2] nondiv", &gen7, HullId::Down);
    mine("UP T=4 L=1 C=[1,7/2] nondiv", &gen7, HullId::Up);
    let gen8 = UCInstance::new(5, 2, 1, rat(1), frac7.clone(), Rat::new(3.into(), 2.into()), rat(1)).unwrap();
    mine("DOWN T=5 L=2 C=[1,7/2] nondiv", &gen8, HullId::Down);
    mine("UP T=5 L=2 C=[1,7/2] nondiv", &gen8, HullId::Up);
    let gen9 = UCInstance::new(4, 2, 1, rat(2), rat(4), Rat::new(5.into(), 2.into()), rat(1)).unwrap();
    mine("DOWN T=4 L=2 C=[2,4] Vb=5/2 kappa=1", &gen9, HullId::Down);
    mine("UP T=4 L=2 C=[2,4] Vb=5/2 kappa=1", &gen9, HullId::Up);
    let gen10 = UCInstance::new(4, 1, 1, rat(2), rat(5), Rat::new(5.into(), 2.into()), rat(1)).unwrap();
    mine("DOWN T=4 L=1 C=[2,5] Vb=5/2", &gen10, HullId::Down);
    let gen11 = UCInstance::new(5, 1, 1, rat(1), Rat::new(9.into(), 2.into()), Rat::new(3.into(), 2.into()), rat(1)).unwrap();
    mine("DOWN T=5 L=1 C=[1,9/2] kappa=3", &gen11, HullId::Down);
    let gen12 = UCInstance::new(5, 2, 1, rat(1), Rat::new(9.into(), 2.into()), Rat::new(3.into(), 2.into()), rat(1)).unwrap();
    mine("DOWN T=5 L=2 C=[1,9/2] kappa=3", &gen12, HullId::Down);
    mine("UP T=5 L=1 C=[1,9/2] kappa=3", &gen11, HullId::Up);
    mine("UP T=5 L=2 C=[1,9/2] kappa=3", &gen12, HullId::Up);
}

#[test]
#[ignore]
fn mine_k2() {
    let k2 = |t, l, ell| UCInstance::new(t, l, ell, rat(1), rat(3), rat(1), rat(1)).unwrap();
    mine("K2 T=3 L=1", &k2(3, 1, 1), HullId::K2);
    mine("K2 T=4 L=1", &k2(4, 1, 1), HullId::K2);
    mine("K2 T=4 L=2 ell=1", &k2(4, 2, 1), HullId::K2);
    mine("K2 T=4 L=2 ell=2", &k2(4, 2, 2), HullId::K2);
    mine("K2 T=4 L=3", &k2(4, 3, 1), HullId::K2);
    mine("K2 T=5 L=2", &k2(5, 2, 1), HullId::K2);
    let scaled = UCInstance::new(4, 2, 1, rat(5), rat(9), rat(5), rat(2)).unwrap();
    mine("K2 T=4 L=2 C=[5,9] V=2", &scaled, HullId::K2);
    mine("K2 T=5 L=1", &k2(5, 1, 1), HullId::K2);
    mine("K2 T=5 L=1 ell=3", &k2(5, 1, 3), HullId::K2);
    mine("K2 T=5 L=3", &k2(5, 3, 1), HullId::K2);
    mine("K2 T=3 L=2", &k2(3, 2, 1), HullId::K2);
}

// Documents the known gap: at L >= 4 the mined facets include classes with
// alternating generation terms that no implemented family produces, so
// these runs print a nonzero missing count.
#[test]
#[ignore]
fn mine_k2_deep_up_time() {
    let k2 = |t, l, ell| UCInstance::new(t, l, ell, rat(1), rat(3), rat(1), rat(1)).unwrap();
    mine("K2 T=5 L=4 ell=1", &k2(5, 4, 1), HullId::K2);
    mine("K2 T=5 L=4 ell=2", &k2(5, 4, 2), HullId::K2);
}

#[test]
#[ignore]
fn mine_third_fraction_vbar() {
    let a = UCInstance::new(3, 2, 2, rat(1), Rat::new(5.into(), 2.into()), Rat::new(5.into(), 3.into()), rat(1)).unwrap();
    mine("UP T=3 L=2 C=[1,5/2] Vb=5/3", &a, HullId::Up);
    let b = UCInstance::new(4, 1, 1, rat(2), rat(7), Rat::new(8.into(), 3.into()), rat(2)).unwrap();
    mine("UP T=4 L=1 C=[2,7] Vb=8/3 V=2", &b, HullId::Up);
    let c = UCInstance::new(5, 1, 2, rat(1), rat(6), Rat::new(5.into(), 3.into()), rat(2)).unwrap();
    mine("UP T=5 L=1 C=[1,6] Vb=5/3 V=2", &c, HullId::Up);
}

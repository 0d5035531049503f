// Temporary replay of the acceptance sampler for the facet criterion.

use num_traits::Zero;
use rand_core::{RngCore, SeedableRng};

use ucpoly_core::cuts::HullId;
use ucpoly_core::model::{Point, RegimeClass, UCInstance};
use ucpoly_core::rational::{rat, ratio, Rat};
use ucpoly_core::verify::{check_all_members, instance_summary};

type Rng = rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_ac5e;

fn pick(rng: &mut Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

fn pick_times(rng: &mut Rng, t_count: usize) -> (usize, usize) {
    let hi = 3.min(t_count - 1);
    (1 + pick(rng, hi), 1 + pick(rng, hi))
}

fn k1_instance(rng: &mut Rng, t_count: usize) -> UCInstance {
    let (l, ell) = pick_times(rng, t_count);
    let c_min = rat(pick(rng, 4) as i64);
    let gap = rat(1 + pick(rng, 3) as i64);
    let frac = [ratio(1, 3), ratio(1, 2), ratio(2, 3)][pick(rng, 3)].clone();
    let v_bar = &c_min + &gap * frac;
    UCInstance::new(t_count, l, ell, c_min.clone(), &c_min + &gap, v_bar, gap).unwrap()
}

fn k2_instance(rng: &mut Rng, t_count: usize) -> UCInstance {
    let (l, ell) = pick_times(rng, t_count);
    let c_min = rat(1 + pick(rng, 4) as i64);
    let v = rat(1 + pick(rng, 2) as i64);
    let inst =
        UCInstance::new(t_count, l, ell, c_min.clone(), &c_min + &v + &v, c_min.clone(), v)
            .unwrap();
    assert_eq!(inst.regime(), RegimeClass::K2);
    inst
}

fn general_instance(rng: &mut Rng, t_count: usize) -> UCInstance {
    let (l, ell) = pick_times(rng, t_count);
    let c_min = rat(1 + pick(rng, 2) as i64);
    let v = rat(1 + pick(rng, 2) as i64);
    let steps = rat(2 + pick(rng, 2) as i64);
    let gap = if pick(rng, 2) == 0 {
        &v * &steps
    } else {
        &v * &steps - &v * ratio(1, 2)
    };
    let v_bar = &c_min + &v * [ratio(1, 3), ratio(1, 2), ratio(2, 3)][pick(rng, 3)].clone();
    UCInstance::new(t_count, l, ell, c_min.clone(), &c_min + &gap, v_bar, v).unwrap()
}

fn facet_scoped(rng: &mut Rng, mut sample: impl FnMut(&mut Rng) -> UCInstance) -> UCInstance {
    loop {
        let inst = sample(rng);
        if inst.min_up + inst.min_down < inst.periods {
            return inst;
        }
    }
}

#[allow(unused)]
fn consume_point(rng: &mut Rng, inst: &UCInstance) {
    let mut p = Point::zero(inst.space().dim());
    for k in 0..p.values.len() {
        let num = (rng.next_u64() % 17) as i64 - 2;
        let den = (rng.next_u64() % 3) as i64 + 1;
        p.values[k] = ratio(num, den);
    }
}

#[test]
#[ignore]
fn replay_c4() {
    let mut rng = Rng::seed_from_u64(SEED);
    for &t in &[3, 4, 5, 3, 4, 5, 3, 4, 5, 6] {
        let _ = k1_instance(&mut rng, t);
    }
    for &t in &[3, 4, 5, 3, 4, 5, 3, 4, 5, 4] {
        let _ = k2_instance(&mut rng, t);
    }
    for &t in &[3, 4, 5, 3, 4, 5, 3, 4, 5, 4] {
        let _ = general_instance(&mut rng, t);
    }
    let _ = general_instance(&mut rng, 6);
    let _ = Rat::zero();
    for (inst, which) in [
        (facet_scoped(&mut rng, |r| k1_instance(r, 4)), HullId::K1),
        (facet_scoped(&mut rng, |r| k2_instance(r, 4)), HullId::K2),
        (facet_scoped(&mut rng, |r| general_instance(r, 4)), HullId::Up),
        (facet_scoped(&mut rng, |r| general_instance(r, 4)), HullId::Down),
    ] {
        println!("c4 instance {which}: {}", instance_summary(&inst));
        for r in check_all_members(&inst, which) {
            if !r.confirmed() {
                println!("  c4 FAIL: {r}");
            }
        }
    }
}

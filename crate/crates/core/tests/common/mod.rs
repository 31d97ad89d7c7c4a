//! Seeded corpora and random schedules shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subtour::generators::{gen_random_euclidean, gen_random_explicit, DeadlinePolicy, RandomParams};
use subtour::{Instance, Item, Location, Metric, Schedule, VertexId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small Euclidean instances with `n` cycling through `2..=7` and varied
/// delivery times, deadline equal to the minimum delay.
pub fn small_corpus(count: usize) -> Vec<Instance> {
    (0..count)
        .map(|i| {
            let mut p = RandomParams::new(2 + i % 6, i as u64);
            p.delta = 1.0 + (i % 4) as f64 * 0.75;
            gen_random_euclidean(&p).unwrap()
        })
        .collect()
}

/// Euclidean instances with up to 200 items over three box sizes, feasible
/// with slack 1, 1.5 or 3.
pub fn pipeline_corpus(count: usize) -> Vec<Instance> {
    let mut r = rng(0x5eed);
    (0..count)
        .map(|i| {
            let mut p = RandomParams::new(r.gen_range(1..=200), 10_000 + i as u64);
            p.box_size = [10.0, 100.0, 1000.0][(i / 3) % 3];
            p.delta = r.gen_range(1.0..5.0);
            p.sigma = r.gen_range(0.0..20.0);
            p.deadline = DeadlinePolicy::Slack([1.0, 1.5, 3.0][i % 3]);
            gen_random_euclidean(&p).unwrap()
        })
        .collect()
}

/// Explicit instances with 1 to 4 items and up to two extra points.
pub fn explicit_corpus(count: usize) -> Vec<Instance> {
    let mut r = rng(0xe4);
    (0..count)
        .map(|i| {
            let mut p = RandomParams::new(r.gen_range(1..=4), 20_000 + i as u64);
            p.delta = r.gen_range(1.0..4.0);
            p.sigma = [0.0, 1.0, 25.0, 400.0][i % 4];
            p.deadline = DeadlinePolicy::Slack([1.0, 1.5, 3.0][r.gen_range(0..3)]);
            gen_random_explicit(&p, r.gen_range(0..=2)).unwrap()
        })
        .collect()
}

/// Instance whose items sit on a handful of shared sites, so that random
/// schedules often have co-located vertices.
pub fn clustered_instance(r: &mut ChaCha8Rng, n: usize) -> (Instance, Vec<Location>) {
    let mut sites = vec![Location::Coord(0.0, 0.0)];
    for _ in 0..r.gen_range(1..=3) {
        sites.push(Location::Coord(r.gen_range(-10.0..10.0), r.gen_range(-10.0..10.0)));
    }
    let items = (0..n)
        .map(|i| Item::new(format!("p{}", i + 1), *sites.choose(r).unwrap()))
        .collect();
    let inst = Instance::new(Metric::Euclidean2D, sites[0], items, r.gen_range(1.0..3.0), 1.0, 1e6).unwrap();
    (inst, sites)
}

/// Uniformly shaped random proper schedule: each subtree is either an item
/// continuing to the rest or a bifurcation at a random site.
pub fn random_schedule(r: &mut ChaCha8Rng, inst: &Instance, sites: &[Location]) -> Schedule {
    let mut order: Vec<usize> = (0..inst.n()).collect();
    order.shuffle(r);
    let mut s = Schedule::new(*inst.root());
    let top = grow(r, inst, sites, &mut s, &order);
    let root = s.root();
    s.add_arc(root, top);
    s
}

fn grow(r: &mut ChaCha8Rng, inst: &Instance, sites: &[Location], s: &mut Schedule, items: &[usize]) -> VertexId {
    let item = |s: &mut Schedule, i: usize| s.add_item(inst.items()[i].id.clone(), inst.items()[i].loc);
    if items.len() == 1 {
        return item(s, items[0]);
    }
    if r.gen_bool(0.4) {
        let v = item(s, items[0]);
        let c = grow(r, inst, sites, s, &items[1..]);
        s.add_arc(v, c);
        v
    } else {
        let loc = if r.gen_bool(0.5) {
            inst.items()[items[0]].loc
        } else {
            *sites.choose(r).unwrap()
        };
        let v = s.add_aux(loc);
        let cut = r.gen_range(1..items.len());
        let a = grow(r, inst, sites, s, &items[..cut]);
        let b = grow(r, inst, sites, s, &items[cut..]);
        s.add_arc(v, a);
        s.add_arc(v, b);
        v
    }
}

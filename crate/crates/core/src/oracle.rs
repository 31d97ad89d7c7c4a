//! Exponential reference solvers for small instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{schedule_cost, schedule_delay};
use crate::instance::Instance;
use crate::metric::{Location, Metric};
use crate::schedule::{Schedule, VertexId};
use crate::tolerance::le_rel;
use crate::transforms::root_caterpillar;

pub const MAX_DELAY_ITEMS: usize = 8;
pub const MAX_COST_ITEMS: usize = 4;
pub const MAX_SUBSET_ITEMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_value: f64,
    pub best_schedule: Schedule,
    pub search_space_size: u64,
}

/// Rearranges `perm` into the next lexicographic permutation, returning
/// false once the last one has been passed.
fn next_permutation(perm: &mut [usize]) -> bool {
    let Some(i) = perm.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = perm.iter().rposition(|&x| x > perm[i]).expect("a larger element exists");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

/// Minimum delay over every assignment of items to the split slots of a
/// caterpillar rooted at the root location. Some optimal schedule always has
/// this shape, so the result is the global optimum.
pub fn brute_force_min_delay(instance: &Instance) -> Result<OracleResult> {
    let n = instance.n();
    if n > MAX_DELAY_ITEMS {
        return Err(Error::TooLarge { n, max: MAX_DELAY_ITEMS });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(f64, Schedule)> = None;
    let mut count = 0u64;
    loop {
        count += 1;
        let s = root_caterpillar(instance, &perm);
        let d = schedule_delay(instance, &s);
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, s));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (best_value, best_schedule) = best.expect("at least one permutation");
    Ok(OracleResult {
        best_value,
        best_schedule,
        search_space_size: count,
    })
}

#[derive(Clone, Copy)]
enum Shape {
    Leaf(usize),
    /// Item delivering first, then continuing to a subtree.
    Chain(usize, usize),
    /// Bifurcation at a metric point over two item masks.
    Split { point: usize, a: (u32, usize), b: (u32, usize) },
}

#[derive(Clone, Copy)]
struct Candidate {
    loc: usize,
    travel: f64,
    leaves: usize,
    /// Largest delay within the subtree, counted from arrival at its root.
    delay: f64,
    shape: Shape,
}

/// Minimum cost over every proper schedule meeting the deadline, with
/// hand-over vertices placed at any point of the metric. Restricted to
/// explicit metrics, where this placement universe is exhaustive.
///
/// Subtrees are enumerated bottom-up per item subset; the two children of a
/// bifurcation are unordered, so the one holding the lowest item goes first.
pub fn brute_force_min_cost(instance: &Instance) -> Result<OracleResult> {
    let n = instance.n();
    if n > MAX_COST_ITEMS {
        return Err(Error::TooLarge { n, max: MAX_COST_ITEMS });
    }
    let metric = match instance.metric() {
        Metric::Explicit(m) => m,
        Metric::Euclidean2D => return Err(Error::UnsupportedMetric("euclidean2d")),
    };
    let point = |loc: &Location| match *loc {
        Location::Point(p) => p,
        Location::Coord(..) => unreachable!("explicit instances use point locations"),
    };
    let item_pt: Vec<usize> = instance.items().iter().map(|it| point(&it.loc)).collect();
    let points = metric.len();
    let delta = instance.delta();

    let full = (1u32 << n) - 1;
    let mut table: Vec<Vec<Candidate>> = vec![Vec::new(); full as usize + 1];
    let mut masks: Vec<u32> = (1..=full).collect();
    masks.sort_by_key(|m| m.count_ones());
    for &mask in &masks {
        let mut out = Vec::new();
        for i in (0..n).filter(|i| mask & (1 << i) != 0) {
            let rest = mask & !(1 << i);
            let loc = item_pt[i];
            if rest == 0 {
                out.push(Candidate {
                    loc,
                    travel: 0.0,
                    leaves: 1,
                    delay: delta,
                    shape: Shape::Leaf(i),
                });
                continue;
            }
            for (k, c) in table[rest as usize].iter().enumerate() {
                let arc = metric.get(loc, c.loc);
                out.push(Candidate {
                    loc,
                    travel: arc + c.travel,
                    leaves: c.leaves,
                    delay: delta + arc + c.delay,
                    shape: Shape::Chain(i, k),
                });
            }
        }
        let low = mask & mask.wrapping_neg();
        // sub ranges over proper subsets containing the lowest item
        let mut sub = (mask - 1) & mask;
        while sub != 0 {
            if sub & low != 0 {
                let other = mask & !sub;
                let handover = sub.count_ones().min(other.count_ones()) as f64;
                for p in 0..points {
                    for (ka, a) in table[sub as usize].iter().enumerate() {
                        let arc_a = metric.get(p, a.loc);
                        for (kb, b) in table[other as usize].iter().enumerate() {
                            let arc_b = metric.get(p, b.loc);
                            out.push(Candidate {
                                loc: p,
                                travel: arc_a + a.travel + arc_b + b.travel,
                                leaves: a.leaves + b.leaves,
                                delay: handover + (arc_a + a.delay).max(arc_b + b.delay),
                                shape: Shape::Split {
                                    point: p,
                                    a: (sub, ka),
                                    b: (other, kb),
                                },
                            });
                        }
                    }
                }
            }
            sub = (sub - 1) & mask;
        }
        table[mask as usize] = out;
    }

    let root = point(instance.root());
    let sigma = instance.sigma();
    let mut best: Option<(f64, usize)> = None;
    let mut fastest = f64::INFINITY;
    for (k, c) in table[full as usize].iter().enumerate() {
        let arc = metric.get(root, c.loc);
        let delay = arc + c.delay;
        fastest = fastest.min(delay);
        if !le_rel(delay, instance.deadline()) {
            continue;
        }
        let cost = arc + c.travel + sigma * c.leaves as f64;
        if best.is_none_or(|(b, _)| cost < b) {
            best = Some((cost, k));
        }
    }
    let Some((_, k)) = best else {
        return Err(Error::Infeasible {
            min_delay: fastest,
            deadline: instance.deadline(),
        });
    };

    let mut schedule = Schedule::new(*instance.root());
    let top = rebuild(instance, &table, &mut schedule, full, k);
    let r = schedule.root();
    schedule.add_arc(r, top);
    let best_value = schedule_cost(instance, &schedule).total;
    Ok(OracleResult {
        best_value,
        best_schedule: schedule,
        search_space_size: table[full as usize].len() as u64,
    })
}

fn rebuild(instance: &Instance, table: &[Vec<Candidate>], s: &mut Schedule, mask: u32, k: usize) -> VertexId {
    let c = table[mask as usize][k];
    let item = |s: &mut Schedule, i: usize| {
        let it = &instance.items()[i];
        s.add_item(it.id.clone(), it.loc)
    };
    match c.shape {
        Shape::Leaf(i) => item(s, i),
        Shape::Chain(i, child) => {
            let v = item(s, i);
            let w = rebuild(instance, table, s, mask & !(1 << i), child);
            s.add_arc(v, w);
            v
        }
        Shape::Split { point, a, b } => {
            let v = s.add_aux(Location::Point(point));
            let x = rebuild(instance, table, s, a.0, a.1);
            let y = rebuild(instance, table, s, b.0, b.1);
            s.add_arc(v, x);
            s.add_arc(v, y);
            v
        }
    }
}

/// Deadline lower bound by enumerating every item subset `Q`: some item of
/// `Q` is delivered after all hand-overs `Q` forces. Reference for the
/// sorted closed form.
pub fn exhaustive_delay_bound(instance: &Instance) -> Result<f64> {
    let n = instance.n();
    if n > MAX_SUBSET_ITEMS {
        return Err(Error::TooLarge { n, max: MAX_SUBSET_ITEMS });
    }
    let mut best = f64::NEG_INFINITY;
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        let nearest = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| instance.root_dist(i))
            .fold(f64::INFINITY, f64::min);
        best = best.max(nearest + instance.delta() + size.min(n - 1) as f64);
    }
    Ok(best)
}

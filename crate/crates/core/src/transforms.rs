//! Delay-preserving schedule transformations and the fastest schedule.
//!
//! Leafication and flip never increase the delay of a schedule. Together they
//! show that some fastest schedule is a caterpillar with every bifurcation at
//! the root location, which [`fastest_caterpillar`] builds directly: items
//! sorted by root distance, the closest ones on the deepest leaves.

use std::fmt;

use crate::error::{Error, Result};
use crate::eval::schedule_delay;
use crate::instance::Instance;
use crate::schedule::{Schedule, VertexId};

/// Replaces the arcs `(x, y), (y, z)` around an out-degree-1 vertex `y` by a
/// new co-located vertex `y'` with arcs `(x, y'), (y', y), (y', z)`, so that
/// `y` becomes a leaf.
pub fn leafication(schedule: &Schedule, y: VertexId) -> Result<Schedule> {
    let vert = schedule.vertex(y).ok_or(Error::InvalidVertex(y.0))?;
    let fail = |reason: &str| Error::Leafication {
        vertex: y.0,
        reason: reason.to_string(),
    };
    if y == schedule.root() {
        return Err(fail("the root cannot be leafed"));
    }
    if vert.children.len() != 1 {
        return Err(fail(&format!("out-degree is {}, expected 1", vert.children.len())));
    }
    let parent = schedule.parents()[y.0].ok_or_else(|| fail("vertex has no parent"))?;
    let z = vert.children[0];
    let loc = vert.loc;

    let mut s = schedule.clone();
    let split = s.add_aux(loc);
    for slot in s.vertex_mut(parent).children.iter_mut() {
        if *slot == y {
            *slot = split;
        }
    }
    s.vertex_mut(y).children.clear();
    s.add_arc(split, y);
    s.add_arc(split, z);
    Ok(s)
}

/// Root-to-leaf path that always descends into the child with the most items
/// below it; ties go to the lowest vertex id.
pub fn heavy_path(schedule: &Schedule) -> Vec<VertexId> {
    let counts = schedule.subtree_item_counts();
    heavy_path_with(schedule, &counts)
}

fn heavy_child(schedule: &Schedule, counts: &[usize], v: VertexId) -> Option<VertexId> {
    schedule
        .children(v)
        .iter()
        .copied()
        .filter(|c| c.0 < counts.len())
        .min_by(|a, b| counts[b.0].cmp(&counts[a.0]).then(a.cmp(b)))
}

fn heavy_path_with(schedule: &Schedule, counts: &[usize]) -> Vec<VertexId> {
    let mut path = Vec::new();
    if schedule.vertex(schedule.root()).is_none() {
        return path;
    }
    let mut seen = vec![false; schedule.len()];
    let mut v = schedule.root();
    loop {
        if std::mem::replace(&mut seen[v.0], true) {
            break;
        }
        path.push(v);
        match heavy_child(schedule, counts, v) {
            Some(c) => v = c,
            None => break,
        }
    }
    path
}

/// Which flip precondition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipPrecondition {
    IsRoot,
    NotBifurcation,
    ParentNotOnHeavyPath,
    ParentNotBifurcation,
    OnHeavyPath,
    LocationMismatch,
}

impl fmt::Display for FlipPrecondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            FlipPrecondition::IsRoot => "x is the root",
            FlipPrecondition::NotBifurcation => "x does not have out-degree 2",
            FlipPrecondition::ParentNotOnHeavyPath => "the parent of x is not on the heavy path",
            FlipPrecondition::ParentNotBifurcation => "the parent of x does not have out-degree 2",
            FlipPrecondition::OnHeavyPath => "x is the heavy child of its parent",
            FlipPrecondition::LocationMismatch => "x is not at the location of its heavy sibling",
        };
        f.write_str(msg)
    }
}

/// Flip at `x`: with `w` the parent of `x` on the heavy path, `h` the heavy
/// child of `w`, and `y_l` the light child of `x`, replaces the arcs
/// `(w, h), (x, y_l)` by `(w, y_l), (x, h)`. Requires `x` to share the
/// location of `h`; after the flip the heavy path runs through `x`.
pub fn flip(schedule: &Schedule, x: VertexId) -> Result<Schedule> {
    let fail = |reason| Error::Flip { vertex: x.0, reason };
    let xv = schedule.vertex(x).ok_or(Error::InvalidVertex(x.0))?;
    if x == schedule.root() {
        return Err(fail(FlipPrecondition::IsRoot));
    }
    let counts = schedule.subtree_item_counts();
    let path = heavy_path_with(schedule, &counts);
    let w = schedule.parents()[x.0].ok_or(Error::InvalidVertex(x.0))?;
    let Some(pos) = path.iter().position(|&v| v == w) else {
        return Err(fail(FlipPrecondition::ParentNotOnHeavyPath));
    };
    if schedule.out_degree(w) != 2 {
        return Err(fail(FlipPrecondition::ParentNotBifurcation));
    }
    let h = match path.get(pos + 1) {
        Some(&h) if h != x => h,
        _ => return Err(fail(FlipPrecondition::OnHeavyPath)),
    };
    if xv.children.len() != 2 {
        return Err(fail(FlipPrecondition::NotBifurcation));
    }
    if schedule.vertices()[h.0].loc != xv.loc {
        return Err(fail(FlipPrecondition::LocationMismatch));
    }
    let y_h = heavy_child(schedule, &counts, x).expect("x has two children");
    let y_l = if xv.children[0] == y_h { xv.children[1] } else { xv.children[0] };

    let mut s = schedule.clone();
    for slot in s.vertex_mut(w).children.iter_mut() {
        if *slot == h {
            *slot = y_l;
        }
    }
    for slot in s.vertex_mut(x).children.iter_mut() {
        if *slot == y_l {
            *slot = h;
        }
    }
    Ok(s)
}

/// Item indices sorted by non-decreasing root distance, ties by item id.
pub fn items_by_root_distance(instance: &Instance) -> Vec<usize> {
    let dist: Vec<f64> = (0..instance.n()).map(|i| instance.root_dist(i)).collect();
    let mut order: Vec<usize> = (0..instance.n()).collect();
    order.sort_by(|&a, &b| {
        dist[a]
            .total_cmp(&dist[b])
            .then_with(|| instance.items()[a].id.cmp(&instance.items()[b].id))
    });
    order
}

/// The caterpillar with every bifurcation at the root location whose items
/// split off in the given order: `split_order[0]` leaves at the first
/// bifurcation, and the last two items share the deepest one (the very last
/// item is reached by the continuing tour).
pub fn root_caterpillar(instance: &Instance, split_order: &[usize]) -> Schedule {
    let root_loc = *instance.root();
    let mut s = Schedule::new(root_loc);
    let item = |s: &mut Schedule, i: usize| {
        let it = &instance.items()[i];
        s.add_item(it.id.clone(), it.loc)
    };
    let n = split_order.len();
    if n == 0 {
        return s;
    }
    if n == 1 {
        let p = item(&mut s, split_order[0]);
        s.add_arc(s.root(), p);
        return s;
    }
    let splits: Vec<VertexId> = (0..n - 1).map(|_| s.add_aux(root_loc)).collect();
    s.add_arc(s.root(), splits[0]);
    for (j, &b) in splits.iter().enumerate() {
        // continuing tour first, split-off leaf second
        match splits.get(j + 1) {
            Some(&next) => s.add_arc(b, next),
            None => {
                let last = item(&mut s, split_order[n - 1]);
                s.add_arc(b, last);
            }
        }
        let leaf = item(&mut s, split_order[j]);
        s.add_arc(b, leaf);
    }
    s
}

/// A fastest schedule: the root caterpillar with the farthest item split
/// off first and the two closest items on the deepest leaves.
pub fn fastest_caterpillar(instance: &Instance) -> Schedule {
    let mut order = items_by_root_distance(instance);
    order.reverse();
    root_caterpillar(instance, &order)
}

/// Minimum achievable delay of the instance.
pub fn min_delay(instance: &Instance) -> f64 {
    schedule_delay(instance, &fastest_caterpillar(instance))
}

/// Whether some schedule meets the deadline.
pub fn is_feasible(instance: &Instance) -> bool {
    min_delay(instance) <= instance.deadline()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::validate_schedule;
    use crate::instance::Item;
    use crate::metric::{Location, Metric};
    use crate::schedule::VertexKind;

    fn on_line(dists: &[f64], delta: f64, deadline: f64) -> Instance {
        let items = dists
            .iter()
            .enumerate()
            .map(|(i, &d)| Item::new(format!("p{}", i + 1), Location::Coord(d, 0.0)))
            .collect();
        Instance::new(Metric::Euclidean2D, Location::Coord(0.0, 0.0), items, delta, 0.0, deadline).unwrap()
    }

    #[test]
    fn leafication_of_chain() {
        let inst = on_line(&[1.0, 2.0], 1.0, 10.0);
        let mut s = Schedule::new(Location::Coord(0.0, 0.0));
        let p1 = s.add_item("p1", Location::Coord(1.0, 0.0));
        let p2 = s.add_item("p2", Location::Coord(2.0, 0.0));
        s.add_arc(s.root(), p1);
        s.add_arc(p1, p2);
        let out = leafication(&s, p1).unwrap();
        let split = out.children(out.root())[0];
        assert_eq!(out.vertex(split).unwrap().kind, VertexKind::Aux);
        assert_eq!(out.vertex(split).unwrap().loc, Location::Coord(1.0, 0.0));
        assert_eq!(out.children(split), &[p1, p2]);
        assert!(out.children(p1).is_empty());
        assert!(validate_schedule(&inst, &out).is_ok());
        assert!(schedule_delay(&inst, &out) <= schedule_delay(&inst, &s));
    }

    #[test]
    fn leafication_preconditions() {
        let mut s = Schedule::new(Location::Coord(0.0, 0.0));
        let p1 = s.add_item("p1", Location::Coord(1.0, 0.0));
        s.add_arc(s.root(), p1);
        assert!(matches!(leafication(&s, s.root()), Err(Error::Leafication { .. })));
        assert!(matches!(leafication(&s, p1), Err(Error::Leafication { .. })));
        assert!(matches!(leafication(&s, VertexId(5)), Err(Error::InvalidVertex(5))));
    }

    #[test]
    fn heavy_path_of_chain_is_everything() {
        let mut s = Schedule::new(Location::Coord(0.0, 0.0));
        let a = s.add_item("a", Location::Coord(1.0, 0.0));
        let b = s.add_item("b", Location::Coord(2.0, 0.0));
        s.add_arc(s.root(), a);
        s.add_arc(a, b);
        assert_eq!(heavy_path(&s), vec![s.root(), a, b]);
    }

    #[test]
    fn heavy_path_tie_goes_to_lower_id() {
        let inst = on_line(&[1.0, 1.0], 1.0, 10.0);
        let s = fastest_caterpillar(&inst);
        let path = heavy_path(&s);
        assert_eq!(path.len(), 3);
        let w = path[1];
        let lowest = *s.children(w).iter().min().unwrap();
        assert_eq!(path[2], lowest);
    }

    fn four_at_root() -> (Instance, Schedule) {
        // all four items at the root location, a balanced tree of aux vertices
        let origin = Location::Coord(0.0, 0.0);
        let items = (1..=4).map(|i| Item::new(format!("p{i}"), origin)).collect();
        let inst = Instance::new(Metric::Euclidean2D, origin, items, 1.0, 0.0, 100.0).unwrap();
        let mut s = Schedule::new(origin);
        let w = s.add_aux(origin);
        let h = s.add_aux(origin);
        let x = s.add_aux(origin);
        s.add_arc(s.root(), w);
        s.add_arc(w, h);
        s.add_arc(w, x);
        for (parent, name) in [(h, "p1"), (h, "p2"), (x, "p3"), (x, "p4")] {
            let p = s.add_item(name, origin);
            s.add_arc(parent, p);
        }
        (inst, s)
    }

    #[test]
    fn flip_on_balanced_colocated_tree() {
        let (inst, s) = four_at_root();
        let x = VertexId(3);
        let out = flip(&s, x).unwrap();
        assert!(validate_schedule(&inst, &out).is_ok());
        assert!(schedule_delay(&inst, &out) <= schedule_delay(&inst, &s));
        // w -> {x, y_l}, x -> {y_h, h}
        let w = VertexId(1);
        assert!(out.children(w).contains(&x));
        assert!(out.children(x).contains(&VertexId(2)));
        assert!(heavy_path(&out).contains(&x));
    }

    #[test]
    fn flip_preconditions_are_named() {
        let (_, s) = four_at_root();
        let err = |r: Result<Schedule>| match r {
            Err(Error::Flip { reason, .. }) => reason,
            other => panic!("expected flip error, got {other:?}"),
        };
        assert_eq!(err(flip(&s, s.root())), FlipPrecondition::IsRoot);
        assert_eq!(err(flip(&s, VertexId(2))), FlipPrecondition::OnHeavyPath);
        assert_eq!(err(flip(&s, VertexId(6))), FlipPrecondition::ParentNotOnHeavyPath);
        let mut moved = s.clone();
        moved.vertex_mut(VertexId(3)).loc = Location::Coord(1.0, 0.0);
        assert_eq!(err(flip(&moved, VertexId(3))), FlipPrecondition::LocationMismatch);
    }

    #[test]
    fn fastest_single_item() {
        let inst = on_line(&[5.0], 1.0, 6.0);
        let s = fastest_caterpillar(&inst);
        assert_eq!(s.len(), 2);
        assert_eq!(min_delay(&inst), 6.0);
        assert!(is_feasible(&inst));
        assert!(!is_feasible(&inst.with_deadline(5.9).unwrap()));
    }

    #[test]
    fn fastest_three_equidistant() {
        let inst = on_line(&[10.0, 10.0, 10.0], 1.0, 100.0);
        let s = fastest_caterpillar(&inst);
        assert!(validate_schedule(&inst, &s).is_ok());
        assert_eq!(min_delay(&inst), 13.0);
    }

    #[test]
    fn fastest_two_items_far_and_near() {
        let inst = on_line(&[1.0, 9.0], 1.0, 100.0);
        assert_eq!(min_delay(&inst), 11.0);
    }

    #[test]
    fn leaf_delays_follow_the_handover_profile() {
        let inst = on_line(&[0.0; 5], 2.0, 100.0);
        let s = fastest_caterpillar(&inst);
        let mut delays: Vec<f64> = crate::eval::item_delays(&inst, &s).into_iter().map(|(_, d)| d).collect();
        delays.sort_by(f64::total_cmp);
        assert_eq!(delays, vec![3.0, 4.0, 5.0, 6.0, 6.0]);
    }

    #[test]
    fn deadline_below_item_count_is_infeasible() {
        let inst = on_line(&[0.0, 0.0, 0.0, 0.0], 1.0, 3.0);
        assert!(!is_feasible(&inst));
        assert!(min_delay(&inst) >= 4.0);
    }
}

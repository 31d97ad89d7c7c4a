//! Vehicle merging: within each group, consecutive items are chained onto
//! one vehicle, `m = 1 + floor(eps * deadline / delta)` items per chain.

use std::collections::HashMap;

use crate::approx::split::{check_epsilon, Grouping};
use crate::approx::two_level::check_grouping;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::schedule::{Schedule, VertexId};
use crate::shortcut::shortcut;

/// Chain length `m`, saturating for huge ratios.
pub fn chain_length(instance: &Instance, epsilon: f64) -> u64 {
    let ratio = (epsilon * instance.deadline() / instance.delta()).floor();
    (ratio as u64).saturating_add(1)
}

/// Re-parents every item whose offset in its group is not a multiple of `m`
/// below its predecessor, then shortcuts the emptied split vertices.
pub fn merge_vehicles(instance: &Instance, s1: &Schedule, grouping: &Grouping, epsilon: f64) -> Result<Schedule> {
    check_epsilon(epsilon)?;
    check_grouping(instance, grouping)?;
    let m = chain_length(instance, epsilon);

    let mut vertex_of: HashMap<&str, VertexId> = HashMap::with_capacity(instance.n());
    for v in s1.ids() {
        if let Some(id) = s1.vertices()[v.0].kind.item_id() {
            if vertex_of.insert(id, v).is_some() {
                return Err(Error::GroupingMismatch(format!("item {id} appears twice in the schedule")));
            }
        }
    }
    let lookup = |i: usize| {
        let id = instance.items()[i].id.as_str();
        vertex_of
            .get(id)
            .copied()
            .ok_or_else(|| Error::GroupingMismatch(format!("item {id} is missing from the schedule")))
    };

    let mut s = s1.clone();
    let parent = s1.parents();
    for group in &grouping.groups {
        for (offset, pair) in group.items.windows(2).enumerate() {
            if (offset as u64 + 1).is_multiple_of(m) {
                continue;
            }
            let prev = lookup(pair[0])?;
            let v = lookup(pair[1])?;
            if !s.children(prev).is_empty() {
                return Err(Error::GroupingMismatch(format!(
                    "item vertex {prev} is not a leaf of the two-level schedule"
                )));
            }
            let p = parent[v.0].ok_or_else(|| Error::GroupingMismatch(format!("item vertex {v} has no parent")))?;
            s.vertex_mut(p).children.retain(|&c| c != v);
            s.add_arc(prev, v);
        }
    }
    shortcut(instance, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::split::Group;
    use crate::approx::two_level::build_two_level;
    use crate::eval::{schedule_cost, validate_schedule};
    use crate::instance::Item;
    use crate::metric::{Location, Metric};

    fn one_group(n: usize, delta: f64, deadline: f64) -> (Instance, Grouping) {
        let items = (0..n)
            .map(|i| Item::new(format!("p{}", i + 1), Location::Coord(10.0 + i as f64, 0.0)))
            .collect();
        let inst = Instance::new(Metric::Euclidean2D, Location::Coord(0.0, 0.0), items, delta, 0.0, deadline).unwrap();
        let g = Grouping {
            groups: vec![Group {
                items: (0..n).collect(),
                remoteness: 10.0 + (n - 1) as f64,
                path_length: (n - 1) as f64,
            }],
            epsilon: 1.0,
            farthest: n - 1,
            tour_length: 0.0,
            mst: 0.0,
        };
        (inst, g)
    }

    #[test]
    fn five_items_chains_of_two() {
        // eps * deadline / delta = 1.5, so m = 2
        let (inst, g) = one_group(5, 2.0, 3.0);
        assert_eq!(chain_length(&inst, 1.0), 2);
        let s1 = build_two_level(&inst, &g).unwrap();
        let s2 = merge_vehicles(&inst, &s1, &g, 1.0).unwrap();
        assert!(validate_schedule(&inst, &s2).is_ok(), "{:?}", validate_schedule(&inst, &s2));
        assert_eq!(schedule_cost(&inst, &s2).vehicle_count, 3);
        let chain = |a: &str, b: &str| {
            let va = s2.find_item(a).unwrap();
            s2.children(va) == [s2.find_item(b).unwrap()]
        };
        assert!(chain("p1", "p2"));
        assert!(chain("p3", "p4"));
        assert!(s2.children(s2.find_item("p5").unwrap()).is_empty());
    }

    #[test]
    fn large_m_gives_one_chain() {
        let (inst, g) = one_group(4, 1.0, 50.0);
        let s1 = build_two_level(&inst, &g).unwrap();
        let s2 = merge_vehicles(&inst, &s1, &g, 1.0).unwrap();
        assert!(validate_schedule(&inst, &s2).is_ok());
        assert_eq!(schedule_cost(&inst, &s2).vehicle_count, 1);
        assert_eq!(s2.len(), 5);
    }

    #[test]
    fn m_saturates() {
        let (inst, _) = one_group(2, 1.0, 1e300);
        assert_eq!(chain_length(&inst, 1e10), u64::MAX);
    }

    #[test]
    fn rejects_foreign_schedule() {
        let (inst, g) = one_group(3, 1.0, 50.0);
        let mut s = Schedule::new(*inst.root());
        let p = s.add_item("p1", inst.items()[0].loc);
        s.add_arc(s.root(), p);
        assert!(matches!(merge_vehicles(&inst, &s, &g, 1.0), Err(Error::GroupingMismatch(_))));
    }
}

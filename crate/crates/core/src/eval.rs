//! Exact evaluation of schedules: per-vertex delay, schedule delay, cost, and
//! structural validation.
//!
//! The delay of a vertex `y` is the travel length of the root-`y` path, plus
//! `delta` for every item on that path (including `y`), plus, for every
//! bifurcation `w` on the path, the item count of the smaller subtree below
//! `w`. The three terms are accumulated separately and combined once, so the
//! result depends only on the path, not on the order of evaluation.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::schedule::{Schedule, VertexId, VertexKind};

/// Travel cost, setup cost and vehicle count of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct CostBreakdown {
    pub travel: f64,
    pub setup: f64,
    pub total: f64,
    pub vehicle_count: usize,
}

/// The three delay terms along a root-to-vertex path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathTerms {
    pub travel: f64,
    pub deliveries: usize,
    pub handovers: usize,
}

impl PathTerms {
    pub fn delay(&self, delta: f64) -> f64 {
        self.travel + delta * self.deliveries as f64 + self.handovers as f64
    }
}

/// Path terms for every vertex reachable from the root; `None` elsewhere.
pub fn path_terms(instance: &Instance, schedule: &Schedule) -> Vec<Option<PathTerms>> {
    let counts = schedule.subtree_item_counts();
    let mut terms: Vec<Option<PathTerms>> = vec![None; schedule.len()];
    let order = schedule.preorder();
    let Some(&root) = order.first() else {
        return terms;
    };
    let handover = |v: VertexId| -> usize {
        let ch = schedule.children(v);
        if ch.len() >= 2 {
            ch.iter().map(|c| counts.get(c.0).copied().unwrap_or(0)).min().unwrap_or(0)
        } else {
            0
        }
    };
    let root_vertex = &schedule.vertices()[root.0];
    terms[root.0] = Some(PathTerms {
        travel: 0.0,
        deliveries: usize::from(root_vertex.kind.is_item()),
        handovers: handover(root),
    });
    for v in order {
        let Some(t) = terms[v.0] else { continue };
        let vert = &schedule.vertices()[v.0];
        for &c in &vert.children {
            let Some(child) = schedule.vertex(c) else { continue };
            if terms[c.0].is_some() {
                continue;
            }
            terms[c.0] = Some(PathTerms {
                travel: t.travel + instance.dist(&vert.loc, &child.loc),
                deliveries: t.deliveries + usize::from(child.kind.is_item()),
                handovers: t.handovers + handover(c),
            });
        }
    }
    terms
}

/// Delay at vertex `v`. The schedule is expected to be valid.
pub fn vertex_delay(instance: &Instance, schedule: &Schedule, v: VertexId) -> Result<f64> {
    if schedule.vertex(v).is_none() {
        return Err(Error::InvalidVertex(v.0));
    }
    path_terms(instance, schedule)[v.0]
        .map(|t| t.delay(instance.delta()))
        .ok_or_else(|| Error::InvalidSchedule(format!("vertex {v} is not reachable from the root")))
}

/// Delay of every reachable item vertex, in arena order.
pub fn item_delays(instance: &Instance, schedule: &Schedule) -> Vec<(VertexId, f64)> {
    let terms = path_terms(instance, schedule);
    schedule
        .ids()
        .filter(|v| schedule.vertices()[v.0].kind.is_item())
        .filter_map(|v| terms[v.0].map(|t| (v, t.delay(instance.delta()))))
        .collect()
}

/// Maximum delay over all items. The schedule is expected to be valid.
pub fn schedule_delay(instance: &Instance, schedule: &Schedule) -> f64 {
    item_delays(instance, schedule)
        .into_iter()
        .map(|(_, d)| d)
        .fold(0.0, f64::max)
}

/// Travel and setup cost. The schedule is expected to be valid.
pub fn schedule_cost(instance: &Instance, schedule: &Schedule) -> CostBreakdown {
    let mut travel = 0.0;
    let mut vehicle_count = 0;
    for v in schedule.vertices() {
        if v.children.is_empty() {
            vehicle_count += 1;
        }
        for c in &v.children {
            if let Some(child) = schedule.vertex(*c) {
                travel += instance.dist(&v.loc, &child.loc);
            }
        }
    }
    let setup = instance.sigma() * vehicle_count as f64;
    CostBreakdown {
        travel,
        setup,
        total: travel + setup,
        vehicle_count,
    }
}

/// One violated schedule invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MissingRoot,
    RootKind { vertex: VertexId },
    ExtraRoot { vertex: VertexId },
    RootLocation { vertex: VertexId },
    RootOutDegree { vertex: VertexId, degree: usize },
    InvalidChild { vertex: VertexId, child: usize },
    InvalidLocation { vertex: VertexId },
    MultipleParents { vertex: VertexId, parents: usize },
    Unreachable { vertex: VertexId },
    RootHasParent,
    UnknownItem { vertex: VertexId, item_id: String },
    DuplicateItem { vertex: VertexId, item_id: String },
    ItemLocation { vertex: VertexId, item_id: String },
    ItemNotCovered { item_id: String },
    ItemOutDegree { vertex: VertexId, degree: usize },
    AuxOutDegree { vertex: VertexId, degree: usize },
    LeafCount { leaves: usize, bifurcations: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            MissingRoot => write!(f, "root vertex does not exist"),
            RootKind { vertex } => write!(f, "root vertex {vertex} is not of kind root"),
            ExtraRoot { vertex } => write!(f, "vertex {vertex} is a second root vertex"),
            RootLocation { vertex } => write!(f, "root vertex {vertex} is not at the instance root location"),
            RootOutDegree { vertex, degree } => write!(f, "root out-degree ≠ 1 at vertex {vertex} (found {degree})"),
            InvalidChild { vertex, child } => write!(f, "vertex {vertex} has invalid child {child}"),
            InvalidLocation { vertex } => write!(f, "vertex {vertex} has a location outside the metric"),
            MultipleParents { vertex, parents } => write!(f, "vertex {vertex} has {parents} parents"),
            Unreachable { vertex } => write!(f, "vertex {vertex} is unreachable from the root"),
            RootHasParent => write!(f, "root vertex has an incoming arc"),
            UnknownItem { vertex, item_id } => write!(f, "vertex {vertex} carries unknown item {item_id}"),
            DuplicateItem { vertex, item_id } => write!(f, "item {item_id} appears again at vertex {vertex}"),
            ItemLocation { vertex, item_id } => {
                write!(f, "item {item_id} at vertex {vertex} is not at its destination")
            }
            ItemNotCovered { item_id } => write!(f, "item not covered: {item_id}"),
            ItemOutDegree { vertex, degree } => write!(f, "item out-degree > 1 at vertex {vertex} (found {degree})"),
            AuxOutDegree { vertex, degree } => write!(f, "aux out-degree ≠ 2 at vertex {vertex} (found {degree})"),
            LeafCount { leaves, bifurcations } => {
                write!(f, "leaf count {leaves} ≠ bifurcation count {bifurcations} + 1")
            }
        }
    }
}

impl Serialize for Violation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.ok
    }
}

/// Reports every violated invariant of a proper schedule for `instance`.
pub fn validate_schedule(instance: &Instance, schedule: &Schedule) -> ValidationReport {
    let mut out = Vec::new();
    let n = schedule.len();
    let root = schedule.root();
    if root.0 >= n {
        out.push(Violation::MissingRoot);
    }
    let mut indegree = vec![0usize; n];
    let mut seen: HashMap<&str, VertexId> = HashMap::new();
    let (mut leaves, mut bifurcations) = (0usize, 0usize);

    for (i, vert) in schedule.vertices().iter().enumerate() {
        let v = VertexId(i);
        for c in &vert.children {
            match indegree.get_mut(c.0) {
                Some(d) => *d += 1,
                None => out.push(Violation::InvalidChild { vertex: v, child: c.0 }),
            }
        }
        if instance.metric().check_location(&vert.loc).is_err() {
            out.push(Violation::InvalidLocation { vertex: v });
        }
        let degree = vert.children.len();
        match degree {
            0 => leaves += 1,
            2 => bifurcations += 1,
            _ => {}
        }
        match &vert.kind {
            VertexKind::Root if v == root => {
                if vert.loc != *instance.root() {
                    out.push(Violation::RootLocation { vertex: v });
                }
                if degree != 1 {
                    out.push(Violation::RootOutDegree { vertex: v, degree });
                }
            }
            VertexKind::Root => out.push(Violation::ExtraRoot { vertex: v }),
            VertexKind::Item(id) => {
                match instance.item_index(id) {
                    None => out.push(Violation::UnknownItem {
                        vertex: v,
                        item_id: id.clone(),
                    }),
                    Some(idx) => {
                        if seen.insert(id.as_str(), v).is_some() {
                            out.push(Violation::DuplicateItem {
                                vertex: v,
                                item_id: id.clone(),
                            });
                        }
                        if vert.loc != instance.items()[idx].loc {
                            out.push(Violation::ItemLocation {
                                vertex: v,
                                item_id: id.clone(),
                            });
                        }
                    }
                }
                if degree > 1 {
                    out.push(Violation::ItemOutDegree { vertex: v, degree });
                }
            }
            VertexKind::Aux => {
                if degree != 2 {
                    out.push(Violation::AuxOutDegree { vertex: v, degree });
                }
            }
        }
    }
    if let Some(rv) = schedule.vertex(root) {
        if rv.kind != VertexKind::Root {
            out.push(Violation::RootKind { vertex: root });
        }
        if indegree[root.0] > 0 {
            out.push(Violation::RootHasParent);
        }
    }
    for (i, &d) in indegree.iter().enumerate() {
        if i != root.0 && d > 1 {
            out.push(Violation::MultipleParents {
                vertex: VertexId(i),
                parents: d,
            });
        }
    }
    let mut reachable = vec![false; n];
    for v in schedule.preorder() {
        reachable[v.0] = true;
    }
    for (i, r) in reachable.iter().enumerate() {
        if !r {
            out.push(Violation::Unreachable { vertex: VertexId(i) });
        }
    }
    for item in instance.items() {
        if !seen.contains_key(item.id.as_str()) {
            out.push(Violation::ItemNotCovered { item_id: item.id.clone() });
        }
    }
    if leaves != bifurcations + 1 {
        out.push(Violation::LeafCount { leaves, bifurcations });
    }
    ValidationReport {
        ok: out.is_empty(),
        violations: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Item;
    use crate::metric::{Location, Metric};

    fn at(x: f64) -> Location {
        Location::Coord(x, 0.0)
    }

    fn instance(dists: &[f64], delta: f64, sigma: f64) -> Instance {
        let items = dists
            .iter()
            .enumerate()
            .map(|(i, &d)| Item::new(format!("p{}", i + 1), at(d)))
            .collect();
        Instance::new(Metric::Euclidean2D, at(0.0), items, delta, sigma, 100.0).unwrap()
    }

    #[test]
    fn single_item_schedule() {
        let inst = instance(&[5.0], 1.0, 0.0);
        let mut s = Schedule::new(at(0.0));
        let p = s.add_item("p1", at(5.0));
        s.add_arc(s.root(), p);
        assert!(validate_schedule(&inst, &s).is_ok());
        assert_eq!(schedule_delay(&inst, &s), 6.0);
        assert_eq!(vertex_delay(&inst, &s, s.root()).unwrap(), 0.0);
        let cost = schedule_cost(&inst, &s);
        assert_eq!((cost.travel, cost.vehicle_count, cost.total), (5.0, 1, 5.0));
    }

    #[test]
    fn two_colocated_items_both_shapes() {
        // enumerate the two caterpillars on two items at the root location
        let inst = instance(&[0.0, 0.0], 1.0, 0.0);
        let mut split = Schedule::new(at(0.0));
        let w = split.add_aux(at(0.0));
        let a = split.add_item("p1", at(0.0));
        let b = split.add_item("p2", at(0.0));
        split.add_arc(split.root(), w);
        split.add_arc(w, a);
        split.add_arc(w, b);
        let mut chain = Schedule::new(at(0.0));
        let a = chain.add_item("p1", at(0.0));
        let b = chain.add_item("p2", at(0.0));
        chain.add_arc(chain.root(), a);
        chain.add_arc(a, b);
        assert!(validate_schedule(&inst, &split).is_ok());
        assert!(validate_schedule(&inst, &chain).is_ok());
        assert_eq!(schedule_delay(&inst, &split), 2.0);
        assert_eq!(schedule_delay(&inst, &chain), 2.0);
    }

    #[test]
    fn star_of_three_items() {
        let inst = Instance::new(
            Metric::Euclidean2D,
            at(0.0),
            vec![
                Item::new("a", Location::Coord(2.0, 0.0)),
                Item::new("b", Location::Coord(0.0, 2.0)),
                Item::new("c", Location::Coord(-2.0, 0.0)),
            ],
            1.0,
            1.0,
            100.0,
        )
        .unwrap();
        let mut s = Schedule::new(at(0.0));
        let w1 = s.add_aux(at(0.0));
        let w2 = s.add_aux(at(0.0));
        s.add_arc(s.root(), w1);
        s.add_arc(w1, w2);
        let c = s.add_item("c", Location::Coord(-2.0, 0.0));
        s.add_arc(w1, c);
        let a = s.add_item("a", Location::Coord(2.0, 0.0));
        let b = s.add_item("b", Location::Coord(0.0, 2.0));
        s.add_arc(w2, a);
        s.add_arc(w2, b);
        assert!(validate_schedule(&inst, &s).is_ok());
        let cost = schedule_cost(&inst, &s);
        assert!(cost.travel >= 6.0);
        assert_eq!(cost.vehicle_count, 3);
        assert_eq!(cost.setup, 3.0);
        assert_eq!(cost.total, cost.travel + cost.setup);
    }

    #[test]
    fn invalid_vertex_ref() {
        let inst = instance(&[1.0], 1.0, 0.0);
        let s = Schedule::new(at(0.0));
        assert!(matches!(vertex_delay(&inst, &s, VertexId(7)), Err(Error::InvalidVertex(7))));
    }

    #[test]
    fn reports_constructed_defects() {
        let inst = instance(&[1.0, 2.0], 1.0, 0.0);
        let mut s = Schedule::new(at(0.0));
        let w = s.add_aux(at(0.0));
        let a = s.add_item("p1", at(1.0));
        s.add_arc(s.root(), w);
        s.add_arc(w, a);
        let report = validate_schedule(&inst, &s);
        assert!(!report.is_ok());
        let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        assert!(msgs.iter().any(|m| m == "item not covered: p2"), "{msgs:?}");
        assert!(msgs.iter().any(|m| m.starts_with("aux out-degree ≠ 2")), "{msgs:?}");
    }

    #[test]
    fn reports_structural_defects() {
        let inst = instance(&[1.0], 1.0, 0.0);
        let mut s = Schedule::new(at(0.0));
        let a = s.add_item("p1", at(1.0));
        let x = s.add_item("zz", at(3.0));
        s.add_arc(s.root(), a);
        s.add_arc(a, s.root());
        let _ = x;
        let v = validate_schedule(&inst, &s).violations;
        assert!(v.contains(&Violation::RootHasParent));
        assert!(v.contains(&Violation::Unreachable { vertex: VertexId(2) }));
        assert!(v.iter().any(|x| matches!(x, Violation::UnknownItem { .. })));
    }
}

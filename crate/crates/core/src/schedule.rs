//! Schedules: rooted arborescences whose vertices carry a kind (root, item or
//! auxiliary hand-over point), a location, and an ordered child list.
//!
//! By convention the first child continues the current tour and the second
//! child is the split-off subtour. Evaluation does not depend on the order.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::metric::Location;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexKind {
    Root,
    Item(String),
    Aux,
}

impl VertexKind {
    pub fn is_item(&self) -> bool {
        matches!(self, VertexKind::Item(_))
    }

    pub fn item_id(&self) -> Option<&str> {
        match self {
            VertexKind::Item(id) => Some(id),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub kind: VertexKind,
    pub loc: Location,
    pub children: Vec<VertexId>,
}

/// A schedule as an arena of vertices. The arena may hold structures that are
/// not proper arborescences; [`crate::eval::validate_schedule`] reports them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleJson", into = "ScheduleJson")]
pub struct Schedule {
    vertices: Vec<Vertex>,
    root: VertexId,
}

impl Schedule {
    /// A schedule containing only a root vertex at `root_loc`.
    pub fn new(root_loc: Location) -> Self {
        Self {
            vertices: vec![Vertex {
                kind: VertexKind::Root,
                loc: root_loc,
                children: Vec::new(),
            }],
            root: VertexId(0),
        }
    }

    /// Assembles a schedule from raw parts without structural checks.
    pub fn from_parts(vertices: Vec<Vertex>, root: VertexId) -> Self {
        Self { vertices, root }
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> Option<&Vertex> {
        self.vertices.get(v.0)
    }

    pub(crate) fn vertex_mut(&mut self, v: VertexId) -> &mut Vertex {
        &mut self.vertices[v.0]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        self.vertices.get(v.0).map_or(&[], |x| &x.children)
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.children(v).len()
    }

    pub fn ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn add_vertex(&mut self, kind: VertexKind, loc: Location) -> VertexId {
        self.vertices.push(Vertex {
            kind,
            loc,
            children: Vec::new(),
        });
        VertexId(self.vertices.len() - 1)
    }

    pub fn add_item(&mut self, id: impl Into<String>, loc: Location) -> VertexId {
        self.add_vertex(VertexKind::Item(id.into()), loc)
    }

    pub fn add_aux(&mut self, loc: Location) -> VertexId {
        self.add_vertex(VertexKind::Aux, loc)
    }

    /// Appends `child` to the child list of `parent`.
    pub fn add_arc(&mut self, parent: VertexId, child: VertexId) {
        self.vertices[parent.0].children.push(child);
    }

    /// Item vertex carrying `item_id`, if any.
    pub fn find_item(&self, item_id: &str) -> Option<VertexId> {
        self.vertices
            .iter()
            .position(|v| v.kind.item_id() == Some(item_id))
            .map(VertexId)
    }

    /// Parent of every vertex, following child lists. Out-of-range child
    /// references are ignored; with multiple parents the last one wins.
    pub fn parents(&self) -> Vec<Option<VertexId>> {
        let mut parent = vec![None; self.vertices.len()];
        for (u, vert) in self.vertices.iter().enumerate() {
            for c in &vert.children {
                if let Some(slot) = parent.get_mut(c.0) {
                    *slot = Some(VertexId(u));
                }
            }
        }
        parent
    }

    /// Vertices reachable from the root in depth-first preorder, children in
    /// list order. Each vertex is visited at most once and invalid child
    /// references are skipped, so this terminates on any arena.
    pub fn preorder(&self) -> Vec<VertexId> {
        let mut order = Vec::with_capacity(self.vertices.len());
        if self.root.0 >= self.vertices.len() {
            return order;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v.0], true) {
                continue;
            }
            order.push(v);
            for c in self.vertices[v.0].children.iter().rev() {
                if c.0 < self.vertices.len() && !seen[c.0] {
                    stack.push(*c);
                }
            }
        }
        order
    }

    /// Number of item vertices in the subtree of every vertex reachable from
    /// the root (zero for unreachable vertices).
    pub fn subtree_item_counts(&self) -> Vec<usize> {
        let mut count = vec![0usize; self.vertices.len()];
        for v in self.preorder().into_iter().rev() {
            let vert = &self.vertices[v.0];
            let below: usize = vert
                .children
                .iter()
                .filter_map(|c| count.get(c.0).copied())
                .sum();
            count[v.0] = below + usize::from(vert.kind.is_item());
        }
        count
    }

    /// Checks that the arena is an arborescence rooted at `root`: every child
    /// reference is valid, the root has no parent, every other vertex has
    /// exactly one parent, and all vertices are reachable.
    pub fn check_arborescence(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.root.0 >= n {
            return Err(Error::NotArborescence(format!("root {} does not exist", self.root)));
        }
        let mut indegree = vec![0usize; n];
        for (u, vert) in self.vertices.iter().enumerate() {
            for c in &vert.children {
                if c.0 >= n {
                    return Err(Error::NotArborescence(format!("vertex {u} has invalid child {c}")));
                }
                indegree[c.0] += 1;
            }
        }
        if indegree[self.root.0] != 0 {
            return Err(Error::NotArborescence("the root has an incoming arc".into()));
        }
        if let Some(v) = (0..n).find(|&v| v != self.root.0 && indegree[v] != 1) {
            return Err(Error::NotArborescence(format!(
                "vertex {v} has {} incoming arcs",
                indegree[v]
            )));
        }
        if self.preorder().len() != n {
            return Err(Error::NotArborescence("some vertices are unreachable from the root".into()));
        }
        Ok(())
    }

    /// If the root has out-degree other than 1 and at least one child, moves
    /// its children below a new co-located auxiliary vertex. Neither delay nor
    /// cost changes.
    pub fn normalize_root(&mut self) {
        let root = self.root;
        if self.out_degree(root) < 2 {
            return;
        }
        let loc = self.vertices[root.0].loc;
        let children = std::mem::take(&mut self.vertices[root.0].children);
        let aux = self.add_aux(loc);
        self.vertices[aux.0].children = children;
        self.vertices[root.0].children.push(aux);
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialization is infallible")
    }

    /// Graphviz rendering: one node per vertex labelled with kind and
    /// location, arcs labelled with their length.
    pub fn to_dot(&self, instance: &Instance) -> String {
        let metric = instance.metric();
        let mut out = String::from("digraph schedule {\n  node [shape=box];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let kind = match &v.kind {
                VertexKind::Root => "root".to_string(),
                VertexKind::Item(id) => format!("item {id}"),
                VertexKind::Aux => "aux".to_string(),
            };
            let label = format!("{kind} @ {}", metric.label(&v.loc));
            let _ = writeln!(out, "  v{i} [label=\"{}\"];", label.replace('"', "\\\""));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            for c in &v.children {
                let d = self.vertices.get(c.0).map_or(f64::NAN, |w| metric.dist(&v.loc, &w.loc));
                let _ = writeln!(out, "  v{i} -> v{} [label=\"{d}\"];", c.0);
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindJson {
    Root,
    Item,
    Aux,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexJson {
    id: usize,
    kind: KindJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    item_id: Option<String>,
    loc: Location,
    children: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleJson {
    vertices: Vec<VertexJson>,
    root: usize,
}

impl TryFrom<ScheduleJson> for Schedule {
    type Error = Error;

    fn try_from(json: ScheduleJson) -> Result<Self> {
        let n = json.vertices.len();
        let mut slots: Vec<Option<Vertex>> = vec![None; n];
        for v in json.vertices {
            if v.id >= n {
                return Err(Error::InvalidSchedule(format!(
                    "vertex id {} out of range (ids must be 0..{n})",
                    v.id
                )));
            }
            let kind = match (v.kind, v.item_id) {
                (KindJson::Root, None) => VertexKind::Root,
                (KindJson::Aux, None) => VertexKind::Aux,
                (KindJson::Item, Some(id)) => VertexKind::Item(id),
                (KindJson::Item, None) => {
                    return Err(Error::InvalidSchedule(format!("item vertex {} has no item_id", v.id)))
                }
                (_, Some(_)) => {
                    return Err(Error::InvalidSchedule(format!(
                        "non-item vertex {} carries an item_id",
                        v.id
                    )))
                }
            };
            if slots[v.id].is_some() {
                return Err(Error::InvalidSchedule(format!("duplicate vertex id {}", v.id)));
            }
            slots[v.id] = Some(Vertex {
                kind,
                loc: v.loc,
                children: v.children.into_iter().map(VertexId).collect(),
            });
        }
        let vertices = slots.into_iter().map(|v| v.expect("ids are a permutation")).collect();
        Ok(Schedule {
            vertices,
            root: VertexId(json.root),
        })
    }
}

impl From<Schedule> for ScheduleJson {
    fn from(s: Schedule) -> Self {
        let vertices = s
            .vertices
            .into_iter()
            .enumerate()
            .map(|(id, v)| {
                let (kind, item_id) = match v.kind {
                    VertexKind::Root => (KindJson::Root, None),
                    VertexKind::Item(i) => (KindJson::Item, Some(i)),
                    VertexKind::Aux => (KindJson::Aux, None),
                };
                VertexJson {
                    id,
                    kind,
                    item_id,
                    loc: v.loc,
                    children: v.children.into_iter().map(|c| c.0).collect(),
                }
            })
            .collect();
        ScheduleJson {
            vertices,
            root: s.root.0,
        }
    }
}

//! Shortcutting: turns an arborescence that covers the items into a proper
//! one by splicing out non-item vertices of out-degree 1 and deleting
//! non-item leaves. Under the triangle inequality neither travel nor delay
//! increases.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::schedule::{Schedule, Vertex, VertexId, VertexKind};

/// Shortcuts `schedule` into a proper arborescence. Surviving vertices keep
/// their relative arena order, so a proper input is returned unchanged.
pub fn shortcut(_instance: &Instance, schedule: &Schedule) -> Result<Schedule> {
    schedule.check_arborescence()?;
    let mut s = schedule.clone();
    s.normalize_root();
    let root = s.root();
    let parent = s.parents();
    let mut removed = vec![false; s.len()];

    // children are settled before their parents in reverse preorder
    for v in s.preorder().into_iter().rev() {
        if v == root || s.vertices()[v.0].kind.is_item() {
            continue;
        }
        // splices only re-parent vertices that were already processed
        let p = parent[v.0].expect("non-root vertex of an arborescence has a parent");
        match s.out_degree(v) {
            0 => {
                s.vertex_mut(p).children.retain(|&c| c != v);
                removed[v.0] = true;
            }
            1 => {
                let child = s.children(v)[0];
                for slot in s.vertex_mut(p).children.iter_mut() {
                    if *slot == v {
                        *slot = child;
                    }
                }
                s.vertex_mut(v).children.clear();
                removed[v.0] = true;
            }
            _ => {}
        }
    }

    for (i, vert) in s.vertices().iter().enumerate() {
        if removed[i] {
            continue;
        }
        let degree = vert.children.len();
        let bad = match vert.kind {
            VertexKind::Item(_) => degree > 1,
            VertexKind::Aux => degree > 2,
            VertexKind::Root => false,
        };
        if bad {
            return Err(Error::InvalidSchedule(format!(
                "vertex {i} has out-degree {degree}, which shortcutting cannot repair"
            )));
        }
    }
    Ok(compact(&s, &removed))
}

/// Drops removed vertices and renumbers the rest in arena order.
fn compact(s: &Schedule, removed: &[bool]) -> Schedule {
    let mut new_id = vec![usize::MAX; s.len()];
    let mut next = 0;
    for (i, &r) in removed.iter().enumerate() {
        if !r {
            new_id[i] = next;
            next += 1;
        }
    }
    let vertices = s
        .vertices()
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed[*i])
        .map(|(_, v)| Vertex {
            kind: v.kind.clone(),
            loc: v.loc,
            children: v.children.iter().map(|c| VertexId(new_id[c.0])).collect(),
        })
        .collect();
    Schedule::from_parts(vertices, VertexId(new_id[s.root().0]))
}

use super::{Graph, NodeId};

/// All simple paths from `source` to `target`, found by depth-first search
/// visiting neighbors in ascending id order. Each path lists its nodes from
/// `source` to `target`. Returns nothing if either endpoint is missing or
/// they coincide.
pub fn simple_paths(g: &Graph, source: NodeId, target: NodeId) -> Vec<Vec<NodeId>> {
    let mut out = Vec::new();
    if source == target || !g.contains_node(source) || !g.contains_node(target) {
        return out;
    }
    let mut path = vec![source];
    extend(g, target, &mut path, &mut out);
    out
}

fn extend(g: &Graph, target: NodeId, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
    let last = *path.last().expect("path starts at the source");
    for v in g.neighbors(last) {
        if v == target {
            let mut found = path.clone();
            found.push(v);
            out.push(found);
        } else if !path.contains(&v) {
            path.push(v);
            extend(g, target, path, out);
            path.pop();
        }
    }
}

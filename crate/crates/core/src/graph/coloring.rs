//! Proper edge coloring with at most `Δ + 1` colors (Misra–Gries).
//!
//! Two-qubit cost gates commute, so a proper edge coloring of the interaction
//! graph is a schedule: each color class is one layer of disjoint gates.

use super::{Graph, NodeId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    /// Color of each edge, indexed by edge rank.
    pub color_of: Vec<usize>,
    pub num_colors: usize,
}

impl EdgeColoring {
    /// Every edge colored with a color below `num_colors`, and no two edges
    /// sharing a node have the same color.
    pub fn is_proper(&self, g: &Graph) -> bool {
        if self.color_of.len() != g.edge_count() {
            return false;
        }
        if self.color_of.iter().any(|&c| c >= self.num_colors) {
            return false;
        }
        g.nodes().iter().all(|&u| {
            let mut seen = vec![false; self.num_colors];
            g.incident_edges(u).iter().all(|&r| {
                let c = self.color_of[r];
                !std::mem::replace(&mut seen[c], true)
            })
        })
    }

    /// Edge ranks grouped by color.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_colors];
        for (r, &c) in self.color_of.iter().enumerate() {
            out[c].push(r);
        }
        out
    }
}

struct MisraGries<'a> {
    g: &'a Graph,
    palette: usize,
    color: Vec<Option<usize>>,
    // node position -> color -> edge rank holding that color at the node
    at: Vec<Vec<Option<usize>>>,
    pos: std::collections::HashMap<NodeId, usize>,
}

impl<'a> MisraGries<'a> {
    fn new(g: &'a Graph) -> Self {
        let palette = g.max_degree() + 1;
        let pos = g.nodes().iter().enumerate().map(|(i, &u)| (u, i)).collect();
        MisraGries {
            g,
            palette,
            color: vec![None; g.edge_count()],
            at: vec![vec![None; palette]; g.node_count()],
            pos,
        }
    }

    fn is_free(&self, u: NodeId, c: usize) -> bool {
        self.at[self.pos[&u]][c].is_none()
    }

    fn free_color(&self, u: NodeId) -> usize {
        (0..self.palette)
            .find(|&c| self.is_free(u, c))
            .expect("a node of degree <= Δ always has a free color among Δ+1")
    }

    fn edge_at(&self, u: NodeId, c: usize) -> Option<usize> {
        self.at[self.pos[&u]][c]
    }

    // Applies a batch of recolorings atomically: clear all, then assign.
    fn recolor(&mut self, updates: &[(usize, usize)]) {
        for &(r, _) in updates {
            if let Some(old) = self.color[r].take() {
                let e = self.g.edges()[r];
                self.at[self.pos[&e.0]][old] = None;
                self.at[self.pos[&e.1]][old] = None;
            }
        }
        for &(r, c) in updates {
            let e = self.g.edges()[r];
            self.color[r] = Some(c);
            self.at[self.pos[&e.0]][c] = Some(r);
            self.at[self.pos[&e.1]][c] = Some(r);
        }
    }

    // Maximal fan at `u` starting with the uncolored edge to `v`: a sequence of
    // distinct neighbors where the color of (u, f[i+1]) is free on f[i].
    fn maximal_fan(&self, u: NodeId, v: NodeId) -> Vec<NodeId> {
        let mut fan = vec![v];
        let mut rest: Vec<NodeId> = self.g.neighbors(u).filter(|&w| w != v).collect();
        loop {
            let last = *fan.last().unwrap();
            let next = rest.iter().position(|&w| {
                let r = self.g.edge_rank(u, w).unwrap();
                matches!(self.color[r], Some(c) if self.is_free(last, c))
            });
            match next {
                Some(i) => fan.push(rest.remove(i)),
                None => return fan,
            }
        }
    }

    fn run(mut self) -> EdgeColoring {
        for rank in 0..self.g.edge_count() {
            let e = self.g.edges()[rank];
            let (u, v) = (e.0, e.1);
            let fan = self.maximal_fan(u, v);
            let c = self.free_color(u);
            let d = self.free_color(*fan.last().unwrap());

            // Invert the path from u alternating d, c, d, ...
            if c != d {
                let mut updates = Vec::new();
                let mut node = u;
                let mut want = d;
                while let Some(r) = self.edge_at(node, want) {
                    let flipped = if want == c { d } else { c };
                    updates.push((r, flipped));
                    node = self.g.edges()[r].other(node).unwrap();
                    want = flipped;
                }
                self.recolor(&updates);
            }

            let w = fan
                .iter()
                .position(|&f| self.is_free(f, d))
                .expect("some fan vertex has d free after inversion");
            let mut updates = Vec::with_capacity(w + 1);
            for i in 0..w {
                let next = self.g.edge_rank(u, fan[i + 1]).unwrap();
                let cur = self.g.edge_rank(u, fan[i]).unwrap();
                updates.push((cur, self.color[next].unwrap()));
            }
            updates.push((self.g.edge_rank(u, fan[w]).unwrap(), d));
            self.recolor(&updates);
        }

        let color_of: Vec<usize> = self.color.into_iter().map(Option::unwrap).collect();
        compact(color_of)
    }
}

// Renumbers colors to 0..k in order of first use so num_colors counts only
// colors that appear.
fn compact(color_of: Vec<usize>) -> EdgeColoring {
    let mut map = std::collections::HashMap::new();
    let color_of: Vec<usize> = color_of
        .into_iter()
        .map(|c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect();
    EdgeColoring {
        num_colors: map.len(),
        color_of,
    }
}

/// Colors the edges of `g` with at most `Δ(g) + 1` colors.
pub fn edge_color(g: &Graph) -> EdgeColoring {
    MisraGries::new(g).run()
}

/// Misra–Gries followed by a bounded backtracking search for a `Δ(g)`-coloring.
/// `budget` caps the number of search steps; on exhaustion the Misra–Gries
/// result is returned unchanged.
pub fn edge_color_reduced(g: &Graph, budget: usize) -> EdgeColoring {
    let base = edge_color(g);
    let delta = g.max_degree();
    if base.num_colors <= delta {
        return base;
    }
    match exact_coloring(g, delta, budget) {
        Some(color_of) => compact(color_of),
        None => base,
    }
}

// Edges are visited in BFS order over the line graph so neighbouring edges are
// assigned close together and conflicts surface early.
fn exact_coloring(g: &Graph, k: usize, budget: usize) -> Option<Vec<usize>> {
    let m = g.edge_count();
    let adj: Vec<Vec<usize>> = (0..m)
        .map(|r| {
            let e = g.edges()[r];
            let mut a: Vec<usize> = g
                .incident_edges(e.0)
                .iter()
                .chain(g.incident_edges(e.1))
                .copied()
                .filter(|&q| q != r)
                .collect();
            a.sort_unstable();
            a.dedup();
            a
        })
        .collect();
    let mut order = Vec::with_capacity(m);
    let mut seen = vec![false; m];
    for start in 0..m {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(r) = queue.pop_front() {
            order.push(r);
            for &q in &adj[r] {
                if !std::mem::replace(&mut seen[q], true) {
                    queue.push_back(q);
                }
            }
        }
    }

    let mut color: Vec<Option<usize>> = vec![None; m];
    let mut steps = 0usize;
    fn go(
        i: usize,
        order: &[usize],
        adj: &[Vec<usize>],
        k: usize,
        color: &mut [Option<usize>],
        steps: &mut usize,
        budget: usize,
    ) -> Option<bool> {
        if i == order.len() {
            return Some(true);
        }
        *steps += 1;
        if *steps > budget {
            return None;
        }
        let r = order[i];
        // The first edge's color is arbitrary.
        let limit = if i == 0 { 1 } else { k };
        for c in 0..limit {
            if adj[r].iter().any(|&q| color[q] == Some(c)) {
                continue;
            }
            color[r] = Some(c);
            match go(i + 1, order, adj, k, color, steps, budget)? {
                true => return Some(true),
                false => color[r] = None,
            }
        }
        Some(false)
    }
    match go(0, &order, &adj, k, &mut color, &mut steps, budget) {
        Some(true) => Some(color.into_iter().map(Option::unwrap).collect()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{middle_graph, random_connected_graph, Topology};
    use proptest::prelude::*;

    // Exhaustive backtracking: does a proper coloring with k colors exist?
    fn colorable_with(g: &Graph, k: usize) -> bool {
        fn go(g: &Graph, k: usize, r: usize, colors: &mut Vec<usize>) -> bool {
            if r == g.edge_count() {
                return true;
            }
            let e = g.edges()[r];
            for c in 0..k {
                let clash = (0..r).any(|q| colors[q] == c && {
                    let f = g.edges()[q];
                    f.touches(e.0) || f.touches(e.1)
                });
                if !clash {
                    colors.push(c);
                    if go(g, k, r + 1, colors) {
                        return true;
                    }
                    colors.pop();
                }
            }
            false
        }
        go(g, k, 0, &mut Vec::new())
    }

    #[test]
    fn single_edge_uses_one_color() {
        let g = Graph::new(0..2, [(0, 1)]).unwrap();
        let col = edge_color(&g);
        assert_eq!(col.num_colors, 1);
        assert!(col.is_proper(&g));
    }

    #[test]
    fn triangle_needs_three() {
        let g = Topology::Complete { nodes: 3 }.generate().unwrap();
        let col = edge_color(&g);
        assert_eq!(col.num_colors, 3);
        assert!(col.is_proper(&g));
        assert!(!colorable_with(&g, 2));
    }

    #[test]
    fn middle_graph_of_path() {
        let g = Graph::new(0..3, [(0, 1), (1, 2)]).unwrap();
        let m = middle_graph(&g);
        let col = edge_color(&m);
        assert!(col.is_proper(&m));
        assert!(col.num_colors <= 4);
        assert!(colorable_with(&m, 3));
        assert!(!colorable_with(&m, 2));
    }

    #[test]
    fn improper_colorings_are_detected() {
        let g = Graph::new(0..3, [(0, 1), (1, 2)]).unwrap();
        let bad = EdgeColoring {
            color_of: vec![0, 0],
            num_colors: 1,
        };
        assert!(!bad.is_proper(&g));
    }

    #[test]
    fn complete_graphs_stay_within_vizing() {
        for n in 2..=9 {
            let g = Topology::Complete { nodes: n }.generate().unwrap();
            let col = edge_color(&g);
            assert!(col.is_proper(&g));
            assert!(col.num_colors <= g.max_degree() + 1, "K{n}");
        }
    }

    #[test]
    fn reduction_reaches_delta_on_even_cycle() {
        let g = Topology::Cycle { intermediate: 4 }.generate().unwrap();
        let col = edge_color_reduced(&g, 10_000);
        assert!(col.is_proper(&g));
        assert_eq!(col.num_colors, 2);
    }

    #[test]
    fn reduction_keeps_base_for_class_two() {
        let g = Topology::Complete { nodes: 3 }.generate().unwrap();
        let col = edge_color_reduced(&g, 10_000);
        assert!(col.is_proper(&g));
        assert_eq!(col.num_colors, 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn reduction_is_proper_and_never_worse(seed in any::<u64>()) {
            let g = random_connected_graph(seed, 2..=9, 30);
            let base = edge_color(&g);
            let budget = if g.edge_count() <= 12 { usize::MAX } else { 50_000 };
            let col = edge_color_reduced(&g, budget);
            prop_assert!(col.is_proper(&g));
            prop_assert!(col.num_colors <= base.num_colors);
            if g.edge_count() <= 12 && col.num_colors > g.max_degree() {
                prop_assert!(!colorable_with(&g, g.max_degree()));
            }
        }

        #[test]
        fn proper_within_vizing(seed in any::<u64>()) {
            let g = random_connected_graph(seed, 2..=12, 60);
            let col = edge_color(&g);
            prop_assert!(col.is_proper(&g));
            prop_assert!(col.num_colors <= g.max_degree() + 1);
            let m = middle_graph(&g);
            let col = edge_color(&m);
            prop_assert!(col.is_proper(&m));
            prop_assert!(col.num_colors <= m.max_degree() + 1);
        }
    }
}

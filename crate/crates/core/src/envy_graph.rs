//! The equality envy graph: edge `(i, j)` iff `c_i(X_i) = c_i(X_j)`.
//!
//! In an envy-free allocation an edge means agent `i` is one item away from envying `j`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::allocation::Allocation;
use crate::cost::SetFunction;
use crate::error::{invalid, Result};
use crate::instance::Instance;
use crate::itemset::ItemSet;

#[derive(Clone, PartialEq, Eq)]
pub struct EnvyGraph {
    n: usize,
    adj: Vec<bool>,
}

impl EnvyGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = EnvyGraph { n, adj: vec![false; n * n] };
        for &(i, j) in edges {
            if i >= n || j >= n || i == j {
                return Err(invalid!("edge ({i}, {j}) is not valid on {n} vertices"));
            }
            g.adj[i * n + j] = true;
        }
        Ok(g)
    }

    /// Builds the graph from cost functions and bundles.
    pub fn compute<F: SetFunction>(fns: &[F], bundles: &[ItemSet]) -> Self {
        let n = bundles.len();
        let mut g = EnvyGraph { n, adj: vec![false; n * n] };
        for i in 0..n {
            g.refresh_row(fns, bundles, i);
        }
        g
    }

    /// Recomputes every edge touching an agent whose bundle changed.
    pub fn refresh<F: SetFunction>(&mut self, fns: &[F], bundles: &[ItemSet], changed: &[usize]) {
        for &i in changed {
            self.refresh_row(fns, bundles, i);
        }
        for u in 0..self.n {
            if changed.contains(&u) {
                continue;
            }
            let own = fns[u].cost(bundles[u]);
            for &v in changed {
                if v != u {
                    self.adj[u * self.n + v] = fns[u].cost(bundles[v]) == own;
                }
            }
        }
    }

    fn refresh_row<F: SetFunction>(&mut self, fns: &[F], bundles: &[ItemSet], i: usize) {
        let own = fns[i].cost(bundles[i]);
        for (j, b) in bundles.iter().enumerate() {
            self.adj[i * self.n + j] = i != j && fns[i].cost(*b) == own;
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    /// Out-neighbours in increasing order.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.has_edge(i, j))
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|i| self.successors(i).map(move |j| (i, j))).collect()
    }
}

impl core::fmt::Debug for EnvyGraph {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("EnvyGraph").field("n", &self.n).field("edges", &self.edges()).finish()
    }
}

pub fn build_envy_graph(inst: &Instance, x: &Allocation) -> Result<EnvyGraph> {
    x.check_against(inst)?;
    Ok(EnvyGraph::compute(inst.agents(), x.bundles()))
}

/// Tarjan's algorithm. Components come out in reverse topological order, members unsorted.
pub fn strongly_connected_components(g: &EnvyGraph) -> Vec<Vec<usize>> {
    struct State {
        next: usize,
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        out: Vec<Vec<usize>>,
    }

    fn visit(g: &EnvyGraph, st: &mut State, v: usize) {
        st.index[v] = Some(st.next);
        st.low[v] = st.next;
        st.next += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for w in g.successors(v) {
            match st.index[w] {
                None => {
                    visit(g, st, w);
                    st.low[v] = st.low[v].min(st.low[w]);
                }
                Some(iw) if st.on_stack[w] => st.low[v] = st.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(st.low[v]) == st.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("v is on the stack");
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            st.out.push(comp);
        }
    }

    let n = g.n();
    let mut st = State {
        next: 0,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        out: Vec::new(),
    };
    for v in 0..n {
        if st.index[v].is_none() {
            visit(g, &mut st, v);
        }
    }
    st.out
}

/// A strongly connected component with no edge leaving it. Among all such components the one
/// holding the lowest-numbered agent is returned, sorted ascending.
pub fn tail_scc(g: &EnvyGraph) -> Vec<usize> {
    let comps = strongly_connected_components(g);
    let mut comp_of = vec![0; g.n()];
    for (c, members) in comps.iter().enumerate() {
        for &v in members {
            comp_of[v] = c;
        }
    }
    let is_tail = |c: usize| comps[c].iter().all(|&u| g.successors(u).all(|w| comp_of[w] == c));
    match (0..g.n()).find(|&v| is_tail(comp_of[v])) {
        Some(v) => {
            let mut members = comps[comp_of[v]].clone();
            members.sort_unstable();
            members
        }
        None => Vec::new(),
    }
}

/// The cycle made of edge `(i, j)` and a shortest `j → i` path, starting at `i`.
/// Breadth-first search expands neighbours in increasing order, so the result is unique.
pub fn find_cycle_through_edge(g: &EnvyGraph, i: usize, j: usize) -> Result<Option<Vec<usize>>> {
    if i >= g.n() || j >= g.n() || !g.has_edge(i, j) {
        return Err(invalid!("({i}, {j}) is not an edge of the envy graph"));
    }
    let mut parent = vec![usize::MAX; g.n()];
    parent[j] = j;
    let mut queue = VecDeque::from([j]);
    while let Some(u) = queue.pop_front() {
        if u == i {
            let mut path = vec![i];
            let mut v = i;
            while v != j {
                v = parent[v];
                path.push(v);
            }
            // path runs i ← … ← j; reverse the tail so the cycle reads i, j, …, back to i.
            path[1..].reverse();
            return Ok(Some(path));
        }
        for w in g.successors(u) {
            if parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    Ok(None)
}

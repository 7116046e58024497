//! Directed graphs over at most [`MAX_AGENTS`](crate::agent::MAX_AGENTS)
//! vertices, stored as one out-neighbour bitmask per vertex.

use crate::agent::{AgentId, AgentSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<AgentSet>,
}

impl Digraph {
    pub fn new(out: Vec<AgentSet>) -> Self {
        Digraph { out }
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn successors(&self, v: AgentId) -> AgentSet {
        self.out[v.index()]
    }

    pub fn has_edge(&self, from: AgentId, to: AgentId) -> bool {
        self.out[from.index()].contains(to)
    }

    /// Vertices reachable from `start` (including `start`) using only
    /// vertices of `within`.
    pub fn closure_within(&self, start: AgentId, within: AgentSet) -> AgentSet {
        let mut seen = AgentSet::singleton(start);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let next = frontier
                .iter()
                .fold(AgentSet::EMPTY, |acc, v| acc.union(self.out[v.index()]))
                .intersection(within)
                .difference(seen);
            seen = seen.union(next);
            frontier = next;
        }
        seen
    }

    /// Largest subset of `candidates` with no edge leaving it.
    pub fn largest_closed_subset(&self, candidates: AgentSet) -> AgentSet {
        let mut set = candidates;
        loop {
            let leaking: AgentSet = set
                .iter()
                .filter(|v| !self.out[v.index()].is_subset(set))
                .collect();
            if leaking.is_empty() {
                return set;
            }
            set = set.difference(leaking);
        }
    }

    /// `true` iff every vertex of `set` reaches every other one inside `set`.
    pub fn is_strongly_connected(&self, set: AgentSet) -> bool {
        set.iter().all(|v| set.is_subset(self.closure_within(v, set)))
    }

    /// Strongly connected components of the subgraph induced by `vertices`,
    /// by Tarjan's algorithm. Components come out in reverse topological
    /// order: sinks first.
    pub fn strongly_connected_components(&self, vertices: AgentSet) -> Vec<AgentSet> {
        let mut t = Tarjan {
            graph: self,
            vertices,
            index: vec![None; self.out.len()],
            lowlink: vec![0; self.out.len()],
            on_stack: AgentSet::EMPTY,
            stack: Vec::new(),
            next_index: 0,
            components: Vec::new(),
        };
        for v in vertices.iter() {
            if t.index[v.index()].is_none() {
                t.visit(v);
            }
        }
        t.components
    }

    /// Components of the induced subgraph with no edge leaving them.
    pub fn sink_components(&self, vertices: AgentSet) -> Vec<AgentSet> {
        self.strongly_connected_components(vertices)
            .into_iter()
            .filter(|c| c.iter().all(|v| self.out[v.index()].intersection(vertices).is_subset(*c)))
            .collect()
    }
}

struct Tarjan<'a> {
    graph: &'a Digraph,
    vertices: AgentSet,
    index: Vec<Option<usize>>,
    lowlink: Vec<usize>,
    on_stack: AgentSet,
    stack: Vec<AgentId>,
    next_index: usize,
    components: Vec<AgentSet>,
}

impl Tarjan<'_> {
    // Recursion depth is bounded by the vertex count (at most 32).
    fn visit(&mut self, v: AgentId) {
        let vi = v.index();
        self.index[vi] = Some(self.next_index);
        self.lowlink[vi] = self.next_index;
        self.next_index += 1;
        self.stack.push(v);
        self.on_stack = self.on_stack.with(v);

        for w in self.graph.out[vi].intersection(self.vertices).iter() {
            let wi = w.index();
            match self.index[wi] {
                None => {
                    self.visit(w);
                    self.lowlink[vi] = self.lowlink[vi].min(self.lowlink[wi]);
                }
                Some(idx) if self.on_stack.contains(w) => {
                    self.lowlink[vi] = self.lowlink[vi].min(idx);
                }
                Some(_) => {}
            }
        }

        if Some(self.lowlink[vi]) == self.index[vi] {
            let mut component = AgentSet::EMPTY;
            while let Some(w) = self.stack.pop() {
                self.on_stack = self.on_stack.without(w);
                component = component.with(w);
                if w == v {
                    break;
                }
            }
            self.components.push(component);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[&[usize]]) -> Digraph {
        Digraph::new(edges.iter().map(|e| AgentSet::from_numbers(e.iter().copied())).collect())
    }

    #[test]
    fn scc_of_two_cycles_joined_by_bridge() {
        // 1 <-> 2 -> 3 <-> 4
        let g = graph(&[&[2], &[1, 3], &[4], &[3]]);
        let all = AgentSet::all(4);
        let mut comps: Vec<String> = g
            .strongly_connected_components(all)
            .iter()
            .map(|c| c.to_string())
            .collect();
        comps.sort();
        assert_eq!(comps, ["{1,2}", "{3,4}"]);
        let sinks = g.sink_components(all);
        assert_eq!(sinks, vec![AgentSet::from_numbers([3, 4])]);
        assert_eq!(g.largest_closed_subset(all), all);
        assert_eq!(
            g.largest_closed_subset(AgentSet::from_numbers([1, 2, 3])),
            AgentSet::EMPTY
        );
    }

    #[test]
    fn closure_and_connectivity() {
        let g = graph(&[&[2], &[3], &[1], &[1]]);
        assert_eq!(
            g.closure_within(AgentId::new(4), AgentSet::all(4)),
            AgentSet::all(4)
        );
        assert!(g.is_strongly_connected(AgentSet::from_numbers([1, 2, 3])));
        assert!(!g.is_strongly_connected(AgentSet::all(4)));
    }
}

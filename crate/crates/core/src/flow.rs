//! Dinic's maximum flow on integral capacities.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    level: Vec<u32>,
    next: Vec<usize>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self { arcs: Vec::new(), out: vec![Vec::new(); nodes], level: Vec::new(), next: Vec::new() }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: u64) {
        self.out[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.out[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0 });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.clear();
        self.level.resize(self.out.len(), u32::MAX);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.out[v] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && self.level[arc.to] == u32::MAX {
                    self.level[arc.to] = self.level[v] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        self.level[t] != u32::MAX
    }

    // iterative blocking-flow search along level-increasing arcs
    fn augment(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        let mut path: Vec<usize> = Vec::new();
        let mut v = s;
        loop {
            if v == t {
                let bottleneck = path.iter().map(|&a| self.arcs[a].cap).min().unwrap_or(0);
                for &a in &path {
                    self.arcs[a].cap -= bottleneck;
                    self.arcs[a ^ 1].cap += bottleneck;
                }
                total += bottleneck;
                // restart from the tail of the first saturated arc
                let cut = path.iter().position(|&a| self.arcs[a].cap == 0).unwrap_or(0);
                path.truncate(cut);
                v = path.last().map_or(s, |&a| self.arcs[a].to);
                continue;
            }
            let mut advanced = false;
            while self.next[v] < self.out[v].len() {
                let a = self.out[v][self.next[v]];
                let arc = &self.arcs[a];
                if arc.cap > 0 && self.level[arc.to] == self.level[v] + 1 {
                    path.push(a);
                    v = arc.to;
                    advanced = true;
                    break;
                }
                self.next[v] += 1;
            }
            if advanced {
                continue;
            }
            // dead end: retreat
            self.level[v] = u32::MAX;
            match path.pop() {
                Some(a) => {
                    v = self.arcs[a ^ 1].to;
                    self.next[v] += 1;
                }
                None => return total,
            }
        }
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.next.clear();
            self.next.resize(self.out.len(), 0);
            flow += self.augment(s, t);
        }
        flow
    }

    /// Nodes reachable from `s` in the residual network. After
    /// [`max_flow`](Self::max_flow) this is the source side of the minimum
    /// cut with the fewest nodes.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.out.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &a in &self.out[v] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_network() {
        // CLRS figure 26.1
        let mut net = FlowNetwork::new(6);
        for &(u, v, c) in &[(0, 1, 16), (0, 2, 13), (2, 1, 4), (1, 3, 12), (3, 2, 9), (2, 4, 14), (4, 3, 7), (3, 5, 20), (4, 5, 4)] {
            net.add_arc(u, v, c);
        }
        assert_eq!(net.max_flow(0, 5), 23);
        let side = net.source_side(0);
        assert!(side[0] && !side[5]);
    }

    #[test]
    fn disconnected_sink() {
        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, 5);
        assert_eq!(net.max_flow(0, 2), 0);
    }

    #[test]
    fn cut_capacity_equals_flow() {
        // diamond with a cross arc
        let arcs = [(0, 1, 3), (0, 2, 2), (1, 2, 1), (1, 3, 2), (2, 3, 3)];
        let mut net = FlowNetwork::new(4);
        for &(u, v, c) in &arcs {
            net.add_arc(u, v, c);
        }
        let f = net.max_flow(0, 3);
        let side = net.source_side(0);
        let cut: u64 = arcs.iter().filter(|&&(u, v, _)| side[u] && !side[v]).map(|&(_, _, c)| c).sum();
        assert_eq!(f, 5);
        assert_eq!(cut, f);
    }
}

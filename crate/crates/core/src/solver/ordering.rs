//! Fill-reducing ordering and symbolic analysis for the multifrontal LU.
//!
//! Variables whose rows share a pattern are merged into supervariables (for
//! DG matrices, one per element). The quotient graph is ordered by nested
//! dissection, and the elimination tree is then coarsened into supernodes.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

/// Symmetric adjacency structure without self loops.
#[derive(Debug, Clone)]
pub(crate) struct Graph {
    pub ptr: Vec<usize>,
    pub adj: Vec<usize>,
}

impl Graph {
    pub fn len(&self) -> usize {
        self.ptr.len() - 1
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.ptr[v]..self.ptr[v + 1]]
    }

    /// Symmetrized pattern of a square CSR structure.
    pub fn from_pattern(n: usize, row_ptr: &[usize], col_idx: &[usize]) -> Self {
        let mut deg = vec![0usize; n + 1];
        for r in 0..n {
            for &c in &col_idx[row_ptr[r]..row_ptr[r + 1]] {
                if c != r {
                    deg[r + 1] += 1;
                    deg[c + 1] += 1;
                }
            }
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let mut next = deg.clone();
        let mut adj = vec![0usize; deg[n]];
        for r in 0..n {
            for &c in &col_idx[row_ptr[r]..row_ptr[r + 1]] {
                if c != r {
                    adj[next[r]] = c;
                    next[r] += 1;
                    adj[next[c]] = r;
                    next[c] += 1;
                }
            }
        }
        // sort and deduplicate each list
        let mut ptr = vec![0usize; n + 1];
        let mut out = Vec::with_capacity(adj.len() / 2);
        for v in 0..n {
            let list = &mut adj[deg[v]..deg[v + 1]];
            list.sort_unstable();
            let start = out.len();
            for &u in list.iter() {
                if out.len() == start || *out.last().unwrap() != u {
                    out.push(u);
                }
            }
            ptr[v + 1] = out.len();
        }
        Graph { ptr, adj: out }
    }
}

/// Groups of variables with identical closed neighborhoods.
pub(crate) fn supervariables(g: &Graph) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = g.len();
    let closed = |v: usize| {
        let nb = g.neighbors(v);
        let at = nb.partition_point(|&u| u < v);
        nb[..at].iter().copied().chain(std::iter::once(v)).chain(nb[at..].iter().copied())
    };
    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut sv_of = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let mut h = DefaultHasher::new();
        for u in closed(v) {
            u.hash(&mut h);
        }
        let key = h.finish();
        let cands = buckets.entry(key).or_default();
        let found = cands
            .iter()
            .copied()
            .find(|&s| closed(groups[s][0]).eq(closed(v)));
        match found {
            Some(s) => {
                sv_of[v] = s;
                groups[s].push(v);
            }
            None => {
                sv_of[v] = groups.len();
                cands.push(groups.len());
                groups.push(vec![v]);
            }
        }
    }
    (sv_of, groups)
}

/// Quotient graph on supervariables.
pub(crate) fn quotient(g: &Graph, sv_of: &[usize], groups: &[Vec<usize>]) -> Graph {
    let mut ptr = vec![0usize];
    let mut adj = Vec::new();
    for (s, vars) in groups.iter().enumerate() {
        let start = adj.len();
        adj.extend(g.neighbors(vars[0]).iter().map(|&u| sv_of[u]).filter(|&t| t != s));
        adj[start..].sort_unstable();
        let mut w = start;
        for r in start..adj.len() {
            if w == start || adj[w - 1] != adj[r] {
                adj[w] = adj[r];
                w += 1;
            }
        }
        adj.truncate(w);
        ptr.push(adj.len());
    }
    Graph { ptr, adj }
}

/// Nested dissection order: parts first, separator last, recursively.
pub(crate) fn nested_dissection(g: &Graph, leaf_size: usize) -> Vec<usize> {
    enum Task {
        Dissect(Vec<usize>),
        Emit(Vec<usize>),
    }
    let n = g.len();
    let mut order = Vec::with_capacity(n);
    let mut stamp = vec![0usize; n];
    let mut level = vec![usize::MAX; n];
    let mut tick = 0usize;
    let mut stack = vec![Task::Dissect((0..n).collect())];

    // BFS inside the stamped subset; returns levels.
    let bfs = |start: usize, stamp: &[usize], tick: usize, level: &mut [usize], touched: &mut Vec<usize>| {
        let mut levels: Vec<Vec<usize>> = vec![vec![start]];
        level[start] = 0;
        touched.push(start);
        loop {
            let mut next = Vec::new();
            for &v in levels.last().unwrap() {
                for &u in g.neighbors(v) {
                    if stamp[u] == tick && level[u] == usize::MAX {
                        level[u] = levels.len();
                        touched.push(u);
                        next.push(u);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            levels.push(next);
        }
        levels
    };

    while let Some(task) = stack.pop() {
        let nodes = match task {
            Task::Emit(v) => {
                order.extend(v);
                continue;
            }
            Task::Dissect(v) => v,
        };
        if nodes.len() <= leaf_size {
            order.extend(nodes);
            continue;
        }
        tick += 1;
        for &v in &nodes {
            stamp[v] = tick;
        }
        let mut touched = Vec::new();
        let reset = |touched: &mut Vec<usize>, level: &mut [usize]| {
            for v in touched.drain(..) {
                level[v] = usize::MAX;
            }
        };
        // pseudo-peripheral start node
        let mut start = nodes[0];
        let mut levels = bfs(start, &stamp, tick, &mut level, &mut touched);
        for _ in 0..4 {
            let cand = *levels
                .last()
                .unwrap()
                .iter()
                .min_by_key(|&&v| g.neighbors(v).len())
                .unwrap();
            reset(&mut touched, &mut level);
            let lv = bfs(cand, &stamp, tick, &mut level, &mut touched);
            if lv.len() <= levels.len() {
                reset(&mut touched, &mut level);
                levels = bfs(start, &stamp, tick, &mut level, &mut touched);
                break;
            }
            start = cand;
            levels = lv;
        }
        let reached: usize = levels.iter().map(Vec::len).sum();
        if reached < nodes.len() {
            // disconnected: split off this component
            let (comp, rest): (Vec<usize>, Vec<usize>) =
                nodes.iter().partition(|&&v| level[v] != usize::MAX);
            reset(&mut touched, &mut level);
            stack.push(Task::Dissect(rest));
            stack.push(Task::Dissect(comp));
            continue;
        }
        if levels.len() < 3 {
            reset(&mut touched, &mut level);
            order.extend(nodes);
            continue;
        }
        let half = nodes.len() / 2;
        let mut acc = 0;
        let mut split = 1;
        for (i, l) in levels.iter().enumerate() {
            acc += l.len();
            if acc >= half {
                split = i;
                break;
            }
        }
        let split = split.clamp(1, levels.len() - 2);
        let mut part_a: Vec<usize> = levels[..split].concat();
        let mut sep = Vec::new();
        for &v in &levels[split] {
            if g.neighbors(v).iter().any(|&u| stamp[u] == tick && level[u] == split + 1) {
                sep.push(v);
            } else {
                part_a.push(v);
            }
        }
        let part_b: Vec<usize> = levels[split + 1..].concat();
        reset(&mut touched, &mut level);
        stack.push(Task::Emit(sep));
        stack.push(Task::Dissect(part_b));
        stack.push(Task::Dissect(part_a));
    }
    order
}

/// Elimination tree of `g` under the permutation `pos` (node → position).
/// Parents are given as node ids.
pub(crate) fn elimination_tree(g: &Graph, order: &[usize], pos: &[usize]) -> Vec<Option<usize>> {
    let n = g.len();
    let mut parent = vec![None; n];
    let mut ancestor: Vec<Option<usize>> = vec![None; n];
    for &j in order {
        for &i in g.neighbors(j) {
            if pos[i] >= pos[j] {
                continue;
            }
            let mut r = i;
            loop {
                match ancestor[r] {
                    Some(a) if a == j => break,
                    Some(a) => {
                        ancestor[r] = Some(j);
                        r = a;
                    }
                    None => {
                        ancestor[r] = Some(j);
                        parent[r] = Some(j);
                        break;
                    }
                }
            }
        }
    }
    parent
}

/// One dense front of the multifrontal factorization.
#[derive(Debug, Clone)]
pub(crate) struct Supernode {
    /// Variables eliminated in this front, in elimination order.
    pub pivots: Vec<usize>,
    /// Remaining variables of the front, in elimination order.
    pub border: Vec<usize>,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct Symbolic {
    /// Variable → elimination position.
    pub var_pos: Vec<usize>,
    /// Supernodes, children before parents.
    pub supernodes: Vec<Supernode>,
}

/// Ordering plus supernodal symbolic factorization of a square pattern.
pub(crate) fn analyze(n: usize, row_ptr: &[usize], col_idx: &[usize]) -> Symbolic {
    let g = Graph::from_pattern(n, row_ptr, col_idx);
    let (sv_of, groups) = supervariables(&g);
    let q = quotient(&g, &sv_of, &groups);
    let ns = q.len();
    let order = nested_dissection(&q, 8);
    let mut pos = vec![0usize; ns];
    for (p, &s) in order.iter().enumerate() {
        pos[s] = p;
    }
    let parent = elimination_tree(&q, &order, &pos);

    // column structures in position order (children precede parents)
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); ns];
    for s in 0..ns {
        if let Some(p) = parent[s] {
            children[p].push(s);
        }
    }
    let mut structs: Vec<Vec<usize>> = vec![Vec::new(); ns];
    let mut mark = vec![usize::MAX; ns];
    for &j in &order {
        let mut st: Vec<usize> = Vec::new();
        mark[j] = j;
        for &i in q.neighbors(j) {
            if pos[i] > pos[j] && mark[i] != j {
                mark[i] = j;
                st.push(i);
            }
        }
        for &c in &children[j] {
            for &i in &structs[c] {
                if i != j && mark[i] != j {
                    mark[i] = j;
                    st.push(i);
                }
            }
        }
        st.sort_unstable_by_key(|&i| pos[i]);
        structs[j] = st;
    }

    // merge chains j → parent p when p has one child and struct(j) = {p} ∪ struct(p)
    let mut head: Vec<usize> = (0..ns).collect(); // supernode id for each sv, resolved below
    let mut sn_members: Vec<Vec<usize>> = Vec::new();
    let mut sn_of = vec![usize::MAX; ns];
    for &j in &order {
        let merge_into = match children[j][..] {
            [c] => {
                let sc = &structs[c];
                let chain = sc.len() == structs[j].len() + 1 && sc[0] == j && sc[1..] == structs[j][..];
                chain.then(|| sn_of[c])
            }
            _ => None,
        };
        match merge_into {
            Some(s) => {
                sn_members[s].push(j);
                sn_of[j] = s;
            }
            None => {
                sn_of[j] = sn_members.len();
                sn_members.push(vec![j]);
            }
        }
        head[j] = sn_of[j];
    }

    let mut var_pos = vec![0usize; n];
    let mut p = 0;
    for &s in &order {
        for &v in &groups[s] {
            var_pos[v] = p;
            p += 1;
        }
    }
    let expand = |svs: &[usize]| -> Vec<usize> { svs.iter().flat_map(|&s| groups[s].iter().copied()).collect() };
    let supernodes = sn_members
        .iter()
        .map(|members| {
            let last = *members.last().unwrap();
            Supernode {
                pivots: expand(members),
                border: expand(&structs[last]),
                parent: parent[last].map(|p| head[p]),
            }
        })
        .collect();
    Symbolic { var_pos, supernodes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_graph(m: usize) -> Graph {
        let idx = |i: usize, j: usize| i * m + j;
        let mut ptr = vec![0];
        let mut cols = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let mut row = vec![idx(i, j)];
                if i > 0 {
                    row.push(idx(i - 1, j));
                }
                if i + 1 < m {
                    row.push(idx(i + 1, j));
                }
                if j > 0 {
                    row.push(idx(i, j - 1));
                }
                if j + 1 < m {
                    row.push(idx(i, j + 1));
                }
                row.sort_unstable();
                cols.extend(row);
                ptr.push(cols.len());
            }
        }
        Graph::from_pattern(m * m, &ptr, &cols)
    }

    #[test]
    fn dissection_is_a_permutation() {
        let g = grid_graph(20);
        let mut order = nested_dissection(&g, 4);
        assert_eq!(order.len(), 400);
        order.sort_unstable();
        assert!(order.iter().enumerate().all(|(i, &v)| i == v));
    }

    #[test]
    fn supervariables_group_identical_rows() {
        // two 2×2 dense blocks coupled by a dense off-diagonal block
        let ptr = vec![0, 4, 8, 12, 16];
        let cols = vec![0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3];
        let g = Graph::from_pattern(4, &ptr, &cols);
        let (_, groups) = supervariables(&g);
        assert_eq!(groups.len(), 1);
        // block diagonal: two groups
        let ptr = vec![0, 2, 4, 6, 8];
        let cols = vec![0, 1, 0, 1, 2, 3, 2, 3];
        let g = Graph::from_pattern(4, &ptr, &cols);
        let (sv, groups) = supervariables(&g);
        assert_eq!(groups.len(), 2);
        assert_eq!(sv[0], sv[1]);
        assert_ne!(sv[1], sv[2]);
    }

    #[test]
    fn symbolic_fronts_cover_every_variable_once() {
        let g = grid_graph(12);
        let sym = analyze(g.len(), &g.ptr, &g.adj);
        let mut seen = vec![false; g.len()];
        for (s, sn) in sym.supernodes.iter().enumerate() {
            for &v in &sn.pivots {
                assert!(!seen[v]);
                seen[v] = true;
            }
            if let Some(p) = sn.parent {
                assert!(p > s);
            }
            let last = sym.var_pos[*sn.pivots.last().unwrap()];
            assert!(sn.border.iter().all(|&b| sym.var_pos[b] > last));
        }
        assert!(seen.iter().all(|&s| s));
    }
}

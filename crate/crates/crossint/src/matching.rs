use std::collections::VecDeque;

/// Bipartite graph as adjacency lists from the left side. Vertices are plain
/// indices; callers keep whatever meaning they carry.
#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    pub left: usize,
    pub right: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize) -> BipartiteGraph {
        BipartiteGraph { left, right, adj: vec![Vec::new(); left] }
    }

    pub fn add_edge(&mut self, l: usize, r: usize) {
        debug_assert!(l < self.left && r < self.right);
        self.adj[l].push(r);
    }

    pub fn neighbors(&self, l: usize) -> &[usize] {
        &self.adj[l]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }
}

#[derive(Clone, Debug)]
pub struct Matching {
    pub pair_left: Vec<Option<usize>>,
    pub pair_right: Vec<Option<usize>>,
    pub size: usize,
}

const INF: u32 = u32::MAX;

/// Hopcroft–Karp maximum matching. Deterministic: vertices and adjacency are
/// scanned in index order, so equal inputs give identical matchings.
pub fn maximum_matching(g: &BipartiteGraph) -> Matching {
    let mut pair_left: Vec<Option<usize>> = vec![None; g.left];
    let mut pair_right: Vec<Option<usize>> = vec![None; g.right];
    let mut dist = vec![INF; g.left];
    let mut size = 0;

    loop {
        // layer the graph from every free left vertex
        let mut queue = VecDeque::new();
        for l in 0..g.left {
            if pair_left[l].is_none() {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = INF;
            }
        }
        let mut reachable_free_right = false;
        while let Some(l) = queue.pop_front() {
            for &r in &g.adj[l] {
                match pair_right[r] {
                    None => reachable_free_right = true,
                    Some(l2) => {
                        if dist[l2] == INF {
                            dist[l2] = dist[l] + 1;
                            queue.push_back(l2);
                        }
                    }
                }
            }
        }
        if !reachable_free_right {
            break;
        }
        for l in 0..g.left {
            if pair_left[l].is_none() && augment(g, l, &mut pair_left, &mut pair_right, &mut dist)
            {
                size += 1;
            }
        }
    }

    Matching { pair_left, pair_right, size }
}

fn augment(
    g: &BipartiteGraph,
    l: usize,
    pair_left: &mut [Option<usize>],
    pair_right: &mut [Option<usize>],
    dist: &mut [u32],
) -> bool {
    for &r in &g.adj[l] {
        let advance = match pair_right[r] {
            None => true,
            Some(l2) => dist[l2] == dist[l] + 1 && augment(g, l2, pair_left, pair_right, dist),
        };
        if advance {
            pair_left[l] = Some(r);
            pair_right[r] = Some(l);
            return true;
        }
    }
    dist[l] = INF;
    false
}

/// Maximum independent set from a maximum matching: alternating reachability
/// from the free left vertices marks `Z`; the minimum vertex cover is
/// `(L \ Z) ∪ (R ∩ Z)` and the independent set is its complement, of size
/// `|V| - |matching|`. Returned as membership flags per side.
pub fn maximum_independent_set(g: &BipartiteGraph, m: &Matching) -> (Vec<bool>, Vec<bool>) {
    let mut seen_left = vec![false; g.left];
    let mut seen_right = vec![false; g.right];
    let mut queue: VecDeque<usize> = (0..g.left).filter(|&l| m.pair_left[l].is_none()).collect();
    for &l in &queue {
        seen_left[l] = true;
    }
    while let Some(l) = queue.pop_front() {
        for &r in &g.adj[l] {
            if m.pair_left[l] == Some(r) || seen_right[r] {
                continue; // only non-matching edges leave the left side
            }
            seen_right[r] = true;
            if let Some(l2) = m.pair_right[r] {
                if !seen_left[l2] {
                    seen_left[l2] = true;
                    queue.push_back(l2);
                }
            }
        }
    }
    let in_left: Vec<bool> = seen_left;
    let in_right: Vec<bool> = seen_right.iter().map(|&v| !v).collect();
    (in_left, in_right)
}

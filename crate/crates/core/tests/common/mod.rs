//! Independent oracles shared by the integration suites. Nothing here calls
//! into the tree or softmax code under test.
#![allow(dead_code)]

use signed_embed::{EmbeddingMatrix, Sign, SignedGraph};

/// BFS tree recomputed from all-pairs hop distances: parent of `n` is the
/// level-(L-1) neighbor discovered earliest, and discovery order within a
/// level follows (parent order, id).
pub struct OracleTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub level: Vec<Option<usize>>,
}

pub fn all_pairs_hops(g: &SignedGraph) -> Vec<Vec<Option<usize>>> {
    let n = g.node_count();
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for &(j, _) in g.neighbors(i) {
            d[i][j] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].map_or(true, |c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

pub fn oracle_tree(g: &SignedGraph, root: usize, hops: &[Vec<Option<usize>>]) -> OracleTree {
    let n = g.node_count();
    let level: Vec<Option<usize>> = (0..n).map(|v| hops[root][v]).collect();
    let depth = level.iter().flatten().copied().max().unwrap_or(0);
    let mut parent = vec![None; n];
    let mut order = vec![usize::MAX; n];
    order[root] = 0;
    let mut next = 1;
    for l in 1..=depth {
        let mut members: Vec<(usize, usize)> = Vec::new();
        for v in 0..n {
            if level[v] == Some(l) {
                let p = g
                    .neighbors(v)
                    .iter()
                    .map(|&(u, _)| u)
                    .filter(|&u| level[u] == Some(l - 1))
                    .min_by_key(|&u| order[u])
                    .unwrap();
                parent[v] = Some(p);
                members.push((order[p], v));
            }
        }
        members.sort_unstable();
        for (_, v) in members {
            order[v] = next;
            next += 1;
        }
    }
    OracleTree { root, parent, level }
}

impl OracleTree {
    pub fn tree_neighbors(&self, a: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.parent[a].into_iter().collect();
        let mut kids: Vec<usize> = (0..self.parent.len()).filter(|&c| self.parent[c] == Some(a)).collect();
        kids.sort_unstable();
        out.extend(kids);
        out
    }

    pub fn path(&self, n: usize) -> Vec<usize> {
        let mut p = vec![n];
        while let Some(q) = self.parent[*p.last().unwrap()] {
            p.push(q);
        }
        p.reverse();
        p
    }
}

pub fn plain_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unshifted softmax over `{+x_k, -x_k}` for step `a -> b` with `sign`.
pub fn oracle_step(emb: &EmbeddingMatrix, hood: &[usize], a: usize, b: usize, sign: Sign) -> f64 {
    let z: f64 = hood
        .iter()
        .map(|&k| {
            let x = plain_dot(emb.row(a), emb.row(k));
            x.exp() + (-x).exp()
        })
        .sum();
    let x = plain_dot(emb.row(a), emb.row(b));
    (sign.value() * x).exp() / z
}

/// Sum over every sign assignment of the root path plus back-step of the
/// product of single-hop probabilities, split by the product sign.
pub fn path_product(emb: &EmbeddingMatrix, tree: &OracleTree, target: usize) -> (f64, f64) {
    let mut hops: Vec<(usize, usize)> = tree.path(target).windows(2).map(|w| (w[0], w[1])).collect();
    hops.push((target, tree.parent[target].unwrap()));
    let probs: Vec<[f64; 2]> = hops
        .iter()
        .map(|&(a, b)| {
            let hood = tree.tree_neighbors(a);
            [oracle_step(emb, &hood, a, b, Sign::Positive), oracle_step(emb, &hood, a, b, Sign::Negative)]
        })
        .collect();
    let (mut pos, mut neg) = (0.0, 0.0);
    for mask in 0u64..(1 << probs.len()) {
        let mut p = 1.0;
        let mut negatives = 0;
        for (i, pr) in probs.iter().enumerate() {
            let bit = ((mask >> i) & 1) as usize;
            p *= pr[bit];
            negatives += bit;
        }
        if negatives % 2 == 0 {
            pos += p;
        } else {
            neg += p;
        }
    }
    (pos, neg)
}

/// A complete trajectory with its probability.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub nodes: Vec<usize>,
    pub signs: Vec<Sign>,
    pub prob: f64,
}

impl Trajectory {
    pub fn outcome(&self) -> (usize, Sign) {
        let sign = self.signs.iter().fold(Sign::Positive, |a, &s| a.compose(s));
        (self.nodes[self.nodes.len() - 2], sign)
    }
}

/// Every walk from the root that ends by stepping back to the previous node.
pub fn enumerate_walks(emb: &EmbeddingMatrix, tree: &OracleTree) -> Vec<Trajectory> {
    fn go(emb: &EmbeddingMatrix, tree: &OracleTree, t: Trajectory, prev: Option<usize>, out: &mut Vec<Trajectory>) {
        let a = *t.nodes.last().unwrap();
        let hood = tree.tree_neighbors(a);
        for &b in &hood {
            for sign in Sign::BOTH {
                let mut next = t.clone();
                next.prob *= oracle_step(emb, &hood, a, b, sign);
                next.nodes.push(b);
                next.signs.push(sign);
                if prev == Some(b) {
                    out.push(next);
                } else {
                    go(emb, tree, next, Some(a), out);
                }
            }
        }
    }
    let mut out = Vec::new();
    let start = Trajectory {
        nodes: vec![tree.root],
        signs: Vec::new(),
        prob: 1.0,
    };
    go(emb, tree, start, None, &mut out);
    out
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den
}

/// Central finite differences of `f` over every coordinate of `emb`.
pub fn central_difference<F: Fn(&EmbeddingMatrix) -> f64>(emb: &EmbeddingMatrix, h: f64, f: F) -> Vec<f64> {
    let mut work = emb.clone();
    (0..emb.values().len())
        .map(|i| {
            let x = work.values()[i];
            work.values_mut()[i] = x + h;
            let up = f(&work);
            work.values_mut()[i] = x - h;
            let down = f(&work);
            work.values_mut()[i] = x;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Dense copy of a sparse gradient.
pub fn densify(grad: &std::collections::BTreeMap<usize, Vec<f64>>, rows: usize, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * dim];
    for (&r, row) in grad {
        out[r * dim..(r + 1) * dim].copy_from_slice(row);
    }
    out
}

//! Balance-aware softmax over BFS trees.
//!
//! For a root node the graph is flattened into its BFS tree. Each tree node
//! `a` carries a single-hop distribution over `(tree-neighbor, sign)` pairs:
//!
//! ```text
//! p(b, t | a) = exp(t * g_a.g_b) / sum_{k in N_tree(a)} sum_{t'} exp(t' * g_a.g_k)
//! ```
//!
//! with `t = +1` for Positive and `-1` for Negative. Walking down from the
//! root composes signs by the balance rule, so the cumulative mass of
//! reaching `n` with a Positive relation is
//!
//! ```text
//! cum_pos(n) = cum_pos(p) * p(n,+|p) + cum_neg(p) * p(n,-|p)
//! cum_neg(n) = cum_pos(p) * p(n,-|p) + cum_neg(p) * p(n,+|p)
//! ```
//!
//! where `p` is the parent of `n`, and the root starts at `(1, 0)`. The
//! probability of `(n, sign)` combines this with the step back from `n` to
//! its parent, again composed by the balance rule. Summed over every
//! covered node and both signs this is exactly one.

use rand::Rng;

use crate::embedding::{dot, EmbeddingMatrix};
use crate::{Error, Result, Sign, SignedGraph};

/// BFS tree of one root, restricted to the root's connected component
/// (optionally truncated at a maximum depth).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsTree {
    root: usize,
    parent: Vec<Option<usize>>,
    level: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl BfsTree {
    /// Neighbors are explored in ascending id order.
    pub fn build(g: &SignedGraph, root: usize) -> Self {
        Self::build_capped(g, root, None)
    }

    pub fn build_capped(g: &SignedGraph, root: usize, max_depth: Option<usize>) -> Self {
        assert!(root < g.node_count(), "root {root} out of range");
        let n = g.node_count();
        let mut parent = vec![None; n];
        let mut level = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut order = Vec::new();
        level[root] = Some(0);
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            let depth = level[u].expect("queued nodes have a level");
            if max_depth.is_some_and(|cap| depth >= cap) {
                continue;
            }
            for &(v, _) in g.neighbors(u) {
                if level[v].is_none() {
                    level[v] = Some(depth + 1);
                    parent[v] = Some(u);
                    children[u].push(v);
                    order.push(v);
                }
            }
        }
        BfsTree {
            root,
            parent,
            level,
            children,
            order,
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, n: usize) -> Option<usize> {
        self.parent[n]
    }

    pub fn level(&self, n: usize) -> Option<usize> {
        self.level[n]
    }

    pub fn children(&self, n: usize) -> &[usize] {
        &self.children[n]
    }

    /// Covered nodes in BFS order (root first).
    pub fn covered(&self) -> &[usize] {
        &self.order
    }

    pub fn is_covered(&self, n: usize) -> bool {
        self.level.get(n).is_some_and(Option::is_some)
    }

    /// Parent first (if any), then children ascending.
    pub fn tree_neighbors(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.parent[n].into_iter().chain(self.children[n].iter().copied())
    }

    pub fn is_tree_adjacent(&self, a: usize, b: usize) -> bool {
        self.parent[a] == Some(b) || self.parent[b] == Some(a)
    }

    /// Unique tree path `root, ..., n`.
    pub fn path_to(&self, n: usize) -> Option<Vec<usize>> {
        self.level[n]?;
        let mut path = vec![n];
        let mut cur = n;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

/// Single-hop distribution at one tree node over its tree neighbors and
/// both signs. `neighbors[i]` pairs with `positive[i]` and `negative[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDist {
    pub neighbors: Vec<usize>,
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
}

impl StepDist {
    pub fn compute(emb: &EmbeddingMatrix, tree: &BfsTree, a: usize) -> StepDist {
        let neighbors: Vec<usize> = tree.tree_neighbors(a).collect();
        let scores: Vec<f64> = neighbors
            .iter()
            .map(|&b| dot(emb.row(a), emb.row(b)))
            .collect();
        let (positive, negative) = signed_softmax(&scores);
        StepDist {
            neighbors,
            positive,
            negative,
        }
    }

    pub fn index_of(&self, b: usize) -> Option<usize> {
        self.neighbors.iter().position(|&n| n == b)
    }

    pub fn prob(&self, b: usize, sign: Sign) -> Option<f64> {
        self.index_of(b).map(|i| self.prob_at(i, sign))
    }

    #[inline]
    pub fn prob_at(&self, i: usize, sign: Sign) -> f64 {
        match sign {
            Sign::Positive => self.positive[i],
            Sign::Negative => self.negative[i],
        }
    }

    pub fn total(&self) -> f64 {
        self.positive.iter().chain(&self.negative).sum()
    }

    /// Draws a `(neighbor index, sign)` pair.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Sign) {
        let mut u: f64 = rng.random::<f64>() * self.total();
        for i in 0..self.neighbors.len() {
            for sign in Sign::BOTH {
                u -= self.prob_at(i, sign);
                if u < 0.0 {
                    return (i, sign);
                }
            }
        }
        (self.neighbors.len() - 1, Sign::Negative)
    }
}

/// Softmax over the logits `{+x_k, -x_k}`, shifted by `max |x_k|` so that
/// large dot products cannot overflow.
pub fn signed_softmax(scores: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let shift = scores.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let pos: Vec<f64> = scores.iter().map(|x| (x - shift).exp()).collect();
    let neg: Vec<f64> = scores.iter().map(|x| (-x - shift).exp()).collect();
    let z: f64 = pos.iter().chain(&neg).sum();
    (
        pos.into_iter().map(|w| w / z).collect(),
        neg.into_iter().map(|w| w / z).collect(),
    )
}

/// Sign-specific relevance of tree-neighbor `b` as seen from `a`.
pub fn relevance(emb: &EmbeddingMatrix, tree: &BfsTree, a: usize, b: usize, sign: Sign) -> Result<f64> {
    if !tree.is_covered(a) || !tree.is_tree_adjacent(a, b) {
        return Err(Error::NotTreeAdjacent { a, b });
    }
    let step = StepDist::compute(emb, tree, a);
    step.prob(b, sign).ok_or(Error::NotTreeAdjacent { a, b })
}

/// Single-hop distributions per tree node plus the cumulative
/// root-to-node masses.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceTable {
    steps: Vec<Option<StepDist>>,
    cum_positive: Vec<f64>,
    cum_negative: Vec<f64>,
    propagated: bool,
}

impl RelevanceTable {
    /// Table with no step distributions yet; filled on demand by [`LazySteps`].
    pub fn empty(node_count: usize) -> Self {
        RelevanceTable {
            steps: vec![None; node_count],
            cum_positive: vec![0.0; node_count],
            cum_negative: vec![0.0; node_count],
            propagated: false,
        }
    }

    /// Step distributions for every covered node, cumulative values unset.
    pub fn single_hop(emb: &EmbeddingMatrix, tree: &BfsTree) -> Self {
        let mut table = Self::empty(tree.node_count());
        for &a in tree.covered() {
            table.steps[a] = Some(StepDist::compute(emb, tree, a));
        }
        table
    }

    pub fn build(emb: &EmbeddingMatrix, tree: &BfsTree) -> Self {
        Self::single_hop(emb, tree).propagate(tree)
    }

    /// Fills the cumulative masses top-down in BFS order.
    pub fn propagate(mut self, tree: &BfsTree) -> Self {
        let root = tree.root();
        self.cum_positive[root] = 1.0;
        self.cum_negative[root] = 0.0;
        for &n in &tree.covered()[1..] {
            let p = tree.parent(n).expect("non-root covered node has a parent");
            let step = self.steps[p]
                .as_ref()
                .expect("single-hop entries populated before propagation");
            let i = step.index_of(n).expect("child present in parent's step");
            let (hop_pos, hop_neg) = (step.positive[i], step.negative[i]);
            let (up_pos, up_neg) = (self.cum_positive[p], self.cum_negative[p]);
            self.cum_positive[n] = up_pos * hop_pos + up_neg * hop_neg;
            self.cum_negative[n] = up_pos * hop_neg + up_neg * hop_pos;
        }
        self.propagated = true;
        self
    }

    pub fn is_propagated(&self) -> bool {
        self.propagated
    }

    pub fn step(&self, a: usize) -> Option<&StepDist> {
        self.steps.get(a).and_then(Option::as_ref)
    }

    pub fn pi(&self, a: usize, b: usize, sign: Sign) -> Result<f64> {
        self.step(a)
            .and_then(|s| s.prob(b, sign))
            .ok_or(Error::NotTreeAdjacent { a, b })
    }

    pub fn cum_positive(&self, n: usize) -> f64 {
        self.cum_positive[n]
    }

    pub fn cum_negative(&self, n: usize) -> f64 {
        self.cum_negative[n]
    }

    pub fn cum_total(&self, n: usize) -> f64 {
        self.cum_positive[n] + self.cum_negative[n]
    }

    /// Overwrites one cumulative pair; for hand-built fixtures.
    pub fn set_cumulative(&mut self, n: usize, positive: f64, negative: f64) {
        self.cum_positive[n] = positive;
        self.cum_negative[n] = negative;
    }

    /// Overwrites one step distribution; for hand-built fixtures.
    pub fn set_step(&mut self, a: usize, step: StepDist) {
        self.steps[a] = Some(step);
    }
}

/// Probability that the generator rooted at `tree.root()` emits `(target, sign)`.
pub fn modified_softmax(table: &RelevanceTable, tree: &BfsTree, target: usize, sign: Sign) -> Result<f64> {
    let (pos, neg) = modified_softmax_pair(table, tree, target)?;
    Ok(match sign {
        Sign::Positive => pos,
        Sign::Negative => neg,
    })
}

/// `(P(target, Positive), P(target, Negative))`.
pub fn modified_softmax_pair(table: &RelevanceTable, tree: &BfsTree, target: usize) -> Result<(f64, f64)> {
    if target >= tree.node_count() || !tree.is_covered(target) || target == tree.root() {
        return Err(Error::NotATarget(target));
    }
    let parent = tree.parent(target).expect("non-root covered node has a parent");
    let back_pos = table.pi(target, parent, Sign::Positive)?;
    let back_neg = table.pi(target, parent, Sign::Negative)?;
    let (cp, cn) = (table.cum_positive(target), table.cum_negative(target));
    Ok((cp * back_pos + cn * back_neg, cp * back_neg + cn * back_pos))
}

/// `(node, P(+), P(-))` for every covered non-root node, in BFS order.
pub fn modified_softmax_all(table: &RelevanceTable, tree: &BfsTree) -> Vec<(usize, f64, f64)> {
    tree.covered()[1..]
        .iter()
        .map(|&n| {
            let (p, q) = modified_softmax_pair(table, tree, n).expect("covered non-root node");
            (n, p, q)
        })
        .collect()
}

/// A sampled trajectory: `nodes[i] -> nodes[i+1]` is taken with `signs[i]`.
/// The last step returns to the node visited two steps earlier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub nodes: Vec<usize>,
    pub signs: Vec<Sign>,
}

impl Walk {
    /// The emitted node (the one the walk stepped back from) and the
    /// balance-composed sign of every step, back-step included.
    pub fn outcome(&self) -> (usize, Sign) {
        let node = self.nodes[self.nodes.len() - 2];
        let sign = self
            .signs
            .iter()
            .fold(Sign::Positive, |acc, &s| acc.compose(s));
        (node, sign)
    }

    pub fn steps(&self) -> impl Iterator<Item = (usize, usize, Sign)> + '_ {
        self.nodes
            .windows(2)
            .zip(&self.signs)
            .map(|(w, &s)| (w[0], w[1], s))
    }
}

/// Source of step distributions for the walker.
pub trait StepSource {
    fn step_at(&mut self, a: usize) -> &StepDist;
}

impl StepSource for &RelevanceTable {
    fn step_at(&mut self, a: usize) -> &StepDist {
        self.step(a).expect("step distribution populated for visited node")
    }
}

/// Computes step distributions only for nodes the walk visits, memoised in
/// the borrowed table.
pub struct LazySteps<'a> {
    pub table: &'a mut RelevanceTable,
    pub emb: &'a EmbeddingMatrix,
    pub tree: &'a BfsTree,
}

impl StepSource for LazySteps<'_> {
    fn step_at(&mut self, a: usize) -> &StepDist {
        let (emb, tree) = (self.emb, self.tree);
        self.table.steps[a].get_or_insert_with(|| StepDist::compute(emb, tree, a))
    }
}

/// Walks from the root drawing `(tree-neighbor, sign)` from the step
/// distribution of the current node, until the walk steps back to the node
/// it just came from. `None` when the root has no tree neighbors.
pub fn sample_walk<S: StepSource, R: Rng + ?Sized>(source: &mut S, tree: &BfsTree, rng: &mut R) -> Option<Walk> {
    let root = tree.root();
    if tree.covered().len() < 2 {
        return None;
    }
    let mut nodes = vec![root];
    let mut signs = Vec::new();
    let mut previous: Option<usize> = None;
    let mut current = root;
    loop {
        let step = source.step_at(current);
        let (i, sign) = step.sample(rng);
        let next = step.neighbors[i];
        nodes.push(next);
        signs.push(sign);
        if previous == Some(next) {
            return Some(Walk { nodes, signs });
        }
        previous = Some(current);
        current = next;
    }
}

/// Draws one `(node, sign)` outcome from a fully populated table.
pub fn sample_signed_neighbor<R: Rng + ?Sized>(
    table: &RelevanceTable,
    tree: &BfsTree,
    rng: &mut R,
) -> Result<(usize, Sign)> {
    let mut source = table;
    sample_walk(&mut source, tree, rng)
        .map(|w| w.outcome())
        .ok_or(Error::IsolatedNode { node: tree.root() })
}

/// Nodes whose embeddings a gradient step through `walk` reads or writes:
/// every walk node plus the tree neighborhood of each node a step leaves from.
pub fn touched_nodes(walk: &Walk, tree: &BfsTree) -> usize {
    let mut touched: Vec<usize> = walk.nodes.clone();
    for &from in &walk.nodes[..walk.nodes.len() - 1] {
        touched.extend(tree.tree_neighbors(from));
    }
    touched.sort_unstable();
    touched.dedup();
    touched.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sgraph::Edge;
    use rand::SeedableRng;

    fn path3() -> SignedGraph {
        SignedGraph::from_edges(3, [Edge::new(0, 1, Sign::Positive), Edge::new(1, 2, Sign::Negative)]).unwrap()
    }

    fn emb(rows: Vec<Vec<f64>>) -> EmbeddingMatrix {
        EmbeddingMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn path_tree_levels() {
        let t = BfsTree::build(&path3(), 0);
        assert_eq!(t.level(0), Some(0));
        assert_eq!(t.level(1), Some(1));
        assert_eq!(t.level(2), Some(2));
        assert_eq!(t.parent(2), Some(1));
        assert_eq!(t.children(0), &[1]);
        assert_eq!(t.path_to(2), Some(vec![0, 1, 2]));
    }

    #[test]
    fn isolated_root() {
        let g = SignedGraph::from_edges(3, [Edge::new(1, 2, Sign::Positive)]).unwrap();
        let t = BfsTree::build(&g, 0);
        assert_eq!(t.covered(), &[0]);
        assert!(!t.is_covered(1));
        let table = RelevanceTable::build(&EmbeddingMatrix::zeros(3, 2), &t);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        assert!(sample_signed_neighbor(&table, &t, &mut rng).is_err());
    }

    #[test]
    fn depth_cap_truncates() {
        let t = BfsTree::build_capped(&path3(), 0, Some(1));
        assert_eq!(t.covered(), &[0, 1]);
        assert!(t.children(1).is_empty());
    }

    #[test]
    fn single_neighbor_zero_dot_is_even() {
        let g = SignedGraph::from_edges(2, [Edge::new(0, 1, Sign::Positive)]).unwrap();
        let t = BfsTree::build(&g, 0);
        let e = emb(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!((relevance(&e, &t, 0, 1, Sign::Positive).unwrap() - 0.5).abs() < 1e-15);
        assert!((relevance(&e, &t, 0, 1, Sign::Negative).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_neighbor_log3() {
        let g = SignedGraph::from_edges(2, [Edge::new(0, 1, Sign::Positive)]).unwrap();
        let t = BfsTree::build(&g, 0);
        let e = emb(vec![vec![3f64.ln()], vec![1.0]]);
        assert!((relevance(&e, &t, 0, 1, Sign::Positive).unwrap() - 0.9).abs() < 1e-12);
        assert!((relevance(&e, &t, 0, 1, Sign::Negative).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn two_neighbors_uniform() {
        let g = SignedGraph::from_edges(3, [Edge::new(0, 1, Sign::Positive), Edge::new(0, 2, Sign::Negative)]).unwrap();
        let t = BfsTree::build(&g, 0);
        let e = EmbeddingMatrix::zeros(3, 4);
        for b in [1, 2] {
            for s in Sign::BOTH {
                assert!((relevance(&e, &t, 0, b, s).unwrap() - 0.25).abs() < 1e-15);
            }
        }
        // 1 and 2 are siblings, not tree neighbors
        assert!(matches!(relevance(&e, &t, 1, 2, Sign::Positive), Err(Error::NotTreeAdjacent { .. })));
    }

    #[test]
    fn huge_dot_products_stay_finite() {
        let (p, n) = signed_softmax(&[900.0, -1200.0, 3.0]);
        let total: f64 = p.iter().chain(&n).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(p.iter().chain(&n).all(|x| x.is_finite()));
        assert!(n[1] > 0.999);
    }

    fn chain_table(hops: &[(f64, f64)]) -> (BfsTree, RelevanceTable) {
        let n = hops.len() + 1;
        let g = SignedGraph::from_edges(n, (1..n).map(|i| Edge::new(i - 1, i, Sign::Positive))).unwrap();
        let tree = BfsTree::build(&g, 0);
        let mut table = RelevanceTable::empty(n);
        for (i, &(p, q)) in hops.iter().enumerate() {
            // node i sends `(p, q)` to its child; the rest of its mass goes back up
            let mut neighbors = Vec::new();
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            if i > 0 {
                neighbors.push(i - 1);
                pos.push((1.0 - p - q) / 2.0);
                neg.push((1.0 - p - q) / 2.0);
            }
            neighbors.push(i + 1);
            pos.push(p);
            neg.push(q);
            table.set_step(i, StepDist { neighbors, positive: pos, negative: neg });
        }
        table.set_step(n - 1, StepDist { neighbors: vec![n - 2], positive: vec![0.5], negative: vec![0.5] });
        (tree, table)
    }

    #[test]
    fn propagation_base_case() {
        let (tree, table) = chain_table(&[(0.7, 0.3), (0.2, 0.1)]);
        let table = table.propagate(&tree);
        assert_eq!(table.cum_positive(1), 0.7);
        assert_eq!(table.cum_negative(1), 0.3);
    }

    #[test]
    fn propagation_substitution() {
        // cum(parent) = (0.6, 0.2), hop = (0.5, 0.3)
        let (tree, table) = chain_table(&[(0.6, 0.2), (0.5, 0.3)]);
        let table = table.propagate(&tree);
        assert!((table.cum_positive(2) - 0.36).abs() < 1e-15);
        assert!((table.cum_negative(2) - 0.28).abs() < 1e-15);
    }

    #[test]
    fn friend_of_friend_chain() {
        let (tree, table) = chain_table(&[(1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0)]);
        let table = table.propagate(&tree);
        for n in 1..5 {
            assert_eq!(table.cum_positive(n), 1.0);
            assert_eq!(table.cum_negative(n), 0.0);
        }
    }

    #[test]
    fn enemy_of_enemy_is_friend() {
        // root -(-)-(-)-> node 2, node 2 steps back Positive with certainty
        let (tree, mut table) = chain_table(&[(0.0, 1.0), (0.0, 1.0)]);
        table.set_step(2, StepDist { neighbors: vec![1], positive: vec![1.0], negative: vec![0.0] });
        let table = table.propagate(&tree);
        assert_eq!(modified_softmax(&table, &tree, 2, Sign::Positive).unwrap(), 1.0);
        assert_eq!(modified_softmax(&table, &tree, 2, Sign::Negative).unwrap(), 0.0);
    }

    #[test]
    fn depth_one_leaf_unrolls() {
        let g = SignedGraph::from_edges(3, [Edge::new(0, 1, Sign::Positive), Edge::new(0, 2, Sign::Negative)]).unwrap();
        let tree = BfsTree::build(&g, 0);
        let e = emb(vec![vec![0.3, -0.2], vec![0.5, 0.1], vec![-0.4, 0.9]]);
        let table = RelevanceTable::build(&e, &tree);
        let expect = table.cum_positive(1) * table.pi(1, 0, Sign::Positive).unwrap()
            + table.cum_negative(1) * table.pi(1, 0, Sign::Negative).unwrap();
        assert_eq!(modified_softmax(&table, &tree, 1, Sign::Positive).unwrap(), expect);
        assert!(matches!(modified_softmax(&table, &tree, 0, Sign::Positive), Err(Error::NotATarget(0))));
    }

    #[test]
    fn two_node_walk_always_returns_other() {
        let g = SignedGraph::from_edges(2, [Edge::new(0, 1, Sign::Negative)]).unwrap();
        let tree = BfsTree::build(&g, 0);
        let e = emb(vec![vec![0.4], vec![0.8]]);
        let table = RelevanceTable::build(&e, &tree);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let draws = 100_000;
        let mut positive = 0;
        for _ in 0..draws {
            let (n, s) = sample_signed_neighbor(&table, &tree, &mut rng).unwrap();
            assert_eq!(n, 1);
            positive += s.is_positive() as usize;
        }
        let p = modified_softmax(&table, &tree, 1, Sign::Positive).unwrap();
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((positive as f64 / draws as f64 - p).abs() < 3.0 * sigma);
    }

    #[test]
    fn star_leaves_uniform() {
        let g = SignedGraph::from_edges(4, (1..4).map(|l| Edge::new(0, l, Sign::Positive))).unwrap();
        let tree = BfsTree::build(&g, 0);
        let e = EmbeddingMatrix::from_rows(vec![vec![0.2, 0.1]; 4]).unwrap();
        let table = RelevanceTable::build(&e, &tree);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let draws = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            counts[sample_signed_neighbor(&table, &tree, &mut rng).unwrap().0] += 1;
        }
        let sigma = ((1.0 / 3.0) * (2.0 / 3.0) / draws as f64).sqrt();
        for &c in &counts[1..] {
            assert!((c as f64 / draws as f64 - 1.0 / 3.0).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn lazy_and_full_walks_agree() {
        let g = crate::sgraph::random_connected(15, 0.15, 0.4, 2);
        let e = EmbeddingMatrix::gaussian(15, 4, 1).unwrap();
        let tree = BfsTree::build(&g, 3);
        let full = RelevanceTable::build(&e, &tree);
        let mut lazy_table = RelevanceTable::empty(15);
        let mut a = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut b = a.clone();
        for _ in 0..200 {
            let mut src = &full;
            let w1 = sample_walk(&mut src, &tree, &mut a).unwrap();
            let mut lazy = LazySteps { table: &mut lazy_table, emb: &e, tree: &tree };
            let w2 = sample_walk(&mut lazy, &tree, &mut b).unwrap();
            assert_eq!(w1, w2);
        }
    }
}

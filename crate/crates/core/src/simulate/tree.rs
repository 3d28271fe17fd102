use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::offspring::OffspringDistribution;

/// The first `n` levels of an ordered rooted tree.
///
/// `levels[g][i]` is the number of children of the `i`-th vertex (left to
/// right) of generation `g`, for `g < n`. Children of consecutive vertices are
/// laid out consecutively in the next generation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TreeRealization {
    pub levels: Vec<Vec<u32>>,
    /// generation sizes `Z_0..Z_n`
    pub sizes: Vec<u64>,
    /// set when the node cap stopped the simulation early
    pub truncated: bool,
}

impl TreeRealization {
    /// Tree consisting of the root alone, viewed to depth 0.
    pub fn root() -> Self {
        Self { levels: Vec::new(), sizes: vec![1], truncated: false }
    }

    /// Number of recorded generations `n`.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Last generation with at least one vertex.
    pub fn height(&self) -> usize {
        self.sizes.iter().rposition(|&z| z > 0).unwrap_or(0)
    }

    pub fn vertex_count(&self) -> u64 {
        self.sizes.iter().sum()
    }

    /// Child counts listed in depth-first (preorder) order, vertices of the
    /// last generation contributing no entry.
    pub fn dfs_child_counts(&self) -> Vec<u32> {
        let mut first_child: Vec<Vec<usize>> = Vec::with_capacity(self.levels.len());
        for level in &self.levels {
            let mut acc = 0usize;
            first_child.push(
                level
                    .iter()
                    .map(|&c| {
                        let s = acc;
                        acc += c as usize;
                        s
                    })
                    .collect(),
            );
        }
        let mut out = Vec::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((g, i)) = stack.pop() {
            if g >= self.levels.len() {
                continue;
            }
            let c = self.levels[g][i];
            out.push(c);
            let start = first_child[g][i];
            for j in (0..c as usize).rev() {
                stack.push((g + 1, start + j));
            }
        }
        out
    }

    /// Index in generation `g - 1` of the parent of vertex `i` of generation `g`.
    pub fn parent(&self, g: usize, i: usize) -> usize {
        let mut acc = 0usize;
        for (p, &c) in self.levels[g - 1].iter().enumerate() {
            acc += c as usize;
            if i < acc {
                return p;
            }
        }
        panic!("vertex {i} not present in generation {g}")
    }
}

/// Samples the first `n` levels of a Galton-Watson tree. Stops early with
/// `truncated` set once more than `node_cap` vertices have been generated.
pub fn simulate_tree<R: Rng + ?Sized>(
    dist: &OffspringDistribution,
    n: usize,
    node_cap: u64,
    rng: &mut R,
) -> TreeRealization {
    let mut tree = TreeRealization::root();
    let mut total = 1u64;
    for _ in 0..n {
        let width = *tree.sizes.last().unwrap();
        if total.saturating_add(width) > node_cap.max(1) && width > 0 {
            tree.truncated = true;
            break;
        }
        let level: Vec<u32> = (0..width)
            .map(|_| dist.sample(rng).min(u32::MAX as u64) as u32)
            .collect();
        let next: u64 = level.iter().map(|&c| c as u64).sum();
        total = total.saturating_add(next);
        tree.levels.push(level);
        tree.sizes.push(next);
    }
    tree
}

/// `GW[t]_n`: product of `p_{c(v)}` over the vertices of generations `0..n`.
pub fn gw_probability(tree: &TreeRealization, dist: &OffspringDistribution, n: usize) -> Result<f64> {
    let extinct = tree.sizes.last() == Some(&0);
    if tree.depth() < n && !extinct {
        return Err(Error::InvalidArgument(format!(
            "tree has {} recorded generations, need {n}",
            tree.depth()
        )));
    }
    Ok(tree
        .levels
        .iter()
        .take(n)
        .flatten()
        .map(|&c| dist.pmf(c as u64))
        .product())
}

const MAX_ENUMERATED: usize = 5_000_000;

/// Every first-`n`-level tree whose vertices have child counts of positive
/// probability, with its probability. Support at most `{0,1,2,3}`, `n <= 3`.
pub fn enumerate_trees(
    dist: &OffspringDistribution,
    n: usize,
) -> Result<Vec<(TreeRealization, f64)>> {
    let max = dist.max_support().unwrap_or(u64::MAX);
    if max > 3 {
        return Err(Error::EnumerationLimit(format!(
            "support reaches {max}, enumeration allows at most 3"
        )));
    }
    if n > 3 {
        return Err(Error::EnumerationLimit(format!("depth {n} exceeds 3")));
    }
    let choices: Vec<u32> = (0..=max as u32).filter(|&k| dist.pmf(k as u64) > 0.0).collect();
    let mut trees = vec![(TreeRealization::root(), 1.0)];
    for _ in 0..n {
        let mut next = Vec::new();
        for (tree, prob) in trees {
            let width = *tree.sizes.last().unwrap() as usize;
            let count = choices.len().checked_pow(width as u32).unwrap_or(usize::MAX);
            if next.len().saturating_add(count) > MAX_ENUMERATED {
                return Err(Error::EnumerationLimit(format!(
                    "more than {MAX_ENUMERATED} trees"
                )));
            }
            // odometer over choices^width
            let mut digits = vec![0usize; width];
            loop {
                let level: Vec<u32> = digits.iter().map(|&d| choices[d]).collect();
                let p: f64 = level.iter().map(|&c| dist.pmf(c as u64)).product();
                let mut t = tree.clone();
                t.sizes.push(level.iter().map(|&c| c as u64).sum());
                t.levels.push(level);
                next.push((t, prob * p));
                let mut pos = 0;
                loop {
                    if pos == width {
                        break;
                    }
                    digits[pos] += 1;
                    if digits[pos] < choices.len() {
                        break;
                    }
                    digits[pos] = 0;
                    pos += 1;
                }
                if pos == width {
                    break;
                }
            }
        }
        trees = next;
    }
    Ok(trees)
}

/// Probability that the spine construction run to depth `n` produces the
/// tree `t` with `v_n` equal to vertex `v` of generation `n`.
///
/// Computed along the construction: each spine vertex `v_{j-1}` contributes
/// `P[L̂ = c]·(1/c)` for its `c` children and the choice of `v_j`; every
/// other vertex contributes its ordinary offspring probability.
pub fn spine_path_probability(
    tree: &TreeRealization,
    dist: &OffspringDistribution,
    n: usize,
    v: usize,
) -> Result<f64> {
    if tree.depth() < n {
        return Err(Error::InvalidArgument("tree shallower than requested depth".into()));
    }
    if (v as u64) >= tree.sizes[n] {
        return Err(Error::InvalidArgument(format!("no vertex {v} in generation {n}")));
    }
    let biased = dist.size_biased()?;
    let mut spine = vec![0usize; n + 1];
    spine[n] = v;
    for g in (1..=n).rev() {
        spine[g - 1] = tree.parent(g, spine[g]);
    }
    let mut prob = 1.0;
    for (g, level) in tree.levels.iter().take(n).enumerate() {
        for (i, &c) in level.iter().enumerate() {
            prob *= if i == spine[g] {
                biased.pmf(c as u64) / c as f64
            } else {
                dist.pmf(c as u64)
            };
        }
    }
    Ok(prob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn law(p: &[f64]) -> OffspringDistribution {
        OffspringDistribution::finite(p).unwrap()
    }

    #[test]
    fn simple_trees() {
        let mut rng = seeded(1);
        let path = simulate_tree(&law(&[0.0, 1.0]), 6, 1000, &mut rng);
        assert_eq!(path.sizes, vec![1; 7]);
        assert_eq!(gw_probability(&path, &law(&[0.0, 1.0]), 6).unwrap(), 1.0);
        let binary = simulate_tree(&law(&[0.0, 0.0, 1.0]), 5, 1000, &mut rng);
        assert_eq!(binary.sizes, vec![1, 2, 4, 8, 16, 32]);
        let capped = simulate_tree(&law(&[0.0, 0.0, 1.0]), 20, 100, &mut rng);
        assert!(capped.truncated);
    }

    #[test]
    fn cherry_probability() {
        let t = TreeRealization {
            levels: vec![vec![2], vec![0, 0]],
            sizes: vec![1, 2, 0],
            truncated: false,
        };
        assert!((gw_probability(&t, &law(&[0.5, 0.0, 0.5]), 2).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(t.dfs_child_counts(), vec![2, 0, 0]);
        assert_eq!(t.height(), 1);
    }

    #[test]
    fn dfs_order() {
        let t = TreeRealization {
            levels: vec![vec![2], vec![1, 2], vec![0, 1, 0]],
            sizes: vec![1, 2, 3, 1],
            truncated: false,
        };
        assert_eq!(t.dfs_child_counts(), vec![2, 1, 0, 2, 1, 0]);
        assert_eq!(t.parent(2, 0), 0);
        assert_eq!(t.parent(2, 2), 1);
    }

    #[test]
    fn enumeration_counts_and_mass() {
        let two = enumerate_trees(&law(&[0.3, 0.7]), 1).unwrap();
        assert_eq!(two.len(), 2);
        let five = enumerate_trees(&law(&[0.5, 0.0, 0.5]), 2).unwrap();
        assert_eq!(five.len(), 5);
        let total: f64 = five.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-15);
        let deep = enumerate_trees(&law(&[0.2, 0.3, 0.5]), 3).unwrap();
        let total: f64 = deep.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(enumerate_trees(&law(&[0.2, 0.3, 0.5]), 4).is_err());
        assert!(enumerate_trees(&law(&[0.2, 0.0, 0.0, 0.0, 0.8]), 1).is_err());
    }

    #[test]
    fn spine_probability_of_cherry_leaf() {
        // root has 2 children, spine picks the left one, which has 0 children
        // at depth 1: P[L̂=2]·(1/2) = 1/2
        let t = TreeRealization { levels: vec![vec![2]], sizes: vec![1, 2], truncated: false };
        let d = law(&[0.5, 0.0, 0.5]);
        assert!((spine_path_probability(&t, &d, 1, 0).unwrap() - 0.5).abs() < 1e-15);
        assert!(spine_path_probability(&t, &d, 1, 2).is_err());
    }
}

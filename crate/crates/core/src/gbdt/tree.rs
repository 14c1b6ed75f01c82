use super::Hyperparams;

/// Relative margin below which two split gains count as tied, so that the
/// earlier (lower feature, lower threshold) candidate wins regardless of
/// summation-order rounding.
const TIE_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Rows with `x[feature] < threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        gain: f64,
    },
    Leaf { value: f64 },
}

/// Regression tree stored as a node array with the root at index 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => id = if x[*feature] < *threshold { *left } else { *right },
            }
        }
    }

    /// Checks that the nodes form a proper binary tree rooted at 0 over
    /// `n_features` inputs, with finite values.
    pub fn check(&self, n_features: usize) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("tree has no nodes".into());
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            if id >= self.nodes.len() {
                return Err(format!("child id {id} out of range"));
            }
            if std::mem::replace(&mut seen[id], true) {
                return Err(format!("node {id} reachable twice"));
            }
            match &self.nodes[id] {
                Node::Leaf { value } if !value.is_finite() => return Err(format!("leaf {id} is not finite")),
                Node::Leaf { .. } => {}
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    gain,
                } => {
                    if *feature >= n_features {
                        return Err(format!("node {id} splits on feature {feature} of {n_features}"));
                    }
                    if threshold.is_nan() || !gain.is_finite() {
                        return Err(format!("node {id} has a non-finite threshold or gain"));
                    }
                    stack.push(*right);
                    stack.push(*left);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err("tree has unreachable nodes".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct SplitChoice {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Exact greedy tree learner over a fixed design matrix. Each feature's row
/// order is sorted once and partitioned stably at every split.
pub(crate) struct TreeLearner<'a> {
    columns: Vec<Vec<f64>>,
    sorted: Vec<Vec<u32>>,
    params: &'a Hyperparams,
}

impl<'a> TreeLearner<'a> {
    pub fn new(rows: &[Vec<f64>], width: usize, params: &'a Hyperparams) -> Self {
        let columns: Vec<Vec<f64>> = (0..width).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        let sorted = columns
            .iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..col.len() as u32).collect();
                idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b)));
                idx
            })
            .collect();
        TreeLearner {
            columns,
            sorted,
            params,
        }
    }

    pub fn fit(&self, grad: &[f64], hess: &[f64]) -> Tree {
        let n = grad.len();
        let mut work = Workspace {
            rows: (0..n as u32).collect(),
            lists: self.sorted.clone(),
            scratch: Vec::with_capacity(n),
            go_left: vec![false; n],
        };
        let mut nodes = Vec::new();
        self.build(0, n, 0, grad, hess, &mut work, &mut nodes);
        Tree { nodes }
    }

    fn leaf_weight(&self, g: f64, h: f64) -> f64 {
        -g / (h + self.params.lambda)
    }

    /// Grows the subtree over positions `start..end` of every list in `work`.
    #[allow(clippy::too_many_arguments)]
    fn build(
        &self,
        start: usize,
        end: usize,
        depth: usize,
        grad: &[f64],
        hess: &[f64],
        work: &mut Workspace,
        nodes: &mut Vec<Node>,
    ) -> usize {
        let rows = &work.rows[start..end];
        let g: f64 = rows.iter().map(|&r| grad[r as usize]).sum();
        let h: f64 = rows.iter().map(|&r| hess[r as usize]).sum();
        let id = nodes.len();
        nodes.push(Node::Leaf {
            value: self.leaf_weight(g, h),
        });

        if depth >= self.params.max_depth || end - start < 2 * self.params.min_samples_leaf {
            return id;
        }
        let Some(best) = self.best_split(&work.lists, start, end, g, h, grad, hess) else {
            return id;
        };

        let column = &self.columns[best.feature];
        for &r in &work.rows[start..end] {
            work.go_left[r as usize] = column[r as usize] < best.threshold;
        }
        let mid = start + stable_partition(&mut work.rows[start..end], &work.go_left, &mut work.scratch);
        for list in &mut work.lists {
            stable_partition(&mut list[start..end], &work.go_left, &mut work.scratch);
        }

        let left = self.build(start, mid, depth + 1, grad, hess, work, nodes);
        let right = self.build(mid, end, depth + 1, grad, hess, work, nodes);
        nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
            gain: best.gain,
        };
        id
    }

    #[allow(clippy::too_many_arguments)]
    fn best_split(
        &self,
        lists: &[Vec<u32>],
        start: usize,
        end: usize,
        g: f64,
        h: f64,
        grad: &[f64],
        hess: &[f64],
    ) -> Option<SplitChoice> {
        let lambda = self.params.lambda;
        let min_leaf = self.params.min_samples_leaf;
        let parent = g * g / (h + lambda);
        let mut best: Option<SplitChoice> = None;
        for (feature, list) in lists.iter().enumerate() {
            let list = &list[start..end];
            let column = &self.columns[feature];
            let n = list.len();
            let mut gl = 0.0;
            let mut hl = 0.0;
            let mut here = column[list[0] as usize];
            for pos in 0..n - 1 {
                let r = list[pos] as usize;
                gl += grad[r];
                hl += hess[r];
                let next = column[list[pos + 1] as usize];
                let left_count = pos + 1;
                if n - left_count < min_leaf {
                    break;
                }
                if left_count < min_leaf || here == next {
                    here = next;
                    continue;
                }
                let gr = g - gl;
                let hr = h - hl;
                let gain = 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent) - self.params.gamma;
                let improves = match best {
                    None => gain > 0.0,
                    Some(b) => gain > b.gain + TIE_EPS * b.gain.abs(),
                };
                if improves {
                    best = Some(SplitChoice {
                        feature,
                        threshold: midpoint(here, next),
                        gain,
                    });
                }
                here = next;
            }
        }
        best
    }
}

/// Per-tree buffers: the node's rows in original order and each feature's
/// rows in value order, both kept contiguous per node.
struct Workspace {
    rows: Vec<u32>,
    lists: Vec<Vec<u32>>,
    scratch: Vec<u32>,
    go_left: Vec<bool>,
}

/// Moves rows flagged in `go_left` to the front, keeping relative order on
/// both sides. Returns the number of such rows.
fn stable_partition(segment: &mut [u32], go_left: &[bool], scratch: &mut Vec<u32>) -> usize {
    scratch.clear();
    let mut write = 0;
    for i in 0..segment.len() {
        let r = segment[i];
        if go_left[r as usize] {
            segment[write] = r;
            write += 1;
        } else {
            scratch.push(r);
        }
    }
    segment[write..].copy_from_slice(scratch);
    write
}

/// Threshold separating `lo < hi` such that `lo < t <= hi`.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + 0.5 * (hi - lo);
    if mid > lo && mid <= hi {
        mid
    } else {
        hi
    }
}

//! Max-norm neighbor queries for the KSG estimator.
//!
//! Two index flavors behind one interface: a plain sorted array for
//! one-dimensional marginals (binary-search counting, two-pointer KNN)
//! and a k-d tree with max-norm pruning for higher dimensions. Both
//! answer the two queries KSG needs: the distance to the K-th nearest
//! neighbor of a stored point, and the number of stored points strictly
//! inside a given radius. The query point itself is always excluded.

/// Flat point storage, `n` points of dimension `dim`.
pub(crate) struct PointSet {
    data: Vec<f64>,
    n: usize,
    dim: usize,
}

impl PointSet {
    pub fn new(n: usize, dim: usize) -> Self {
        PointSet {
            data: vec![0.0; n * dim],
            n,
            dim,
        }
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn set(&mut self, i: usize, d: usize, v: f64) {
        self.data[i * self.dim + d] = v;
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[inline]
fn max_norm(a: &[f64], b: &[f64]) -> f64 {
    let mut d = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let v = (x - y).abs();
        if v > d {
            d = v;
        }
    }
    d
}

/// Bounded max-heap of the K smallest distances, kept as a flat vec
/// (K is tiny in practice).
struct KBest {
    k: usize,
    worst: f64,
    items: Vec<f64>,
}

impl KBest {
    fn new(k: usize) -> Self {
        KBest {
            k,
            worst: f64::INFINITY,
            items: Vec::with_capacity(k),
        }
    }

    #[inline]
    fn bound(&self) -> f64 {
        if self.items.len() < self.k {
            f64::INFINITY
        } else {
            self.worst
        }
    }

    #[inline]
    fn offer(&mut self, d: f64) {
        if self.items.len() < self.k {
            self.items.push(d);
            if self.items.len() == self.k {
                self.worst = self.items.iter().cloned().fold(0.0, f64::max);
            }
        } else if d < self.worst {
            let (mi, _) = self
                .items
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            self.items[mi] = d;
            self.worst = self.items.iter().cloned().fold(0.0, f64::max);
        }
    }
}

enum Node {
    Leaf {
        start: u32,
        end: u32,
    },
    Inner {
        split_dim: u32,
        split_val: f64,
        left: u32,
        right: u32,
    },
}

const LEAF_SIZE: usize = 16;

pub(crate) struct KdTree {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

impl KdTree {
    fn build(points: &PointSet) -> Self {
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        let mut nodes = Vec::new();
        let n = order.len();
        Self::build_range(points, &mut order, &mut nodes, 0, n);
        KdTree { nodes, order }
    }

    fn build_range(
        points: &PointSet,
        order: &mut [u32],
        nodes: &mut Vec<Node>,
        start: usize,
        end: usize,
    ) -> u32 {
        let id = nodes.len() as u32;
        if end - start <= LEAF_SIZE {
            nodes.push(Node::Leaf {
                start: start as u32,
                end: end as u32,
            });
            return id;
        }
        // split on the dimension with the widest spread
        let dim = points.dim();
        let mut split_dim = 0;
        let mut best_spread = -1.0f64;
        for d in 0..dim {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &i in &order[start..end] {
                let v = points.point(i as usize)[d];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi - lo > best_spread {
                best_spread = hi - lo;
                split_dim = d;
            }
        }
        let mid = (start + end) / 2;
        order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points.point(a as usize)[split_dim].total_cmp(&points.point(b as usize)[split_dim])
        });
        let split_val = points.point(order[mid] as usize)[split_dim];
        nodes.push(Node::Inner {
            split_dim: split_dim as u32,
            split_val,
            left: 0,
            right: 0,
        });
        let left = Self::build_range(points, order, nodes, start, mid);
        let right = Self::build_range(points, order, nodes, mid, end);
        if let Node::Inner {
            left: l, right: r, ..
        } = &mut nodes[id as usize]
        {
            *l = left;
            *r = right;
        }
        id
    }

    fn knn_into(&self, points: &PointSet, node: u32, query: &[f64], skip: u32, best: &mut KBest) {
        match &self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for &i in &self.order[*start as usize..*end as usize] {
                    if i == skip {
                        continue;
                    }
                    let d = max_norm(query, points.point(i as usize));
                    best.offer(d);
                }
            }
            Node::Inner {
                split_dim,
                split_val,
                left,
                right,
            } => {
                let delta = query[*split_dim as usize] - split_val;
                let (near, far) = if delta < 0.0 {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.knn_into(points, near, query, skip, best);
                if delta.abs() <= best.bound() {
                    self.knn_into(points, far, query, skip, best);
                }
            }
        }
    }

    fn count_node(
        &self,
        points: &PointSet,
        node: u32,
        query: &[f64],
        skip: u32,
        radius: f64,
    ) -> usize {
        match &self.nodes[node as usize] {
            Node::Leaf { start, end } => self.order[*start as usize..*end as usize]
                .iter()
                .filter(|&&i| i != skip && max_norm(query, points.point(i as usize)) < radius)
                .count(),
            Node::Inner {
                split_dim,
                split_val,
                left,
                right,
            } => {
                let delta = query[*split_dim as usize] - split_val;
                let (near, far) = if delta < 0.0 {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                let mut c = self.count_node(points, near, query, skip, radius);
                if delta.abs() < radius {
                    c += self.count_node(points, far, query, skip, radius);
                }
                c
            }
        }
    }
}

/// Sorted-array index for 1-d point sets.
pub(crate) struct Sorted1d {
    values: Vec<f64>,
    /// position of original point i in `values`
    pos: Vec<u32>,
}

impl Sorted1d {
    fn build(points: &PointSet) -> Self {
        let n = points.len();
        let mut idx: Vec<u32> = (0..n as u32).collect();
        idx.sort_unstable_by(|&a, &b| {
            points.point(a as usize)[0].total_cmp(&points.point(b as usize)[0])
        });
        let mut values = Vec::with_capacity(n);
        let mut pos = vec![0u32; n];
        for (p, &i) in idx.iter().enumerate() {
            values.push(points.point(i as usize)[0]);
            pos[i as usize] = p as u32;
        }
        Sorted1d { values, pos }
    }

    fn kth_distance(&self, i: usize, k: usize) -> f64 {
        let p = self.pos[i] as usize;
        let v = self.values[p];
        let mut lo = p; // next candidate below is lo-1
        let mut hi = p; // next candidate above is hi+1
        let mut d = 0.0;
        for _ in 0..k {
            let below = if lo > 0 {
                v - self.values[lo - 1]
            } else {
                f64::INFINITY
            };
            let above = if hi + 1 < self.values.len() {
                self.values[hi + 1] - v
            } else {
                f64::INFINITY
            };
            if below <= above {
                lo -= 1;
                d = below;
            } else {
                hi += 1;
                d = above;
            }
        }
        d
    }

    fn count_closer(&self, i: usize, radius: f64) -> usize {
        let v = self.values[self.pos[i] as usize];
        let lo = self.values.partition_point(|&s| s <= v - radius);
        let hi = self.values.partition_point(|&s| s < v + radius);
        hi - lo - 1 // exclude the query point itself
    }
}

/// Max-norm neighbor index over a point set.
pub(crate) enum MaxNormIndex {
    One(Sorted1d),
    Kd(KdTree),
}

impl MaxNormIndex {
    pub fn build(points: &PointSet) -> Self {
        if points.dim() == 1 {
            MaxNormIndex::One(Sorted1d::build(points))
        } else {
            MaxNormIndex::Kd(KdTree::build(points))
        }
    }

    /// Distance from stored point `i` to its k-th nearest neighbor
    /// (self excluded). Requires `k < n`.
    pub fn kth_distance(&self, points: &PointSet, i: usize, k: usize) -> f64 {
        match self {
            MaxNormIndex::One(s) => s.kth_distance(i, k),
            MaxNormIndex::Kd(t) => {
                let mut best = KBest::new(k);
                t.knn_into(points, 0, points.point(i), i as u32, &mut best);
                best.worst
            }
        }
    }

    /// Number of stored points strictly within `radius` of point `i`
    /// (self excluded).
    pub fn count_closer(&self, points: &PointSet, i: usize, radius: f64) -> usize {
        match self {
            MaxNormIndex::One(s) => s.count_closer(i, radius),
            MaxNormIndex::Kd(t) => t.count_node(points, 0, points.point(i), i as u32, radius),
        }
    }
}

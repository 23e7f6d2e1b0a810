//! Static 2-D kd-tree for nearest-contour-point queries.
//!
//! Ties on distance resolve to the lowest point index, which makes the
//! answer identical to a linear scan that keeps the first minimum.

use crate::model::Point2D;

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub index: usize,
    /// Squared Euclidean distance.
    pub dist_sq: f64,
}

impl Nearest {
    pub fn distance(&self) -> f64 {
        self.dist_sq.sqrt()
    }

    fn better_than(&self, other: &Nearest) -> bool {
        self.dist_sq < other.dist_sq || (self.dist_sq == other.dist_sq && self.index < other.index)
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<Point2D>,
    // Point indices, permuted so every node owns a contiguous range.
    order: Vec<usize>,
    nodes: Vec<Node>,
}

fn coord(p: &Point2D, axis: usize) -> f64 {
    if axis == 0 {
        p.x
    } else {
        p.y
    }
}

pub(crate) fn dist_sq(a: &Point2D, b: &Point2D) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    dx * dx + dy * dy
}

impl KdTree {
    pub fn build(points: Vec<Point2D>) -> Self {
        let mut tree = Self { order: (0..points.len()).collect(), points, nodes: Vec::new() };
        if !tree.points.is_empty() {
            tree.build_node(0, tree.points.len());
        }
        tree
    }

    pub fn points(&self) -> &[Point2D] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let (min, max) = self.order[start..end].iter().map(|&i| self.points[i]).fold(
            ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]),
            |(lo, hi), p| ([lo[0].min(p.x), lo[1].min(p.y)], [hi[0].max(p.x), hi[1].max(p.y)]),
        );
        let axis = usize::from(max[1] - min[1] > max[0] - min[0]);
        let mid = start + (end - start) / 2;
        let points = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            coord(&points[a], axis).total_cmp(&coord(&points[b], axis))
        });
        let value = coord(&self.points[self.order[mid]], axis);
        self.nodes.push(Node::Leaf { start, end });
        // Left holds coordinates <= value, right holds >= value.
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split { axis, value, left, right };
        id
    }

    pub fn nearest(&self, query: &Point2D) -> Option<Nearest> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = Nearest { index: usize::MAX, dist_sq: f64::INFINITY };
        self.search(0, query, &mut best);
        Some(best)
    }

    fn search(&self, node: usize, query: &Point2D, best: &mut Nearest) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let cand = Nearest { index: i, dist_sq: dist_sq(query, &self.points[i]) };
                    if cand.better_than(best) {
                        *best = cand;
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = coord(query, axis) - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, best);
                // Equal distance can still hide a lower index on the far side.
                if diff * diff <= best.dist_sq {
                    self.search(far, query, best);
                }
            }
        }
    }
}

//! Finite layered graphs and ray search, and their instantiation as the
//! search for compatible choices of solutions of generator systems.
//!
//! A graph has layers `V1..Vd` below an implicit root; every vertex of
//! `V(n+1)` lists its neighbours in `Vn`. A ray picks one vertex per layer,
//! each a neighbour of the one before. Only finite depth is searched.

mod embed;
mod instance;

use std::cmp::Ordering;

use crate::interval::Interval;

pub use embed::{admit, build_layers, diagram_schedule, EmbeddingInstance, EmbeddingLayers, Feasibility, KoenigError};
pub use instance::{parse_instance, InstanceFile, InstanceError};

/// Total order on vertex payload entries, used for deterministic search.
pub trait Payload: Clone + PartialEq {
    fn payload_cmp(&self, other: &Self) -> Ordering;
}

impl Payload for i64 {
    fn payload_cmp(&self, other: &i64) -> Ordering {
        self.cmp(other)
    }
}

impl Payload for Interval {
    fn payload_cmp(&self, other: &Interval) -> Ordering {
        self.lex_cmp(other)
    }
}

fn tuple_cmp<T: Payload>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.payload_cmp(y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer<T> {
    pub vertices: Vec<Vec<T>>,
    /// `neighbours[v]`: indices into the previous layer. Empty for layer 1,
    /// whose vertices hang off the root.
    pub neighbours: Vec<Vec<usize>>,
    pub warnings: Vec<String>,
}

/// Vertices of one layer and, per vertex, its neighbours in the layer above.
pub type ExplicitLayer<T> = (Vec<Vec<T>>, Vec<Vec<usize>>);

#[derive(Clone, Debug, PartialEq)]
pub struct LayeredGraph<T> {
    pub layers: Vec<Layer<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RaySearch<T> {
    /// One payload per layer, from `V1` down.
    Ray(Vec<Vec<T>>),
    /// 1-based index of the first layer no path from the root reaches.
    NoRay(usize),
}

impl<T: Payload> LayeredGraph<T> {
    /// Explicit layers and neighbour lists.
    ///
    /// # Panics
    /// If a neighbour list has the wrong length or an index out of range.
    pub fn new(layers: Vec<ExplicitLayer<T>>) -> LayeredGraph<T> {
        let mut out: Vec<Layer<T>> = Vec::with_capacity(layers.len());
        for (i, (vertices, neighbours)) in layers.into_iter().enumerate() {
            assert_eq!(vertices.len(), neighbours.len(), "one neighbour list per vertex");
            let prev = if i == 0 { 0 } else { out[i - 1].vertices.len() };
            assert!(neighbours.iter().flatten().all(|&j| j < prev), "neighbour index out of range");
            out.push(Layer { vertices, neighbours, warnings: Vec::new() });
        }
        LayeredGraph { layers: out }
    }

    /// Layers of tuples with edges by exact prefix: `w` in `V(n+1)` is a
    /// neighbour of `v` in `Vn` iff `w` without its last entry equals `v`.
    pub fn from_prefix(layers: Vec<Vec<Vec<T>>>) -> LayeredGraph<T> {
        let mut out: Vec<Layer<T>> = Vec::with_capacity(layers.len());
        for (i, vertices) in layers.into_iter().enumerate() {
            let neighbours = if i == 0 {
                vec![Vec::new(); vertices.len()]
            } else {
                let prev = &out[i - 1].vertices;
                vertices
                    .iter()
                    .map(|w| match w.split_last() {
                        Some((_, head)) => (0..prev.len()).filter(|&j| prev[j].as_slice() == head).collect(),
                        None => Vec::new(),
                    })
                    .collect()
            };
            out.push(Layer { vertices, neighbours, warnings: Vec::new() });
        }
        LayeredGraph { layers: out }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.vertices.len()).collect()
    }

    /// Depth-first search for a ray, trying vertices in increasing payload
    /// order; dead vertices are remembered, so each edge is examined once.
    pub fn find_ray(&self) -> RaySearch<T> {
        let d = self.depth();
        if d == 0 {
            return RaySearch::Ray(Vec::new());
        }
        // children[n][v]: vertices of layer n+1 adjacent to v in layer n,
        // sorted by payload.
        let mut children: Vec<Vec<Vec<usize>>> = Vec::with_capacity(d);
        for n in 0..d {
            let mut c = vec![Vec::new(); self.layers[n].vertices.len()];
            if n + 1 < d {
                for (w, ns) in self.layers[n + 1].neighbours.iter().enumerate() {
                    for &v in ns {
                        c[v].push(w);
                    }
                }
                let next = &self.layers[n + 1].vertices;
                for list in c.iter_mut() {
                    list.sort_by(|&a, &b| tuple_cmp(&next[a], &next[b]).then(a.cmp(&b)));
                    list.dedup();
                }
            }
            children.push(c);
        }
        let mut roots: Vec<usize> = (0..self.layers[0].vertices.len()).collect();
        roots.sort_by(|&a, &b| tuple_cmp(&self.layers[0].vertices[a], &self.layers[0].vertices[b]).then(a.cmp(&b)));
        let mut dead: Vec<Vec<bool>> = self.layers.iter().map(|l| vec![false; l.vertices.len()]).collect();
        // Explicit stack of (layer, candidate list, position).
        let mut path: Vec<usize> = Vec::with_capacity(d);
        let mut stack: Vec<(Vec<usize>, usize)> = vec![(roots, 0)];
        while let Some((cands, pos)) = stack.last_mut() {
            let n = path.len();
            if *pos >= cands.len() {
                stack.pop();
                if let Some(v) = path.pop() {
                    dead[n - 1][v] = true;
                }
                continue;
            }
            let v = cands[*pos];
            *pos += 1;
            if dead[n][v] {
                continue;
            }
            path.push(v);
            if n + 1 == d {
                let ray = path.iter().enumerate().map(|(k, &i)| self.layers[k].vertices[i].clone()).collect();
                return RaySearch::Ray(ray);
            }
            stack.push((children[n][v].clone(), 0));
        }
        RaySearch::NoRay(self.first_unreachable())
    }

    fn first_unreachable(&self) -> usize {
        let mut reach: Vec<bool> = vec![true; self.layers[0].vertices.len()];
        for (n, layer) in self.layers.iter().enumerate() {
            if n > 0 {
                reach = layer.neighbours.iter().map(|ns| ns.iter().any(|&v| reach[v])).collect();
            }
            if !reach.iter().any(|&r| r) {
                return n + 1;
            }
        }
        unreachable!("every layer reachable means a ray exists")
    }

    /// Every vertex of `V(n+1)`, with its last entry dropped, is a vertex of
    /// `Vn`.
    pub fn check_chain(&self) -> bool {
        self.layers.windows(2).all(|w| {
            w[1].vertices.iter().all(|t| match t.split_last() {
                Some((_, head)) => w[0].vertices.iter().any(|v| v.as_slice() == head),
                None => false,
            })
        })
    }
}

/// `true` iff consecutive payloads extend each other by one entry.
pub fn has_prefix_property<T: PartialEq>(ray: &[Vec<T>]) -> bool {
    ray.windows(2).all(|w| w[1].len() == w[0].len() + 1 && w[1][..w[0].len()] == w[0][..])
}

//! Truncated directed covers and their wired (sink-contracted) form.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{BaseGraph, Label};

/// Default cap on the number of vertices of a materialized cover.
pub const DEFAULT_VERTEX_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub label: Label,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub depth: u32,
}

/// The cover tree of a base graph truncated at height `h`.
///
/// Vertices are numbered breadth-first with children in generation order, so
/// the root is vertex 0 and every level occupies a contiguous index range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverTree {
    root_type: Label,
    height: u32,
    vertices: Vec<Vertex>,
    level_starts: Vec<usize>,
}

/// Number of vertices on each level `0..=h` of the cover rooted at `root_type`,
/// saturating on overflow.
pub fn level_sizes(g: &BaseGraph, root_type: Label, h: u32) -> Vec<u128> {
    let m = g.m();
    let mut counts = vec![0u128; m];
    counts[root_type] = 1;
    let mut sizes = vec![1u128];
    for _ in 0..h {
        let mut next = vec![0u128; m];
        for (i, &count) in counts.iter().enumerate() {
            for (j, slot) in next.iter_mut().enumerate() {
                *slot = slot.saturating_add(count.saturating_mul(u128::from(g.d(i, j))));
            }
        }
        counts = next;
        sizes.push(counts.iter().fold(0u128, |a, &c| a.saturating_add(c)));
    }
    sizes
}

impl CoverTree {
    pub fn build(g: &BaseGraph, root_type: Label, h: u32) -> Result<Self> {
        Self::build_capped(g, root_type, h, DEFAULT_VERTEX_CAP)
    }

    pub fn build_capped(g: &BaseGraph, root_type: Label, h: u32, cap: u64) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidArgument("cover height must be at least 1".into()));
        }
        if root_type >= g.m() {
            return Err(Error::InvalidArgument(format!("root type {} out of range", root_type + 1)));
        }
        let total = level_sizes(g, root_type, h).iter().fold(0u128, |a, &c| a.saturating_add(c));
        if total > u128::from(cap) {
            return Err(Error::cap("cover vertex count", total, cap));
        }
        let mut vertices = Vec::with_capacity(total as usize);
        vertices.push(Vertex { label: root_type, parent: None, children: Vec::new(), depth: 0 });
        let mut level_starts = vec![0];
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let depth = vertices[x].depth;
            if depth == h {
                continue;
            }
            if level_starts.len() as u32 == depth + 1 {
                level_starts.push(vertices.len());
            }
            let label = vertices[x].label;
            for &child in g.chi(label) {
                let idx = vertices.len();
                vertices.push(Vertex { label: child, parent: Some(x), children: Vec::new(), depth: depth + 1 });
                vertices[x].children.push(idx);
                queue.push_back(idx);
            }
        }
        level_starts.push(vertices.len());
        Ok(CoverTree { root_type, height: h, vertices, level_starts })
    }

    pub fn root_type(&self) -> Label {
        self.root_type
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, x: usize) -> &Vertex {
        &self.vertices[x]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Index range of the vertices at depth `l`.
    pub fn level(&self, l: u32) -> std::ops::Range<usize> {
        let l = l as usize;
        self.level_starts[l]..self.level_starts[l + 1]
    }

    pub fn level_counts(&self) -> Vec<usize> {
        (0..=self.height).map(|l| self.level(l).len()).collect()
    }

    /// The cone below `x` as a standalone tree of height `h - depth(x)`.
    pub fn cone(&self, x: usize) -> Result<CoverTree> {
        let top = self
            .vertices
            .get(x)
            .ok_or_else(|| Error::InvalidArgument(format!("vertex {x} out of range")))?;
        if top.depth == self.height {
            return Err(Error::InvalidArgument(format!("vertex {x} is a leaf; its cone is empty")));
        }
        let height = self.height - top.depth;
        let mut vertices = Vec::new();
        let mut level_starts = vec![0];
        let mut queue = VecDeque::from([(x, None::<usize>)]);
        while let Some((old, parent)) = queue.pop_front() {
            let v = &self.vertices[old];
            let depth = v.depth - top.depth;
            if level_starts.len() as u32 == depth {
                level_starts.push(vertices.len());
            }
            let idx = vertices.len();
            vertices.push(Vertex { label: v.label, parent, children: Vec::new(), depth });
            if let Some(p) = parent {
                vertices[p].children.push(idx);
            }
            for &c in &v.children {
                queue.push_back((c, Some(idx)));
            }
        }
        level_starts.push(vertices.len());
        Ok(CoverTree { root_type: top.label, height, vertices, level_starts })
    }

    /// Line-oriented dump: a header `# root_type=<t> height=<h> vertices=<n>`
    /// followed by `index type parent children` per vertex, with 1-based
    /// types, `-` for a missing parent or an empty child list, and children
    /// separated by commas.
    pub fn export_text(&self) -> String {
        let mut out = format!(
            "# root_type={} height={} vertices={}\n",
            self.root_type + 1,
            self.height,
            self.len()
        );
        for (idx, v) in self.vertices.iter().enumerate() {
            let parent = v.parent.map_or_else(|| "-".to_string(), |p| p.to_string());
            let children = if v.children.is_empty() {
                "-".to_string()
            } else {
                v.children.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
            };
            let _ = writeln!(out, "{idx} {} {parent} {children}", v.label + 1);
        }
        out
    }
}

/// One entry of a rotor sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Vertex(usize),
    /// The root's ancestor, merged into the sink.
    SinkDown,
    /// A collapsed height-`h` leaf.
    SinkUp,
}

impl Target {
    pub fn is_sink(self) -> bool {
        !matches!(self, Target::Vertex(_))
    }
}

/// A cover tree with its leaves and the root's ancestor contracted to one sink.
///
/// Non-sink vertices keep the indices they have in the cover tree (all
/// vertices of depth `< h`). Each rotor sequence starts with the ancestor
/// and then lists the children in generation order; every edge into the
/// sink is kept as its own entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiredTree {
    root_type: Label,
    height: u32,
    labels: Vec<Label>,
    parents: Vec<Option<usize>>,
    rotors: Vec<Vec<Target>>,
}

impl WiredTree {
    pub fn wire(t: &CoverTree) -> Self {
        let n = t.level(t.height()).start;
        let mut labels = Vec::with_capacity(n);
        let mut parents = Vec::with_capacity(n);
        let mut rotors = Vec::with_capacity(n);
        for v in &t.vertices()[..n] {
            let mut seq = Vec::with_capacity(v.children.len() + 1);
            seq.push(v.parent.map_or(Target::SinkDown, Target::Vertex));
            seq.extend(
                v.children
                    .iter()
                    .map(|&c| if c < n { Target::Vertex(c) } else { Target::SinkUp }),
            );
            labels.push(v.label);
            parents.push(v.parent);
            rotors.push(seq);
        }
        WiredTree { root_type: t.root_type(), height: t.height(), labels, parents, rotors }
    }

    /// Builds and wires the cover of `g` rooted at `root_type` with height `h`.
    pub fn build(g: &BaseGraph, root_type: Label, h: u32) -> Result<Self> {
        Ok(Self::wire(&CoverTree::build(g, root_type, h)?))
    }

    pub fn root_type(&self) -> Label {
        self.root_type
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Number of non-sink vertices.
    pub fn len(&self) -> usize {
        self.rotors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotors.is_empty()
    }

    pub fn label(&self, x: usize) -> Label {
        self.labels[x]
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parents[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.rotors[x].len()
    }

    /// The rotor sequence of `x`.
    pub fn neighbors(&self, x: usize) -> &[Target] {
        &self.rotors[x]
    }

    /// Number of rotor entries of `x` that point into the sink.
    pub fn sink_edges(&self, x: usize) -> usize {
        self.rotors[x].iter().filter(|t| t.is_sink()).count()
    }

    /// Product of all degrees, i.e. the number of rotor configurations,
    /// saturating at `u128::MAX`.
    pub fn config_space_size(&self) -> u128 {
        self.rotors.iter().fold(1u128, |a, r| a.saturating_mul(r.len() as u128))
    }
}

//! Vietoris–Rips filtrations and per-scale simplicial complexes.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::ingest::PointCloud;

pub type Vertex = u32;

/// Default cap on the number of simplices a filtration may hold.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 50_000_000;

/// A nonempty, strictly increasing list of vertex indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(SmallVec<[Vertex; 4]>);

impl Simplex {
    /// Sorts the vertices; fails on an empty or repeated vertex list.
    pub fn new(vertices: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut v: SmallVec<[Vertex; 4]> = vertices.into_iter().collect();
        v.sort_unstable();
        Self::from_sorted(v)
    }

    pub fn from_sorted(vertices: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let v: SmallVec<[Vertex; 4]> = vertices.into_iter().collect();
        if v.is_empty() {
            return Err(Error::InvalidArgument(
                "a simplex needs at least one vertex".into(),
            ));
        }
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "simplex vertices must be strictly increasing: {v:?}"
            )));
        }
        Ok(Simplex(v))
    }

    pub fn vertex(v: Vertex) -> Self {
        Simplex(smallvec::smallvec![v])
    }

    pub(crate) fn from_sorted_unchecked(v: SmallVec<[Vertex; 4]>) -> Self {
        debug_assert!(!v.is_empty() && v.windows(2).all(|w| w[0] < w[1]));
        Simplex(v)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces; the i-th face omits vertex i. Empty for vertices.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| {
            let mut v = self.0.clone();
            v.remove(i);
            Simplex(v)
        })
    }

    /// `self ∪ {v}`, or `None` when `v` is already a vertex.
    pub fn with_vertex(&self, v: Vertex) -> Option<Simplex> {
        match self.0.binary_search(&v) {
            Ok(_) => None,
            Err(pos) => {
                let mut w = self.0.clone();
                w.insert(pos, v);
                Some(Simplex(w))
            }
        }
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains_vertex(*v))
    }

    /// Vertex bitmask; requires every vertex < 64.
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &v| m | (1u64 << v))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.0 {
            if !first {
                f.write_char(' ')?;
            }
            first = false;
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl Serialize for Simplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Simplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<Vertex>::deserialize(d)?;
        Simplex::from_sorted(v).map_err(serde::de::Error::custom)
    }
}

/// Rounds to 12 significant digits so equal distances computed along
/// different floating-point paths land on the same grid value.
pub fn round_scale(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// `start, start + step, …` up to `stop` (inclusive within half a step),
/// each value rounded like entry scales.
pub fn scale_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidArgument(format!(
            "grid needs finite start <= stop and step > 0, got ({start}, {stop}, {step})"
        )));
    }
    let steps = ((stop - start) / step + 0.5).floor() as usize;
    Ok((0..=steps)
        .map(|i| round_scale(start + i as f64 * step))
        .collect())
}

/// Orders simplices by (scale, dimension, vertices).
fn entry_order(a: &FiltrationEntry, b: &FiltrationEntry) -> Ordering {
    a.scale
        .total_cmp(&b.scale)
        .then(a.simplex.dim().cmp(&b.simplex.dim()))
        .then_with(|| a.simplex.cmp(&b.simplex))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationEntry {
    pub simplex: Simplex,
    pub scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RipsParams {
    pub max_dim: usize,
    pub max_radius: f64,
    pub budget: usize,
}

impl RipsParams {
    pub fn new(max_dim: usize, max_radius: f64) -> Self {
        RipsParams {
            max_dim,
            max_radius,
            budget: DEFAULT_SIMPLEX_BUDGET,
        }
    }
}

/// Simplices with entry scales, sorted by (scale, dimension, lexicographic vertices).
#[derive(Clone, Debug)]
pub struct Filtration {
    entries: Vec<FiltrationEntry>,
    max_dim: usize,
    vertex_count: usize,
    index: HashMap<Simplex, usize>,
    /// Rounded pairwise distances (row-major), present when built from a point cloud.
    distances: Option<Vec<f64>>,
}

pub fn build_rips_filtration(cloud: &PointCloud, params: RipsParams) -> Result<Filtration> {
    if !(params.max_radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "max_radius must be positive, got {}",
            params.max_radius
        )));
    }
    let n = cloud.len();
    if n > Vertex::MAX as usize {
        return Err(Error::InvalidArgument(format!(
            "{n} points exceed the vertex index range"
        )));
    }
    let radius = round_scale(params.max_radius);
    let mut distances = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = round_scale(cloud.distance(i, j));
            distances[i * n + j] = d;
            distances[j * n + i] = d;
        }
    }
    // upper neighbors of each vertex, ascending
    let upper: Vec<Vec<Vertex>> = (0..n)
        .map(|i| {
            (i + 1..n)
                .filter(|&j| distances[i * n + j] <= radius)
                .map(|j| j as Vertex)
                .collect()
        })
        .collect();

    let count = AtomicUsize::new(0);
    let per_vertex: Vec<Result<Vec<FiltrationEntry>>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut ctx = Expansion {
                upper: &upper,
                distances: &distances,
                n,
                max_dim: params.max_dim,
                budget: params.budget,
                count: &count,
                out: Vec::new(),
            };
            let mut stack: SmallVec<[Vertex; 4]> = smallvec::smallvec![v as Vertex];
            if !ctx.expand(&mut stack, 0.0, &upper[v]) {
                return Err(Error::SimplexBudget {
                    budget: params.budget,
                });
            }
            Ok(ctx.out)
        })
        .collect();

    let mut entries = Vec::with_capacity(count.load(AtomicOrdering::Relaxed));
    for chunk in per_vertex {
        entries.extend(chunk?);
    }
    entries.par_sort_unstable_by(entry_order);
    Ok(Filtration::from_sorted_entries(
        entries,
        params.max_dim,
        n,
        Some(distances),
    ))
}

struct Expansion<'a> {
    upper: &'a [Vec<Vertex>],
    distances: &'a [f64],
    n: usize,
    max_dim: usize,
    budget: usize,
    count: &'a AtomicUsize,
    out: Vec<FiltrationEntry>,
}

impl Expansion<'_> {
    /// Emits `simplex` and its cofaces over `candidates`; false once the budget is spent.
    fn expand(
        &mut self,
        simplex: &mut SmallVec<[Vertex; 4]>,
        scale: f64,
        candidates: &[Vertex],
    ) -> bool {
        if self.count.fetch_add(1, AtomicOrdering::Relaxed) >= self.budget {
            return false;
        }
        self.out.push(FiltrationEntry {
            simplex: Simplex::from_sorted_unchecked(simplex.clone()),
            scale,
        });
        if simplex.len() > self.max_dim {
            return true;
        }
        for (pos, &u) in candidates.iter().enumerate() {
            let s = simplex
                .iter()
                .map(|&w| self.distances[w as usize * self.n + u as usize])
                .fold(scale, f64::max);
            let next = intersect_sorted(&candidates[pos + 1..], &self.upper[u as usize]);
            simplex.push(u);
            let ok = self.expand(simplex, s, &next);
            simplex.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

fn intersect_sorted(a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl Filtration {
    fn from_sorted_entries(
        entries: Vec<FiltrationEntry>,
        max_dim: usize,
        vertex_count: usize,
        distances: Option<Vec<f64>>,
    ) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.simplex.clone(), i))
            .collect();
        Filtration {
            entries,
            max_dim,
            vertex_count,
            index,
            distances,
        }
    }

    pub fn entries(&self) -> &[FiltrationEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn scale_of(&self, s: &Simplex) -> Option<f64> {
        self.index_of(s).map(|i| self.entries[i].scale)
    }

    /// Entry scale of the edge {u, v}: the rounded distance when the filtration
    /// was built from a point cloud, else the stored edge scale, else +∞.
    pub fn pair_scale(&self, u: Vertex, v: Vertex) -> f64 {
        if u == v {
            return 0.0;
        }
        if let Some(d) = &self.distances {
            return d[u as usize * self.vertex_count + v as usize];
        }
        Simplex::new([u, v])
            .ok()
            .and_then(|e| self.scale_of(&e))
            .unwrap_or(f64::INFINITY)
    }

    /// Number of entries with scale ≤ `eps`.
    pub fn prefix_len(&self, eps: f64) -> usize {
        self.entries.partition_point(|e| e.scale <= eps)
    }

    /// Distinct entry scales in ascending order.
    pub fn critical_scales(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for e in &self.entries {
            if out.last() != Some(&e.scale) {
                out.push(e.scale);
            }
        }
        out
    }

    /// Simplex counts s_k at `eps` for k = 0..=max_dim.
    pub fn counts_at(&self, eps: f64) -> Vec<usize> {
        let mut counts = vec![0; self.max_dim + 1];
        for e in &self.entries[..self.prefix_len(eps)] {
            counts[e.simplex.dim()] += 1;
        }
        counts
    }

    /// Line-oriented text form: `scale v0 v1 … vk` per simplex, after `#` header lines.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.entries.len() * 16);
        let _ = writeln!(out, "# persinv filtration");
        let _ = writeln!(out, "# vertices {}", self.vertex_count);
        let _ = writeln!(out, "# max_dim {}", self.max_dim);
        for e in &self.entries {
            let _ = writeln!(out, "{} {}", e.scale, e.simplex);
        }
        out
    }

    /// Parses [`Filtration::to_text`] output, checking sort order, face closure,
    /// monotonicity and the Rips scale law.
    pub fn parse_text(text: &str) -> Result<Filtration> {
        const MAX_VERTICES: usize = 1 << 24;
        let mut header_vertices: Option<usize> = None;
        let mut header_dim: Option<usize> = None;
        let mut entries: Vec<FiltrationEntry> = Vec::new();
        let mut index: HashMap<Simplex, usize> = HashMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut parts = rest.split_whitespace();
                match (parts.next(), parts.next()) {
                    (Some("vertices"), Some(v)) => {
                        let v: usize = v
                            .parse()
                            .map_err(|_| Error::parse(lineno, "bad vertex count"))?;
                        if v > MAX_VERTICES {
                            return Err(Error::parse(lineno, "vertex count too large"));
                        }
                        header_vertices = Some(v);
                    }
                    (Some("max_dim"), Some(d)) => {
                        header_dim =
                            Some(d.parse().map_err(|_| Error::parse(lineno, "bad max_dim"))?);
                    }
                    _ => {}
                }
                continue;
            }
            let mut fields = line.split_whitespace();
            let scale: f64 = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::parse(lineno, "missing or invalid scale"))?;
            if !scale.is_finite() || scale < 0.0 {
                return Err(Error::parse(lineno, "scale must be finite and nonnegative"));
            }
            let vertices: Vec<Vertex> = fields
                .map(|t| t.parse::<Vertex>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(lineno, "invalid vertex index"))?;
            let simplex =
                Simplex::from_sorted(vertices).map_err(|e| Error::parse(lineno, e.to_string()))?;
            if simplex
                .vertices()
                .iter()
                .any(|&v| v as usize >= MAX_VERTICES)
            {
                return Err(Error::parse(lineno, "vertex index too large"));
            }
            let entry = FiltrationEntry { simplex, scale };
            if let Some(prev) = entries.last() {
                if entry_order(prev, &entry) != Ordering::Less {
                    return Err(Error::parse(
                        lineno,
                        "entries are not sorted by (scale, dim, vertices)",
                    ));
                }
            }
            if entry.simplex.dim() == 0 && entry.scale != 0.0 {
                return Err(Error::parse(lineno, "vertices must enter at scale 0"));
            }
            for face in entry.simplex.faces() {
                match index.get(&face) {
                    Some(&i) if entries[i].scale <= entry.scale => {}
                    Some(_) => return Err(Error::parse(lineno, "face enters after its coface")),
                    None => return Err(Error::parse(lineno, format!("face {face:?} missing"))),
                }
            }
            if entry.simplex.dim() >= 2 {
                let v = entry.simplex.vertices();
                let mut max_edge: f64 = 0.0;
                for a in 0..v.len() {
                    for b in a + 1..v.len() {
                        let e = Simplex::from_sorted_unchecked(smallvec::smallvec![v[a], v[b]]);
                        max_edge = max_edge.max(entries[index[&e]].scale);
                    }
                }
                if max_edge != entry.scale {
                    return Err(Error::parse(lineno, "scale differs from the longest edge"));
                }
            }
            index.insert(entry.simplex.clone(), entries.len());
            entries.push(entry);
        }

        let observed_n = entries
            .iter()
            .filter(|e| e.simplex.dim() == 0)
            .map(|e| e.simplex.vertices()[0] as usize + 1)
            .max()
            .unwrap_or(0);
        let n = match header_vertices {
            Some(v) if v < observed_n => {
                return Err(Error::parse(
                    0,
                    "vertex header smaller than the vertices present",
                ))
            }
            Some(v) => v,
            None => observed_n,
        };
        let observed_dim = entries.iter().map(|e| e.simplex.dim()).max().unwrap_or(0);
        let max_dim = match header_dim {
            Some(d) if d < observed_dim => {
                return Err(Error::parse(
                    0,
                    "max_dim header smaller than the simplices present",
                ))
            }
            Some(d) => d,
            None => observed_dim,
        };
        Ok(Filtration {
            entries,
            max_dim,
            vertex_count: n,
            index,
            distances: None,
        })
    }
}

/// The complex Δ^ε: per-dimension simplex lists in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSnapshot {
    by_dim: Vec<Vec<Simplex>>,
    scale: f64,
    n_vertices: usize,
}

pub fn snapshot(filtration: &Filtration, scale: f64) -> ComplexSnapshot {
    let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); filtration.max_dim + 1];
    for e in &filtration.entries[..filtration.prefix_len(scale)] {
        by_dim[e.simplex.dim()].push(e.simplex.clone());
    }
    ComplexSnapshot::from_by_dim(by_dim, scale, filtration.vertex_count)
}

impl ComplexSnapshot {
    fn from_by_dim(mut by_dim: Vec<Vec<Simplex>>, scale: f64, n_vertices: usize) -> Self {
        for level in &mut by_dim {
            level.sort_unstable();
        }
        while by_dim.last().is_some_and(|l| l.is_empty()) {
            by_dim.pop();
        }
        ComplexSnapshot {
            by_dim,
            scale,
            n_vertices,
        }
    }

    /// The smallest complex containing `generators` (closed under faces).
    pub fn closure_of(
        n_vertices: usize,
        generators: impl IntoIterator<Item = Simplex>,
    ) -> Result<Self> {
        let mut seen: HashSet<Simplex> = HashSet::new();
        let mut stack: Vec<Simplex> = generators.into_iter().collect();
        while let Some(s) = stack.pop() {
            if s.vertices().iter().any(|&v| v as usize >= n_vertices) {
                return Err(Error::InvalidArgument(format!(
                    "simplex {s:?} uses a vertex outside 0..{n_vertices}"
                )));
            }
            if seen.contains(&s) {
                continue;
            }
            stack.extend(s.faces());
            seen.insert(s);
        }
        let top = seen.iter().map(Simplex::dim).max().map_or(0, |d| d + 1);
        let mut by_dim = vec![Vec::new(); top];
        for s in seen {
            by_dim[s.dim()].push(s);
        }
        Ok(Self::from_by_dim(by_dim, 0.0, n_vertices))
    }

    /// Full simplex on `n` vertices truncated at `max_dim`.
    pub fn complete(n: usize, max_dim: usize) -> Self {
        let mut by_dim = Vec::new();
        let mut level: Vec<Simplex> = (0..n as Vertex).map(Simplex::vertex).collect();
        for _ in 0..=max_dim {
            if level.is_empty() {
                break;
            }
            let next = level
                .iter()
                .flat_map(|s| {
                    let last = *s.vertices().last().unwrap();
                    (last + 1..n as Vertex).filter_map(move |v| s.with_vertex(v))
                })
                .collect();
            by_dim.push(std::mem::replace(&mut level, next));
        }
        Self::from_by_dim(by_dim, 0.0, n)
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Size of the ambient vertex set (the polynomial ring's variable count).
    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Dimension, or `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.is_empty()
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices(s.dim()).binary_search(s).is_ok()
    }

    /// Position of `s` within its dimension's canonical order.
    pub fn position(&self, s: &Simplex) -> Option<usize> {
        self.simplices(s.dim()).binary_search(s).ok()
    }

    pub fn is_closed(&self) -> bool {
        self.iter().all(|s| s.faces().all(|f| self.contains(&f)))
    }

    pub fn is_subcomplex_of(&self, other: &ComplexSnapshot) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    /// Maximal simplices, ordered by (dimension, vertices).
    pub fn facets(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for k in (0..self.by_dim.len()).rev() {
            let faces: Vec<Simplex> = if k + 1 < self.by_dim.len() {
                self.by_dim[k + 1].iter().flat_map(|s| s.faces()).collect()
            } else {
                Vec::new()
            };
            let faces: HashSet<Simplex> = faces.into_iter().collect();
            for s in &self.by_dim[k] {
                if !faces.contains(s) {
                    out.push(s.clone());
                }
            }
        }
        out.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        out
    }

    /// Simplices whose vertices all lie in `w`.
    pub fn induced(&self, w: &[Vertex]) -> ComplexSnapshot {
        let keep: HashSet<Vertex> = w.iter().copied().collect();
        let by_dim = self
            .by_dim
            .iter()
            .map(|level| {
                level
                    .iter()
                    .filter(|s| s.vertices().iter().all(|v| keep.contains(v)))
                    .cloned()
                    .collect()
            })
            .collect();
        Self::from_by_dim(by_dim, self.scale, self.n_vertices)
    }

    pub fn f_vector(&self) -> FVector {
        let mut counts = Vec::with_capacity(self.by_dim.len() + 1);
        counts.push(1);
        counts.extend(self.by_dim.iter().map(|l| l.len() as u64));
        FVector {
            counts,
            n_vertices: self.n_vertices,
        }
    }
}

pub fn facets(snapshot: &ComplexSnapshot) -> Vec<Simplex> {
    snapshot.facets()
}

pub fn induced_subcomplex(snapshot: &ComplexSnapshot, w: &[Vertex]) -> ComplexSnapshot {
    snapshot.induced(w)
}

/// Face counts (f_{-1}, f_0, …, f_{d-1}); `d = counts.len() - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FVector {
    pub counts: Vec<u64>,
    pub n_vertices: usize,
}

impl FVector {
    pub fn d(&self) -> usize {
        self.counts.len() - 1
    }

    /// f_i for i ≥ -1.
    pub fn get(&self, i: isize) -> u64 {
        usize::try_from(i + 1)
            .ok()
            .and_then(|j| self.counts.get(j).copied())
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HVector {
    pub values: Vec<i64>,
    pub d: usize,
    pub n: usize,
}

pub fn f_vector(snapshot: &ComplexSnapshot) -> FVector {
    snapshot.f_vector()
}

/// h_m = Σ_{j=0}^{m} C(d−j, m−j) (−1)^{m−j} f_{j−1}.
pub fn h_vector(f: &FVector) -> HVector {
    let d = f.d();
    let values = (0..=d)
        .map(|m| {
            (0..=m)
                .map(|j| {
                    let sign = if (m - j) % 2 == 0 { 1 } else { -1 };
                    sign * binomial((d - j) as i64, (m - j) as i64) * f.counts[j] as i64
                })
                .sum()
        })
        .collect();
    HVector {
        values,
        d,
        n: f.n_vertices,
    }
}

/// f_{m−1} = Σ_{i=0}^{m} C(d−i, m−i) h_i.
pub fn f_from_h(h: &HVector) -> FVector {
    FVector {
        counts: binomial_inverse(&h.values, h.d)
            .into_iter()
            .map(|v| v.max(0) as u64)
            .collect(),
        n_vertices: h.n,
    }
}

pub(crate) fn binomial_inverse(h: &[i64], d: usize) -> Vec<i64> {
    (0..=d)
        .map(|m| {
            (0..=m)
                .map(|i| binomial((d - i) as i64, (m - i) as i64) * h.get(i).copied().unwrap_or(0))
                .sum()
        })
        .collect()
}

/// Binomial coefficient with C(a, b) = 0 for b < 0 or b > a ≥ 0, and for
/// a < 0 the value 1 when b = 0 and 0 otherwise.
pub fn binomial(a: i64, b: i64) -> i64 {
    if b < 0 {
        return 0;
    }
    if a < 0 {
        return i64::from(b == 0);
    }
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: i128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as i128 / (i + 1) as i128;
    }
    acc as i64
}

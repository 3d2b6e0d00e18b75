//! Persistent Stanley–Reisner invariants.
//!
//! Graded Betti numbers come from Hochster's formula,
//! β_{i,i+j} = Σ_{|W| = i+j} dim H̃_{j−1}(Δ_W), enumerated over vertex subsets
//! encoded as `u64` bitmasks. Strand 1 only needs connected components; higher
//! strands run bit-packed GF(2) eliminations on the induced subcomplex.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{
    binomial, binomial_inverse, h_vector, snapshot, ComplexSnapshot, FVector, Filtration, HVector,
    Simplex, Vertex,
};
use crate::error::{Error, Result};
use crate::linalg::{self, gf2::BitMatrix, Field};
use crate::persistence::format_scale;

/// Default cap on the vertex count for subset enumeration.
pub const DEFAULT_VERTEX_LIMIT: usize = 22;
/// Bitmask width; no override can go beyond this.
pub const MAX_MASK_VERTICES: usize = 63;

/// Minimal nonfaces of a snapshot, i.e. the minimal generators of its
/// Stanley–Reisner ideal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialIdealGenerators {
    pub minimal_nonfaces: Vec<Vec<Vertex>>,
    pub ambient_n: usize,
    pub scale: f64,
}

impl MonomialIdealGenerators {
    /// Whether the squarefree monomial with support `support` lies in the ideal.
    pub fn contains_monomial(&self, support: &[Vertex]) -> bool {
        self.minimal_nonfaces
            .iter()
            .any(|g| g.iter().all(|v| support.contains(v)))
    }

    pub fn len(&self) -> usize {
        self.minimal_nonfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minimal_nonfaces.is_empty()
    }
}

/// All minimal nonfaces with at most `max_size` vertices.
pub fn minimal_nonfaces(snapshot: &ComplexSnapshot, max_size: usize) -> MonomialIdealGenerators {
    let n = snapshot.n_vertices();
    let mut out: Vec<Vec<Vertex>> = (0..n as Vertex)
        .filter(|&v| !snapshot.contains(&Simplex::vertex(v)))
        .map(|v| vec![v])
        .collect();
    for size in 2..=max_size {
        for tau in snapshot.simplices(size - 2) {
            let last = *tau.vertices().last().expect("simplices are nonempty");
            for v in last + 1..n as Vertex {
                let Some(cand) = tau.with_vertex(v) else {
                    continue;
                };
                if !snapshot.contains(&cand) && cand.faces().all(|f| snapshot.contains(&f)) {
                    out.push(cand.vertices().to_vec());
                }
            }
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    MonomialIdealGenerators {
        minimal_nonfaces: out,
        ambient_n: n,
        scale: snapshot.scale(),
    }
}

/// Maximality interval of a simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetBar {
    pub simplex: Simplex,
    pub dim: usize,
    pub birth: f64,
    #[serde(with = "inf_scale")]
    pub death: f64,
}

mod inf_scale {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str("inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Str(s) => crate::persistence::parse_scale(&s)
                .ok_or_else(|| serde::de::Error::custom(format!("bad scale {s:?}"))),
        }
    }
}

/// Entry scale of `σ ∪ {v}` under the Rips rule, or +∞ when some edge to `v`
/// never enters. Uses pair scales so truncation at max_dim does not hide cofaces.
fn coface_scale(filtration: &Filtration, sigma: &Simplex, scale: f64, v: Vertex) -> f64 {
    sigma
        .vertices()
        .iter()
        .map(|&u| edge_scale(filtration, u, v))
        .fold(scale, f64::max)
}

fn edge_scale(filtration: &Filtration, u: Vertex, v: Vertex) -> f64 {
    if filtration.max_dim() >= 1 {
        Simplex::new([u, v])
            .ok()
            .and_then(|e| filtration.scale_of(&e))
            .unwrap_or(f64::INFINITY)
    } else {
        filtration.pair_scale(u, v)
    }
}

/// Facet bars of positive length that are visible on at least one grid
/// point (all bars when the grid is empty). Sorted by (dim, birth, simplex).
pub fn facet_barcodes(filtration: &Filtration, grid: &[f64]) -> Vec<FacetBar> {
    let n = filtration.vertex_count() as Vertex;
    let visible =
        |birth: f64, death: f64| grid.is_empty() || grid.iter().any(|&g| birth <= g && g < death);
    let mut bars: Vec<FacetBar> = filtration
        .entries()
        .par_iter()
        .filter_map(|e| {
            let death = (0..n)
                .filter(|v| !e.simplex.contains_vertex(*v))
                .map(|v| coface_scale(filtration, &e.simplex, e.scale, v))
                .fold(f64::INFINITY, f64::min);
            (death > e.scale && visible(e.scale, death)).then(|| FacetBar {
                simplex: e.simplex.clone(),
                dim: e.simplex.dim(),
                birth: e.scale,
                death,
            })
        })
        .collect();
    bars.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.birth.total_cmp(&b.birth))
            .then_with(|| a.simplex.cmp(&b.simplex))
    });
    bars
}

/// |P_i^{ε,ε′}|: dim-`i` facet bars with birth ≤ eps1 and death > eps2.
pub fn facet_persistence_betti(bars: &[FacetBar], i: usize, eps1: f64, eps2: f64) -> usize {
    bars.iter()
        .filter(|b| b.dim == i && b.birth <= eps1 && b.death > eps2)
        .count()
}

/// `dim,birth,death,simplex` with vertices space-separated.
pub fn facet_bars_csv(bars: &[FacetBar]) -> String {
    let mut out = String::from("dim,birth,death,simplex\n");
    for b in bars {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            b.dim,
            b.birth,
            format_scale(b.death),
            b.simplex
        );
    }
    out
}

/// Settings shared by the Hochster enumerations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HochsterOptions {
    pub field: Field,
    pub vertex_limit: usize,
    /// Only subsets with |W| ≤ this are enumerated (internal degrees ≤ bound).
    pub max_support: Option<usize>,
}

impl Default for HochsterOptions {
    fn default() -> Self {
        HochsterOptions {
            field: Field::Gf2,
            vertex_limit: DEFAULT_VERTEX_LIMIT,
            max_support: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiEntry {
    pub i: usize,
    pub j: usize,
    pub value: u64,
}

/// β_{i,j} for one snapshot. Entries cover (0,0) and every (i, i+s) with
/// s in `strands`, i ≥ 1, i+s ≤ min(n, max_support); absent pairs are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradedBettiTable {
    pub entries: Vec<BettiEntry>,
    pub scale: f64,
    pub field: Field,
    pub strands: Vec<usize>,
    pub n: usize,
    pub max_support: Option<usize>,
}

/// β^{ε,ε′}_{i,j}, laid out like [`GradedBettiTable`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistentGradedBettiTable {
    pub entries: Vec<BettiEntry>,
    pub scales: (f64, f64),
    pub field: Field,
    pub strands: Vec<usize>,
    pub n: usize,
    pub max_support: Option<usize>,
}

fn lookup(entries: &[BettiEntry], i: usize, j: usize) -> u64 {
    entries
        .binary_search_by(|e| (e.i, e.j).cmp(&(i, j)))
        .map_or(0, |p| entries[p].value)
}

fn entries_csv(entries: &[BettiEntry], scale: &str) -> String {
    let mut out = String::new();
    for e in entries {
        let _ = writeln!(out, "{scale},{},{},{}", e.i, e.j, e.value);
    }
    out
}

impl GradedBettiTable {
    pub fn get(&self, i: usize, j: usize) -> u64 {
        lookup(&self.entries, i, j)
    }

    /// β_{i,i+j} for i = 1, 2, ….
    pub fn strand(&self, j: usize) -> Vec<u64> {
        let top = self.support_bound();
        (1..=top.saturating_sub(j))
            .map(|i| self.get(i, i + j))
            .collect()
    }

    fn support_bound(&self) -> usize {
        self.max_support.map_or(self.n, |m| m.min(self.n))
    }

    pub fn to_csv(&self) -> String {
        format!(
            "scale,i,j,value\n{}",
            entries_csv(&self.entries, &self.scale.to_string())
        )
    }

    /// Viewed as the ε = ε′ persistent table.
    pub fn as_persistent(&self) -> PersistentGradedBettiTable {
        PersistentGradedBettiTable {
            entries: self.entries.clone(),
            scales: (self.scale, self.scale),
            field: self.field,
            strands: self.strands.clone(),
            n: self.n,
            max_support: self.max_support,
        }
    }
}

impl PersistentGradedBettiTable {
    pub fn get(&self, i: usize, j: usize) -> u64 {
        lookup(&self.entries, i, j)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scale1,scale2,i,j,value\n");
        out.push_str(&entries_csv(
            &self.entries,
            &format!("{},{}", self.scales.0, self.scales.1),
        ));
        out
    }
}

/// Bitmask view of a complex for fast induced-subcomplex homology.
struct MaskComplex {
    present: u64,
    adj: Vec<u64>,
    masks: Vec<Vec<u64>>,
    /// faces[d][idx]: indices of the faces of masks[d][idx] within masks[d − 1].
    faces: Vec<Vec<Vec<u32>>>,
    /// Largest D such that every clique on at most D + 1 vertices is a simplex.
    /// Below D, H̃ of an induced subcomplex equals that of its clique complex.
    flag_dim: usize,
}

/// Number of cliques with exactly `size` vertices in the graph `adj`,
/// counting stops once it exceeds `cap`.
fn count_cliques(adj: &[u64], present: u64, size: usize, cap: usize) -> usize {
    fn extend(adj: &[u64], candidates: u64, left: usize, total: &mut usize, cap: usize) {
        if left == 0 {
            *total += 1;
            return;
        }
        let mut rest = candidates;
        while rest != 0 && *total <= cap {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            // later neighbours only, so each clique is counted once
            extend(adj, adj[v] & rest, left - 1, total, cap);
        }
    }
    let mut total = 0;
    extend(adj, present, size, &mut total, cap);
    total
}

impl MaskComplex {
    fn new(snap: &ComplexSnapshot, top_dim: usize) -> Self {
        let n = snap.n_vertices();
        let mut adj = vec![0u64; n];
        for e in snap.simplices(1) {
            let (u, v) = (e.vertices()[0] as usize, e.vertices()[1] as usize);
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        let dims = snap.dim().map_or(0, |d| d.min(top_dim) + 1);
        let masks: Vec<Vec<u64>> = (0..dims)
            .map(|d| snap.simplices(d).iter().map(Simplex::mask).collect())
            .collect();
        let faces = (0..dims)
            .map(|d| {
                if d == 0 {
                    return Vec::new();
                }
                snap.simplices(d)
                    .iter()
                    .map(|s| {
                        s.faces()
                            .map(|f| snap.position(&f).expect("closed under faces") as u32)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let present = masks.first().map_or(0, |m| m.iter().fold(0, |a, b| a | b));
        let mut flag_dim = 1;
        while flag_dim < top_dim
            && count_cliques(&adj, present, flag_dim + 2, snap.count(flag_dim + 1))
                == snap.count(flag_dim + 1)
        {
            flag_dim += 1;
        }
        MaskComplex {
            present,
            adj,
            masks,
            faces,
            flag_dim,
        }
    }

    /// Strips vertices of `w` whose closed neighbourhood in `w` lies inside
    /// another vertex's, in every complex of `complexes` with the same dominator.
    /// For flag complexes this is a homotopy equivalence (v retracts onto its
    /// dominator), so reduced homology below `flag_dim` and the induced maps
    /// are unchanged. A cone reduces to a single vertex.
    fn core(complexes: &[&MaskComplex], w: u64) -> u64 {
        let mut w = w;
        'restart: loop {
            let mut rest = w;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let mut others = w & !(1 << v);
                while others != 0 {
                    let u = others.trailing_zeros() as usize;
                    others &= others - 1;
                    let dominated = complexes.iter().all(|c| {
                        c.adj[v] >> u & 1 == 1 && (c.adj[v] & w & !(1 << u)) & !c.adj[u] == 0
                    });
                    if dominated {
                        w &= !(1 << v);
                        continue 'restart;
                    }
                }
            }
            return w;
        }
    }

    fn count_in(&self, d: usize, w: u64) -> usize {
        self.masks
            .get(d)
            .map_or(0, |m| m.iter().filter(|&&s| s & !w == 0).count())
    }

    /// Connected components of Δ_W as vertex masks.
    fn components(&self, w: u64, mut visit: impl FnMut(u64)) -> usize {
        let mut rest = w & self.present;
        let mut count = 0;
        while rest != 0 {
            let mut frontier = rest & rest.wrapping_neg();
            let mut comp = frontier;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = self.adj[v] & w & !comp;
                comp |= new;
                frontier |= new;
            }
            rest &= !comp;
            visit(comp);
            count += 1;
        }
        count
    }

    /// GF(2) rank of ∂_d restricted to d-simplices inside `w` (and passing `keep`),
    /// with rows filtered by `row_keep`.
    fn boundary_rank(
        &self,
        d: usize,
        w: u64,
        keep: impl Fn(usize) -> bool,
        row_keep: impl Fn(u32) -> bool,
    ) -> usize {
        let (Some(cols), Some(rows)) = (self.masks.get(d), self.masks.get(d - 1)) else {
            return 0;
        };
        let mut m = BitMatrix::new(rows.len());
        for (idx, &s) in cols.iter().enumerate() {
            if s & !w == 0 && keep(idx) {
                m.push_ones(
                    self.faces[d][idx]
                        .iter()
                        .copied()
                        .filter(|&f| row_keep(f))
                        .map(|f| f as usize),
                );
            }
        }
        m.rank()
    }

    /// dim H̃_deg(Δ_W) over GF(2), for deg ≥ 0.
    fn reduced_betti(&self, w: u64, deg: usize) -> usize {
        if deg == 0 {
            return self.components(w, |_| {}).saturating_sub(1);
        }
        let w = if deg < self.flag_dim {
            MaskComplex::core(&[self], w & self.present)
        } else {
            w
        };
        if w.count_ones() <= 1 {
            return 0;
        }
        let n_deg = self.count_in(deg, w);
        if n_deg == 0 {
            return 0;
        }
        let low = if deg == 1 {
            (w & self.present).count_ones() as usize - self.components(w, |_| {})
        } else {
            self.boundary_rank(deg, w, |_| true, |_| true)
        };
        let up = self.boundary_rank(deg + 1, w, |_| true, |_| true);
        n_deg - low - up
    }

    /// dim im(H̃_k(A_W) → H̃_k(B_W)) where `self` is B and `in_a` flags A's simplices.
    fn image_rank(&self, a: &MaskComplex, in_a: &[Vec<bool>], w: u64, k: usize) -> usize {
        if k == 0 {
            let a_vertices = w & a.present;
            if a_vertices == 0 {
                return 0;
            }
            let mut hit = 0;
            self.components(w, |c| {
                if c & a_vertices != 0 {
                    hit += 1;
                }
            });
            return hit - 1;
        }
        let w = if k < self.flag_dim.min(a.flag_dim) {
            MaskComplex::core(&[self, a], w & self.present)
        } else {
            w
        };
        if w.count_ones() <= 1 {
            return 0;
        }
        let flags = |d: usize| -> &[bool] { in_a.get(d).map_or(&[], Vec::as_slice) };
        let n_k = self.masks.get(k).map_or(0, |m| {
            m.iter()
                .zip(flags(k))
                .filter(|(&s, &f)| f && s & !w == 0)
                .count()
        });
        if n_k == 0 {
            return 0;
        }
        let rank_a = self.boundary_rank(k, w, |idx| flags(k)[idx], |_| true);
        let cycles = n_k - rank_a;
        if cycles == 0 {
            return 0;
        }
        let full = self.boundary_rank(k + 1, w, |_| true, |_| true);
        let outside = self.boundary_rank(k + 1, w, |_| true, |f| !flags(k)[f as usize]);
        cycles - (full - outside)
    }
}

fn check_guard(n: usize, options: &HochsterOptions) -> Result<()> {
    let limit = options.vertex_limit.min(MAX_MASK_VERTICES);
    if n > limit {
        return Err(Error::VertexGuard { n, limit });
    }
    Ok(())
}

fn check_strands(strands: &[usize]) -> Result<Vec<usize>> {
    let mut s = strands.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.first() == Some(&0) {
        return Err(Error::InvalidArgument(
            "strand 0 is fixed (β_{0,0} = 1); request strands j ≥ 1".into(),
        ));
    }
    Ok(s)
}

/// Sums `summand(w, j)` into β_{|W|−j, |W|} over all subsets W, in parallel
/// with a deterministic (integer) reduction.
fn enumerate<F>(
    n: usize,
    strands: &[usize],
    max_support: Option<usize>,
    summand: F,
) -> Vec<BettiEntry>
where
    F: Fn(u64, usize) -> usize + Sync,
{
    let top = max_support.map_or(n, |m| m.min(n));
    let width = top + 1;
    let zero = || vec![0u64; width * width];
    const CHUNK: u64 = 1 << 12;
    let end: u64 = 1 << n;
    let total: Vec<u64> = (0..end.div_ceil(CHUNK))
        .into_par_iter()
        .fold(zero, |mut acc, c| {
            for w in c * CHUNK..((c + 1) * CHUNK).min(end) {
                let size = w.count_ones() as usize;
                if size > top {
                    continue;
                }
                for &j in strands {
                    if size > j {
                        acc[(size - j) * width + size] += summand(w, j) as u64;
                    }
                }
            }
            acc
        })
        .reduce(zero, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    let mut entries = vec![BettiEntry {
        i: 0,
        j: 0,
        value: 1,
    }];
    for i in 1..=top {
        for &s in strands {
            if i + s <= top {
                entries.push(BettiEntry {
                    i,
                    j: i + s,
                    value: total[i * width + i + s],
                });
            }
        }
    }
    entries.sort_by_key(|e| (e.i, e.j));
    entries
}

fn vertices_of(w: u64) -> Vec<Vertex> {
    (0..64).filter(|b| w >> b & 1 == 1).collect()
}

/// Graded Betti numbers of the Stanley–Reisner ring of `snap` on the requested strands.
pub fn graded_betti(
    snap: &ComplexSnapshot,
    strands: &[usize],
    options: &HochsterOptions,
) -> Result<GradedBettiTable> {
    let n = snap.n_vertices();
    check_guard(n, options)?;
    let strands = check_strands(strands)?;
    let top_dim = strands.last().copied().unwrap_or(1);
    let entries = match options.field {
        Field::Gf2 => {
            let mc = MaskComplex::new(snap, top_dim);
            enumerate(n, &strands, options.max_support, |w, j| {
                mc.reduced_betti(w, j - 1)
            })
        }
        Field::Rational => enumerate(n, &strands, options.max_support, |w, j| {
            linalg::reduced_betti(&snap.induced(&vertices_of(w)), Field::Rational)
                .get(j as isize - 1)
        }),
    };
    Ok(GradedBettiTable {
        entries,
        scale: snap.scale(),
        field: options.field,
        strands,
        n,
        max_support: options.max_support,
    })
}

pub fn persistent_graded_betti_between(
    a: &ComplexSnapshot,
    b: &ComplexSnapshot,
    strands: &[usize],
    options: &HochsterOptions,
) -> Result<PersistentGradedBettiTable> {
    if a.scale() > b.scale() {
        return Err(Error::InvalidArgument(format!(
            "scale pair must be ordered, got ({}, {})",
            a.scale(),
            b.scale()
        )));
    }
    if let Some(s) = a.iter().find(|s| !b.contains(s)) {
        return Err(Error::NotIncluded(format!(
            "{s} is missing from the later complex"
        )));
    }
    let n = b.n_vertices().max(a.n_vertices());
    check_guard(n, options)?;
    let strands = check_strands(strands)?;
    let top_dim = strands.last().copied().unwrap_or(1);
    let entries = match options.field {
        Field::Gf2 => {
            let mb = MaskComplex::new(b, top_dim);
            let ma = MaskComplex::new(a, top_dim);
            let in_a: Vec<Vec<bool>> = (0..=top_dim)
                .map(|d| b.simplices(d).iter().map(|s| a.contains(s)).collect())
                .collect();
            enumerate(n, &strands, options.max_support, |w, j| {
                mb.image_rank(&ma, &in_a, w, j - 1)
            })
        }
        Field::Rational => enumerate(n, &strands, options.max_support, |w, j| {
            hochster_summand(a, b, &vertices_of(w), j, Field::Rational)
                .expect("induced subcomplexes of nested complexes are nested")
        }),
    };
    Ok(PersistentGradedBettiTable {
        entries,
        scales: (a.scale(), b.scale()),
        field: options.field,
        strands,
        n,
        max_support: options.max_support,
    })
}

pub fn persistent_graded_betti(
    filtration: &Filtration,
    eps1: f64,
    eps2: f64,
    strands: &[usize],
    options: &HochsterOptions,
) -> Result<PersistentGradedBettiTable> {
    persistent_graded_betti_between(
        &snapshot(filtration, eps1),
        &snapshot(filtration, eps2),
        strands,
        options,
    )
}

/// The W-summand dim im(H̃_{j−1}(Δ^{ε}_W) → H̃_{j−1}(Δ^{ε′}_W)).
pub fn hochster_summand(
    a: &ComplexSnapshot,
    b: &ComplexSnapshot,
    w: &[Vertex],
    j: usize,
    field: Field,
) -> Result<usize> {
    if j == 0 {
        return Err(Error::InvalidArgument("strands start at j = 1".into()));
    }
    linalg::induced_image_rank(&a.induced(w), &b.induced(w), j - 1, field)
}

/// Persistent h- and f-vectors from a persistent graded Betti table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistentFHVectors {
    /// h_0 … h_d.
    pub h: Vec<i64>,
    /// f_{−1} … f_{d−1}.
    pub f: Vec<i64>,
    pub scales: (f64, f64),
    pub n: usize,
    pub d: usize,
    /// Indices m of h whose sum touched C(a, b) with a < 0 < b (taken as 0).
    pub flagged: Vec<usize>,
}

/// h_m = Σ_j C(n−d+m−j−1, m−j) Σ_i (−1)^i β_{i,j}, then f by the inverse
/// binomial transform. Needs strands 1..d−1 with support up to d.
pub fn persistent_fh_vectors(
    table: &PersistentGradedBettiTable,
    n: usize,
    d: usize,
) -> Result<PersistentFHVectors> {
    let needed_support = d.min(n);
    if let Some(m) = table.max_support {
        if m < needed_support {
            return Err(Error::IncompleteTable(format!(
                "subsets up to size {needed_support} are needed, table stops at {m}"
            )));
        }
    }
    if let Some(missing) = (1..d).find(|s| !table.strands.contains(s)) {
        return Err(Error::IncompleteTable(format!(
            "strand {missing} is missing (strands 1..{} are needed for d = {d})",
            d.saturating_sub(1)
        )));
    }
    // Σ_i (−1)^i β_{i,j} per internal degree j
    let mut alternating: BTreeMap<usize, i64> = BTreeMap::new();
    for e in &table.entries {
        let sign = if e.i % 2 == 0 { 1 } else { -1 };
        *alternating.entry(e.j).or_default() += sign * e.value as i64;
    }
    let mut flagged = Vec::new();
    let h: Vec<i64> = (0..=d)
        .map(|m| {
            let mut total = 0;
            for j in 0..=m {
                let a = n as i64 - d as i64 + m as i64 - j as i64 - 1;
                let b = (m - j) as i64;
                if a < 0 && b > 0 && !flagged.contains(&m) {
                    flagged.push(m);
                }
                total += binomial(a, b) * alternating.get(&j).copied().unwrap_or(0);
            }
            total
        })
        .collect();
    let f = binomial_inverse(&h, d);
    Ok(PersistentFHVectors {
        h,
        f,
        scales: table.scales,
        n,
        d,
        flagged,
    })
}

/// Which invariants [`curves`] evaluates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSelector {
    pub graded_betti: bool,
    pub strands: Vec<usize>,
    pub options: HochsterOptions,
}

impl Default for CurveSelector {
    fn default() -> Self {
        CurveSelector {
            graded_betti: false,
            strands: vec![1, 2, 3],
            options: HochsterOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub scale: f64,
    pub f: FVector,
    pub h: HVector,
    /// Facet counts by dimension.
    pub facets: Vec<usize>,
    pub minimal_nonfaces: usize,
    pub graded: Option<GradedBettiTable>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SrCurves {
    pub grid: Vec<f64>,
    pub points: Vec<CurvePoint>,
}

pub fn curves(filtration: &Filtration, grid: &[f64], which: &CurveSelector) -> Result<SrCurves> {
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidArgument("grid must be ascending".into()));
    }
    if which.graded_betti {
        check_guard(filtration.vertex_count(), &which.options)?;
    }
    let max_size = filtration.max_dim() + 2;
    let points = grid
        .iter()
        .map(|&eps| {
            let snap = snapshot(filtration, eps);
            let f = snap.f_vector();
            let mut facets = vec![0; filtration.max_dim() + 1];
            for s in snap.facets() {
                facets[s.dim()] += 1;
            }
            let graded = if which.graded_betti {
                Some(graded_betti(&snap, &which.strands, &which.options)?)
            } else {
                None
            };
            Ok(CurvePoint {
                scale: eps,
                h: h_vector(&f),
                f,
                facets,
                minimal_nonfaces: minimal_nonfaces(&snap, max_size).len(),
                graded,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SrCurves {
        grid: grid.to_vec(),
        points,
    })
}

impl SrCurves {
    /// `scale,kind,index,value` where kind is `f` (index i for f_i, from −1) or `h`.
    pub fn fh_csv(&self) -> String {
        let mut out = String::from("scale,kind,index,value\n");
        for p in &self.points {
            for (j, v) in p.f.counts.iter().enumerate() {
                let _ = writeln!(out, "{},f,{},{v}", p.scale, j as isize - 1);
            }
            for (m, v) in p.h.values.iter().enumerate() {
                let _ = writeln!(out, "{},h,{m},{v}", p.scale);
            }
        }
        out
    }

    /// `scale,dim,facets,minimal_nonfaces`.
    pub fn facet_csv(&self) -> String {
        let mut out = String::from("scale,dim,facets\n");
        for p in &self.points {
            for (d, c) in p.facets.iter().enumerate() {
                let _ = writeln!(out, "{},{d},{c}", p.scale);
            }
        }
        out
    }

    pub fn nonface_csv(&self) -> String {
        let mut out = String::from("scale,minimal_nonfaces\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", p.scale, p.minimal_nonfaces);
        }
        out
    }

    /// Strand `j` as `scale,i,value,log10_value` with log10(1 + value).
    pub fn strand_csv(&self, j: usize) -> String {
        let mut out = String::from("scale,i,value,log10_value\n");
        for p in &self.points {
            if let Some(t) = &p.graded {
                for (idx, v) in t.strand(j).iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{v},{}",
                        p.scale,
                        idx + 1,
                        (1.0 + *v as f64).log10()
                    );
                }
            }
        }
        out
    }

    /// Largest β_{i,i+j} over the grid and all i.
    pub fn strand_peak(&self, j: usize) -> u64 {
        self.points
            .iter()
            .filter_map(|p| p.graded.as_ref())
            .flat_map(|t| t.strand(j))
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_rips_filtration, f_vector, RipsParams};
    use crate::ingest::{generate_octagon, generate_octahedron};

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().copied()).unwrap()
    }

    fn closure(n: usize, gens: &[&[u32]]) -> ComplexSnapshot {
        ComplexSnapshot::closure_of(n, gens.iter().map(|g| s(g))).unwrap()
    }

    fn c4() -> ComplexSnapshot {
        closure(4, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]])
    }

    fn octagon() -> Filtration {
        build_rips_filtration(&generate_octagon(2.0).unwrap(), RipsParams::new(3, 4.0)).unwrap()
    }

    #[test]
    fn nonfaces_of_c4_and_simplex() {
        let g = minimal_nonfaces(&c4(), 4);
        assert_eq!(g.minimal_nonfaces, vec![vec![0, 2], vec![1, 3]]);
        assert!(g.contains_monomial(&[0, 1, 2]));
        assert!(!g.contains_monomial(&[0, 1]));
        assert!(minimal_nonfaces(&ComplexSnapshot::complete(5, 4), 6).is_empty());
        let oct = snapshot(&octagon(), 1.6);
        assert_eq!(minimal_nonfaces(&oct, 5).len(), 20);
    }

    #[test]
    fn c4_table() {
        let t = graded_betti(&c4(), &[1, 2], &HochsterOptions::default()).unwrap();
        assert_eq!(t.get(1, 2), 2);
        assert_eq!(t.get(2, 3), 0);
        assert_eq!(t.get(2, 4), 1);
        assert_eq!(t.get(1, 3), 0);
        assert_eq!(t.get(0, 0), 1);
        let rational = graded_betti(
            &c4(),
            &[1, 2],
            &HochsterOptions {
                field: Field::Rational,
                ..HochsterOptions::default()
            },
        )
        .unwrap();
        assert_eq!(rational.entries, t.entries);
    }

    #[test]
    fn c4_fh() {
        let t = graded_betti(&c4(), &[1], &HochsterOptions::default()).unwrap();
        let fh = persistent_fh_vectors(&t.as_persistent(), 4, 2).unwrap();
        assert_eq!(fh.h, vec![1, 2, 1]);
        assert_eq!(fh.f, vec![1, 4, 4]);
        assert!(fh.flagged.is_empty());
    }

    #[test]
    fn fh_needs_strands() {
        let t = graded_betti(&c4(), &[2], &HochsterOptions::default()).unwrap();
        assert!(matches!(
            persistent_fh_vectors(&t.as_persistent(), 4, 2),
            Err(Error::IncompleteTable(_))
        ));
    }

    fn generic_table(snap: &ComplexSnapshot, strands: &[usize]) -> BTreeMap<(usize, usize), u64> {
        let n = snap.n_vertices();
        let mut out = BTreeMap::new();
        for w in 1u64..1 << n {
            let verts = vertices_of(w);
            for &j in strands {
                let v = hochster_summand(snap, snap, &verts, j, Field::Gf2).unwrap() as u64;
                if verts.len() > j && v > 0 {
                    *out.entry((verts.len() - j, verts.len())).or_insert(0) += v;
                }
            }
        }
        out
    }

    #[test]
    fn cone_shortcut_respects_non_flag_complexes() {
        let hollow = closure(4, &[&[0, 1], &[1, 2], &[0, 2], &[2, 3]]);
        let skeleton = ComplexSnapshot::complete(5, 2);
        let partial = closure(5, &[&[0, 1, 2], &[0, 2, 3], &[0, 1, 3], &[1, 2, 3, 4]]);
        for snap in [hollow, skeleton, partial] {
            let t = graded_betti(&snap, &[1, 2, 3], &HochsterOptions::default()).unwrap();
            let fast: BTreeMap<(usize, usize), u64> = t
                .entries
                .iter()
                .filter(|e| e.j > e.i && e.value > 0)
                .map(|e| ((e.i, e.j), e.value))
                .collect();
            assert_eq!(fast, generic_table(&snap, &[1, 2, 3]));
        }
        // 2-skeleton of the 4-simplex: dim H̃_2 = −1 + 5 − 10 + 10
        let t = graded_betti(
            &ComplexSnapshot::complete(5, 2),
            &[3],
            &HochsterOptions::default(),
        )
        .unwrap();
        assert_eq!(t.get(2, 5), 4);
    }

    #[test]
    fn isolated_vertices_formula() {
        for n in 4..=8usize {
            let snap = ComplexSnapshot::complete(n, 0);
            let t = graded_betti(&snap, &[1], &HochsterOptions::default()).unwrap();
            for i in 1..n {
                assert_eq!(
                    t.get(i, i + 1),
                    i as u64 * binomial(n as i64, i as i64 + 1) as u64
                );
            }
        }
    }

    #[test]
    fn complete_simplex_is_acyclic() {
        let snap = ComplexSnapshot::complete(6, 5);
        let t = graded_betti(&snap, &[1, 2, 3, 4, 5], &HochsterOptions::default()).unwrap();
        assert!(t.entries.iter().all(|e| e.i == 0 || e.value == 0));
        let fh = persistent_fh_vectors(&t.as_persistent(), 6, 6).unwrap();
        assert_eq!(fh.h, vec![1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(fh.f, vec![1, 6, 15, 20, 15, 6, 1]);
    }

    #[test]
    fn guard() {
        let snap = ComplexSnapshot::complete(23, 0);
        assert!(matches!(
            graded_betti(&snap, &[1], &HochsterOptions::default()),
            Err(Error::VertexGuard { n: 23, limit: 22 })
        ));
    }

    #[test]
    fn persistent_summands() {
        let a = c4().with_scale(1.0);
        let b = closure(4, &[&[0, 1, 2], &[0, 2, 3]]).with_scale(2.0);
        assert_eq!(
            hochster_summand(&a, &b, &[0, 1, 2, 3], 2, Field::Gf2).unwrap(),
            0
        );
        let t =
            persistent_graded_betti_between(&a, &b, &[1, 2], &HochsterOptions::default()).unwrap();
        assert_eq!(t.get(2, 4), 0);
        let same =
            persistent_graded_betti_between(&a, &a, &[1, 2], &HochsterOptions::default()).unwrap();
        let plain = graded_betti(&a, &[1, 2], &HochsterOptions::default()).unwrap();
        assert_eq!(same.entries, plain.entries);
    }

    #[test]
    fn octagon_facets() {
        let f = octagon();
        let bars = facet_barcodes(&f, &[]);
        let r1 = 4.0 * (std::f64::consts::PI / 8.0).sin();
        let r2 = 4.0 * (std::f64::consts::PI / 4.0).sin();
        let r3 = 4.0 * (3.0 * std::f64::consts::PI / 8.0).sin();
        let dim0: Vec<&FacetBar> = bars.iter().filter(|b| b.dim == 0).collect();
        assert_eq!(dim0.len(), 8);
        assert!(dim0
            .iter()
            .all(|b| b.birth == 0.0 && (b.death - r1).abs() < 1e-9));
        let dim2: Vec<&FacetBar> = bars.iter().filter(|b| b.dim == 2).collect();
        assert!(!dim2.is_empty());
        assert!(dim2
            .iter()
            .all(|b| (b.birth - r2).abs() < 1e-9 && (b.death - r3).abs() < 1e-9));
        assert_eq!(facet_persistence_betti(&bars, 0, 1.0, 1.4), 8);
        assert_eq!(facet_persistence_betti(&bars, 0, 1.0, 2.0), 0);
        for eps in [0.5, 1.6, 3.0, 3.8] {
            let snap = snapshot(&f, eps);
            let total: usize = (0..=3)
                .map(|i| facet_persistence_betti(&bars, i, eps, eps))
                .sum();
            assert_eq!(total, snap.facets().len(), "eps={eps}");
        }
    }

    #[test]
    fn single_point_facet() {
        let cloud = crate::ingest::PointCloud::new(
            vec![[0.0; 3]],
            vec!["a".into()],
            crate::ingest::Source::Inline,
        )
        .unwrap();
        let f = build_rips_filtration(&cloud, RipsParams::new(2, 1.0)).unwrap();
        let bars = facet_barcodes(&f, &[0.0, 0.5]);
        assert_eq!(bars.len(), 1);
        assert_eq!(bars[0].death, f64::INFINITY);
    }

    #[test]
    fn octahedron_curves() {
        let f = build_rips_filtration(&generate_octahedron(), RipsParams::new(3, 3.5)).unwrap();
        let c = curves(&f, &[1.5, 1.9, 2.5, 3.0], &CurveSelector::default()).unwrap();
        let f3: Vec<u64> = c.points.iter().map(|p| p.f.get(3)).collect();
        assert_eq!(f3, vec![0, 0, 9, 15]);
        let bars = facet_barcodes(&f, &[]);
        let dim2 = bars.iter().filter(|b| b.dim == 2).count();
        assert_eq!(dim2, 8);
    }

    #[test]
    fn octagon_beta_24_peak() {
        let f = octagon();
        let r2 = 4.0 * (std::f64::consts::PI / 4.0).sin();
        let r3 = 4.0 * (3.0 * std::f64::consts::PI / 8.0).sin();
        let beta24 = |eps: f64| {
            graded_betti(&snapshot(&f, eps), &[2], &HochsterOptions::default())
                .unwrap()
                .get(2, 4)
        };
        assert!(beta24(r3) > 0);
        assert_eq!(beta24(r2 - 0.1), 0);
        assert_eq!(beta24(4.0), 0);
    }

    #[test]
    fn hilbert_identity_on_octagon() {
        let f = octagon();
        for eps in [0.5, 1.6, 2.9, 3.7, 4.0] {
            let snap = snapshot(&f, eps);
            let d = snap.dim().map_or(0, |x| x + 1);
            let strands: Vec<usize> = (1..d.max(2)).collect();
            let opts = HochsterOptions {
                max_support: Some(d),
                ..HochsterOptions::default()
            };
            let t = graded_betti(&snap, &strands, &opts).unwrap();
            let fh = persistent_fh_vectors(&t.as_persistent(), 8, d).unwrap();
            assert_eq!(fh.h, h_vector(&f_vector(&snap)).values, "eps={eps}");
        }
    }
}

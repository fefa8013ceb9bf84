//! Van Kampen diagrams for trivial words, built by the recursive
//! fan/ladder procedure: combing lines to every boundary prefix form a
//! fan of sectors; within a sector, combing lines between equal-time
//! points of neighbouring paths form ladder rungs; any rung pair whose
//! lengths sum to more than M is subdivided by a recursive ladder. All
//! emitted cell boundaries have length at most M + 2 and are trivial in
//! the group, so the diagram is a witness for the isoperimetric bound
//! n (f(n/2)+2)^d 2^{d(d-1)/2} / k^{d(d-1)/2} and the isodiametric bound
//! k/(k-2) * f(n/2) = 11 f(n/2).

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::group::{normalize, normalize_traced, GroupParams, NormalForm, RewriteTrace};
use crate::word::{Letter, Word};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("word is not trivial in the group")]
    NotTrivial,
    #[error("word must be nonempty and freely reduced")]
    NotReduced,
    #[error("ladder recursion exceeded the depth bound {max}")]
    DepthExceeded { max: u32 },
}

#[derive(Debug, Clone)]
pub struct DiagramVertex {
    pub element: NormalForm,
    /// 0 for the basepoint, boundary and fan lines; subdivision level
    /// for ladder rungs.
    pub generation: u32,
}

#[derive(Debug, Clone)]
pub struct DiagramEdge {
    pub from: usize,
    pub to: usize,
    /// `None` marks a pause edge: a zero-length bookkeeping self-loop.
    pub letter: Option<Letter>,
}

#[derive(Debug, Clone)]
pub struct DiagramCell {
    /// Cyclic boundary as (edge id, forward?) pairs.
    pub boundary: Vec<(usize, bool)>,
    /// Ladder depth at which the cell was emitted.
    pub depth: u32,
    /// True when the boundary word freely reduces to nothing; degenerate
    /// cells do not count towards the area.
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct VanKampenDiagram {
    pub q: i64,
    pub word: Word,
    pub vertices: Vec<DiagramVertex>,
    pub edges: Vec<DiagramEdge>,
    pub cells: Vec<DiagramCell>,
    pub basepoint: usize,
    /// The outer boundary edges in order; reading them spells `word`.
    pub boundary_edges: Vec<usize>,
    pub max_depth_used: u32,
    pub depth_bound: u32,
    /// Longest rung created at each subdivision level (level 0 = fan lines).
    pub max_rung_by_level: Vec<u64>,
}

impl VanKampenDiagram {
    /// Number of non-degenerate cells.
    pub fn area(&self) -> u64 {
        self.cells.iter().filter(|c| !c.degenerate).count() as u64
    }

    /// Maximal skeleton distance from the basepoint; pause edges have
    /// length zero.
    pub fn diameter(&self) -> u32 {
        let n = self.vertices.len();
        let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        for e in &self.edges {
            let w = if e.letter.is_some() { 1 } else { 0 };
            adj[e.from].push((e.to, w));
            adj[e.to].push((e.from, w));
        }
        let mut dist = vec![u32::MAX; n];
        let mut dq = VecDeque::new();
        dist[self.basepoint] = 0;
        dq.push_back(self.basepoint);
        while let Some(v) = dq.pop_front() {
            let d = dist[v];
            for &(u, w) in &adj[v] {
                if d + w < dist[u] {
                    dist[u] = d + w;
                    if w == 0 {
                        dq.push_front(u);
                    } else {
                        dq.push_back(u);
                    }
                }
            }
        }
        dist.into_iter().filter(|&d| d != u32::MAX).max().unwrap_or(0)
    }

    /// Boundary word of one cell read in its stored orientation, pauses
    /// dropped.
    pub fn cell_word(&self, cell: &DiagramCell) -> Word {
        let mut letters = Vec::new();
        for &(e, fwd) in &cell.boundary {
            if let Some(l) = self.edges[e].letter {
                letters.push(if fwd { l } else { l.inverse() });
            }
        }
        Word::new(letters)
    }
}

/// Smallest integer d >= 0 with (k/2)^d >= 2 f(ceil(n/2)) / M,
/// computed exactly: 11^d * M >= 2 f * 10^d.
fn subdivision_levels(n: usize, params: &GroupParams) -> u32 {
    let f = params.recursivity_bound((n as i64 + 1) / 2);
    let target = BigInt::from(2 * f);
    let m = BigInt::from(params.narrow_m());
    let mut lhs = m; // 11^d * M
    let mut rhs = target; // 2 f * 10^d
    let mut d = 0u32;
    while lhs < rhs {
        lhs *= 11;
        rhs *= 10;
        d += 1;
    }
    d
}

/// Depth bound for the ladder recursion; exceeding it would signal a
/// narrow-shape failure.
pub fn depth_bound(n: usize, params: &GroupParams) -> u32 {
    subdivision_levels(n, params) + 2
}

/// The closed-form area bound n (f+2)^d 2^{d(d-1)/2} / k^{d(d-1)/2} with
/// f = f(ceil(n/2)) and d clamped to at least 1 so the first ladder
/// generation is always counted. Exact rational.
pub fn isoperimetric_bound(n: usize, params: &GroupParams) -> BigRational {
    let f = BigInt::from(params.recursivity_bound((n as i64 + 1) / 2));
    let d = subdivision_levels(n, params).max(1);
    let e = d * (d - 1) / 2;
    // 2^e / k^e = 10^e / 11^e with k = 11/5.
    let numer = BigInt::from(n) * (f + BigInt::from(2)).pow(d) * BigInt::from(10).pow(e);
    let denom = BigInt::from(11).pow(e);
    BigRational::new(numer, denom)
}

/// Isodiametric bound k/(k-2) * f(ceil(n/2)) = 11 * f(ceil(n/2)).
pub fn isodiametric_bound(n: usize, params: &GroupParams) -> i64 {
    11 * params.recursivity_bound((n as i64 + 1) / 2)
}

/// A path through the diagram under construction: raw vertex ids (resolve
/// through the union-find) and oriented edge ids; verts.len() == edges.len() + 1.
#[derive(Debug, Clone)]
struct PathRef {
    verts: Vec<usize>,
    edges: Vec<(usize, bool)>,
}

impl PathRef {
    fn len(&self) -> usize {
        self.edges.len()
    }

    fn vertex(&self, t: usize) -> usize {
        self.verts[t.min(self.verts.len() - 1)]
    }

    fn reversed(&self) -> PathRef {
        PathRef {
            verts: self.verts.iter().rev().copied().collect(),
            edges: self.edges.iter().rev().map(|&(e, d)| (e, !d)).collect(),
        }
    }
}

struct Builder<'a> {
    params: &'a GroupParams,
    m: usize,
    depth_bound: u32,
    verts: Vec<DiagramVertex>,
    parent: Vec<usize>,
    edges: Vec<DiagramEdge>,
    cells: Vec<DiagramCell>,
    pause_edges: HashMap<usize, usize>,
    max_depth: u32,
    max_rung_by_level: Vec<u64>,
}

impl<'a> Builder<'a> {
    fn new(params: &'a GroupParams, depth_bound: u32) -> Self {
        Builder {
            params,
            m: params.narrow_m() as usize,
            depth_bound,
            verts: Vec::new(),
            parent: Vec::new(),
            edges: Vec::new(),
            cells: Vec::new(),
            pause_edges: HashMap::new(),
            max_depth: 0,
            max_rung_by_level: Vec::new(),
        }
    }

    fn new_vertex(&mut self, element: NormalForm, generation: u32) -> usize {
        self.verts.push(DiagramVertex { element, generation });
        self.parent.push(self.verts.len() - 1);
        self.verts.len() - 1
    }

    fn new_edge(&mut self, from: usize, to: usize, letter: Option<Letter>) -> usize {
        self.edges.push(DiagramEdge { from, to, letter });
        self.edges.len() - 1
    }

    fn find(&mut self, v: usize) -> usize {
        if self.parent[v] != v {
            let root = self.find(self.parent[v]);
            self.parent[v] = root;
        }
        self.parent[v]
    }

    /// Identify two construction vertices carrying the same group element;
    /// the smaller id survives.
    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        debug_assert_eq!(self.verts[ra].element, self.verts[rb].element);
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[drop] = keep;
        self.verts[keep].generation = self.verts[keep].generation.min(self.verts[drop].generation);
    }

    fn pause_edge_at(&mut self, v: usize) -> usize {
        let rep = self.find(v);
        if let Some(&e) = self.pause_edges.get(&rep) {
            return e;
        }
        let e = self.new_edge(rep, rep, None);
        self.pause_edges.insert(rep, e);
        e
    }

    fn record_rung(&mut self, level: usize, len: u64) {
        if self.max_rung_by_level.len() <= level {
            self.max_rung_by_level.resize(level + 1, 0);
        }
        let slot = &mut self.max_rung_by_level[level];
        *slot = (*slot).max(len);
    }

    /// Build the combing line between two existing vertices. An empty
    /// line identifies its endpoints (they carry the same element).
    fn make_rung(&mut self, from: usize, to: usize, generation: u32) -> PathRef {
        let fa = self.find(from);
        let fb = self.find(to);
        let word = {
            let a = &self.verts[fa].element;
            let b = &self.verts[fb].element;
            a.inverse(self.params).mul(b, self.params).to_word()
        };
        if word.is_empty() {
            self.union(fa, fb);
            let rep = self.find(fa);
            return PathRef {
                verts: vec![rep],
                edges: Vec::new(),
            };
        }
        let mut cur = self.verts[fa].element.clone();
        let mut verts = vec![fa];
        let mut edges = Vec::with_capacity(word.len());
        let last = word.len() - 1;
        for (i, &l) in word.letters().iter().enumerate() {
            cur.push_gen(l, self.params);
            let v = if i == last {
                debug_assert_eq!(cur, self.verts[fb].element);
                fb
            } else {
                self.new_vertex(cur.clone(), generation)
            };
            let e = self.new_edge(*verts.last().unwrap(), v, Some(l));
            edges.push((e, true));
            verts.push(v);
        }
        PathRef { verts, edges }
    }

    /// The unit sub-path of `path` covering step t: its real edge, or an
    /// empty path at the final vertex once the path has ended.
    fn step_path(&mut self, path: &PathRef, t: usize) -> PathRef {
        if t < path.len() {
            PathRef {
                verts: vec![path.verts[t], path.verts[t + 1]],
                edges: vec![path.edges[t]],
            }
        } else {
            PathRef {
                verts: vec![*path.verts.last().unwrap()],
                edges: Vec::new(),
            }
        }
    }

    /// The oriented boundary edge contributed by step t of `path`; a
    /// pause self-loop once the path has ended.
    fn step_edge(&mut self, path: &PathRef, t: usize) -> (usize, bool) {
        if t < path.len() {
            path.edges[t]
        } else {
            (self.pause_edge_at(*path.verts.last().unwrap()), true)
        }
    }

    fn emit_cell(
        &mut self,
        rung_lo: &PathRef,
        rung_hi: &PathRef,
        p: &PathRef,
        q: &PathRef,
        t: usize,
        depth: u32,
    ) {
        // Oriented so that the cell traces of the whole diagram sum to
        // the trace of the boundary word.
        let mut boundary = Vec::with_capacity(rung_lo.len() + rung_hi.len() + 2);
        boundary.push(self.step_edge(p, t));
        boundary.extend(rung_hi.edges.iter().copied());
        let (be, bdir) = self.step_edge(q, t);
        boundary.push((be, !bdir));
        boundary.extend(rung_lo.edges.iter().rev().map(|&(e, d)| (e, !d)));

        let mut letters = Vec::new();
        for &(e, fwd) in &boundary {
            if let Some(l) = self.edges[e].letter {
                letters.push(if fwd { l } else { l.inverse() });
            }
        }
        let degenerate = Word::new(letters).cyclic_reduce().is_empty();
        self.cells.push(DiagramCell {
            boundary,
            depth,
            degenerate,
        });
    }

    /// Subdivide the strip between two paths with shared time scale:
    /// rung_t joins p(t) to q(t); short rung pairs bound cells, long
    /// pairs recurse. `near` and `far` join the respective endpoints and
    /// stand in for the extreme rungs.
    fn ladder(
        &mut self,
        p: &PathRef,
        q: &PathRef,
        near: PathRef,
        far: PathRef,
        depth: u32,
    ) -> Result<(), DiagramError> {
        if depth > self.depth_bound {
            return Err(DiagramError::DepthExceeded {
                max: self.depth_bound,
            });
        }
        self.max_depth = self.max_depth.max(depth);
        let horizon = p.len().max(q.len());
        if horizon == 0 {
            return Ok(());
        }
        let mut rungs = Vec::with_capacity(horizon + 1);
        rungs.push(near);
        for t in 1..horizon {
            let rung = self.make_rung(p.vertex(t), q.vertex(t), depth + 1);
            self.record_rung(depth as usize + 1, rung.len() as u64);
            rungs.push(rung);
        }
        rungs.push(far);

        for t in 0..horizon {
            if rungs[t].len() + rungs[t + 1].len() <= self.m {
                let (lo, hi) = (rungs[t].clone(), rungs[t + 1].clone());
                self.emit_cell(&lo, &hi, p, q, t, depth);
            } else {
                // The subdivided strip must fill the hole with the same
                // orientation a cell would have had: run the sub-ladder
                // from rung t+1 back to rung t with the joining unit
                // steps reversed.
                let sub_near = self.step_path(p, t).reversed();
                let sub_far = self.step_path(q, t).reversed();
                let (lo, hi) = (rungs[t].clone(), rungs[t + 1].clone());
                self.ladder(&hi, &lo, sub_near, sub_far, depth + 1)?;
            }
        }
        Ok(())
    }
}

/// Build a van Kampen diagram for a nonempty freely reduced word that is
/// trivial in G_q. Deterministic in (word, params).
pub fn build_diagram(w: &Word, params: &GroupParams) -> Result<VanKampenDiagram, DiagramError> {
    if w.is_empty() || !w.is_reduced() {
        return Err(DiagramError::NotReduced);
    }
    if !normalize(w, params).is_identity() {
        return Err(DiagramError::NotTrivial);
    }

    let n = w.len();
    let bound = depth_bound(n, params);
    let mut b = Builder::new(params, bound);

    let basepoint = b.new_vertex(NormalForm::identity(), 0);

    // Boundary vertices at the prefix elements; trivial prefixes pinch
    // back to the basepoint.
    let mut prefix = NormalForm::identity();
    let mut bverts = vec![basepoint];
    for &l in w.letters() {
        prefix.push_gen(l, params);
        bverts.push(if prefix.is_identity() {
            basepoint
        } else {
            b.new_vertex(prefix.clone(), 0)
        });
    }
    debug_assert!(prefix.is_identity());

    let mut boundary_edges = Vec::with_capacity(n);
    for (i, &l) in w.letters().iter().enumerate() {
        boundary_edges.push(b.new_edge(bverts[i], bverts[i + 1], Some(l)));
    }

    // Fan of combing lines to the prefixes; index 0 and n are the empty
    // line at the basepoint.
    let empty_line = PathRef {
        verts: vec![basepoint],
        edges: Vec::new(),
    };
    let mut lines = Vec::with_capacity(n + 1);
    lines.push(empty_line.clone());
    for i in 1..=n {
        let line = b.make_rung(basepoint, bverts[i], 0);
        b.record_rung(0, line.len() as u64);
        lines.push(line);
    }

    for i in 0..n {
        let far = PathRef {
            verts: vec![bverts[i], bverts[i + 1]],
            edges: vec![(boundary_edges[i], true)],
        };
        let (p, q) = (lines[i].clone(), lines[i + 1].clone());
        b.ladder(&p, &q, empty_line.clone(), far, 0)?;
    }

    // Compact the union-find: the basepoint has the smallest id, so it
    // is always its own representative.
    let mut rep_index = HashMap::new();
    let mut vertices = Vec::new();
    for i in 0..b.verts.len() {
        if b.find(i) == i {
            rep_index.insert(i, vertices.len());
            vertices.push(b.verts[i].clone());
        }
    }
    let mut edges = b.edges;
    for e in &mut edges {
        let mut f = e.from;
        while b.parent[f] != f {
            f = b.parent[f];
        }
        let mut t = e.to;
        while b.parent[t] != t {
            t = b.parent[t];
        }
        e.from = rep_index[&f];
        e.to = rep_index[&t];
    }

    Ok(VanKampenDiagram {
        q: params.q(),
        word: w.clone(),
        vertices,
        edges,
        cells: b.cells,
        basepoint: 0,
        boundary_edges,
        max_depth_used: b.max_depth,
        depth_bound: bound,
        max_rung_by_level: b.max_rung_by_level,
    })
}

/// Outcome of the five structural checks on a built diagram.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// (a) every non-degenerate cell boundary closes up, cyclically
    /// reduces to a nontrivial word of length <= M + 2 and normalizes to
    /// the identity; degeneracy flags match.
    pub cell_boundaries_ok: bool,
    /// (b) every edge satisfies target = source * letter (pause edges are
    /// self-loops) and the basepoint is the unique generation-0 identity
    /// vertex.
    pub edges_ok: bool,
    /// (c) the outer boundary read from the basepoint spells the word.
    pub boundary_word_ok: bool,
    /// (d) max_depth_used stays within the depth bound.
    pub depth_ok: bool,
    /// (e) oriented cell traces sum to the trace of the boundary word.
    pub trace_ok: bool,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.cell_boundaries_ok
            && self.edges_ok
            && self.boundary_word_ok
            && self.depth_ok
            && self.trace_ok
    }
}

pub fn validate_diagram(d: &VanKampenDiagram, params: &GroupParams) -> ValidationReport {
    let mut failures = Vec::new();
    let m = params.narrow_m() as usize;

    // (a) cell boundaries
    let mut cell_boundaries_ok = true;
    for (i, cell) in d.cells.iter().enumerate() {
        // connectivity of the cycle
        let mut ok = true;
        if !cell.boundary.is_empty() {
            let start = endpoint(d, cell.boundary[0], false);
            let mut cur = start;
            for &oe in &cell.boundary {
                if endpoint(d, oe, false) != cur {
                    ok = false;
                }
                cur = endpoint(d, oe, true);
            }
            if cur != start {
                ok = false;
            }
        }
        if !ok {
            cell_boundaries_ok = false;
            failures.push(format!("cell {i}: boundary does not close up"));
            continue;
        }
        let reduced = d.cell_word(cell).cyclic_reduce();
        if cell.degenerate != reduced.is_empty() {
            cell_boundaries_ok = false;
            failures.push(format!("cell {i}: degeneracy flag mismatch"));
        }
        if !reduced.is_empty() {
            if reduced.len() > m + 2 {
                cell_boundaries_ok = false;
                failures.push(format!(
                    "cell {i}: boundary length {} exceeds {}",
                    reduced.len(),
                    m + 2
                ));
            }
            if !normalize(&reduced, params).is_identity() {
                cell_boundaries_ok = false;
                failures.push(format!("cell {i}: boundary is not trivial"));
            }
        }
    }

    // (b) edge and vertex consistency
    let mut edges_ok = true;
    for (i, e) in d.edges.iter().enumerate() {
        match e.letter {
            Some(l) => {
                let expect = d.vertices[e.from].element.mul_gen(l, params);
                if d.vertices[e.to].element != expect {
                    edges_ok = false;
                    failures.push(format!("edge {i}: target != source * letter"));
                }
            }
            None => {
                if e.from != e.to {
                    edges_ok = false;
                    failures.push(format!("edge {i}: pause edge is not a self-loop"));
                }
            }
        }
    }
    let identity_roots = d
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| v.element.is_identity() && v.generation == 0)
        .map(|(i, _)| i)
        .collect::<Vec<_>>();
    if identity_roots != vec![d.basepoint] {
        edges_ok = false;
        failures.push("basepoint is not the unique generation-0 identity vertex".into());
    }

    // (c) outer boundary
    let mut boundary_word_ok = d.boundary_edges.len() == d.word.len();
    if boundary_word_ok {
        let mut cur = d.basepoint;
        for (i, (&e, &l)) in d
            .boundary_edges
            .iter()
            .zip(d.word.letters())
            .enumerate()
        {
            let edge = &d.edges[e];
            if edge.from != cur || edge.letter != Some(l) {
                boundary_word_ok = false;
                failures.push(format!("boundary edge {i} does not continue the word"));
                break;
            }
            cur = edge.to;
        }
        if boundary_word_ok && cur != d.basepoint {
            boundary_word_ok = false;
            failures.push("boundary does not close at the basepoint".into());
        }
    } else {
        failures.push("boundary edge count differs from word length".into());
    }

    // (d) depth
    let depth_ok = d.max_depth_used <= d.depth_bound;
    if !depth_ok {
        failures.push(format!(
            "depth {} exceeds bound {}",
            d.max_depth_used, d.depth_bound
        ));
    }

    // (e) trace aggregation
    let mut total = RewriteTrace::default();
    for cell in &d.cells {
        let (nf, t) = normalize_traced(&d.cell_word(cell), params);
        if !nf.is_identity() {
            failures.push("cell trace computed on a nontrivial boundary".into());
        }
        total.add(t);
    }
    let (_, word_trace) = normalize_traced(&d.word, params);
    let trace_ok = total == word_trace;
    if !trace_ok {
        failures.push(format!(
            "cell traces sum to {total} but the word trace is {word_trace}"
        ));
    }

    ValidationReport {
        cell_boundaries_ok,
        edges_ok,
        boundary_word_ok,
        depth_ok,
        trace_ok,
        failures,
    }
}

fn endpoint(d: &VanKampenDiagram, (e, fwd): (usize, bool), head: bool) -> usize {
    let edge = &d.edges[e];
    if fwd == head {
        edge.to
    } else {
        edge.from
    }
}

/// Exact check of the per-level rung bound
/// len <= max(2^l f(ceil(n/2)) / k^l, M/2), i.e.
/// len * 11^l <= f * 10^l or 2 len <= M.
pub fn rung_levels_within_bounds(d: &VanKampenDiagram, params: &GroupParams) -> bool {
    let f = BigInt::from(params.recursivity_bound((d.word.len() as i64 + 1) / 2));
    let m = params.narrow_m() as u64;
    let mut pow10 = BigInt::one();
    let mut pow11 = BigInt::one();
    for (level, &len) in d.max_rung_by_level.iter().enumerate() {
        if level > 0 {
            pow10 *= 10;
            pow11 *= 11;
        }
        let within_ratio = BigInt::from(len) * &pow11 <= &f * &pow10;
        let within_floor = 2 * len <= m;
        if !(within_ratio || within_floor) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::cubic_witness_word;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn commutator_xz_diagram() {
        let p = GroupParams::new(1);
        let d = build_diagram(&w("xzXZ"), &p).unwrap();
        assert_eq!(d.area(), 1);
        assert_eq!(d.diameter(), 2);
        assert_eq!(d.max_depth_used, 0);
        let report = validate_diagram(&d, &p);
        assert!(report.all_passed(), "{:?}", report.failures);
        for cell in &d.cells {
            let reduced = d.cell_word(cell).cyclic_reduce();
            assert!(reduced.len() as i64 <= p.narrow_m() + 2);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = GroupParams::new(1);
        assert_eq!(build_diagram(&w("xX"), &p).err(), Some(DiagramError::NotReduced));
        assert_eq!(
            build_diagram(&Word::empty(), &p).err(),
            Some(DiagramError::NotReduced)
        );
        assert_eq!(build_diagram(&w("xy"), &p).err(), Some(DiagramError::NotTrivial));
    }

    #[test]
    fn witness_diagram_validates_and_aggregates() {
        let p = GroupParams::new(1);
        let word = cubic_witness_word(1, 1);
        let d = build_diagram(&word, &p).unwrap();
        let report = validate_diagram(&d, &p);
        assert!(report.all_passed(), "{:?}", report.failures);
        let mut total = RewriteTrace::default();
        for cell in &d.cells {
            total.add(normalize_traced(&d.cell_word(cell), &p).1);
        }
        assert_eq!(total.c2.abs(), 1);
    }

    #[test]
    fn witness_area_beats_cubic_count() {
        let p = GroupParams::new(1);
        let d = build_diagram(&cubic_witness_word(2, 1), &p).unwrap();
        assert!(d.area() >= 8, "area {}", d.area());
        assert!(validate_diagram(&d, &p).all_passed());
    }

    #[test]
    fn bound_examples() {
        let p = GroupParams::new(1);
        assert_eq!(
            isoperimetric_bound(8, &p),
            BigRational::from(BigInt::from(176))
        );
        // n = 40: f(20) = 420, d = 32, bound = 40 * 422^32 * 10^496 / 11^496.
        let expected = BigRational::new(
            BigInt::from(40) * BigInt::from(422).pow(32) * BigInt::from(10).pow(496),
            BigInt::from(11).pow(496),
        );
        assert_eq!(isoperimetric_bound(40, &p), expected);
        for n in 1..60 {
            assert!(isoperimetric_bound(n, &p) <= isoperimetric_bound(n + 1, &p));
        }
    }

    #[test]
    fn diameter_within_isodiametric_bound() {
        for q in [1u32, 2] {
            let p = GroupParams::new(q);
            for word in ["xzXZ", "yzYZ"] {
                let d = build_diagram(&w(word), &p).unwrap();
                assert!((d.diameter() as i64) <= isodiametric_bound(d.word.len(), &p));
            }
        }
    }

    #[test]
    fn deep_word_forces_recursion() {
        let p = GroupParams::new(1);
        // x y^21 x^-1 y^-21 z^-21 is trivial and its fan has adjacent
        // rungs summing above M = 42.
        let word = w("xy^21Xy^-21z^-21");
        let d = build_diagram(&word, &p).unwrap();
        assert!(d.max_depth_used >= 1, "expected subdivision");
        assert!(d.max_depth_used <= d.depth_bound);
        let report = validate_diagram(&d, &p);
        assert!(report.all_passed(), "{:?}", report.failures);
        assert!(rung_levels_within_bounds(&d, &p));
    }

    #[test]
    fn validation_rejects_oversized_cell() {
        // Hand-build a one-cell diagram whose boundary is the trivial but
        // overlong word x z^22 x^-1 z^-22 (46 letters > M + 2 = 44).
        let p = GroupParams::new(1);
        let word = w("xz^22Xz^-22");
        assert!(normalize(&word, &p).is_identity());
        let mut vertices = vec![DiagramVertex {
            element: NormalForm::identity(),
            generation: 0,
        }];
        let mut edges = Vec::new();
        let mut cur = NormalForm::identity();
        let n = word.len();
        for (i, &l) in word.letters().iter().enumerate() {
            cur.push_gen(l, &p);
            let to = if i + 1 == n {
                0
            } else {
                vertices.push(DiagramVertex {
                    element: cur.clone(),
                    generation: 0,
                });
                vertices.len() - 1
            };
            edges.push(DiagramEdge {
                from: if i == 0 { 0 } else { i },
                to,
                letter: Some(l),
            });
        }
        let boundary_edges: Vec<usize> = (0..n).collect();
        let d = VanKampenDiagram {
            q: 1,
            word,
            vertices,
            edges,
            cells: vec![DiagramCell {
                boundary: boundary_edges.iter().map(|&e| (e, true)).collect(),
                depth: 0,
                degenerate: false,
            }],
            basepoint: 0,
            boundary_edges,
            max_depth_used: 0,
            depth_bound: depth_bound(46, &p),
            max_rung_by_level: vec![0],
        };
        let report = validate_diagram(&d, &p);
        assert!(!report.cell_boundaries_ok);
        assert!(report.edges_ok && report.boundary_word_ok && report.trace_ok);
    }

    #[test]
    fn determinism() {
        let p = GroupParams::new(2);
        let word = cubic_witness_word(2, 2);
        let a = build_diagram(&word, &p).unwrap();
        let b = build_diagram(&word, &p).unwrap();
        assert_eq!(a.vertices.len(), b.vertices.len());
        assert_eq!(a.edges.len(), b.edges.len());
        assert_eq!(a.area(), b.area());
        assert_eq!(a.diameter(), b.diameter());
        assert_eq!(
            a.cells.iter().map(|c| c.boundary.clone()).collect::<Vec<_>>(),
            b.cells.iter().map(|c| c.boundary.clone()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn pinched_prefix_returns_to_basepoint() {
        let p = GroupParams::new(1);
        // The length-4 prefix of this length-8 word is already trivial.
        let d = build_diagram(&w("xzXZyzYZ"), &p).unwrap();
        let report = validate_diagram(&d, &p);
        assert!(report.all_passed(), "{:?}", report.failures);
        assert_eq!(d.area(), 2);
    }
}

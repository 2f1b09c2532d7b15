//! Normal and distinct 3-dimensional De Bruijn graphs and exact cut accounting.
//!
//! Vertices are triples over `[n]`; edges join `(a,b,c)` to `(b,c,d)`. The
//! *distinct* variant keeps only vertices with pairwise distinct symbols and
//! edges whose four symbols are pairwise distinct.
//!
//! Vertices are addressed by a dense index: `a·n² + b·n + c` for the normal
//! graph and the lexicographic rank among distinct triples otherwise, so a
//! coloring is a flat bit vector.

use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::Rational;

/// Which De Bruijn graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Normal,
    Distinct,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Normal => "normal",
            Variant::Distinct => "distinct",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "normal" => Ok(Variant::Normal),
            "distinct" => Ok(Variant::Distinct),
            other => Err(Error::invalid(format!("unknown variant {other:?}"))),
        }
    }
}

/// A vertex `(a, b, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Triple {
    pub const fn new(a: usize, b: usize, c: usize) -> Self {
        Triple { a, b, c }
    }

    pub fn symbols(self) -> [usize; 3] {
        [self.a, self.b, self.c]
    }

    pub fn is_distinct(self) -> bool {
        self.a != self.b && self.b != self.c && self.a != self.c
    }

    /// Successor along the edge labelled `d`.
    pub fn shift(self, d: usize) -> Triple {
        Triple::new(self.b, self.c, d)
    }

    pub fn map(self, pi: &[usize]) -> Triple {
        Triple::new(pi[self.a], pi[self.b], pi[self.c])
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// A validated graph description.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeBruijnSpec {
    n: usize,
    variant: Variant,
}

impl DeBruijnSpec {
    /// Normal graphs need `n >= 2`, distinct graphs `n >= 4`.
    pub fn new(variant: Variant, n: usize) -> Result<Self> {
        let min = match variant {
            Variant::Normal => 2,
            Variant::Distinct => 4,
        };
        if n < min {
            return Err(Error::invalid(format!("{variant} De Bruijn graph needs n >= {min}, got {n}")));
        }
        if n > 1 << 16 {
            return Err(Error::invalid(format!("n = {n} is too large to index")));
        }
        Ok(DeBruijnSpec { n, variant })
    }

    pub fn normal(n: usize) -> Result<Self> {
        Self::new(Variant::Normal, n)
    }

    pub fn distinct(n: usize) -> Result<Self> {
        Self::new(Variant::Distinct, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn vertex_count(&self) -> usize {
        let n = self.n;
        match self.variant {
            Variant::Normal => n * n * n,
            Variant::Distinct => n * (n - 1) * (n - 2),
        }
    }

    pub fn edge_count(&self) -> u64 {
        let n = self.n as u64;
        match self.variant {
            Variant::Normal => n * n * n * n,
            Variant::Distinct => n * (n - 1) * (n - 2) * (n - 3),
        }
    }

    pub fn contains(&self, t: Triple) -> bool {
        let n = self.n;
        t.a < n && t.b < n && t.c < n && (self.variant == Variant::Normal || t.is_distinct())
    }

    pub fn contains_edge(&self, u: Triple, d: usize) -> bool {
        self.contains(u)
            && d < self.n
            && (self.variant == Variant::Normal || (d != u.a && d != u.b && d != u.c))
    }

    /// Dense index of a vertex, or `None` if it is not a vertex of this graph.
    pub fn index(&self, t: Triple) -> Option<usize> {
        if !self.contains(t) {
            return None;
        }
        Some(self.index_unchecked(t))
    }

    pub(crate) fn index_unchecked(&self, t: Triple) -> usize {
        let n = self.n;
        match self.variant {
            Variant::Normal => (t.a * n + t.b) * n + t.c,
            Variant::Distinct => {
                let b = t.b - usize::from(t.b > t.a);
                let c = t.c - usize::from(t.c > t.a) - usize::from(t.c > t.b);
                (t.a * (n - 1) + b) * (n - 2) + c
            }
        }
    }

    /// Vertex at a dense index.
    pub fn vertex(&self, idx: usize) -> Triple {
        let n = self.n;
        match self.variant {
            Variant::Normal => Triple::new(idx / (n * n), (idx / n) % n, idx % n),
            Variant::Distinct => {
                let a = idx / ((n - 1) * (n - 2));
                let rest = idx % ((n - 1) * (n - 2));
                let mut b = rest / (n - 2);
                let mut c = rest % (n - 2);
                if b >= a {
                    b += 1;
                }
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                if c >= lo {
                    c += 1;
                }
                if c >= hi {
                    c += 1;
                }
                Triple::new(a, b, c)
            }
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Triple> + '_ {
        (0..self.vertex_count()).map(move |i| self.vertex(i))
    }

    /// All edges in lexicographic `(a,b,c,d)` order, generated lazily.
    pub fn edges(&self) -> Edges {
        Edges { spec: *self, next: Some([0, 0, 0, 0]) }.skip_invalid()
    }

    /// Symbols `d` such that `(a,b,c) -> (b,c,d)` is an edge.
    pub fn successors(&self, t: Triple) -> impl Iterator<Item = Triple> + '_ {
        (0..self.n).filter(move |&d| self.contains_edge(t, d)).map(move |d| t.shift(d))
    }

    /// Vertices `(x,a,b)` with an edge into `(a,b,c)`.
    pub fn predecessors(&self, t: Triple) -> impl Iterator<Item = Triple> + '_ {
        (0..self.n)
            .map(move |x| Triple::new(x, t.a, t.b))
            .filter(move |&p| self.contains_edge(p, t.c))
    }
}

impl fmt::Display for DeBruijnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DB_{}({})", self.variant, self.n)
    }
}

/// `(vertex count, edge count)`.
pub fn graph_stats(spec: &DeBruijnSpec) -> (usize, u64) {
    (spec.vertex_count(), spec.edge_count())
}

/// Lazy lexicographic edge stream.
#[derive(Clone, Debug)]
pub struct Edges {
    spec: DeBruijnSpec,
    next: Option<[usize; 4]>,
}

impl Edges {
    fn valid(&self, s: [usize; 4]) -> bool {
        match self.spec.variant {
            Variant::Normal => true,
            Variant::Distinct => {
                let [a, b, c, d] = s;
                a != b && a != c && a != d && b != c && b != d && c != d
            }
        }
    }

    fn advance(&mut self) {
        let n = self.spec.n;
        if let Some(s) = self.next.as_mut() {
            let mut i = 3;
            loop {
                s[i] += 1;
                if s[i] < n {
                    return;
                }
                s[i] = 0;
                if i == 0 {
                    self.next = None;
                    return;
                }
                i -= 1;
            }
        }
    }

    fn skip_invalid(mut self) -> Self {
        while let Some(s) = self.next {
            if self.valid(s) {
                break;
            }
            self.advance();
        }
        self
    }
}

impl Iterator for Edges {
    type Item = (Triple, Triple);

    fn next(&mut self) -> Option<Self::Item> {
        let s = self.next?;
        self.advance();
        while let Some(t) = self.next {
            if self.valid(t) {
                break;
            }
            self.advance();
        }
        let [a, b, c, d] = s;
        Some((Triple::new(a, b, c), Triple::new(b, c, d)))
    }
}

/// A 2-coloring of every vertex of a De Bruijn graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    spec: DeBruijnSpec,
    bits: Vec<bool>,
}

impl Coloring {
    pub fn new(spec: DeBruijnSpec, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != spec.vertex_count() {
            return Err(Error::invalid(format!(
                "{spec} has {} vertices but the coloring has {} bits",
                spec.vertex_count(),
                bits.len()
            )));
        }
        Ok(Coloring { spec, bits })
    }

    pub fn constant(spec: DeBruijnSpec, bit: bool) -> Self {
        Coloring { spec, bits: vec![bit; spec.vertex_count()] }
    }

    pub fn from_fn(spec: DeBruijnSpec, mut f: impl FnMut(Triple) -> bool) -> Self {
        let bits = spec.vertices().map(&mut f).collect();
        Coloring { spec, bits }
    }

    pub fn spec(&self) -> &DeBruijnSpec {
        &self.spec
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    /// Color of a vertex; panics if `t` is not a vertex of the graph.
    pub fn get(&self, t: Triple) -> bool {
        let idx = self.spec.index(t).unwrap_or_else(|| panic!("{t} is not a vertex of {}", self.spec));
        self.bits[idx]
    }

    pub fn complement(&self) -> Coloring {
        Coloring { spec: self.spec, bits: self.bits.iter().map(|b| !b).collect() }
    }

    /// Relabel symbols by the permutation `pi` of `[n]`: the new coloring
    /// gives `pi(v)` the old color of `v`.
    pub fn relabel(&self, pi: &[usize]) -> Result<Coloring> {
        check_permutation(pi, self.spec.n)?;
        let mut bits = vec![false; self.bits.len()];
        for (i, &bit) in self.bits.iter().enumerate() {
            let v = self.spec.vertex(i).map(pi);
            bits[self.spec.index_unchecked(v)] = bit;
        }
        Ok(Coloring { spec: self.spec, bits })
    }

    /// Mirror image `(a,b,c) -> (c,b,a)`: edges reverse, the cut is unchanged.
    pub fn reversed(&self) -> Coloring {
        Coloring::from_fn(self.spec, |t| self.get(Triple::new(t.c, t.b, t.a)))
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

pub(crate) fn check_permutation(pi: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if pi.len() != n || pi.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
        return Err(Error::invalid(format!("not a permutation of [{n}]: {pi:?}")));
    }
    Ok(())
}

/// Exact monochromatic-edge accounting for one coloring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutStats {
    pub variant: Variant,
    pub n: usize,
    pub mono_edges: u64,
    pub total_edges: u64,
    pub fraction: Rational,
}

impl CutStats {
    fn new(spec: &DeBruijnSpec, mono_edges: u64) -> Self {
        let total_edges = spec.edge_count();
        CutStats {
            variant: spec.variant,
            n: spec.n,
            mono_edges,
            total_edges,
            fraction: Rational::new(BigInt::from(mono_edges), BigInt::from(total_edges)),
        }
    }

    pub const CSV_HEADER: &'static str = "variant,n,mono_edges,total_edges,fraction_num,fraction_den";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.variant,
            self.n,
            self.mono_edges,
            self.total_edges,
            self.fraction.numer(),
            self.fraction.denom()
        )
    }
}

/// Graphs with at most this many edges are counted by streaming every edge.
const STREAM_EDGE_LIMIT: u64 = 1 << 24;

/// Exact fraction of monochromatic edges. Self-loops count as monochromatic.
pub fn mono_fraction(coloring: &Coloring) -> CutStats {
    let spec = coloring.spec;
    let mono = if spec.edge_count() <= STREAM_EDGE_LIMIT {
        mono_count_streaming(coloring)
    } else {
        mono_count_by_overlap(coloring)
    };
    CutStats::new(&spec, mono)
}

/// Count by walking the lazy edge stream.
pub fn mono_count_streaming(coloring: &Coloring) -> u64 {
    let spec = coloring.spec;
    spec.edges()
        .filter(|&(u, v)| coloring.bits[spec.index_unchecked(u)] == coloring.bits[spec.index_unchecked(v)])
        .count() as u64
}

/// Count in `O(n³)` by grouping edges on their shared overlap `(b,c)`.
///
/// For overlap `(b,c)` let `α` be the number of ones among the heads
/// `(a,b,c)` and `β` the number among the tails `(b,c,d)`. In the normal
/// graph every head pairs with every tail, giving `αβ + (n-α)(n-β)`
/// monochromatic edges. In the distinct graph heads and tails range over
/// the `m = n-2` symbols outside `{b,c}`, minus the pairs with `a = d`.
pub fn mono_count_by_overlap(coloring: &Coloring) -> u64 {
    let spec = coloring.spec;
    let n = spec.n;
    let bit = |a: usize, b: usize, c: usize| coloring.bits[spec.index_unchecked(Triple::new(a, b, c))];
    let mut total = 0u64;
    match spec.variant {
        Variant::Normal => {
            for b in 0..n {
                for c in 0..n {
                    let alpha = (0..n).filter(|&a| bit(a, b, c)).count() as u64;
                    let beta = (0..n).filter(|&d| bit(b, c, d)).count() as u64;
                    let n = n as u64;
                    total += alpha * beta + (n - alpha) * (n - beta);
                }
            }
        }
        Variant::Distinct => {
            for b in 0..n {
                for c in (0..n).filter(|&c| c != b) {
                    let others = || (0..n).filter(move |&x| x != b && x != c);
                    let alpha = others().filter(|&a| bit(a, b, c)).count() as u64;
                    let beta = others().filter(|&d| bit(b, c, d)).count() as u64;
                    let same = others().filter(|&a| bit(a, b, c) == bit(b, c, a)).count() as u64;
                    let m = (n - 2) as u64;
                    total += alpha * beta + (m - alpha) * (m - beta) - same;
                }
            }
        }
    }
    total
}

/// An optimal coloring of `DB_normal(2)` (4 of 16 edges monochromatic),
/// realized as the two-cell discretization of the "flip if both neighbours
/// agree" rule: color `b`, inverted on the constant triples.
pub fn normal2_optimal_coloring() -> Coloring {
    let spec = DeBruijnSpec::normal(2).expect("n = 2 is valid");
    Coloring::from_fn(spec, |t| (t.b == 1) ^ (t.a == t.b && t.b == t.c))
}

/// The coloring of `DB_distinct(5)` with 24 monochromatic edges: a vertex is
/// colored 1 iff its first or last symbol is 0.
pub fn distinct5_optimal_coloring() -> Coloring {
    let spec = DeBruijnSpec::distinct(5).expect("n = 5 is valid");
    Coloring::from_fn(spec, |t| t.a == 0 || t.c == 0)
}

/// A directed 5-cycle `(a,b,c) -> (b,c,d) -> (c,d,e) -> (d,e,a) -> (e,a,b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiveCycle {
    /// The symbol word `(a,b,c,d,e)`, rotated so that it starts with 0.
    pub word: [usize; 5],
}

impl FiveCycle {
    fn from_word(word: [usize; 5]) -> Self {
        let start = word.iter().position(|&x| x == 0).expect("word is a permutation of [5]");
        let mut w = [0; 5];
        for (i, slot) in w.iter_mut().enumerate() {
            *slot = word[(start + i) % 5];
        }
        FiveCycle { word: w }
    }

    pub fn vertices(&self) -> [Triple; 5] {
        let w = self.word;
        std::array::from_fn(|i| Triple::new(w[i], w[(i + 1) % 5], w[(i + 2) % 5]))
    }

    /// The five edges in cycle order.
    pub fn edges(&self) -> [(Triple, Triple); 5] {
        let v = self.vertices();
        std::array::from_fn(|i| (v[i], v[(i + 1) % 5]))
    }

    pub fn mono_edges(&self, coloring: &Coloring) -> usize {
        self.edges().iter().filter(|(u, v)| coloring.get(*u) == coloring.get(*v)).count()
    }
}

/// Partition of the 120 edges of `DB_distinct(5)` into 24 directed 5-cycles.
///
/// Each edge `((a,b,c),(b,c,d))` misses exactly one symbol `e` of `[5]`, and
/// goes to the cycle of the word `(a,b,c,d,e)`.
pub fn five_cycle_partition(spec: &DeBruijnSpec) -> Result<Vec<FiveCycle>> {
    if spec.variant != Variant::Distinct || spec.n != 5 {
        return Err(Error::invalid(format!(
            "the five-cycle partition exists only for DB_distinct(5), got {spec}"
        )));
    }
    let mut cycles: Vec<FiveCycle> = spec
        .edges()
        .map(|(u, v)| {
            let e = 10 - u.a - u.b - u.c - v.c;
            FiveCycle::from_word([u.a, u.b, u.c, v.c, e])
        })
        .collect();
    cycles.sort();
    cycles.dedup();
    Ok(cycles)
}

/// Check that `cycles` covers every edge of `spec` exactly once using valid
/// directed cycles of distinct vertices.
pub fn verify_cycle_partition(spec: &DeBruijnSpec, cycles: &[FiveCycle]) -> Result<()> {
    let mut hits = vec![0u32; spec.vertex_count() * spec.n];
    for cyc in cycles {
        let verts = cyc.vertices();
        for (i, v) in verts.iter().enumerate() {
            if verts[..i].contains(v) {
                return Err(Error::Consistency(format!("cycle {:?} repeats vertex {v}", cyc.word)));
            }
        }
        for (u, v) in cyc.edges() {
            if v != u.shift(v.c) || !spec.contains_edge(u, v.c) {
                return Err(Error::Consistency(format!("{u} -> {v} is not an edge of {spec}")));
            }
            hits[spec.index_unchecked(u) * spec.n + v.c] += 1;
        }
    }
    let covered = hits.iter().filter(|&&h| h == 1).count() as u64;
    if hits.iter().any(|&h| h > 1) || covered != spec.edge_count() {
        return Err(Error::Consistency(format!(
            "cycles cover {covered} of {} edges exactly once",
            spec.edge_count()
        )));
    }
    Ok(())
}

/// Write a coloring: header `variant n`, then one `0`/`1` per vertex in
/// dense-index order, wrapped at 64 characters per line.
pub fn write_coloring(coloring: &Coloring, mut out: impl Write) -> Result<()> {
    writeln!(out, "{} {}", coloring.spec.variant, coloring.spec.n)?;
    for chunk in coloring.bits.chunks(64) {
        let line: String = chunk.iter().map(|&b| if b { '1' } else { '0' }).collect();
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Read the format produced by [`write_coloring`]. Whitespace between bits
/// is ignored and `#` starts a comment.
pub fn read_coloring(input: impl BufRead) -> Result<Coloring> {
    let mut spec = None;
    let mut bits = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match spec {
            None => {
                let mut parts = line.split_whitespace();
                let (Some(v), Some(n), None) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(Error::parse(lineno + 1, "expected header `variant n`"));
                };
                let variant: Variant = v.parse().map_err(|e: Error| Error::parse(lineno + 1, e.to_string()))?;
                let n: usize = n.parse().map_err(|_| Error::parse(lineno + 1, format!("bad n {n:?}")))?;
                let s = DeBruijnSpec::new(variant, n).map_err(|e| Error::parse(lineno + 1, e.to_string()))?;
                bits.reserve(s.vertex_count());
                spec = Some(s);
            }
            Some(_) => {
                for ch in line.chars().filter(|c| !c.is_whitespace()) {
                    match ch {
                        '0' => bits.push(false),
                        '1' => bits.push(true),
                        other => return Err(Error::parse(lineno + 1, format!("unexpected character {other:?}"))),
                    }
                }
            }
        }
    }
    let spec = spec.ok_or_else(|| Error::parse(1, "missing header"))?;
    Coloring::new(spec, bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn edge_counts() {
        assert_eq!(DeBruijnSpec::normal(2).unwrap().edges().count(), 16);
        assert_eq!(DeBruijnSpec::distinct(5).unwrap().edges().count(), 120);
        assert_eq!(DeBruijnSpec::distinct(4).unwrap().edges().count(), 24);
        assert_eq!(graph_stats(&DeBruijnSpec::normal(2).unwrap()), (8, 16));
        assert_eq!(graph_stats(&DeBruijnSpec::distinct(5).unwrap()), (60, 120));
        assert_eq!(graph_stats(&DeBruijnSpec::normal(4).unwrap()), (64, 256));
    }

    #[test]
    fn rejects_small_graphs() {
        assert!(DeBruijnSpec::normal(1).is_err());
        assert!(DeBruijnSpec::distinct(3).is_err());
    }

    #[test]
    fn edges_are_lexicographic() {
        let spec = DeBruijnSpec::distinct(6).unwrap();
        let words: Vec<_> = spec.edges().map(|(u, v)| [u.a, u.b, u.c, v.c]).collect();
        assert!(words.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(words.len() as u64, spec.edge_count());
    }

    #[test]
    fn dense_index_roundtrip() {
        for spec in [DeBruijnSpec::normal(5).unwrap(), DeBruijnSpec::distinct(7).unwrap()] {
            let verts: Vec<_> = spec.vertices().collect();
            assert!(verts.windows(2).all(|w| w[0] < w[1]), "vertices must be in lexicographic order");
            for (i, v) in verts.iter().enumerate() {
                assert!(spec.contains(*v));
                assert_eq!(spec.index(*v), Some(i));
            }
        }
    }

    #[test]
    fn constant_coloring_is_all_mono() {
        let stats = mono_fraction(&Coloring::constant(DeBruijnSpec::normal(2).unwrap(), true));
        assert_eq!(stats.mono_edges, 16);
        assert_eq!(stats.fraction, ratio(1, 1));
    }

    #[test]
    fn optimal_small_colorings() {
        assert_eq!(mono_fraction(&normal2_optimal_coloring()).fraction, ratio(4, 16));
        let c = distinct5_optimal_coloring();
        assert_eq!(mono_fraction(&c).mono_edges, 24);
        assert!(c.get(Triple::new(0, 1, 2)));
        assert!(c.get(Triple::new(1, 2, 0)));
        assert!(!c.get(Triple::new(1, 2, 3)));
    }

    #[test]
    fn five_cycles() {
        let spec = DeBruijnSpec::distinct(5).unwrap();
        let cycles = five_cycle_partition(&spec).unwrap();
        assert_eq!(cycles.len(), 24);
        verify_cycle_partition(&spec, &cycles).unwrap();
        // ((0,1,2),(1,2,3)) misses symbol 4.
        let owner = cycles
            .iter()
            .find(|c| c.edges().contains(&(Triple::new(0, 1, 2), Triple::new(1, 2, 3))))
            .unwrap();
        assert_eq!(owner.word, [0, 1, 2, 3, 4]);
        assert!(five_cycle_partition(&DeBruijnSpec::distinct(6).unwrap()).is_err());
    }

    #[test]
    fn partition_verifier_catches_gaps() {
        let spec = DeBruijnSpec::distinct(5).unwrap();
        let mut cycles = five_cycle_partition(&spec).unwrap();
        cycles.pop();
        assert!(verify_cycle_partition(&spec, &cycles).is_err());
        let dup = cycles[0];
        cycles.push(dup);
        assert!(verify_cycle_partition(&spec, &cycles).is_err());
    }

    #[test]
    fn complement_edges_bounded() {
        // |E_normal \ E_distinct| <= 7 n^3
        for n in 4..=12u64 {
            let normal = DeBruijnSpec::normal(n as usize).unwrap().edge_count();
            let distinct = DeBruijnSpec::distinct(n as usize).unwrap().edge_count();
            let direct = DeBruijnSpec::normal(n as usize)
                .unwrap()
                .edges()
                .filter(|(u, v)| !(u.is_distinct() && v.is_distinct() && u.a != v.c))
                .count() as u64;
            assert_eq!(direct, normal - distinct);
            assert!(direct <= 7 * n * n * n, "n = {n}");
        }
    }

    #[test]
    fn coloring_file_roundtrip() {
        let c = distinct5_optimal_coloring();
        let mut buf = Vec::new();
        write_coloring(&c, &mut buf).unwrap();
        assert!(buf.starts_with(b"distinct 5\n"));
        assert_eq!(read_coloring(&buf[..]).unwrap(), c);
        assert!(read_coloring(&b"normal 2\n0101"[..]).is_err());
        assert!(matches!(read_coloring(&b"normal 2\n01x1"[..]), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn cut_stats_csv() {
        let s = mono_fraction(&normal2_optimal_coloring());
        assert_eq!(s.csv_row(), "normal,2,4,16,1,4");
    }
}

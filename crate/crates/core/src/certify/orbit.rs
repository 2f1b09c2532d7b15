//! Symmetry classes of vertex pairs and triples, and the invariant matrix
//! algebra they span.
//!
//! Symbol permutations act on De Bruijn vertices; two ordered pairs (or
//! triples) of vertices lie in the same orbit iff their concatenated symbol
//! sequences have the same equality pattern. A pattern is stored as its
//! first-occurrence relabeling, e.g. `(3,1,4),(1,4,5)` becomes `012124`.
//! For the directed cycle the acting group is rotation and a pair's class is
//! its index difference.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;

use crate::debruijn::{DeBruijnSpec, Triple, Variant};
use crate::error::{Error, Result};
use crate::Rational;

/// Graphs the SDP pipeline understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpGraph {
    DeBruijn(DeBruijnSpec),
    /// Directed cycle on `n` vertices, `i -> i+1 mod n`.
    Cycle(usize),
}

impl fmt::Display for SdpGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SdpGraph::DeBruijn(spec) => write!(f, "{spec}"),
            SdpGraph::Cycle(n) => write!(f, "C_{n}"),
        }
    }
}

impl SdpGraph {
    pub fn vertex_count(&self) -> usize {
        match self {
            SdpGraph::DeBruijn(spec) => spec.vertex_count(),
            SdpGraph::Cycle(n) => *n,
        }
    }

    /// Directed edges as index pairs; self-loops appear as `(v, v)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self {
            SdpGraph::DeBruijn(spec) => {
                spec.edges().map(|(u, v)| (spec.index_unchecked(u), spec.index_unchecked(v))).collect()
            }
            SdpGraph::Cycle(n) => (0..*n).map(|i| (i, (i + 1) % n)).collect(),
        }
    }

    /// Human-readable vertex label used in certificate files.
    pub fn label(&self, v: usize) -> String {
        match self {
            SdpGraph::DeBruijn(spec) => {
                let t = spec.vertex(v);
                format!("{},{},{}", t.a, t.b, t.c)
            }
            SdpGraph::Cycle(_) => v.to_string(),
        }
    }

    pub fn parse_label(&self, s: &str) -> Result<usize> {
        match self {
            SdpGraph::DeBruijn(spec) => {
                let parts: Vec<usize> = s
                    .split(',')
                    .map(|x| x.trim().parse().map_err(|_| Error::invalid(format!("bad vertex {s:?}"))))
                    .collect::<Result<_>>()?;
                if parts.len() != 3 {
                    return Err(Error::invalid(format!("vertex {s:?} needs three symbols")));
                }
                spec.index(Triple::new(parts[0], parts[1], parts[2]))
                    .ok_or_else(|| Error::invalid(format!("{s:?} is not a vertex of {spec}")))
            }
            SdpGraph::Cycle(n) => {
                let v: usize = s.parse().map_err(|_| Error::invalid(format!("bad vertex {s:?}")))?;
                if v >= *n {
                    return Err(Error::invalid(format!("vertex {v} out of range")));
                }
                Ok(v)
            }
        }
    }

    /// Orbit key of a tuple of vertices under the graph's symmetry group.
    pub fn orbit_key(&self, vs: &[usize]) -> u64 {
        match self {
            SdpGraph::DeBruijn(spec) => {
                let mut seen = [usize::MAX; 16];
                let mut key = 0u64;
                let mut next = 0usize;
                for &v in vs {
                    for s in spec.vertex(v).symbols() {
                        let slot = match seen[..next].iter().position(|&x| x == s) {
                            Some(p) => p,
                            None => {
                                seen[next] = s;
                                next += 1;
                                next - 1
                            }
                        };
                        key = key * 16 + slot as u64;
                    }
                }
                key
            }
            SdpGraph::Cycle(n) => vs.iter().skip(1).fold(0u64, |acc, &v| acc * *n as u64 + ((v + n - vs[0]) % n) as u64),
        }
    }

    /// Apply a symmetry (a symbol permutation, or a rotation by `pi[0]` for
    /// cycles) to a vertex.
    pub fn act(&self, pi: &[usize], v: usize) -> usize {
        match self {
            SdpGraph::DeBruijn(spec) => spec.index_unchecked(spec.vertex(v).map(pi)),
            SdpGraph::Cycle(n) => (v + pi[0]) % n,
        }
    }
}

/// Arity of the tuples being classified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arity {
    Pairs,
    Triples,
}

/// One orbit of ordered vertex pairs or triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClass {
    /// First-occurrence symbol pattern, 3 symbols per vertex.
    pub pattern: Vec<u8>,
    pub size: u64,
}

impl OrbitClass {
    pub fn pattern_string(&self) -> String {
        self.pattern.iter().map(|d| char::from_digit(*d as u32, 36).unwrap_or('?')).collect()
    }

    /// Representative tuple (vertices written with the pattern's own symbols).
    pub fn representative(&self) -> Vec<Triple> {
        self.pattern.chunks(3).map(|c| Triple::new(c[0] as usize, c[1] as usize, c[2] as usize)).collect()
    }
}

/// Falling factorial `n (n-1) ... (n-k+1)`.
fn falling(n: usize, k: usize) -> u64 {
    (0..k).map(|i| (n - i) as u64).product()
}

/// Restricted growth strings of the given length using at most `max_symbols`
/// symbols, keeping only those whose 3-blocks are vertices of `variant`.
fn patterns(len: usize, max_symbols: usize, variant: Variant) -> Vec<Vec<u8>> {
    fn rec(prefix: &mut Vec<u8>, used: u8, len: usize, max: usize, variant: Variant, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for s in 0..=used.min(max as u8 - 1) {
            prefix.push(s);
            let p = prefix.len();
            let start = (p - 1) / 3 * 3;
            let ok = variant == Variant::Normal || !prefix[start..p - 1].contains(&s);
            if ok {
                rec(prefix, used.max(s + 1), len, max, variant, out);
            }
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(len), 0, len, max_symbols, variant, &mut out);
    out
}

/// Orbits of ordered pairs or triples of vertices under symbol permutations,
/// with exact sizes. Sizes sum to `|V|^2` (pairs) or `|V|^3` (triples).
pub fn orbit_classes(spec: &DeBruijnSpec, arity: Arity) -> Vec<OrbitClass> {
    let len = match arity {
        Arity::Pairs => 6,
        Arity::Triples => 9,
    };
    patterns(len, spec.n(), spec.variant())
        .into_iter()
        .map(|pattern| {
            let k = *pattern.iter().max().unwrap_or(&0) as usize + 1;
            OrbitClass { size: falling(spec.n(), k), pattern }
        })
        .collect()
}

/// Per-class data of the pair algebra.
#[derive(Clone, Debug)]
pub struct PairClass {
    /// Ordered pairs in the class.
    pub size: u64,
    /// A representative `(u, v)`.
    pub rep: (usize, usize),
    /// Class of `(v, u)`.
    pub transpose: usize,
    pub diagonal: bool,
    /// Some pair in the class is an edge in either direction.
    pub adjacent: bool,
}

/// The algebra of matrices constant on pair classes.
///
/// `A_k` is the 0/1 matrix of class `k`. Products expand through structure
/// constants `A_k A_l = sum_m c(k,l,m) A_m` with
/// `c(k,l,m) = #{w : (u,w) in k, (w,v) in l}` for any `(u,v)` in `m`.
#[derive(Clone, Debug)]
pub struct PairAlgebra {
    graph: SdpGraph,
    dim: usize,
    classes: Vec<PairClass>,
    class_of: Vec<u32>,
    /// Nonzero structure constants `(k, l, m, c)`.
    structure: Vec<(u32, u32, u32, f64)>,
}

impl PairAlgebra {
    pub fn new(graph: SdpGraph) -> Self {
        let dim = graph.vertex_count();
        let mut ids: HashMap<u64, u32> = HashMap::new();
        let mut classes: Vec<PairClass> = Vec::new();
        let mut class_of = vec![0u32; dim * dim];
        for u in 0..dim {
            for v in 0..dim {
                let key = graph.orbit_key(&[u, v]);
                let id = *ids.entry(key).or_insert_with(|| {
                    classes.push(PairClass { size: 0, rep: (u, v), transpose: 0, diagonal: u == v, adjacent: false });
                    (classes.len() - 1) as u32
                });
                classes[id as usize].size += 1;
                class_of[u * dim + v] = id;
            }
        }
        for k in 0..classes.len() {
            let (u, v) = classes[k].rep;
            classes[k].transpose = class_of[v * dim + u] as usize;
        }
        for (u, v) in graph.edges() {
            for id in [class_of[u * dim + v], class_of[v * dim + u]] {
                if u != v {
                    classes[id as usize].adjacent = true;
                }
            }
        }
        let mut structure = Vec::new();
        let mut acc: HashMap<(u32, u32), u32> = HashMap::new();
        for (m, class) in classes.iter().enumerate() {
            let (u, v) = class.rep;
            acc.clear();
            for w in 0..dim {
                *acc.entry((class_of[u * dim + w], class_of[w * dim + v])).or_insert(0) += 1;
            }
            let mut entries: Vec<_> = acc.iter().map(|(&(k, l), &c)| (k, l, m as u32, c as f64)).collect();
            entries.sort_by_key(|e| (e.0, e.1));
            structure.extend(entries);
        }
        PairAlgebra { graph, dim, classes, class_of, structure }
    }

    pub fn graph(&self) -> &SdpGraph {
        &self.graph
    }

    /// Matrix dimension `|V|`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of classes (the algebra's dimension).
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Nonzero structure constants `(k, l, m, c)`.
    pub fn structure(&self) -> &[(u32, u32, u32, f64)] {
        &self.structure
    }

    pub fn classes(&self) -> &[PairClass] {
        &self.classes
    }

    pub fn class_of(&self, u: usize, v: usize) -> usize {
        self.class_of[u * self.dim + v] as usize
    }

    /// Classes of the diagonal, one per vertex orbit.
    pub fn diagonal_classes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.classes[k].diagonal).collect()
    }

    /// Coordinates of the identity matrix.
    pub fn identity(&self) -> Vec<f64> {
        self.classes.iter().map(|c| if c.diagonal { 1.0 } else { 0.0 }).collect()
    }

    /// Coordinates of `X Y`.
    pub fn mul(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for &(k, l, m, c) in &self.structure {
            out[m as usize] += c * x[k as usize] * y[l as usize];
        }
        out
    }

    /// Frobenius inner product `<X, Y>` of two elements.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.classes.iter().enumerate().map(|(k, c)| c.size as f64 * x[k] * y[k]).sum()
    }

    /// `tr(X Y) = <Xᵀ, Y>`.
    pub fn trace_product(&self, x: &[f64], y: &[f64]) -> f64 {
        self.classes.iter().enumerate().map(|(k, c)| c.size as f64 * x[c.transpose] * y[k]).sum()
    }

    /// Symmetric `K × K` matrix with the same eigenvalues as the symmetric
    /// element `x` (ignoring multiplicities): the left-regular
    /// representation conjugated by `diag(sqrt(size))`.
    pub fn regular_sym(&self, x: &[f64]) -> nalgebra::DMatrix<f64> {
        let k = self.len();
        let mut r = nalgebra::DMatrix::zeros(k, k);
        for &(a, l, m, c) in &self.structure {
            r[(m as usize, l as usize)] += c * x[a as usize];
        }
        for m in 0..k {
            for l in 0..k {
                let scale = (self.classes[m].size as f64 / self.classes[l].size as f64).sqrt();
                r[(m, l)] *= scale;
            }
        }
        // symmetrize away rounding noise
        let rt = r.transpose();
        (r + rt) * 0.5
    }

    /// Inverse of a positive definite element, or `None` if it is not PD.
    pub fn inverse_pd(&self, x: &[f64]) -> Option<Vec<f64>> {
        let r = self.regular_sym(x);
        let chol = r.cholesky()?;
        let sq: Vec<f64> = self.classes.iter().map(|c| (c.size as f64).sqrt()).collect();
        let rhs = nalgebra::DVector::from_iterator(self.len(), self.identity().iter().zip(&sq).map(|(e, s)| e * s));
        let sol = chol.solve(&rhs);
        Some(sol.iter().zip(&sq).map(|(v, s)| v / s).collect())
    }

    /// Smallest eigenvalue of a symmetric element.
    pub fn min_eigenvalue(&self, x: &[f64]) -> f64 {
        self.regular_sym(x).symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Dense matrix of an element (for tests and small checks).
    pub fn expand(&self, x: &[f64]) -> nalgebra::DMatrix<f64> {
        let d = self.dim;
        nalgebra::DMatrix::from_fn(d, d, |i, j| x[self.class_of(i, j)])
    }

    /// Undirected graph distance for each class (`usize::MAX` if unreachable).
    pub fn class_distances(&self) -> Vec<usize> {
        let d = self.dim;
        let mut adj = vec![Vec::new(); d];
        for (u, v) in self.graph.edges() {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut cache: HashMap<usize, Vec<usize>> = HashMap::new();
        self.classes
            .iter()
            .map(|c| {
                let (u, v) = c.rep;
                let dist = cache.entry(u).or_insert_with(|| {
                    let mut dist = vec![usize::MAX; d];
                    let mut queue = std::collections::VecDeque::from([u]);
                    dist[u] = 0;
                    while let Some(x) = queue.pop_front() {
                        for &y in &adj[x] {
                            if dist[y] == usize::MAX {
                                dist[y] = dist[x] + 1;
                                queue.push_back(y);
                            }
                        }
                    }
                    dist
                });
                dist[v]
            })
            .collect()
    }
}

/// Sign pattern of a triangle inequality
/// `s1 X_uv + s2 X_vw + s3 X_uw >= -1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrianglePattern(pub [i8; 3]);

impl TrianglePattern {
    pub const ALL: [TrianglePattern; 4] = [
        TrianglePattern([1, 1, 1]),
        TrianglePattern([1, -1, -1]),
        TrianglePattern([-1, 1, -1]),
        TrianglePattern([-1, -1, 1]),
    ];

    pub fn parse(s: &str) -> Result<Self> {
        let signs: Vec<i8> = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(Error::invalid(format!("bad triangle pattern {s:?}"))),
            })
            .collect::<Result<_>>()?;
        let p = TrianglePattern(signs.try_into().map_err(|_| Error::invalid(format!("triangle pattern {s:?} needs 3 signs")))?);
        if !Self::ALL.contains(&p) {
            return Err(Error::invalid(format!("{s:?} is not a valid triangle inequality (sign product must be +)")));
        }
        Ok(p)
    }

    /// `(i, j, sign)` for the three pairs of `(u, v, w)`.
    pub fn terms(self, [u, v, w]: [usize; 3]) -> [(usize, usize, i8); 3] {
        let [s1, s2, s3] = self.0;
        [(u, v, s1), (v, w, s2), (u, w, s3)]
    }
}

impl fmt::Display for TrianglePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.0 {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// A triangle inequality averaged over its symmetry orbit.
///
/// The averaged constraint matrix is invariant; its coordinate on class `m`
/// is (sum of `s/2` over the representative's entries lying in `m`) / `|m|`.
#[derive(Clone, Debug)]
pub struct TriangleOrbit {
    pub rep: [usize; 3],
    pub pattern: TrianglePattern,
    /// `(class, sum of s/2 over representative entries in it)`, where the
    /// sum is stored doubled as an integer.
    pub weights: Vec<(usize, i32)>,
}

impl TriangleOrbit {
    pub fn new(alg: &PairAlgebra, rep: [usize; 3], pattern: TrianglePattern) -> Self {
        let mut w: Vec<(usize, i32)> = Vec::new();
        for (i, j, s) in pattern.terms(rep) {
            for k in [alg.class_of(i, j), alg.class_of(j, i)] {
                match w.iter_mut().find(|e| e.0 == k) {
                    Some(e) => e.1 += s as i32,
                    None => w.push((k, s as i32)),
                }
            }
        }
        w.retain(|e| e.1 != 0);
        w.sort_unstable();
        TriangleOrbit { rep, pattern, weights: w }
    }

    /// Coordinates of the averaged constraint matrix.
    pub fn coords(&self, alg: &PairAlgebra) -> Vec<(usize, f64)> {
        self.weights.iter().map(|&(k, d)| (k, d as f64 / 2.0 / alg.classes()[k].size as f64)).collect()
    }

    pub fn exact_coords(&self, alg: &PairAlgebra) -> Vec<(usize, Rational)> {
        self.weights
            .iter()
            .map(|&(k, d)| (k, Rational::new(BigInt::from(d), BigInt::from(2 * alg.classes()[k].size))))
            .collect()
    }

    /// `<T, X>` for an invariant `X` given by coordinates.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.weights.iter().map(|&(k, d)| d as f64 / 2.0 * x[k]).sum()
    }
}

/// Which triangle orbits to include.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrianglePolicy {
    None,
    /// Triples in which at least one pair is adjacent.
    OrbitRepresentatives,
    /// Triples whose pairs are all within the given undirected distance.
    AllWithinRadius(usize),
}

impl fmt::Display for TrianglePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrianglePolicy::None => f.write_str("none"),
            TrianglePolicy::OrbitRepresentatives => f.write_str("orbit_representatives"),
            TrianglePolicy::AllWithinRadius(r) => write!(f, "all_within_radius:{r}"),
        }
    }
}

impl std::str::FromStr for TrianglePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(TrianglePolicy::None),
            "orbit_representatives" | "edges" => Ok(TrianglePolicy::OrbitRepresentatives),
            "all" => Ok(TrianglePolicy::AllWithinRadius(usize::MAX)),
            other => match other.strip_prefix("all_within_radius:") {
                Some(r) => r
                    .parse()
                    .map(TrianglePolicy::AllWithinRadius)
                    .map_err(|_| Error::invalid(format!("bad radius in {other:?}"))),
                None => Err(Error::invalid(format!("unknown triangle policy {other:?}"))),
            },
        }
    }
}

/// One representative per distinct averaged triangle constraint allowed by
/// the policy. Only De Bruijn graphs carry triangle families.
pub fn triangle_orbits(alg: &PairAlgebra, policy: TrianglePolicy) -> Result<Vec<TriangleOrbit>> {
    if policy == TrianglePolicy::None {
        return Ok(Vec::new());
    }
    let spec = match alg.graph() {
        SdpGraph::DeBruijn(spec) => *spec,
        SdpGraph::Cycle(_) => return Err(Error::invalid("triangle families are only defined for De Bruijn graphs")),
    };
    let dist = match policy {
        TrianglePolicy::AllWithinRadius(r) if r != usize::MAX => Some((alg.class_distances(), r)),
        _ => None,
    };
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for pattern in patterns(9, spec.n(), spec.variant()) {
        let t: Vec<usize> = pattern
            .chunks(3)
            .map(|c| spec.index_unchecked(Triple::new(c[0] as usize, c[1] as usize, c[2] as usize)))
            .collect();
        let rep = [t[0], t[1], t[2]];
        if rep[0] == rep[1] || rep[1] == rep[2] || rep[0] == rep[2] {
            continue;
        }
        let pairs = [(rep[0], rep[1]), (rep[1], rep[2]), (rep[0], rep[2])];
        let keep = match (&policy, &dist) {
            (TrianglePolicy::OrbitRepresentatives, _) => {
                pairs.iter().any(|&(i, j)| alg.classes()[alg.class_of(i, j)].adjacent)
            }
            (_, Some((d, r))) => pairs.iter().all(|&(i, j)| d[alg.class_of(i, j)] <= *r),
            _ => true,
        };
        if !keep {
            continue;
        }
        for p in TrianglePattern::ALL {
            let orbit = TriangleOrbit::new(alg, rep, p);
            if seen.insert(orbit.weights.clone()) {
                out.push(orbit);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_classes_partition() {
        let spec = DeBruijnSpec::distinct(5).unwrap();
        let classes = orbit_classes(&spec, Arity::Pairs);
        assert_eq!(classes.iter().map(|c| c.size).sum::<u64>(), 3600);
        let edge = classes.iter().find(|c| c.pattern == [0, 1, 2, 1, 2, 3]).unwrap();
        assert_eq!(edge.size, 120);
        let t = orbit_classes(&spec, Arity::Triples);
        assert_eq!(t.iter().map(|c| c.size).sum::<u64>(), 60u64.pow(3));
    }

    #[test]
    fn class_counts_stabilize() {
        let count = |n, a| orbit_classes(&DeBruijnSpec::distinct(n).unwrap(), a).len();
        assert_eq!(count(8, Arity::Pairs), count(9, Arity::Pairs));
        assert_eq!(count(9, Arity::Triples), count(10, Arity::Triples));
        let normal = orbit_classes(&DeBruijnSpec::normal(4).unwrap(), Arity::Pairs);
        assert_eq!(normal.iter().map(|c| c.size).sum::<u64>(), 64 * 64);
    }

    #[test]
    fn algebra_matches_enumeration() {
        let spec = DeBruijnSpec::distinct(5).unwrap();
        let alg = PairAlgebra::new(SdpGraph::DeBruijn(spec));
        let classes = orbit_classes(&spec, Arity::Pairs);
        assert_eq!(alg.len(), classes.len());
        let mut sizes: Vec<u64> = alg.classes().iter().map(|c| c.size).collect();
        let mut expected: Vec<u64> = classes.iter().map(|c| c.size).collect();
        sizes.sort_unstable();
        expected.sort_unstable();
        assert_eq!(sizes, expected);
    }

    #[test]
    fn products_match_dense() {
        for graph in [SdpGraph::DeBruijn(DeBruijnSpec::distinct(5).unwrap()), SdpGraph::Cycle(7)] {
            let alg = PairAlgebra::new(graph);
            let x: Vec<f64> = (0..alg.len()).map(|k| ((k * 7 + 3) % 11) as f64 - 5.0).collect();
            let y: Vec<f64> = (0..alg.len()).map(|k| ((k * 5 + 1) % 13) as f64 - 6.0).collect();
            let dense = alg.expand(&x) * alg.expand(&y);
            let prod = alg.expand(&alg.mul(&x, &y));
            assert!((dense - prod).abs().max() < 1e-9);
            let tr = (alg.expand(&x) * alg.expand(&y)).trace();
            assert!((tr - alg.trace_product(&x, &y)).abs() < 1e-6);
        }
    }

    #[test]
    fn regular_representation_eigenvalues() {
        let alg = PairAlgebra::new(SdpGraph::DeBruijn(DeBruijnSpec::distinct(5).unwrap()));
        let mut x = vec![0.0; alg.len()];
        for (k, c) in alg.classes().iter().enumerate() {
            if c.adjacent {
                x[k] = 1.0;
            }
        }
        let dense_min = alg.expand(&x).symmetric_eigenvalues().min();
        assert!((dense_min - alg.min_eigenvalue(&x)).abs() < 1e-9);
        // 4-regular undirected adjacency; its bottom eigenvalue is -1 - sqrt 5
        assert!((dense_min + 1.0 + 5f64.sqrt()).abs() < 1e-9);
        let shifted: Vec<f64> = x.iter().zip(alg.identity()).map(|(a, e)| a + 4.0 * e).collect();
        let inv = alg.inverse_pd(&shifted).unwrap();
        let id = alg.mul(&shifted, &inv);
        for (a, b) in id.iter().zip(alg.identity()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(alg.inverse_pd(&x).is_none());
    }

    #[test]
    fn triangle_patterns() {
        assert!(TrianglePattern::parse("+--").is_ok());
        assert!(TrianglePattern::parse("++-").is_err());
        assert_eq!(TrianglePattern::parse("-+-").unwrap().to_string(), "-+-");
        assert_eq!("all_within_radius:2".parse::<TrianglePolicy>().unwrap(), TrianglePolicy::AllWithinRadius(2));
    }

    #[test]
    fn triangle_orbit_families() {
        let alg = PairAlgebra::new(SdpGraph::DeBruijn(DeBruijnSpec::distinct(6).unwrap()));
        let edges = triangle_orbits(&alg, TrianglePolicy::OrbitRepresentatives).unwrap();
        let all = triangle_orbits(&alg, "all".parse().unwrap()).unwrap();
        assert!(!edges.is_empty() && edges.len() < all.len());
        assert!(triangle_orbits(&alg, TrianglePolicy::None).unwrap().is_empty());
        let cyc = PairAlgebra::new(SdpGraph::Cycle(5));
        assert!(triangle_orbits(&cyc, TrianglePolicy::OrbitRepresentatives).is_err());
    }
}

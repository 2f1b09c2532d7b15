//! Dual certificates: rounding a float dual to exact multipliers, and an
//! exact verifier that rebuilds everything from the graph's edge list.
//!
//! A certificate holds `y` (per vertex, or per vertex orbit), nonnegative
//! triangle multipliers (per explicit triangle, or as the total mass spread
//! uniformly over a triangle's symmetry orbit) and a margin. It proves
//! `min-uncut fraction >= 1/2 + sum_v y_v - sum lambda` once
//! `S - margin I` is shown PSD, where
//! `S = C - Diag(y) - sum lambda T`.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ldl::{Ldl, LdlFailure, SymMatrix};
use super::orbit::{SdpGraph, TrianglePattern};
use super::sdp::{DualCandidate, SdpInstance};
use crate::debruijn::{DeBruijnSpec, Variant};
use crate::error::{Error, Result};
use crate::optimize::{BoundKind, BoundRecord};
use crate::scalar::{dyadic, fmt_ratio, parse_rational, ratio_to_f64};
use crate::Rational;

/// Largest dimension verified by exact rational `LDLᵀ`; larger matrices go
/// through a rounded Cholesky factor with an exact residual check.
pub const EXACT_LDL_MAX_DIM: usize = 64;

/// Fractional bits kept when rounding multipliers.
const MULTIPLIER_BITS: u32 = 60;
/// Fractional bits of the rounded Cholesky factor.
const FACTOR_BITS: u32 = 52;
/// Smallest diagonal shift tried is `2^-MIN_SHIFT_BITS`.
const MIN_SHIFT_BITS: i32 = 62;

/// Diagonal multiplier entry.
#[derive(Clone, Debug, PartialEq)]
pub enum DiagEntry {
    /// `value` on `vertex` only.
    Vertex { vertex: usize, value: Rational },
    /// `value` on every vertex in the orbit of `vertex`.
    Orbit { vertex: usize, value: Rational },
}

/// Triangle multiplier entry for `s1 X_uv + s2 X_vw + s3 X_uw >= -1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleEntry {
    pub vertices: [usize; 3],
    pub pattern: TrianglePattern,
    pub value: Rational,
    /// `value` is the total mass spread uniformly over the triangle's orbit.
    pub orbit: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpCertificate {
    pub graph: SdpGraph,
    pub claimed_bound: Rational,
    pub psd_margin: Rational,
    pub diag: Vec<DiagEntry>,
    pub triangles: Vec<TriangleEntry>,
}

/// Why a certificate was rejected.
#[derive(Clone, Debug, PartialEq)]
pub enum Rejection {
    /// Triangle entry `index` has a negative multiplier.
    NegativeMultiplier { index: usize },
    /// `S - margin I` is not PSD; elimination failed at this leading minor.
    PsdFailure { index: usize },
    BoundMismatch { claimed: Rational, recomputed: Rational },
    Malformed(String),
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::NegativeMultiplier { index } => write!(f, "negative multiplier in triangle entry {index}"),
            Rejection::PsdFailure { index } => write!(f, "PSD failure at leading minor {index}"),
            Rejection::BoundMismatch { claimed, recomputed } => {
                write!(f, "bound mismatch: claimed {}, recomputed {}", fmt_ratio(claimed), fmt_ratio(recomputed))
            }
            Rejection::Malformed(msg) => write!(f, "malformed certificate: {msg}"),
        }
    }
}

impl std::error::Error for Rejection {}

/// Successful verification.
#[derive(Clone, Debug)]
pub struct Verified {
    pub bound: Rational,
    /// How PSD was established.
    pub psd_method: &'static str,
    /// Lower bound on `p*`, present for distinct De Bruijn graphs only.
    pub record: Option<BoundRecord>,
}

/// Symmetric matrix pieces: a value per pair class plus sparse corrections.
struct Assembled {
    dim: usize,
    class_of: Vec<u32>,
    class_value: Vec<Rational>,
    sparse: HashMap<(usize, usize), Rational>,
}

impl Assembled {
    fn entry(&self, i: usize, j: usize) -> Rational {
        let base = self.class_value[self.class_of[i * self.dim + j] as usize].clone();
        match self.sparse.get(&(i.min(j), i.max(j))) {
            Some(v) => base + v,
            None => base,
        }
    }
}

fn add_sparse(map: &mut HashMap<(usize, usize), Rational>, i: usize, j: usize, v: Rational) {
    *map.entry((i.min(j), i.max(j))).or_insert_with(Rational::zero) += v;
}

/// Check a certificate from scratch.
pub fn verify_certificate(cert: &SdpCertificate) -> std::result::Result<Verified, Rejection> {
    let graph = cert.graph;
    let dim = graph.vertex_count();
    if cert.psd_margin.is_negative() {
        return Err(Rejection::Malformed("negative psd_margin".into()));
    }
    for (index, t) in cert.triangles.iter().enumerate() {
        if t.value.is_negative() {
            return Err(Rejection::NegativeMultiplier { index });
        }
        if t.vertices.iter().any(|&v| v >= dim) {
            return Err(Rejection::Malformed(format!("triangle entry {index} names a vertex out of range")));
        }
        let [u, v, w] = t.vertices;
        if u == v || v == w || u == w {
            return Err(Rejection::Malformed(format!("triangle entry {index} repeats a vertex")));
        }
    }

    // Per-vertex y.
    let vertex_key: Vec<u64> = (0..dim).map(|v| graph.orbit_key(&[v])).collect();
    let mut y: Vec<Option<Rational>> = vec![None; dim];
    for entry in &cert.diag {
        let (rep, value, orbit) = match entry {
            DiagEntry::Vertex { vertex, value } => (*vertex, value, false),
            DiagEntry::Orbit { vertex, value } => (*vertex, value, true),
        };
        if rep >= dim {
            return Err(Rejection::Malformed(format!("diagonal entry names vertex {rep} out of range")));
        }
        let targets: Vec<usize> =
            if orbit { (0..dim).filter(|&v| vertex_key[v] == vertex_key[rep]).collect() } else { vec![rep] };
        for v in targets {
            if y[v].replace(value.clone()).is_some() {
                return Err(Rejection::Malformed(format!("vertex {} gets two diagonal multipliers", graph.label(v))));
            }
        }
    }
    let y: Vec<Rational> = y.into_iter().map(|v| v.unwrap_or_else(Rational::zero)).collect();

    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let recomputed = half.clone() + y.iter().fold(Rational::zero(), |a, b| a + b)
        - cert.triangles.iter().fold(Rational::zero(), |a, t| a + &t.value);
    if recomputed != cert.claimed_bound {
        return Err(Rejection::BoundMismatch { claimed: cert.claimed_bound.clone(), recomputed });
    }

    // Pair classes and their sizes, counted directly.
    let mut ids: HashMap<u64, u32> = HashMap::new();
    let mut class_of = vec![0u32; dim * dim];
    let mut sizes: Vec<u64> = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            let next = ids.len() as u32;
            let id = *ids.entry(graph.orbit_key(&[i, j])).or_insert(next);
            if id as usize == sizes.len() {
                sizes.push(0);
            }
            sizes[id as usize] += 1;
            class_of[i * dim + j] = id;
        }
    }
    let mut class_value = vec![Rational::zero(); sizes.len()];
    let mut sparse: HashMap<(usize, usize), Rational> = HashMap::new();

    let edges = graph.edges();
    let w = Rational::new(BigInt::one(), BigInt::from(edges.len()));
    let quarter = w.clone() / BigInt::from(4);
    for &(u, v) in &edges {
        if u == v {
            add_sparse(&mut sparse, u, u, w.clone() / BigInt::from(2));
        } else {
            add_sparse(&mut sparse, u, v, quarter.clone());
        }
    }
    for (v, yv) in y.iter().enumerate() {
        if !yv.is_zero() {
            add_sparse(&mut sparse, v, v, -yv.clone());
        }
    }
    if !cert.psd_margin.is_zero() {
        for v in 0..dim {
            add_sparse(&mut sparse, v, v, -cert.psd_margin.clone());
        }
    }
    for t in &cert.triangles {
        if t.value.is_zero() {
            continue;
        }
        for (i, j, s) in t.pattern.terms(t.vertices) {
            let half_s = Rational::new(BigInt::from(s), BigInt::from(2));
            if t.orbit {
                // The orbit average puts (sum of s/2 over entries in class m) / |m|
                // on every entry of class m.
                for (a, b) in [(i, j), (j, i)] {
                    let k = class_of[a * dim + b] as usize;
                    class_value[k] -= t.value.clone() * half_s.clone() / BigInt::from(sizes[k]);
                }
            } else {
                add_sparse(&mut sparse, i, j, -(t.value.clone() * half_s));
            }
        }
    }

    let assembled = Assembled { dim, class_of, class_value, sparse };
    let psd_method = if dim <= EXACT_LDL_MAX_DIM {
        let m = SymMatrix::from_fn(dim, |i, j| assembled.entry(i, j));
        Ldl::factor(&m, &Rational::zero()).map_err(|e| Rejection::PsdFailure { index: e.index() })?;
        "exact_ldl"
    } else {
        rounded_cholesky_check(&assembled).map_err(|index| Rejection::PsdFailure { index })?;
        "rounded_cholesky"
    };

    let record = match graph {
        SdpGraph::DeBruijn(spec) if spec.variant() == Variant::Distinct => Some(BoundRecord {
            direction: BoundKind::Lower,
            value: cert.claimed_bound.clone(),
            n: spec.n(),
            variant: Variant::Distinct,
            method: "sdp".into(),
            witness_path: None,
            seed: None,
        }),
        _ => None,
    };
    Ok(Verified { bound: cert.claimed_bound.clone(), psd_method, record })
}

/// Prove `M` PSD by exhibiting `M = L Lᵀ + E` with `L` dyadic and `E`
/// diagonally dominant with nonnegative diagonal (hence PSD), all checked in
/// exact integer arithmetic. On failure returns the offending row.
fn rounded_cholesky_check(m: &Assembled) -> std::result::Result<(), usize> {
    let dim = m.dim;
    // Exact entries, then a common denominator.
    let entries: Vec<Rational> = (0..dim * dim).map(|p| m.entry(p / dim, p % dim)).collect();
    let den = entries.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = entries.iter().map(|r| r.numer() * (&den / r.denom())).collect();
    // Normalize by a power of two near the largest diagonal entry.
    let max_diag = (0..dim).map(|i| ratio_to_f64(&entries[i * dim + i]).abs()).fold(0.0f64, f64::max);
    if max_diag == 0.0 {
        return if ints.iter().all(Zero::is_zero) { Ok(()) } else { Err(0) };
    }
    let shift = -(max_diag.log2().ceil() as i32);
    let scale = 2f64.powi(shift);
    let floats: Vec<f64> = entries.iter().map(|r| ratio_to_f64(r) * scale).collect();
    let mut last_fail = 0;
    for tau_exp in [24, 30, 36, 42] {
        let tau = 2f64.powi(-tau_exp);
        let shifted = SymMatrix::from_fn(dim, |i, j| floats[i * dim + j] - if i == j { tau } else { 0.0 });
        let ldl = match Ldl::factor(&shifted, &0.0) {
            Ok(f) => f,
            Err(LdlFailure::NegativePivot { index } | LdlFailure::ZeroPivot { index }) => {
                last_fail = index;
                continue;
            }
        };
        let unit = 2f64.powi(FACTOR_BITS as i32);
        let sq: Vec<f64> = ldl.pivots().iter().map(|d| d.max(0.0).sqrt()).collect();
        let factor: Vec<i128> = (0..dim * dim)
            .map(|p| {
                let (i, k) = (p / dim, p % dim);
                if k > i {
                    0
                } else {
                    (ldl.lower(i, k) * sq[k] * unit).round() as i128
                }
            })
            .collect();
        match residual_dominant(dim, &ints, &den, &factor, shift) {
            Ok(()) => return Ok(()),
            Err(row) => last_fail = row,
        }
    }
    Err(last_fail)
}

/// With `Ŝ = 2^shift S` and `L = factor / 2^FACTOR_BITS`, check that
/// `E = 2^(2 FACTOR_BITS) den Ŝ - den factor factorᵀ` is diagonally dominant.
fn residual_dominant(dim: usize, ints: &[BigInt], den: &BigInt, factor: &[i128], shift: i32) -> std::result::Result<(), usize> {
    let lift = usize::try_from(2 * FACTOR_BITS as i32 + shift).map_err(|_| 0usize)?;
    for i in 0..dim {
        let mut diag = BigInt::zero();
        let mut off = BigInt::zero();
        for j in 0..dim {
            let upto = i.min(j);
            let dot: i128 = (0..=upto).map(|k| factor[i * dim + k] * factor[j * dim + k]).sum();
            let e = (&ints[i * dim + j] << lift) - BigInt::from(dot) * den;
            if i == j {
                diag = e;
            } else {
                off += e.abs();
            }
        }
        if diag.is_negative() || diag < off {
            return Err(i);
        }
    }
    Ok(())
}

/// Round a float dual to exact dyadic multipliers and repair PSD by a
/// uniform shift of `y`.
///
/// The shift `delta` is the smallest power of two `>= safety_shrink` for
/// which the rounded certificate verifies; it lowers the bound by
/// `delta |V|`. Half of it is recorded as the certificate's margin.
pub fn round_and_extract(inst: &SdpInstance, dual: &DualCandidate, safety_shrink: f64) -> Result<SdpCertificate> {
    if dual.y.len() != inst.vertex_orbits.len() || dual.mu.len() != inst.triangles.len() {
        return Err(Error::invalid("dual candidate does not match the instance"));
    }
    let alg = &inst.algebra;
    let y: Vec<Rational> = dual.y.iter().map(|&v| dyadic(v, MULTIPLIER_BITS)).collect();
    let triangles: Vec<TriangleEntry> = inst
        .triangles
        .iter()
        .zip(&dual.mu)
        .filter(|(_, &m)| m > 0.0)
        .map(|(t, &m)| TriangleEntry { vertices: t.rep, pattern: t.pattern, value: dyadic(m, MULTIPLIER_BITS), orbit: true })
        .filter(|t| t.value.is_positive())
        .collect();
    let reps: Vec<usize> = inst.vertex_orbits.iter().map(|&k| alg.classes()[k].rep.0).collect();
    let sizes: Vec<u64> = inst.vertex_orbits.iter().map(|&k| alg.classes()[k].size).collect();
    let mu_sum = triangles.iter().fold(Rational::zero(), |a, t| a + &t.value);
    let min_eig = inst.slack_min_eigenvalue(dual);
    let max_diag = alg.regular_sym(&inst.objective).diagonal().amax().max(y.iter().map(|v| ratio_to_f64(v).abs()).fold(0.0, f64::max));
    // Exact LDL needs only the true spectrum to clear zero; the rounded
    // Cholesky route also absorbs its factorization error.
    let exact = inst.dim() <= EXACT_LDL_MAX_DIM;
    let slack_for_route = if exact { -2.0 * min_eig } else { 8.0 * max_diag * 2f64.powi(-24) - min_eig };
    let needed = slack_for_route.max(safety_shrink).max(f64::MIN_POSITIVE);
    let exp = (needed.log2().ceil() as i32).clamp(-MIN_SHIFT_BITS, 0);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let attempt = |exp: i32| -> Result<std::result::Result<SdpCertificate, usize>> {
        let delta = pow2(exp);
        let shifted: Vec<Rational> = y.iter().map(|v| v - &delta).collect();
        let total_y = shifted.iter().zip(&sizes).fold(Rational::zero(), |a, (v, &s)| a + v * BigInt::from(s));
        let cert = SdpCertificate {
            graph: inst.graph,
            claimed_bound: half.clone() + total_y - &mu_sum,
            psd_margin: &delta / BigInt::from(2),
            diag: reps.iter().zip(&shifted).map(|(&vertex, value)| DiagEntry::Orbit { vertex, value: value.clone() }).collect(),
            triangles: triangles.clone(),
        };
        match verify_certificate(&cert) {
            Ok(_) => Ok(Ok(cert)),
            Err(Rejection::PsdFailure { index }) => Ok(Err(index)),
            Err(other) => Err(Error::Consistency(format!("rounded certificate rejected: {other}"))),
        }
    };
    // Grow the shift from the estimate until PSD is proven.
    let mut hi = exp;
    let mut best = loop {
        match attempt(hi)? {
            Ok(cert) => break cert,
            Err(index) if hi >= 0 => {
                return Err(Error::Unrepairable(format!(
                    "no diagonal shift up to 1 restored PSD (last failure at minor {index}); solve to a tighter tolerance"
                )))
            }
            Err(_) => hi += 1,
        }
    };
    // Then bisect the exponent downward; a failed proof is treated as a lower bound.
    let floor = if safety_shrink > 0.0 { safety_shrink.log2().ceil() as i32 } else { -MIN_SHIFT_BITS };
    let mut lo = floor.max(-MIN_SHIFT_BITS) - 1;
    if exact {
        lo = lo.max(hi - 2);
    }
    // Exact checks are slow and the estimate is already tight, so they bisect
    // for at most one step.
    let mut probes = if exact { 1 } else { usize::MAX };
    while hi - lo > 1 && probes > 0 {
        probes -= 1;
        let mid = lo + (hi - lo) / 2;
        match attempt(mid)? {
            Ok(cert) => {
                best = cert;
                hi = mid;
            }
            Err(_) => lo = mid,
        }
    }
    Ok(best)
}

fn pow2(exp: i32) -> Rational {
    if exp >= 0 {
        Rational::from_integer(BigInt::one() << exp as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-exp) as usize)
    }
}

/// The explicit certificate behind the pentagon bound on `DB_distinct(5)`.
///
/// For each of the 24 cycles `v0 .. v4` three triangles with multiplier
/// `1/240` cancel the edge weights exactly: `(v0,v1,v2)` and `(v0,v3,v4)`
/// with `+++`, and `(v0,v2,v3)` with `-+-`. Then `S = 0` and the bound is
/// `1/2 - 72/240 = 1/5`.
pub fn pentagon_certificate() -> Result<SdpCertificate> {
    let spec = DeBruijnSpec::distinct(5)?;
    let cycles = crate::debruijn::five_cycle_partition(&spec)?;
    let lambda = Rational::new(BigInt::one(), BigInt::from(240));
    let plus = TrianglePattern([1, 1, 1]);
    let mid = TrianglePattern([-1, 1, -1]);
    let mut triangles = Vec::new();
    for cyc in &cycles {
        let v = cyc.vertices().map(|t| spec.index_unchecked(t));
        for (vertices, pattern) in [([v[0], v[1], v[2]], plus), ([v[0], v[2], v[3]], mid), ([v[0], v[3], v[4]], plus)] {
            triangles.push(TriangleEntry { vertices, pattern, value: lambda.clone(), orbit: false });
        }
    }
    let claimed = Rational::new(BigInt::one(), BigInt::from(2)) - lambda * BigInt::from(triangles.len());
    Ok(SdpCertificate {
        graph: SdpGraph::DeBruijn(spec),
        claimed_bound: claimed,
        psd_margin: Rational::zero(),
        diag: Vec::new(),
        triangles,
    })
}

/// `p* >= 1/5` from the verified cycle partition of `DB_distinct(5)` and its
/// exact certificate.
pub fn pentagon_bound() -> Result<BoundRecord> {
    let spec = DeBruijnSpec::distinct(5)?;
    let cycles = crate::debruijn::five_cycle_partition(&spec)?;
    crate::debruijn::verify_cycle_partition(&spec, &cycles)?;
    if cycles.len() != 24 {
        return Err(Error::Consistency(format!("expected 24 cycles, found {}", cycles.len())));
    }
    let bound = Rational::new(BigInt::from(cycles.len()), BigInt::from(spec.edge_count()));
    let verified = verify_certificate(&pentagon_certificate()?)
        .map_err(|r| Error::Consistency(format!("pentagon certificate rejected: {r}")))?;
    if verified.bound != bound {
        return Err(Error::Consistency("pentagon certificate and partition disagree".into()));
    }
    Ok(BoundRecord {
        direction: BoundKind::Lower,
        value: bound,
        n: 5,
        variant: Variant::Distinct,
        method: "pentagon".into(),
        witness_path: None,
        seed: None,
    })
}

/// Newton step budget of [`sdp_lower_bound`].
pub const SDP_MAX_ITERS: usize = 2000;

/// Build, solve, round and verify the SDP on `DB_distinct(n)`.
///
/// Only the verifier's verdict is used: the returned record carries the
/// verified bound, and a certificate that fails verification is an error.
pub fn sdp_lower_bound(n: usize, policy: super::orbit::TrianglePolicy, tol: f64) -> Result<(SdpCertificate, BoundRecord)> {
    let inst = super::sdp::build_sdp(&DeBruijnSpec::distinct(n)?, policy)?;
    let report = super::sdp::solve_primal_dual(&inst, tol, SDP_MAX_ITERS);
    let cert = round_and_extract(&inst, &report.dual, 0.0)?;
    let verified = verify_certificate(&cert).map_err(|r| Error::Consistency(format!("fresh certificate rejected: {r}")))?;
    let record = verified.record.ok_or_else(|| Error::Consistency("distinct graph certificate without a record".into()))?;
    Ok((cert, record))
}

impl SdpCertificate {
    /// Image under a graph symmetry (see [`SdpGraph::act`]).
    pub fn permuted(&self, pi: &[usize]) -> SdpCertificate {
        let g = self.graph;
        SdpCertificate {
            diag: self
                .diag
                .iter()
                .map(|d| match d {
                    DiagEntry::Vertex { vertex, value } => DiagEntry::Vertex { vertex: g.act(pi, *vertex), value: value.clone() },
                    DiagEntry::Orbit { vertex, value } => DiagEntry::Orbit { vertex: g.act(pi, *vertex), value: value.clone() },
                })
                .collect(),
            triangles: self
                .triangles
                .iter()
                .map(|t| TriangleEntry { vertices: t.vertices.map(|v| g.act(pi, v)), ..t.clone() })
                .collect(),
            ..self.clone()
        }
    }

    pub fn bound_f64(&self) -> f64 {
        ratio_to_f64(&self.claimed_bound)
    }

    /// Text form; see [`read_certificate`].
    pub fn write(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "# SDP dual certificate")?;
        match self.graph {
            SdpGraph::DeBruijn(spec) => {
                writeln!(out, "variant {}", spec.variant())?;
                writeln!(out, "n {}", spec.n())?;
            }
            SdpGraph::Cycle(n) => {
                writeln!(out, "variant cycle")?;
                writeln!(out, "n {n}")?;
            }
        }
        writeln!(out, "claimed_bound {}/{}", self.claimed_bound.numer(), self.claimed_bound.denom())?;
        writeln!(out, "psd_margin {}/{}", self.psd_margin.numer(), self.psd_margin.denom())?;
        for d in &self.diag {
            match d {
                DiagEntry::Vertex { vertex, value } => writeln!(out, "y {} {}", self.graph.label(*vertex), fmt_ratio(value))?,
                DiagEntry::Orbit { vertex, value } => writeln!(out, "y_orbit {} {}", self.graph.label(*vertex), fmt_ratio(value))?,
            }
        }
        for t in &self.triangles {
            let [u, v, w] = t.vertices.map(|x| self.graph.label(x));
            let tag = if t.orbit { "lambda_orbit" } else { "lambda" };
            writeln!(out, "{tag} {u} {v} {w} {} {}", t.pattern, fmt_ratio(&t.value))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Parse the text certificate format:
///
/// ```text
/// variant distinct        # or: normal, cycle
/// n 9
/// claimed_bound p/q
/// psd_margin p/q
/// y a,b,c v               # one vertex
/// y_orbit a,b,c v         # every vertex in the orbit of a,b,c
/// lambda u v w +-- v      # one triangle (vertices as a,b,c)
/// lambda_orbit u v w +++ v  # total mass over the triangle's orbit
/// ```
pub fn read_certificate(input: impl BufRead) -> Result<SdpCertificate> {
    let mut variant: Option<String> = None;
    let mut n: Option<usize> = None;
    let mut graph: Option<SdpGraph> = None;
    let mut claimed = None;
    let mut margin = None;
    let mut diag = Vec::new();
    let mut triangles = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let rat = |s: &str| parse_rational(s).ok_or_else(|| Error::parse(lineno, format!("bad rational {s:?}")));
        let need_graph = |g: &Option<SdpGraph>| g.ok_or_else(|| Error::parse(lineno, "entries must follow the variant and n header"));
        match (toks[0], toks.len()) {
            ("variant", 2) => variant = Some(toks[1].to_string()),
            ("n", 2) => n = Some(toks[1].parse().map_err(|_| Error::parse(lineno, "bad n"))?),
            ("claimed_bound", 2) => claimed = Some(rat(toks[1])?),
            ("psd_margin", 2) => margin = Some(rat(toks[1])?),
            ("y" | "y_orbit", 3) => {
                let g = need_graph(&graph)?;
                let vertex = g.parse_label(toks[1]).map_err(|e| Error::parse(lineno, e.to_string()))?;
                let value = rat(toks[2])?;
                diag.push(if toks[0] == "y" { DiagEntry::Vertex { vertex, value } } else { DiagEntry::Orbit { vertex, value } });
            }
            ("lambda" | "lambda_orbit", 6) => {
                let g = need_graph(&graph)?;
                let mut vs = [0usize; 3];
                for (slot, tok) in vs.iter_mut().zip(&toks[1..4]) {
                    *slot = g.parse_label(tok).map_err(|e| Error::parse(lineno, e.to_string()))?;
                }
                let pattern = TrianglePattern::parse(toks[4]).map_err(|e| Error::parse(lineno, e.to_string()))?;
                triangles.push(TriangleEntry { vertices: vs, pattern, value: rat(toks[5])?, orbit: toks[0] == "lambda_orbit" });
            }
            _ => return Err(Error::parse(lineno, format!("unrecognized line {body:?}"))),
        }
        if graph.is_none() {
            if let (Some(v), Some(n)) = (&variant, n) {
                graph = Some(match v.as_str() {
                    "cycle" => {
                        if n < 3 {
                            return Err(Error::parse(lineno, "cycle needs n >= 3"));
                        }
                        SdpGraph::Cycle(n)
                    }
                    other => {
                        let variant: Variant = other.parse().map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
                        SdpGraph::DeBruijn(DeBruijnSpec::new(variant, n).map_err(|e| Error::parse(lineno, e.to_string()))?)
                    }
                });
            }
        }
    }
    Ok(SdpCertificate {
        graph: graph.ok_or_else(|| Error::invalid("certificate lacks variant/n header"))?,
        claimed_bound: claimed.ok_or_else(|| Error::invalid("certificate lacks claimed_bound"))?,
        psd_margin: margin.ok_or_else(|| Error::invalid("certificate lacks psd_margin"))?,
        diag,
        triangles,
    })
}

/// Bound value as `f64` for reporting.
pub fn bound_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| ratio_to_f64(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::orbit::TrianglePolicy;
    use crate::certify::sdp::{build_graph_sdp, build_sdp, solve_primal_dual};
    use crate::scalar::ratio;

    #[test]
    fn pentagon_certificate_verifies() {
        let v = verify_certificate(&pentagon_certificate().unwrap()).unwrap();
        assert_eq!(v.bound, ratio(1, 5));
        assert_eq!(v.record.unwrap().value, ratio(1, 5));
        assert_eq!(pentagon_bound().unwrap().value, ratio(1, 5));
    }

    #[test]
    fn tampering_is_caught() {
        let good = pentagon_certificate().unwrap();
        let mut neg = good.clone();
        neg.triangles[7].value = -neg.triangles[7].value.clone();
        assert_eq!(verify_certificate(&neg).unwrap_err(), Rejection::NegativeMultiplier { index: 7 });
        let mut inflated = good.clone();
        inflated.claimed_bound += ratio(1, 1000);
        assert!(matches!(verify_certificate(&inflated), Err(Rejection::BoundMismatch { .. })));
        let mut dropped = good.clone();
        let removed = dropped.triangles.remove(0);
        dropped.claimed_bound += removed.value;
        assert!(matches!(verify_certificate(&dropped), Err(Rejection::PsdFailure { .. })));
    }

    #[test]
    fn text_roundtrip() {
        let good = pentagon_certificate().unwrap();
        let back = read_certificate(good.to_text().as_bytes()).unwrap();
        assert_eq!(back, good);
        assert!(matches!(read_certificate("variant distinct\nn 5\nbogus 1\n".as_bytes()), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn zero_dual_certificate() {
        let inst = build_sdp(&DeBruijnSpec::distinct(5).unwrap(), TrianglePolicy::None).unwrap();
        let r = solve_primal_dual(&inst, 1e-8, 0);
        let cert = round_and_extract(&inst, &r.dual, 0.0).unwrap();
        assert!(cert.claimed_bound <= Rational::zero());
        assert!(verify_certificate(&cert).is_ok());
    }

    #[test]
    fn cycle_certificate_matches_closed_form() {
        let inst = build_graph_sdp(SdpGraph::Cycle(5), TrianglePolicy::None).unwrap();
        let r = solve_primal_dual(&inst, 1e-10, 500);
        let cert = round_and_extract(&inst, &r.dual, 0.0).unwrap();
        let expected = (1.0 - (std::f64::consts::PI / 5.0).cos()) / 2.0;
        let got = cert.bound_f64();
        assert!(got <= expected + 1e-12 && got > expected - 1e-7, "{got} vs {expected}");
        assert_eq!(verify_certificate(&cert).unwrap().psd_method, "exact_ldl");
        assert!(verify_certificate(&cert).unwrap().record.is_none());
    }
}

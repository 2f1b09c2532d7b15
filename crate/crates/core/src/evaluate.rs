//! `p(f) = Pr[f(A,B,C) = f(B,C,D)]` for i.i.d. uniform `A, B, C, D`.
//!
//! Exact for grid, rank and threshold algorithms; Monte Carlo with a
//! Hoeffding radius for arbitrary oracles; certified brackets for
//! monotone regions.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Algorithm, Direction, GridAlgorithm, MonotoneRegionAlgorithm, OrderPattern, Oracle, RankAlgorithm, ThresholdAlgorithm};
use crate::scalar::{dyadic, Scalar};
use crate::{rng, Rational};

/// Number of monochromatic `(a,b,c,d)` tuples of a grid table, computed per
/// overlap `(b,c)` from the number of ones among heads and tails.
pub fn grid_mono_count(grid: &GridAlgorithm) -> u64 {
    let n = grid.n();
    let table = grid.table();
    let mut total = 0u64;
    for b in 0..n {
        for c in 0..n {
            let heads = (0..n).filter(|&a| table[(a * n + b) * n + c]).count() as u64;
            let base = (b * n + c) * n;
            let tails = table[base..base + n].iter().filter(|&&x| x).count() as u64;
            let n = n as u64;
            total += heads * tails + (n - heads) * (n - tails);
        }
    }
    total
}

/// Exact `p` of the lifted grid algorithm.
pub fn p_grid(grid: &GridAlgorithm) -> Rational {
    let n = BigInt::from(grid.n());
    Rational::new(BigInt::from(grid_mono_count(grid)), num_traits::pow(n, 4))
}

/// Exact `p` of a rank algorithm by enumerating the 24 orders of `(A,B,C,D)`.
pub fn p_rank(f: &RankAlgorithm) -> Rational {
    let mut equal = 0i64;
    let mut total = 0i64;
    for_each_permutation4(|v| {
        let head = f.decide(OrderPattern::of(v[0], v[1], v[2]));
        let tail = f.decide(OrderPattern::of(v[1], v[2], v[3]));
        equal += i64::from(head == tail);
        total += 1;
    });
    debug_assert_eq!(total, 24);
    Rational::from_ratio(equal, total)
}

fn for_each_permutation4(mut visit: impl FnMut([u8; 4])) {
    for a in 0..4u8 {
        for b in (0..4).filter(|&b| b != a) {
            for c in (0..4).filter(|&c| c != a && c != b) {
                visit([a, b, c, 6 - a - b - c]);
            }
        }
    }
}

/// `p` of a threshold algorithm: the sum over interval quadruples of the
/// product of their widths, restricted to quadruples whose two windows agree.
/// Exact when `T` is exact.
pub fn p_threshold<T: Scalar>(f: &ThresholdAlgorithm<T>) -> T {
    let w = f.widths();
    let k = f.intervals();
    let mut total = T::zero();
    for j in 0..k {
        for l in 0..k {
            // Mass of heads and tails with value 1 for this middle pair.
            let mut head1 = T::zero();
            let mut tail1 = T::zero();
            for i in 0..k {
                if f.cell(i, j, l) {
                    head1 = head1 + w[i].clone();
                }
                if f.cell(j, l, i) {
                    tail1 = tail1 + w[i].clone();
                }
            }
            let head0 = T::one() - head1.clone();
            let tail0 = T::one() - tail1.clone();
            let agree = head1 * tail1 + head0 * tail0;
            total = total + w[j].clone() * w[l].clone() * agree;
        }
    }
    total
}

/// Exact value for any algorithm family that admits one.
pub fn p_exact(f: &Algorithm) -> Result<Rational> {
    match f {
        Algorithm::Grid(g) => Ok(p_grid(g)),
        Algorithm::Rank(r) => Ok(p_rank(r)),
        Algorithm::Threshold(t) => Ok(p_threshold(t)),
        Algorithm::Region(_) => Err(Error::NotExact(
            "region algorithms have no exact evaluator; use a bracket or Monte Carlo".into(),
        )),
    }
}

/// Exact evaluation of a float-parameterized threshold algorithm is refused.
pub fn p_threshold_exact<T: Scalar>(f: &ThresholdAlgorithm<T>) -> Result<T> {
    if !T::EXACT {
        return Err(Error::NotExact("threshold cuts are not exact rationals".into()));
    }
    Ok(p_threshold(f))
}

/// A Monte Carlo estimate with a distribution-free confidence radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Hoeffding radius: `Pr[|mean - p| > half_width] <= 1 - confidence`.
    pub half_width: f64,
    pub confidence: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
}

impl Estimate {
    pub fn contains(&self, p: f64) -> bool {
        (self.mean - p).abs() <= self.half_width
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }
}

/// `sqrt(ln(2/δ) / (2N))` with `δ = 1 - confidence`.
pub fn hoeffding_radius(samples: u64, confidence: f64) -> f64 {
    let delta = (1.0 - confidence).max(f64::MIN_POSITIVE);
    ((2.0 / delta).ln() / (2.0 * samples as f64)).sqrt()
}

/// Tuples per random stream; chunk `k` always uses stream `(seed, k)`.
pub const MC_CHUNK: u64 = 4096;

pub fn p_monte_carlo(f: &dyn Oracle, samples: u64, seed: u64, confidence: f64) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::invalid("Monte Carlo needs at least one sample"));
    }
    if !(0.0..1.0).contains(&confidence) {
        return Err(Error::invalid("confidence must lie in [0, 1)"));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let mut hits = 0u64;
    for chunk in 0..chunks {
        let mut rng = rng::stream(seed, chunk);
        let len = MC_CHUNK.min(samples - chunk * MC_CHUNK);
        for _ in 0..len {
            let v: [f64; 4] = rng.gen();
            hits += u64::from(f.eval(v[0], v[1], v[2]) == f.eval(v[1], v[2], v[3]));
        }
    }
    Ok(Estimate {
        mean: hits as f64 / samples as f64,
        half_width: hoeffding_radius(samples, confidence),
        confidence,
        samples,
        hits,
        seed,
    })
}

/// A certified interval for `p(f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub lo: Rational,
    pub hi: Rational,
}

impl Bracket {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Consistency(format!("empty bracket [{lo}, {hi}]")));
        }
        Ok(Bracket { lo, hi })
    }

    pub fn point(v: Rational) -> Self {
        Bracket { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn intersect(&self, other: &Bracket) -> Result<Bracket> {
        Bracket::new(self.lo.clone().max(other.lo.clone()), self.hi.clone().min(other.hi.clone()))
    }

    /// Distance from `x` to the interval (zero inside).
    pub fn distance(&self, x: f64) -> f64 {
        let (lo, hi) = (crate::scalar::ratio_to_f64(&self.lo), crate::scalar::ratio_to_f64(&self.hi));
        (lo - x).max(x - hi).max(0.0)
    }
}

/// Controls for [`p_bracket_monotone_with`].
#[derive(Clone, Debug)]
pub struct BracketOptions {
    /// Each boundary cell is split into `subdivision^3` subcells to bound
    /// how much of it lies inside the region.
    pub subdivision: usize,
    /// Random comparable pairs checked against the monotonicity claim.
    pub spot_checks: usize,
    pub seed: u64,
}

impl Default for BracketOptions {
    fn default() -> Self {
        BracketOptions { subdivision: 4, spot_checks: 10_000, seed: 0x0B5E_55ED }
    }
}

/// Inner and outer grids of a monotone region, plus a per-cell occupancy
/// interval in units of `1/subdivision^3`.
#[derive(Clone, Debug)]
pub struct CellBounds {
    pub n: usize,
    pub units: u64,
    /// `(lo, hi)` occupancy per cell, in `[0, units]`.
    pub occupancy: Vec<(u32, u32)>,
}

impl CellBounds {
    pub fn inner(&self) -> GridAlgorithm {
        let units = self.units as u32;
        GridAlgorithm::new(self.n, self.occupancy.iter().map(|&(lo, _)| lo == units).collect()).expect("n^3 cells")
    }

    pub fn outer(&self) -> GridAlgorithm {
        GridAlgorithm::new(self.n, self.occupancy.iter().map(|&(_, hi)| hi > 0).collect()).expect("n^3 cells")
    }

    pub fn boundary_cells(&self) -> usize {
        let units = self.units as u32;
        self.occupancy.iter().filter(|&&(lo, hi)| !(lo == units || hi == 0)).count()
    }
}

/// Sandwich a monotone region between cell-level inner and outer grids.
pub fn cell_bounds(f: &MonotoneRegionAlgorithm, n: usize, subdivision: usize) -> Result<CellBounds> {
    if f.directions.is_none() {
        return Err(Error::invalid("bracketing needs a declared monotone direction per coordinate"));
    }
    if n == 0 || subdivision == 0 {
        return Err(Error::invalid("resolution and subdivision must be positive"));
    }
    let m = subdivision;
    let units = (m * m * m) as u64;
    let step = 1.0 / n as f64;
    let mut occupancy = Vec::with_capacity(n * n * n);
    let mut corner = vec![false; (m + 1) * (m + 1) * (m + 1)];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let lo = [a as f64 * step, b as f64 * step, c as f64 * step];
                let hi = [(a + 1) as f64 * step, (b + 1) as f64 * step, (c + 1) as f64 * step];
                let low = f.low_corner(lo, hi).expect("directions checked");
                let high = f.high_corner(lo, hi).expect("directions checked");
                if f.membership(low) {
                    occupancy.push((units as u32, units as u32));
                    continue;
                }
                if !f.membership(high) {
                    occupancy.push((0, 0));
                    continue;
                }
                if m == 1 {
                    occupancy.push((0, 1));
                    continue;
                }
                // Evaluate the (m+1)^3 lattice points of the cell once; each
                // subcell reads its low and high corner from the lattice.
                let dirs = f.directions.expect("directions checked");
                let lattice = |i: usize, j: usize, k: usize| {
                    let t = [i, j, k];
                    std::array::from_fn::<f64, 3, _>(|d| lo[d] + (hi[d] - lo[d]) * t[d] as f64 / m as f64)
                };
                for i in 0..=m {
                    for j in 0..=m {
                        for k in 0..=m {
                            corner[(i * (m + 1) + j) * (m + 1) + k] = f.membership(lattice(i, j, k));
                        }
                    }
                }
                let at = |p: [usize; 3]| corner[(p[0] * (m + 1) + p[1]) * (m + 1) + p[2]];
                let (mut inside, mut touching) = (0u32, 0u32);
                for i in 0..m {
                    for j in 0..m {
                        for k in 0..m {
                            let base = [i, j, k];
                            let low_idx: [usize; 3] = std::array::from_fn(|d| match dirs[d] {
                                crate::model::Direction::Increasing => base[d],
                                crate::model::Direction::Decreasing => base[d] + 1,
                            });
                            let high_idx: [usize; 3] = std::array::from_fn(|d| 2 * base[d] + 1 - low_idx[d]);
                            if at(low_idx) {
                                inside += 1;
                            }
                            if at(high_idx) {
                                touching += 1;
                            }
                        }
                    }
                }
                occupancy.push((inside, touching));
            }
        }
    }
    Ok(CellBounds { n, units, occupancy })
}

/// Check `membership(x) => membership(y)` on random pairs `x <= y` in the
/// declared order.
pub fn spot_check_monotone(f: &MonotoneRegionAlgorithm, checks: usize, seed: u64) -> Result<()> {
    let Some(dirs) = f.directions else {
        return Err(Error::invalid("no monotone directions declared"));
    };
    let mut rng = rng::stream(seed, 0x4D4F_4E4F);
    for _ in 0..checks {
        let x: [f64; 3] = rng.gen();
        let y: [f64; 3] = rng.gen();
        // Order the pair coordinatewise in the declared directions.
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for j in 0..3 {
            let (small, large) = if x[j] <= y[j] { (x[j], y[j]) } else { (y[j], x[j]) };
            match dirs[j] {
                crate::model::Direction::Increasing => (lo[j], hi[j]) = (small, large),
                crate::model::Direction::Decreasing => (lo[j], hi[j]) = (large, small),
            }
        }
        if f.membership(lo) && !f.membership(hi) {
            return Err(Error::NotMonotone { lo, hi });
        }
    }
    Ok(())
}

/// Certified bracket for `p(f)` using the default options.
pub fn p_bracket_monotone(f: &MonotoneRegionAlgorithm, n: usize) -> Result<Bracket> {
    p_bracket_monotone_with(f, n, &BracketOptions::default())
}

/// Certified bracket for `p(f)` at grid resolution `n`.
///
/// Two sound intervals are intersected:
///
/// * the grid interval `p(G) ± 2Δ`, where `Δ` is the measure of cells on
///   which the inner and outer grids disagree; replacing `f` by a grid that
///   differs on measure at most `Δ` moves each of the two windows' outputs,
///   hence `p`, by at most `2Δ`;
/// * a per-quadruple interval: for cells `X = (a,b,c)` and `Y = (b,c,d)`
///   with occupancies `p` and `q`, the probability that both windows agree
///   lies in `[|p + q - 1|, 1 - |p - q|]` whatever the coupling; computed
///   only for `n <= QUADRUPLE_MAX_N`, since it costs `n^4`;
///
/// and then intersected with [`section_bracket`] at `n · subdivision`.
pub fn p_bracket_monotone_with(f: &MonotoneRegionAlgorithm, n: usize, opts: &BracketOptions) -> Result<Bracket> {
    spot_check_monotone(f, opts.spot_checks, opts.seed)?;
    let bounds = cell_bounds(f, n, opts.subdivision)?;
    let mut bracket = grid_bracket(&bounds);
    if n <= QUADRUPLE_MAX_N {
        bracket = bracket.intersect(&quadruple_bracket(&bounds))?;
    }
    bracket.intersect(&section_bracket(f, n * opts.subdivision)?)
}

/// Largest resolution at which [`quadruple_bracket`] is computed.
pub const QUADRUPLE_MAX_N: usize = 64;

/// `[max(0, p(G) - 2Δ), min(1, p(G) + 2Δ)]`, with `G` the narrower of the
/// inner and outer grid.
pub fn grid_bracket(bounds: &CellBounds) -> Bracket {
    let n = bounds.n;
    let inner = bounds.inner();
    let outer = bounds.outer();
    let delta = Rational::new(
        BigInt::from(outer.ones() - inner.ones()),
        num_traits::pow(BigInt::from(n), 3),
    );
    let slack = delta * BigInt::from(2);
    let candidates = [p_grid(&inner), p_grid(&outer)];
    let bracket = |p: &Rational| {
        let lo = (p - &slack).max(Rational::zero());
        let hi = (p + &slack).min(Rational::one());
        Bracket { lo, hi }
    };
    let a = bracket(&candidates[0]);
    let b = bracket(&candidates[1]);
    if b.width() < a.width() {
        b
    } else {
        a
    }
}

/// Sum of per-quadruple agreement bounds, exact in units of `1/(n^4 m^3)`.
pub fn quadruple_bracket(bounds: &CellBounds) -> Bracket {
    let n = bounds.n;
    let m = bounds.units as i64;
    let occ = &bounds.occupancy;
    let (mut lo_total, mut hi_total) = (0u128, 0u128);
    let mut heads = Vec::with_capacity(n);
    let mut tails = Vec::with_capacity(n);
    for b in 0..n {
        for c in 0..n {
            heads.clear();
            tails.clear();
            heads.extend((0..n).map(|a| occ[(a * n + b) * n + c]));
            tails.extend((0..n).map(|d| occ[(b * n + c) * n + d]));
            let full = |&(lo, _): &(u32, u32)| lo as i64 == m;
            let empty = |&(_, hi): &(u32, u32)| hi == 0;
            let (hf, he) = (heads.iter().filter(|x| full(x)).count() as u128, heads.iter().filter(|x| empty(x)).count() as u128);
            let (tf, te) = (tails.iter().filter(|x| full(x)).count() as u128, tails.iter().filter(|x| empty(x)).count() as u128);
            // Determined pairs agree exactly when both are full or both empty.
            let det = (hf * tf + he * te) * m as u128;
            lo_total += det;
            hi_total += det;
            let is_det = |x: &(u32, u32)| full(x) || empty(x);
            for h in heads.iter() {
                for t in tails.iter() {
                    if is_det(h) && is_det(t) {
                        continue;
                    }
                    let (l, u) = agreement_bounds(*h, *t, m);
                    lo_total += l as u128;
                    hi_total += u as u128;
                }
            }
        }
    }
    let den = BigInt::from(n).pow(4) * BigInt::from(m);
    Bracket {
        lo: Rational::new(BigInt::from(lo_total), den.clone()),
        hi: Rational::new(BigInt::from(hi_total), den),
    }
}

/// Bisection steps locating the switch point of `f` along one axis.
const SECTION_BITS: u32 = 40;

/// Bounds on the length of `{t : f(x with x[axis] = t) = 1}` for `t ∈ [0, 1]`.
/// Monotonicity along `axis` makes that set an interval ending at 0 or 1.
fn section_mass(f: &MonotoneRegionAlgorithm, axis: usize, mut x: [f64; 3], dir: Direction) -> (f64, f64) {
    let mut at = |t: f64| {
        x[axis] = t;
        f.membership(x)
    };
    // `inside` is the end of [0, 1] where the set lies.
    let (inside, outside) = match dir {
        Direction::Increasing => (1.0, 0.0),
        Direction::Decreasing => (0.0, 1.0),
    };
    if at(outside) {
        return (1.0, 1.0);
    }
    if !at(inside) {
        return (0.0, 0.0);
    }
    let (mut yes, mut no) = (inside, outside);
    for _ in 0..SECTION_BITS {
        let mid = 0.5 * (yes + no);
        if at(mid) {
            yes = mid;
        } else {
            no = mid;
        }
    }
    let (near, far) = ((inside - yes).abs(), (inside - no).abs());
    (near, far)
}

/// Bracket from sections through the shared pair `(b, c)`, on an
/// `resolution × resolution` grid over `(b, c)`.
///
/// Given `(B, C) = (b, c)` the windows `(A, b, c)` and `(b, c, D)` are
/// independent, so `p = ∫∫ u v + (1 - u)(1 - v) db dc` with `u(b, c)` the
/// measure of `a` where `f(a, b, c) = 1` and `v(b, c)` that of `d` where
/// `f(b, c, d) = 1`. Both are monotone in `(b, c)`, so on a grid cell they lie
/// between their values at two opposite corners, and the bilinear integrand
/// is extremal at a corner of that box. Sums run in `f64` and are widened by
/// a bound on their rounding error before conversion to rationals.
pub fn section_bracket(f: &MonotoneRegionAlgorithm, resolution: usize) -> Result<Bracket> {
    let Some(dirs) = f.directions else {
        return Err(Error::invalid("bracketing needs a declared monotone direction per coordinate"));
    };
    if resolution == 0 {
        return Err(Error::invalid("resolution must be positive"));
    }
    let r = resolution;
    let coord = |i: usize| i as f64 / r as f64;
    // (u_lo, u_hi, v_lo, v_hi) at every lattice point, row-major in b.
    let lattice: Vec<(f64, f64, f64, f64)> = (0..=r)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..=r).map(move |j| {
                let (b, c) = (coord(i), coord(j));
                let u = section_mass(f, 0, [0.0, b, c], dirs[0]);
                let v = section_mass(f, 2, [b, c, 0.0], dirs[2]);
                (u.0, u.1, v.0, v.1)
            })
        })
        .collect();
    let at = |i: usize, j: usize| lattice[i * (r + 1) + j];
    // Low and high lattice index of a cell along an axis with direction `d`.
    let ends = |base: usize, d: Direction| match d {
        Direction::Increasing => (base, base + 1),
        Direction::Decreasing => (base + 1, base),
    };
    let (lo_sum, hi_sum) = (0..r)
        .into_par_iter()
        .map(|i| {
            let (mut lo, mut hi) = (0.0f64, 0.0f64);
            for j in 0..r {
                // u follows the directions of the window's 2nd and 3rd
                // coordinates, v those of its 1st and 2nd.
                let (ub0, ub1) = ends(i, dirs[1]);
                let (uc0, uc1) = ends(j, dirs[2]);
                let (vb0, vb1) = ends(i, dirs[0]);
                let (vc0, vc1) = ends(j, dirs[1]);
                let (u_lo, u_hi) = (at(ub0, uc0).0, at(ub1, uc1).1);
                let (v_lo, v_hi) = (at(vb0, vc0).2, at(vb1, vc1).3);
                let g = |u: f64, v: f64| u * v + (1.0 - u) * (1.0 - v);
                let corners = [g(u_lo, v_lo), g(u_lo, v_hi), g(u_hi, v_lo), g(u_hi, v_hi)];
                lo += corners.iter().copied().fold(f64::INFINITY, f64::min);
                hi += corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            }
            (lo, hi)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let cells = (r * r) as f64;
    // Each corner value is off by a few ulps and each of the r^2 additions
    // of a value at most r^2 loses at most one ulp of the running total.
    let slack = (cells + 16.0) * f64::EPSILON * 4.0;
    let lo = (lo_sum / cells - slack).max(0.0);
    let hi = (hi_sum / cells + slack).min(1.0);
    let unit = Rational::new(BigInt::one(), BigInt::one() << 52usize);
    let lo = (dyadic(lo, 52) - &unit).max(Rational::zero());
    let hi = (dyadic(hi, 52) + &unit).min(Rational::one());
    Bracket::new(lo, hi)
}

/// Bounds, in units of `1/m`, on `Pr[X = Y]` for Bernoulli `X, Y` with
/// `Pr[X=1] ∈ [p.0, p.1]/m` and `Pr[Y=1] ∈ [q.0, q.1]/m`.
fn agreement_bounds(p: (u32, u32), q: (u32, u32), m: i64) -> (i64, i64) {
    let (pl, ph, ql, qh) = (p.0 as i64, p.1 as i64, q.0 as i64, q.1 as i64);
    let dist = |lo: i64, hi: i64, target: i64| (lo - target).max(target - hi).max(0);
    // min |p + q - 1| and max (1 - |p - q|) over the box.
    let lo = dist(pl + ql, ph + qh, m);
    let hi = m - dist(pl - qh, ph - ql, 0);
    (lo, hi)
}

/// Round a float parameter to a dyadic rational for reporting.
pub fn param_rational(x: f64) -> Rational {
    dyadic(x, 32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::debruijn::{normal2_optimal_coloring, mono_fraction};
    use crate::model::{builtin, f1_threshold, Builtin, ConeRegion, RegionShape, MINUS_PLUS_MINUS, PLUS_PLUS_PLUS};
    use crate::scalar::ratio;

    /// Brute force over all n^4 tuples, written independently of
    /// `grid_mono_count`.
    fn grid_oracle(g: &GridAlgorithm) -> Rational {
        let n = g.n();
        let mut hits = 0i64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        hits += i64::from(g.get(a, b, c) == g.get(b, c, d));
                    }
                }
            }
        }
        Rational::from_ratio(hits, (n * n * n * n) as i64)
    }

    #[test]
    fn p_grid_examples() {
        let best2 = GridAlgorithm::from_coloring(&normal2_optimal_coloring()).unwrap();
        assert_eq!(p_grid(&best2), ratio(1, 4));
        assert_eq!(p_grid(&GridAlgorithm::constant(3, true)), ratio(1, 1));
        let own = GridAlgorithm::from_fn(2, |_, j, _| j == 1);
        assert_eq!(grid_oracle(&own), ratio(1, 2));
        assert_eq!(p_grid(&own), ratio(1, 2));
    }

    #[test]
    fn p_grid_matches_brute_force() {
        for n in 2..=5 {
            let g = GridAlgorithm::from_fn(n, |a, b, c| (a * 7 + b * 3 + c * c + a * b) % 3 == 1);
            assert_eq!(p_grid(&g), grid_oracle(&g));
            assert_eq!(p_grid(&g), mono_fraction(&g.to_coloring().unwrap()).fraction);
        }
    }

    #[test]
    fn classics_are_exact() {
        for (f, want) in [(Builtin::F1, ratio(1, 2)), (Builtin::F2, ratio(1, 3)), (Builtin::F3, ratio(1, 4))] {
            assert_eq!(p_exact(&builtin(f)).unwrap(), want, "{f:?}");
        }
    }

    #[test]
    fn rank_oracle_values() {
        // Enumerated by hand-rolled permutation loop above: min/max symmetry.
        assert_eq!(p_rank(&RankAlgorithm::local_min()), ratio(1, 3));
        assert_eq!(p_rank(&RankAlgorithm { decision: [true; 6] }), ratio(1, 1));
    }

    #[test]
    fn threshold_brute_force_oracle() {
        // Sign patterns of (A,B,C,D) w.r.t. cut 1/3 with widths 1/3 and 2/3;
        // f1 depends only on the middle value, so agreement = [B, C same side].
        let w = [ratio(1, 3), ratio(2, 3)];
        let mut want = Rational::zero();
        for mask in 0..16u32 {
            let side = |i: usize| ((mask >> i) & 1) as usize;
            let weight: Rational = (0..4).map(|i| w[side(i)].clone()).product();
            if side(1) == side(2) {
                want += weight;
            }
        }
        assert_eq!(want, ratio(5, 9));
        assert_eq!(p_threshold(&f1_threshold(vec![ratio(1, 3)])), want);
        let approx = p_threshold(&f1_threshold(vec![1.0f64 / 3.0]));
        assert!((approx - 5.0 / 9.0).abs() < 1e-12);
        assert!(p_threshold_exact(&f1_threshold(vec![0.5f64])).is_err());
    }

    #[test]
    fn monte_carlo_brackets_classics() {
        for (f, p) in [(Builtin::F2, 1.0 / 3.0), (Builtin::F3, 0.25)] {
            let est = p_monte_carlo(&builtin(f), 200_000, 11, 0.9999).unwrap();
            assert!(est.contains(p), "{f:?}: {est:?}");
            assert!(est.lower() >= 0.2 - 1e-12 || est.upper() >= 0.2);
        }
        let constant = |_: f64, _: f64, _: f64| true;
        let est = p_monte_carlo(&constant, 10, 1, 0.99).unwrap();
        assert_eq!(est.mean, 1.0);
        assert!(est.half_width > 0.0);
        assert!(p_monte_carlo(&constant, 0, 1, 0.99).is_err());
    }

    #[test]
    fn monte_carlo_reproducible() {
        let f = builtin(Builtin::F2);
        let a = p_monte_carlo(&f, 10_000, 5, 0.99).unwrap();
        let b = p_monte_carlo(&f, 10_000, 5, 0.99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bracket_axis_aligned_halfspace() {
        let f = MonotoneRegionAlgorithm::new(
            RegionShape::HalfSpace { weights: [1.0, 0.0, 0.0], offset: 0.5 },
            Some(PLUS_PLUS_PLUS),
        );
        let br = p_bracket_monotone(&f, 64).unwrap();
        assert!(br.contains(&ratio(1, 2)));
        assert!(br.width() <= ratio(4, 64));
        // Off-grid cut still brackets 1/2.
        let g = MonotoneRegionAlgorithm::new(
            RegionShape::HalfSpace { weights: [1.0, 0.0, 0.0], offset: 0.5 + 1e-3 },
            Some(PLUS_PLUS_PLUS),
        );
        let bounds = cell_bounds(&g, 63, 4).unwrap();
        assert!(grid_bracket(&bounds).width() <= ratio(4, 63));
    }

    #[test]
    fn bracket_full_cube() {
        let f = MonotoneRegionAlgorithm::new(RegionShape::Full, Some(PLUS_PLUS_PLUS));
        assert_eq!(p_bracket_monotone(&f, 8).unwrap(), Bracket::point(ratio(1, 1)));
    }

    #[test]
    fn bracket_contains_f3() {
        let f = MonotoneRegionAlgorithm::new(RegionShape::Cone(ConeRegion::majority(0.5)), Some(MINUS_PLUS_MINUS));
        for n in [3, 5, 8] {
            let br = p_bracket_monotone(&f, n).unwrap();
            assert!(br.contains(&ratio(1, 4)), "n = {n}: {br:?}");
        }
        let aligned = p_bracket_monotone(&f, 4).unwrap();
        assert!(aligned.width() <= ratio(1, 4), "{aligned:?}");
    }

    #[test]
    fn section_bracket_narrows_linearly() {
        let f = MonotoneRegionAlgorithm::new(RegionShape::Cone(ConeRegion::majority(0.5)), Some(MINUS_PLUS_MINUS));
        let coarse = section_bracket(&f, 64).unwrap();
        let fine = section_bracket(&f, 256).unwrap();
        assert!(coarse.contains(&ratio(1, 4)) && fine.contains(&ratio(1, 4)));
        assert!(fine.width() < coarse.width() && fine.width() < ratio(1, 100), "{fine:?}");
        // Sections of a half-space in the first coordinate have constant measure.
        let h = MonotoneRegionAlgorithm::new(
            RegionShape::HalfSpace { weights: [1.0, 0.0, 0.0], offset: 0.5 },
            Some(PLUS_PLUS_PLUS),
        );
        let half = section_bracket(&h, 8).unwrap();
        assert!(half.contains(&ratio(1, 2)) && half.width() < ratio(1, 1 << 30));
    }

    #[test]
    fn bracket_rejects_non_monotone() {
        let f = MonotoneRegionAlgorithm::new(RegionShape::Cone(ConeRegion::majority(0.5)), Some(PLUS_PLUS_PLUS));
        assert!(matches!(p_bracket_monotone(&f, 8), Err(Error::NotMonotone { .. })));
        let g = MonotoneRegionAlgorithm::new(RegionShape::Full, None);
        assert!(p_bracket_monotone(&g, 8).is_err());
    }

    #[test]
    fn bracket_sound_for_grid_regions() {
        // A monotone table at resolution 6, bracketed at resolutions that do
        // and do not align with its cells.
        let table = GridAlgorithm::from_fn(6, |a, b, c| b + 6 >= a + c + 3);
        assert!(table.is_monotone(MINUS_PLUS_MINUS));
        let exact = p_grid(&table);
        let f = MonotoneRegionAlgorithm::new(RegionShape::Grid(table), Some(MINUS_PLUS_MINUS));
        for n in [2, 3, 4, 5, 6, 7, 12] {
            let br = p_bracket_monotone(&f, n).unwrap();
            assert!(br.contains(&exact), "n = {n}: {exact} not in {br:?}");
        }
        // Closed corner tests on a grid-aligned table still narrow with resolution.
        let w12 = p_bracket_monotone(&f, 12).unwrap().width();
        let w3 = p_bracket_monotone(&f, 3).unwrap().width();
        assert!(w12 < w3);
    }

    #[test]
    fn agreement_bounds_are_frechet() {
        // determined head forces the tail's value
        assert_eq!(agreement_bounds((8, 8), (3, 5), 8), (3, 5));
        assert_eq!(agreement_bounds((0, 0), (3, 5), 8), (3, 5));
        assert_eq!(agreement_bounds((0, 8), (0, 8), 8), (0, 8));
        assert_eq!(agreement_bounds((2, 2), (2, 2), 8), (4, 8));
    }
}

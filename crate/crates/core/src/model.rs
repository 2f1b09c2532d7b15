//! One-round algorithms `f: [0,1]^3 -> {0,1}`.
//!
//! `f(a, b, c)` is the color chosen by a node whose predecessor drew `a`,
//! which itself drew `b`, and whose successor drew `c`.

use std::fmt;

use crate::debruijn::{Coloring, DeBruijnSpec, Triple};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Rational;

/// Default cap on grid resolution (`n^3` cells, `n^4` edges).
pub const DEFAULT_MAX_RESOLUTION: usize = 256;

/// Anything that can be evaluated pointwise on the unit cube.
pub trait Oracle: Sync {
    fn eval(&self, a: f64, b: f64, c: f64) -> bool;

    fn eval_point(&self, x: [f64; 3]) -> bool {
        self.eval(x[0], x[1], x[2])
    }
}

impl<F: Fn(f64, f64, f64) -> bool + Sync> Oracle for F {
    fn eval(&self, a: f64, b: f64, c: f64) -> bool {
        self(a, b, c)
    }
}

/// Cell index of `x` at resolution `n`: `floor(x n)`, with `1` mapped to `n - 1`.
pub fn discretize(x: f64, n: usize) -> usize {
    let cell = (x * n as f64).floor();
    if cell <= 0.0 {
        0
    } else {
        (cell as usize).min(n - 1)
    }
}

/// An algorithm that is constant on the cells of an `n × n × n` grid.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GridAlgorithm {
    n: usize,
    table: Vec<bool>,
}

impl fmt::Debug for GridAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridAlgorithm")
            .field("n", &self.n)
            .field("ones", &self.table.iter().filter(|&&b| b).count())
            .finish()
    }
}

impl GridAlgorithm {
    /// `table` is row-major over `(a, b, c)` with `c` fastest.
    pub fn new(n: usize, table: Vec<bool>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("grid resolution must be positive"));
        }
        if table.len() != n * n * n {
            return Err(Error::invalid(format!("grid of resolution {n} needs {} cells, got {}", n * n * n, table.len())));
        }
        Ok(GridAlgorithm { n, table })
    }

    pub fn constant(n: usize, bit: bool) -> Self {
        GridAlgorithm { n, table: vec![bit; n * n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> bool) -> Self {
        let mut table = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    table.push(f(a, b, c));
                }
            }
        }
        GridAlgorithm { n, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> bool {
        self.table[(a * self.n + b) * self.n + c]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, bit: bool) {
        let n = self.n;
        self.table[(a * n + b) * n + c] = bit;
    }

    pub fn ones(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    /// The induced coloring of `DB_normal(n)`; needs `n >= 2`.
    pub fn to_coloring(&self) -> Result<Coloring> {
        Coloring::new(DeBruijnSpec::normal(self.n)?, self.table.clone())
    }

    pub fn from_coloring(coloring: &Coloring) -> Result<Self> {
        let spec = coloring.spec();
        if spec.variant() != crate::debruijn::Variant::Normal {
            return Err(Error::invalid("only normal-graph colorings correspond to grid algorithms"));
        }
        GridAlgorithm::new(spec.n(), coloring.bits().to_vec())
    }

    /// Discretize an arbitrary oracle by sampling each cell at `corner`
    /// (`0.0` = lower corner, `0.5` = center, `1.0` = upper corner).
    pub fn sample(oracle: &dyn Oracle, n: usize, corner: [f64; 3]) -> Self {
        let coord = |i: usize, t: f64| ((i as f64 + t) / n as f64).min(1.0);
        GridAlgorithm::from_fn(n, |a, b, c| oracle.eval(coord(a, corner[0]), coord(b, corner[1]), coord(c, corner[2])))
    }

    /// True if the table is nondecreasing (in the given directions) along every axis.
    pub fn is_monotone(&self, dirs: [Direction; 3]) -> bool {
        let n = self.n;
        let step = [n * n, n, 1];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let idx = (a * n + b) * n + c;
                    let pos = [a, b, c];
                    for axis in 0..3 {
                        if pos[axis] + 1 < n {
                            let (lo, hi) = (self.table[idx], self.table[idx + step[axis]]);
                            let ok = match dirs[axis] {
                                Direction::Increasing => !lo || hi,
                                Direction::Decreasing => lo || !hi,
                            };
                            if !ok {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

/// Continuous algorithm `f(a,b,c) = table(g(a), g(b), g(c))`.
#[derive(Clone, Copy, Debug)]
pub struct Lifted<'a> {
    grid: &'a GridAlgorithm,
}

impl Oracle for Lifted<'_> {
    fn eval(&self, a: f64, b: f64, c: f64) -> bool {
        let n = self.grid.n;
        self.grid.get(discretize(a, n), discretize(b, n), discretize(c, n))
    }
}

pub fn lift(grid: &GridAlgorithm) -> Lifted<'_> {
    Lifted { grid }
}

impl Oracle for GridAlgorithm {
    fn eval(&self, a: f64, b: f64, c: f64) -> bool {
        lift(self).eval(a, b, c)
    }
}

/// Replicate each cell across `factor^3` subcells.
pub fn refine(grid: &GridAlgorithm, factor: usize, max_resolution: usize) -> Result<GridAlgorithm> {
    if factor == 0 {
        return Err(Error::invalid("refinement factor must be at least 1"));
    }
    let n = grid.n.checked_mul(factor).unwrap_or(usize::MAX);
    if n > max_resolution {
        return Err(Error::ResolutionLimit { requested: n, limit: max_resolution });
    }
    Ok(GridAlgorithm::from_fn(n, |a, b, c| grid.get(a / factor, b / factor, c / factor)))
}

/// The relative order of three values, as the rank of `(a, b, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrderPattern(pub [u8; 3]);

impl OrderPattern {
    /// All six patterns in lexicographic order of their rank tuples.
    pub const ALL: [OrderPattern; 6] = [
        OrderPattern([0, 1, 2]),
        OrderPattern([0, 2, 1]),
        OrderPattern([1, 0, 2]),
        OrderPattern([1, 2, 0]),
        OrderPattern([2, 0, 1]),
        OrderPattern([2, 1, 0]),
    ];

    /// Pattern of `(a, b, c)`; equal values are ordered by position, so the
    /// predecessor ranks below the node, which ranks below the successor.
    pub fn of<T: PartialOrd>(a: T, b: T, c: T) -> Self {
        let lt = |x: &T, i: usize, y: &T, j: usize| x < y || (x == y && i < j);
        let vals = [(a, 0usize), (b, 1), (c, 2)];
        let mut ranks = [0u8; 3];
        for (i, (x, xi)) in vals.iter().enumerate() {
            ranks[i] = vals.iter().filter(|(y, yi)| lt(y, *yi, x, *xi)).count() as u8;
        }
        OrderPattern(ranks)
    }

    pub fn index(self) -> usize {
        OrderPattern::ALL.iter().position(|&p| p == self).expect("ranks form a permutation")
    }

    pub fn parse(s: &str) -> Option<Self> {
        let digits: Vec<u8> = s.bytes().map(|b| b.wrapping_sub(b'0')).collect();
        let pat = OrderPattern(digits.try_into().ok()?);
        OrderPattern::ALL.contains(&pat).then_some(pat)
    }
}

impl fmt::Display for OrderPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

/// An algorithm that only looks at the relative order of its three inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RankAlgorithm {
    /// Output per pattern, indexed like [`OrderPattern::ALL`].
    pub decision: [bool; 6],
}

impl RankAlgorithm {
    pub fn from_fn(f: impl Fn(OrderPattern) -> bool) -> Self {
        RankAlgorithm { decision: OrderPattern::ALL.map(f) }
    }

    pub fn decide(&self, p: OrderPattern) -> bool {
        self.decision[p.index()]
    }

    /// Local maxima join: output 1 iff the middle value is the strict maximum.
    pub fn local_max() -> Self {
        Self::from_fn(|p| p.0[1] == 2)
    }

    pub fn local_min() -> Self {
        Self::from_fn(|p| p.0[1] == 0)
    }
}

impl Oracle for RankAlgorithm {
    fn eval(&self, a: f64, b: f64, c: f64) -> bool {
        self.decide(OrderPattern::of(a, b, c))
    }
}

/// An algorithm constant on the boxes cut out by a shared list of thresholds.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdAlgorithm<T = Rational> {
    cuts: Vec<T>,
    decision: Vec<bool>,
}

impl<T: Scalar> ThresholdAlgorithm<T> {
    /// `cuts` strictly increasing inside `(0, 1)`; `decision` row-major over
    /// interval indices with the last coordinate fastest.
    pub fn new(cuts: Vec<T>, decision: Vec<bool>) -> Result<Self> {
        let (zero, one) = (T::zero(), T::one());
        if cuts.iter().any(|c| *c <= zero || *c >= one) {
            return Err(Error::invalid("threshold cuts must lie strictly inside (0, 1)"));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("threshold cuts must be strictly increasing"));
        }
        let k = cuts.len() + 1;
        if decision.len() != k * k * k {
            return Err(Error::invalid(format!("{} cuts need {} decision cells, got {}", cuts.len(), k * k * k, decision.len())));
        }
        Ok(ThresholdAlgorithm { cuts, decision })
    }

    pub fn cuts(&self) -> &[T] {
        &self.cuts
    }

    pub fn decision(&self) -> &[bool] {
        &self.decision
    }

    pub fn intervals(&self) -> usize {
        self.cuts.len() + 1
    }

    pub fn cell(&self, i: usize, j: usize, l: usize) -> bool {
        let k = self.intervals();
        self.decision[(i * k + j) * k + l]
    }

    /// Interval index of `x`: the number of cuts at or below it.
    pub fn interval_of(&self, x: &T) -> usize {
        self.cuts.iter().take_while(|c| *c <= x).count()
    }

    /// Interval widths, summing to one.
    pub fn widths(&self) -> Vec<T> {
        let mut prev = T::zero();
        let mut out = Vec::with_capacity(self.intervals());
        for c in &self.cuts {
            out.push(c.clone() - prev);
            prev = c.clone();
        }
        out.push(T::one() - prev);
        out
    }

    pub fn map_cuts<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Result<ThresholdAlgorithm<U>> {
        ThresholdAlgorithm::new(self.cuts.iter().map(f).collect(), self.decision.clone())
    }
}

impl<T: Scalar + Sync> Oracle for ThresholdAlgorithm<T> {
    fn eval(&self, a: f64, b: f64, c: f64) -> bool {
        let idx = |x: f64| self.cuts.iter().take_while(|cut| cut.to_f64() <= x).count();
        self.cell(idx(a), idx(b), idx(c))
    }
}

/// Monotonicity direction of one coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Increasing => 1.0,
            Direction::Decreasing => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Direction::Increasing => '+',
            Direction::Decreasing => '-',
        }
    }

    pub fn parse_all(s: &str) -> Option<[Direction; 3]> {
        let dirs: Vec<Direction> = s
            .chars()
            .map(|c| match c {
                '+' => Some(Direction::Increasing),
                '-' => Some(Direction::Decreasing),
                _ => None,
            })
            .collect::<Option<_>>()?;
        dirs.try_into().ok()
    }

    pub fn format_all(dirs: [Direction; 3]) -> String {
        dirs.iter().map(|d| d.symbol()).collect()
    }
}

/// Up (`+`) in the predecessor's value, the node's own and the successor's.
pub const PLUS_PLUS_PLUS: [Direction; 3] = [Direction::Increasing; 3];
/// The direction pattern of local-maximum style rules: down, up, down.
pub const MINUS_PLUS_MINUS: [Direction; 3] = [Direction::Decreasing, Direction::Increasing, Direction::Decreasing];

/// A closed half-space `w · (x - apex) >= 0` through the apex `(τ, τ, τ)`.
pub type Normal = [f64; 3];

/// A region given by a disjunction of conjunctions of half-spaces, all
/// bounded by planes through the common apex `(τ, τ, τ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeRegion {
    pub apex: f64,
    pub normals: Vec<Normal>,
    /// OR over clauses, each an AND of indices into `normals`.
    pub clauses: Vec<Vec<usize>>,
}

impl ConeRegion {
    pub fn contains(&self, x: [f64; 3]) -> bool {
        let t = self.apex;
        let side = |w: &Normal| w[0] * (x[0] - t) + w[1] * (x[1] - t) + w[2] * (x[2] - t) >= 0.0;
        self.clauses.iter().any(|clause| clause.iter().all(|&i| side(&self.normals[i])))
    }

    /// Every normal has the signs of `dirs` (zero allowed), which makes the
    /// region an up-set in that order.
    pub fn respects(&self, dirs: [Direction; 3]) -> bool {
        self.normals.iter().all(|w| (0..3).all(|j| w[j] * dirs[j].sign() >= 0.0))
    }

    /// `≥ 2 of {a <= τ, b >= τ, c <= τ}`: the majority form of the
    /// "change sides if both neighbours agree with me" rule at threshold `τ`.
    pub fn majority(apex: f64) -> Self {
        ConeRegion {
            apex,
            normals: vec![[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]],
            clauses: vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        }
    }
}

/// The set `{f = 1}` of a region algorithm.
#[derive(Clone, Debug, PartialEq)]
pub enum RegionShape {
    Full,
    Empty,
    /// `w · x >= offset`.
    HalfSpace { weights: [f64; 3], offset: f64 },
    Cone(ConeRegion),
    /// Cells of a threshold algorithm.
    Threshold(ThresholdAlgorithm<f64>),
    /// Cells of a grid algorithm.
    Grid(GridAlgorithm),
}

impl RegionShape {
    pub fn contains(&self, x: [f64; 3]) -> bool {
        match self {
            RegionShape::Full => true,
            RegionShape::Empty => false,
            RegionShape::HalfSpace { weights, offset } => {
                weights[0] * x[0] + weights[1] * x[1] + weights[2] * x[2] >= *offset
            }
            RegionShape::Cone(cone) => cone.contains(x),
            RegionShape::Threshold(t) => t.eval_point(x),
            RegionShape::Grid(g) => g.eval_point(x),
        }
    }
}

/// An algorithm given by its region `{f = 1}`, optionally declared monotone.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneRegionAlgorithm {
    pub shape: RegionShape,
    /// Declared direction per coordinate; `None` means no monotonicity claim.
    pub directions: Option<[Direction; 3]>,
    /// Free parameters this instance was built from (for reporting).
    pub params: Vec<f64>,
}

impl MonotoneRegionAlgorithm {
    pub fn new(shape: RegionShape, directions: Option<[Direction; 3]>) -> Self {
        MonotoneRegionAlgorithm { shape, directions, params: Vec::new() }
    }

    pub fn with_params(mut self, params: Vec<f64>) -> Self {
        self.params = params;
        self
    }

    pub fn membership(&self, x: [f64; 3]) -> bool {
        self.shape.contains(x)
    }

    /// The corner of the box `[lo, hi]` that is smallest in the declared order.
    pub fn low_corner(&self, lo: [f64; 3], hi: [f64; 3]) -> Option<[f64; 3]> {
        let dirs = self.directions?;
        Some(std::array::from_fn(|j| match dirs[j] {
            Direction::Increasing => lo[j],
            Direction::Decreasing => hi[j],
        }))
    }

    pub fn high_corner(&self, lo: [f64; 3], hi: [f64; 3]) -> Option<[f64; 3]> {
        self.low_corner(hi, lo)
    }
}

impl Oracle for MonotoneRegionAlgorithm {
    fn eval(&self, a: f64, b: f64, c: f64) -> bool {
        self.membership([a, b, c])
    }
}

/// Any algorithm from the supported families.
#[derive(Clone, Debug)]
pub enum Algorithm {
    Grid(GridAlgorithm),
    Rank(RankAlgorithm),
    Threshold(ThresholdAlgorithm<Rational>),
    Region(MonotoneRegionAlgorithm),
}

impl Algorithm {
    pub fn family(&self) -> &'static str {
        match self {
            Algorithm::Grid(_) => "grid",
            Algorithm::Rank(_) => "rank",
            Algorithm::Threshold(_) => "threshold",
            Algorithm::Region(_) => "region",
        }
    }
}

impl Oracle for Algorithm {
    fn eval(&self, a: f64, b: f64, c: f64) -> bool {
        match self {
            Algorithm::Grid(g) => g.eval(a, b, c),
            Algorithm::Rank(r) => r.eval(a, b, c),
            Algorithm::Threshold(t) => t.eval(a, b, c),
            Algorithm::Region(r) => r.eval(a, b, c),
        }
    }
}

/// The three classic algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    /// Random cut: `b >= 1/2`.
    F1,
    /// Local maxima join.
    F2,
    /// Random cut, then change sides if both neighbours are on my side.
    F3,
}

impl std::str::FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f1" => Ok(Builtin::F1),
            "f2" => Ok(Builtin::F2),
            "f3" => Ok(Builtin::F3),
            other => Err(Error::invalid(format!("unknown built-in algorithm {other:?} (expected f1, f2 or f3)"))),
        }
    }
}

pub fn builtin(which: Builtin) -> Algorithm {
    let half = || vec![crate::scalar::ratio(1, 2)];
    match which {
        Builtin::F1 => Algorithm::Threshold(f1_threshold(half())),
        Builtin::F2 => Algorithm::Rank(RankAlgorithm::local_max()),
        Builtin::F3 => {
            let cells = (0..8).map(|idx| {
                let (i, j, l) = (idx >> 2, (idx >> 1) & 1, idx & 1);
                (j == 1) ^ (i == j && j == l)
            });
            Algorithm::Threshold(ThresholdAlgorithm::new(half(), cells.collect()).expect("valid f3 table"))
        }
    }
}

pub fn builtin_by_name(name: &str) -> Result<Algorithm> {
    Ok(builtin(name.parse()?))
}

/// `[b >= cut]` for a single cut.
pub fn f1_threshold<T: Scalar>(cut: Vec<T>) -> ThresholdAlgorithm<T> {
    let cells = (0..8).map(|idx| (idx >> 1) & 1 == 1).collect();
    ThresholdAlgorithm::new(cut, cells).expect("single cut inside (0,1)")
}

/// Map a grid-table vertex to the coordinates of its cell's lower corner.
pub fn cell_corner(t: Triple, n: usize) -> [f64; 3] {
    [t.a as f64 / n as f64, t.b as f64 / n as f64, t.c as f64 / n as f64]
}

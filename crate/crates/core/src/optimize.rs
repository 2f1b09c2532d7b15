//! Searches for colorings of `DB_normal(n)` with few monochromatic edges,
//! and the bound records they certify.
//!
//! Any coloring of `DB_normal(n)` is a grid algorithm with the same `p`, so
//! the best value found is an upper bound on `p*`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use rand::Rng;

use crate::debruijn::{mono_fraction, read_coloring, Coloring, DeBruijnSpec, Triple, Variant};
use crate::error::{Error, Result};
use crate::evaluate::{grid_mono_count, p_bracket_monotone_with, p_grid, Bracket, BracketOptions};
use crate::model::{ConeRegion, Direction, GridAlgorithm, MonotoneRegionAlgorithm, RegionShape, MINUS_PLUS_MINUS, PLUS_PLUS_PLUS};
use crate::scalar::{fmt_ratio, parse_rational, ratio_to_f64};
use crate::{rng, Rational};

/// Which side of `p*` a record bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Upper,
    Lower,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Upper => "upper",
            BoundKind::Lower => "lower",
        })
    }
}

impl std::str::FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" => Ok(BoundKind::Upper),
            "lower" => Ok(BoundKind::Lower),
            other => Err(Error::invalid(format!("unknown bound direction {other:?}"))),
        }
    }
}

/// A certified statement `p* <= value` or `p* >= value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRecord {
    pub direction: BoundKind,
    pub value: Rational,
    pub n: usize,
    pub variant: Variant,
    pub method: String,
    /// Coloring file (upper) or certificate file (lower), once written.
    pub witness_path: Option<String>,
    pub seed: Option<u64>,
}

impl BoundRecord {
    pub fn value_f64(&self) -> f64 {
        ratio_to_f64(&self.value)
    }

    /// One line of `key=value` fields.
    pub fn to_line(&self) -> String {
        format!(
            "direction={} value_num={} value_den={} n={} variant={} method={} witness_path={} seed={}",
            self.direction,
            self.value.numer(),
            self.value.denom(),
            self.n,
            self.variant,
            self.method,
            self.witness_path.as_deref().unwrap_or("-"),
            self.seed.map_or_else(|| "-".to_string(), |s| s.to_string()),
        )
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let fields = parse_fields(line)?;
        let get = |k: &str| fields.get(k).ok_or_else(|| Error::invalid(format!("bound record lacks {k}")));
        let num: BigInt = get("value_num")?.parse().map_err(|_| Error::invalid("bad value_num"))?;
        let den: BigInt = get("value_den")?.parse().map_err(|_| Error::invalid("bad value_den"))?;
        if den == BigInt::from(0) {
            return Err(Error::invalid("zero value_den"));
        }
        let opt = |k: &str| fields.get(k).filter(|v| v.as_str() != "-").cloned();
        Ok(BoundRecord {
            direction: get("direction")?.parse()?,
            value: Rational::new(num, den),
            n: get("n")?.parse().map_err(|_| Error::invalid("bad n"))?,
            variant: get("variant")?.parse()?,
            method: get("method")?.clone(),
            witness_path: opt("witness_path"),
            seed: opt("seed").map(|s| s.parse().map_err(|_| Error::invalid("bad seed"))).transpose()?,
        })
    }
}

impl fmt::Display for BoundRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.direction {
            BoundKind::Upper => "<=",
            BoundKind::Lower => ">=",
        };
        write!(f, "p* {rel} {} (~{:.6}) via {} on {}({})", fmt_ratio(&self.value), self.value_f64(), self.method, self.variant, self.n)
    }
}

/// Split `k=v k=v ...` into a map. Values cannot contain whitespace.
pub(crate) fn parse_fields(line: &str) -> Result<BTreeMap<String, String>> {
    line.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::invalid(format!("expected key=value, got {tok:?}")))
        })
        .collect()
}

/// Upper bound certified by a coloring of the normal graph.
pub fn certify_upper(coloring: &Coloring) -> Result<BoundRecord> {
    let spec = coloring.spec();
    if spec.variant() != Variant::Normal {
        return Err(Error::invalid("only colorings of the normal De Bruijn graph give upper bounds on p*"));
    }
    let stats = mono_fraction(coloring);
    Ok(BoundRecord {
        direction: BoundKind::Upper,
        value: stats.fraction,
        n: spec.n(),
        variant: Variant::Normal,
        method: "coloring".into(),
        witness_path: None,
        seed: None,
    })
}

/// Reload an upper record's witness coloring and recount it.
pub fn replay_upper(record: &BoundRecord) -> Result<()> {
    let path = record
        .witness_path
        .as_deref()
        .ok_or_else(|| Error::invalid("upper bound record has no witness"))?;
    let coloring = read_coloring(std::io::BufReader::new(std::fs::File::open(Path::new(path))?))?;
    let fresh = certify_upper(&coloring)?;
    if fresh.value != record.value || fresh.n != record.n {
        return Err(Error::Consistency(format!(
            "witness {path} recounts to {} on n={}, record says {} on n={}",
            fresh.value, fresh.n, record.value, record.n
        )));
    }
    Ok(())
}

/// Moves available to the annealer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveSet {
    /// Flip one vertex.
    SingleFlip,
    /// Flip a vertex together with all its images under the cyclic symbol
    /// shift `x -> x + 1 mod n`, alternating with single flips so that
    /// colorings which are not shift-invariant stay reachable.
    OrbitFlip,
}

/// Search parameters. Temperatures are in units of monochromatic edges for
/// free colorings and of `n` edges for monotone tables.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_steps: u64,
    pub move_set: MoveSet,
    pub t_start: f64,
    pub t_end: f64,
    pub monotone_only: bool,
    /// First resolution of the coarse-to-fine monotone schedule.
    pub start_resolution: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 1,
            restarts: 8,
            max_steps: 200_000,
            move_set: MoveSet::SingleFlip,
            t_start: 3.0,
            t_end: 0.05,
            monotone_only: false,
            start_resolution: 16,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_steps == 0 {
            return Err(Error::invalid("restarts and max_steps must be at least 1"));
        }
        if !(self.t_start > 0.0 && self.t_end > 0.0) {
            return Err(Error::invalid("temperatures must be positive"));
        }
        Ok(())
    }

    /// Parse `key = value` lines; `#` starts a comment. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SearchConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::parse(i + 1, "expected key = value"))?;
            let (k, v) = (k.trim(), v.trim());
            let bad = |what: &str| Error::parse(i + 1, format!("bad {what} {v:?}"));
            match k {
                "seed" => cfg.seed = v.parse().map_err(|_| bad("seed"))?,
                "restarts" => cfg.restarts = v.parse().map_err(|_| bad("restarts"))?,
                "max_steps" => cfg.max_steps = v.parse().map_err(|_| bad("max_steps"))?,
                "t_start" => cfg.t_start = v.parse().map_err(|_| bad("t_start"))?,
                "t_end" => cfg.t_end = v.parse().map_err(|_| bad("t_end"))?,
                "monotone_only" => cfg.monotone_only = v.parse().map_err(|_| bad("monotone_only"))?,
                "start_resolution" => cfg.start_resolution = v.parse().map_err(|_| bad("start_resolution"))?,
                "move_set" => {
                    cfg.move_set = match v {
                        "single_flip" => MoveSet::SingleFlip,
                        "orbit_flip" => MoveSet::OrbitFlip,
                        _ => return Err(bad("move_set")),
                    }
                }
                other => return Err(Error::parse(i + 1, format!("unknown key {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn temperature(&self, step: u64) -> f64 {
        let frac = step as f64 / self.max_steps.max(1) as f64;
        self.t_start * (self.t_end / self.t_start).powf(frac)
    }
}

/// Incremental monochromatic-edge counter over an explicit edge list.
#[derive(Clone, Debug)]
pub struct FlipState {
    /// Other endpoint of every non-loop edge incident to each vertex.
    neighbors: Vec<Vec<u32>>,
    loops: u64,
    bits: Vec<bool>,
    mono: u64,
}

impl FlipState {
    pub fn new(coloring: &Coloring) -> Self {
        let spec = *coloring.spec();
        let mut neighbors = vec![Vec::new(); spec.vertex_count()];
        let mut loops = 0;
        for (u, v) in spec.edges() {
            let (iu, iv) = (spec.index_unchecked(u), spec.index_unchecked(v));
            if iu == iv {
                loops += 1;
            } else {
                neighbors[iu].push(iv as u32);
                neighbors[iv].push(iu as u32);
            }
        }
        let bits = coloring.bits().to_vec();
        let mut state = FlipState { neighbors, loops, bits, mono: 0 };
        state.mono = state.recount();
        state
    }

    pub fn mono(&self) -> u64 {
        self.mono
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// From-scratch count (each non-loop edge is seen from both ends).
    pub fn recount(&self) -> u64 {
        let twice: u64 = self
            .neighbors
            .iter()
            .enumerate()
            .map(|(v, ns)| ns.iter().filter(|&&u| self.bits[u as usize] == self.bits[v]).count() as u64)
            .sum();
        twice / 2 + self.loops
    }

    /// Change in the monochromatic count if vertex `v` flipped.
    pub fn delta(&self, v: usize) -> i64 {
        let mine = self.bits[v];
        self.neighbors[v]
            .iter()
            .map(|&u| if self.bits[u as usize] == mine { -1 } else { 1 })
            .sum()
    }

    pub fn flip(&mut self, v: usize) -> i64 {
        let d = self.delta(v);
        self.bits[v] = !self.bits[v];
        self.mono = (self.mono as i64 + d) as u64;
        d
    }
}

fn exact_value(spec: &DeBruijnSpec, mono: u64) -> Rational {
    Rational::new(BigInt::from(mono), BigInt::from(spec.edge_count()))
}

/// Maximum vertex count for [`exhaustive_min`].
pub const EXHAUSTIVE_VERTEX_LIMIT: usize = 30;

/// Global minimum over all colorings by Gray-code enumeration. Vertex 0 is
/// fixed to color 0, which loses nothing by color-swap symmetry.
pub fn exhaustive_min(spec: &DeBruijnSpec) -> Result<(Coloring, Rational)> {
    let v = spec.vertex_count();
    if v > EXHAUSTIVE_VERTEX_LIMIT {
        return Err(Error::Budget {
            what: "exhaustive enumeration",
            detail: format!("{spec} has {v} vertices; the limit is {EXHAUSTIVE_VERTEX_LIMIT}"),
        });
    }
    let mut state = FlipState::new(&Coloring::constant(*spec, false));
    let mut best = state.mono();
    let mut best_code = 0u64;
    let free = v.saturating_sub(1);
    for i in 1u64..(1u64 << free) {
        let bit = i.trailing_zeros() as usize;
        state.flip(bit + 1);
        if state.mono() < best {
            best = state.mono();
            best_code = i ^ (i >> 1);
        }
    }
    let bits = (0..v).map(|idx| idx > 0 && (best_code >> (idx - 1)) & 1 == 1).collect();
    let coloring = Coloring::new(*spec, bits)?;
    let stats = mono_fraction(&coloring);
    if stats.mono_edges != best {
        return Err(Error::Consistency(format!("exhaustive search tracked {best} but recount gives {}", stats.mono_edges)));
    }
    Ok((coloring, exact_value(spec, best)))
}

/// Outcome of one search.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub coloring: Coloring,
    pub value: Rational,
    pub initial_value: Rational,
    /// Restart that produced the best coloring.
    pub restart: usize,
}

/// Simulated annealing over vertex flips, best over restarts.
pub fn local_search(spec: &DeBruijnSpec, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let mut overall: Option<SearchResult> = None;
    for restart in 0..config.restarts {
        let mut rng = rng::stream(config.seed, restart as u64);
        let init = Coloring::from_fn(*spec, |_| rng.gen());
        let candidate = anneal(&init, config, &mut rng)?;
        let better = overall.as_ref().map_or(true, |best| candidate.value < best.value);
        if better {
            overall = Some(SearchResult { restart, ..candidate });
        }
    }
    Ok(overall.expect("at least one restart"))
}

/// Anneal from a given coloring.
pub fn anneal(init: &Coloring, config: &SearchConfig, rng: &mut impl Rng) -> Result<SearchResult> {
    let spec = *init.spec();
    let mut state = FlipState::new(init);
    let initial = state.mono();
    let mut best = initial;
    let mut best_bits = state.bits().to_vec();
    let orbits = (config.move_set == MoveSet::OrbitFlip).then(|| rotation_orbits(&spec));
    let vcount = spec.vertex_count();
    for step in 0..config.max_steps {
        let temp = config.temperature(step);
        let v = rng.gen_range(0..vcount);
        let accept = |d: i64, rng: &mut dyn rand::RngCore| d <= 0 || rng.gen::<f64>() < (-(d as f64) / temp).exp();
        match orbits.as_ref().filter(|_| step % 2 == 0) {
            None => {
                let d = state.delta(v);
                if accept(d, rng) {
                    state.flip(v);
                }
            }
            Some(orbits) => {
                let orbit = &orbits[v];
                let before = state.mono();
                for &u in orbit {
                    state.flip(u);
                }
                let d = state.mono() as i64 - before as i64;
                if !accept(d, rng) {
                    for &u in orbit.iter().rev() {
                        state.flip(u);
                    }
                }
            }
        }
        if state.mono() < best {
            best = state.mono();
            best_bits.copy_from_slice(state.bits());
        }
    }
    if state.mono() != state.recount() {
        return Err(Error::Consistency("incremental count drifted from recount".into()));
    }
    let coloring = Coloring::new(spec, best_bits)?;
    let stats = mono_fraction(&coloring);
    if stats.mono_edges != best {
        return Err(Error::Consistency(format!("annealer tracked {best}, recount gives {}", stats.mono_edges)));
    }
    Ok(SearchResult { coloring, value: stats.fraction, initial_value: exact_value(&spec, initial), restart: 0 })
}

/// Orbit of every vertex under the cyclic symbol shift.
fn rotation_orbits(spec: &DeBruijnSpec) -> Vec<Vec<usize>> {
    let n = spec.n();
    spec.vertices()
        .map(|t| {
            let mut orbit: Vec<usize> = (0..n)
                .map(|k| spec.index_unchecked(Triple::new((t.a + k) % n, (t.b + k) % n, (t.c + k) % n)))
                .collect();
            orbit.sort_unstable();
            orbit.dedup();
            orbit
        })
        .collect()
}

/// A monotone table stored by its staircase frontier.
///
/// In coordinates flipped so that every declared direction is increasing,
/// cell `(a', b', c')` is 1 iff `c' >= height[a'][b']`, with `height`
/// nonincreasing in `a'` and `b'`. Cell counts per overlap make each move
/// an `O(1)` update of the monochromatic count.
#[derive(Clone, Debug)]
pub struct Staircase {
    n: usize,
    dirs: [Direction; 3],
    height: Vec<u32>,
    /// Ones among heads `(·, x, y)` for overlap `(x, y)`, actual coordinates.
    heads: Vec<u32>,
    /// Ones among tails `(x, y, ·)`.
    tails: Vec<u32>,
    mono: u64,
}

impl Staircase {
    /// Staircase of an existing monotone table.
    pub fn from_grid(grid: &GridAlgorithm, dirs: [Direction; 3]) -> Result<Self> {
        if !grid.is_monotone(dirs) {
            return Err(Error::invalid("table is not monotone in the requested directions"));
        }
        let n = grid.n();
        let mut s = Staircase { n, dirs, height: vec![n as u32; n * n], heads: vec![0; n * n], tails: vec![0; n * n], mono: 0 };
        for a in 0..n {
            for b in 0..n {
                let h = (0..n).find(|&c| grid.get(s.actual(a, 0), s.actual(b, 1), s.actual(c, 2))).unwrap_or(n);
                s.height[a * n + b] = h as u32;
            }
        }
        s.rebuild_counts()?;
        Ok(s)
    }

    fn actual(&self, i: usize, axis: usize) -> usize {
        match self.dirs[axis] {
            Direction::Increasing => i,
            Direction::Decreasing => self.n - 1 - i,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mono(&self) -> u64 {
        self.mono
    }

    pub fn to_grid(&self) -> GridAlgorithm {
        let n = self.n;
        let mut g = GridAlgorithm::constant(n, false);
        for a in 0..n {
            for b in 0..n {
                let h = self.height[a * n + b] as usize;
                for c in h..n {
                    g.set(self.actual(a, 0), self.actual(b, 1), self.actual(c, 2), true);
                }
            }
        }
        g
    }

    fn rebuild_counts(&mut self) -> Result<()> {
        let g = self.to_grid();
        let n = self.n;
        self.heads.iter_mut().for_each(|x| *x = 0);
        self.tails.iter_mut().for_each(|x| *x = 0);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if g.get(a, b, c) {
                        self.heads[b * n + c] += 1;
                        self.tails[a * n + b] += 1;
                    }
                }
            }
        }
        self.mono = (0..n * n).map(|p| self.term(self.heads[p] as i64, self.tails[p] as i64)).sum::<i64>() as u64;
        Ok(())
    }

    #[inline]
    fn term(&self, heads: i64, tails: i64) -> i64 {
        let n = self.n as i64;
        heads * tails + (n - heads) * (n - tails)
    }

    /// Change in the monochromatic count from setting actual cell `(a,b,c)`
    /// to one (`sign = 1`) or zero (`sign = -1`).
    #[inline]
    fn cell_delta(&self, a: usize, b: usize, c: usize, sign: i64) -> i64 {
        let n = self.n;
        let p = b * n + c;
        let q = a * n + b;
        let (hp, tp) = (self.heads[p] as i64, self.tails[p] as i64);
        if p == q {
            return self.term(hp + sign, tp + sign) - self.term(hp, tp);
        }
        let (hq, tq) = (self.heads[q] as i64, self.tails[q] as i64);
        self.term(hp + sign, tp) - self.term(hp, tp) + self.term(hq, tq + sign) - self.term(hq, tq)
    }

    fn apply_cell(&mut self, a: usize, b: usize, c: usize, sign: i64, delta: i64) {
        let n = self.n;
        let p = b * n + c;
        let q = a * n + b;
        self.heads[p] = (self.heads[p] as i64 + sign) as u32;
        self.tails[q] = (self.tails[q] as i64 + sign) as u32;
        self.mono = (self.mono as i64 + delta) as u64;
    }

    /// Proposed height change `step = ±1` at column `(a', b')`, if legal:
    /// returns the actual cell that flips, its sign and the count change.
    pub fn propose(&self, a: usize, b: usize, step: i32) -> Option<((usize, usize, usize), i64, i64)> {
        let n = self.n;
        let h = self.height[a * n + b] as i32;
        let new = h + step;
        if new < 0 || new > n as i32 {
            return None;
        }
        let at = |x: usize, y: usize| self.height[x * n + y] as i32;
        // nonincreasing along a' and b'
        if a > 0 && new > at(a - 1, b) || b > 0 && new > at(a, b - 1) {
            return None;
        }
        if a + 1 < n && new < at(a + 1, b) || b + 1 < n && new < at(a, b + 1) {
            return None;
        }
        let (c, sign) = if step < 0 { (new as usize, 1) } else { (h as usize, -1) };
        let cell = (self.actual(a, 0), self.actual(b, 1), self.actual(c, 2));
        Some((cell, sign, self.cell_delta(cell.0, cell.1, cell.2, sign)))
    }

    pub fn commit(&mut self, a: usize, b: usize, step: i32, cell: (usize, usize, usize), sign: i64, delta: i64) {
        let n = self.n;
        self.height[a * n + b] = (self.height[a * n + b] as i32 + step) as u32;
        self.apply_cell(cell.0, cell.1, cell.2, sign, delta);
    }
}

/// Best monotone table found, with its exact value and directions.
#[derive(Clone, Debug)]
pub struct MonotoneResult {
    pub grid: GridAlgorithm,
    pub value: Rational,
    pub directions: [Direction; 3],
}

/// Direction classes up to output complement and mirror symmetry.
pub const DIRECTION_CLASSES: [[Direction; 3]; 3] = [
    MINUS_PLUS_MINUS,
    PLUS_PLUS_PLUS,
    [Direction::Increasing, Direction::Increasing, Direction::Decreasing],
];

/// Anneal over monotone tables, coarse to fine.
///
/// At `config.start_resolution` (or `n` if smaller) every direction class is
/// tried; the best table is then resampled at twice the resolution and
/// annealed again until resolution `n` is reached.
pub fn monotone_search(n: usize, config: &SearchConfig) -> Result<MonotoneResult> {
    monotone_search_with(n, config, &DIRECTION_CLASSES)
}

pub fn monotone_search_with(n: usize, config: &SearchConfig, classes: &[[Direction; 3]]) -> Result<MonotoneResult> {
    config.validate()?;
    if !config.monotone_only {
        return Err(Error::invalid("monotone search needs monotone_only = true"));
    }
    if n == 0 || n > crate::model::DEFAULT_MAX_RESOLUTION {
        return Err(Error::ResolutionLimit { requested: n, limit: crate::model::DEFAULT_MAX_RESOLUTION });
    }
    let mut res = config.start_resolution.clamp(1, n);
    let mut level = 0u64;
    let mut best: Option<(Staircase, [Direction; 3])> = None;
    for (ci, &dirs) in classes.iter().enumerate() {
        for restart in 0..config.restarts {
            let mut rng = rng::stream(config.seed, (ci * config.restarts + restart) as u64);
            let mut s = Staircase::from_grid(&GridAlgorithm::constant(res, false), dirs)?;
            let steps = config.max_steps.max(COARSE_SWEEPS * (res * res) as u64);
            anneal_staircase_at(&mut s, config, steps, 1.0, &mut rng);
            if best.as_ref().map_or(true, |(b, _)| s.mono() < b.mono()) {
                best = Some((s, dirs));
            }
        }
    }
    let (mut stair, dirs) = best.expect("at least one class and restart");
    while res < n {
        level += 1;
        res = (res * 2).min(n);
        let coarse = stair.to_grid();
        let fine = if res % coarse.n() == 0 {
            crate::model::refine(&coarse, res / coarse.n(), n)?
        } else {
            GridAlgorithm::sample(&coarse, res, [0.5; 3])
        };
        stair = Staircase::from_grid(&fine, dirs)?;
        let mut rng = rng::stream(config.seed, 0xF1AE_0000 + level);
        // The refined table is already good: anneal cold, one pass per cell column.
        let steps = config.max_steps.max(REFINE_SWEEPS * (res * res) as u64);
        anneal_staircase_at(&mut stair, config, steps, REFINE_HEAT, &mut rng);
    }
    let grid = stair.to_grid();
    if !grid.is_monotone(dirs) {
        return Err(Error::Consistency("staircase produced a non-monotone table".into()));
    }
    if grid_mono_count(&grid) != stair.mono() {
        return Err(Error::Consistency("staircase count drifted from recount".into()));
    }
    Ok(MonotoneResult { value: p_grid(&grid), grid, directions: dirs })
}

/// Anneal a staircase in place, ending at the best state visited.
pub fn anneal_staircase(s: &mut Staircase, config: &SearchConfig, rng: &mut impl Rng) {
    anneal_staircase_at(s, config, config.max_steps, 1.0, rng);
}

/// Proposals per staircase column at the coarse level.
const COARSE_SWEEPS: u64 = 30_000;
/// Temperature multiplier used after each refinement.
const REFINE_HEAT: f64 = 0.02;
/// Proposals per staircase column after each refinement.
const REFINE_SWEEPS: u64 = 16;

/// Anneal for `steps` proposals with the schedule stretched to `steps` and
/// scaled by `heat`.
fn anneal_staircase_at(s: &mut Staircase, config: &SearchConfig, steps: u64, heat: f64, rng: &mut impl Rng) {
    let n = s.n();
    let scale = n as f64 * heat;
    let mut best = s.mono();
    let mut best_height = s.height.clone();
    let stretch = config.max_steps as f64 / steps as f64;
    for step in 0..steps {
        let temp = config.temperature((step as f64 * stretch) as u64) * scale;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let dir = if rng.gen::<bool>() { 1 } else { -1 };
        if let Some((cell, sign, d)) = s.propose(a, b, dir) {
            if d <= 0 || rng.gen::<f64>() < (-(d as f64) / temp).exp() {
                s.commit(a, b, dir, cell, sign, d);
                if s.mono() < best {
                    best = s.mono();
                    best_height.copy_from_slice(&s.height);
                }
            }
        }
    }
    if s.mono() != best {
        s.height = best_height;
        s.rebuild_counts().expect("heights stay in range");
    }
}

/// A parametric family of monotone region algorithms.
pub trait RegionFamily {
    fn name(&self) -> String;

    /// Search box per parameter.
    fn bounds(&self) -> Vec<(f64, f64)>;

    fn initial(&self) -> Vec<f64>;

    fn instantiate(&self, params: &[f64]) -> MonotoneRegionAlgorithm;
}

/// A family with no free parameters.
#[derive(Clone, Debug)]
pub struct FixedFamily(pub MonotoneRegionAlgorithm);

impl RegionFamily for FixedFamily {
    fn name(&self) -> String {
        "fixed".into()
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }

    fn initial(&self) -> Vec<f64> {
        Vec::new()
    }

    fn instantiate(&self, _params: &[f64]) -> MonotoneRegionAlgorithm {
        self.0.clone()
    }
}

/// Majority at threshold `τ`, plus the points where `b` is the largest of
/// the three values: a node whose own value tops both neighbours keeps
/// color 1 even when both neighbours sit on the same side of `τ`.
#[derive(Clone, Debug)]
pub struct MajorityDiagonalFamily;

impl MajorityDiagonalFamily {
    pub fn region(tau: f64) -> ConeRegion {
        let mut cone = ConeRegion::majority(tau);
        cone.normals.push([0.0, 1.0, -1.0]);
        cone.normals.push([-1.0, 1.0, 0.0]);
        cone.clauses.push(vec![3, 4]);
        cone
    }
}

impl RegionFamily for MajorityDiagonalFamily {
    fn name(&self) -> String {
        "majority-diagonal".into()
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.25, 0.5)]
    }

    fn initial(&self) -> Vec<f64> {
        vec![0.385]
    }

    fn instantiate(&self, params: &[f64]) -> MonotoneRegionAlgorithm {
        MonotoneRegionAlgorithm::new(RegionShape::Cone(Self::region(params[0])), Some(MINUS_PLUS_MINUS))
    }
}

/// Evaluation budget for [`tune_parameters`].
#[derive(Clone, Debug)]
pub struct TuneBudget {
    /// Resolution used while searching.
    pub search_resolution: usize,
    /// Resolution of the final certified bracket.
    pub resolution: usize,
    pub sweeps: usize,
    /// Golden-section evaluations per line search.
    pub line_evals: usize,
    pub bracket: BracketOptions,
}

impl Default for TuneBudget {
    fn default() -> Self {
        TuneBudget { search_resolution: 128, resolution: 256, sweeps: 3, line_evals: 14, bracket: BracketOptions::default() }
    }
}

#[derive(Clone, Debug)]
pub struct TuneResult {
    pub params: Vec<f64>,
    pub algorithm: MonotoneRegionAlgorithm,
    /// Bracket at the final resolution.
    pub bracket: Bracket,
    pub evaluations: usize,
    /// Parameter points rejected as non-monotone.
    pub skipped: Vec<Vec<f64>>,
}

/// Coordinate descent with golden-section line searches; the objective is
/// the upper end of the certified bracket.
pub fn tune_parameters(family: &dyn RegionFamily, budget: &TuneBudget) -> Result<TuneResult> {
    let bounds = family.bounds();
    let mut params = family.initial();
    if params.len() != bounds.len() {
        return Err(Error::invalid("family initial point and bounds disagree in length"));
    }
    let mut evaluations = 0usize;
    let mut skipped = Vec::new();
    let objective = |p: &[f64], res: usize, evals: &mut usize, skipped: &mut Vec<Vec<f64>>| -> Option<Bracket> {
        *evals += 1;
        match p_bracket_monotone_with(&family.instantiate(p), res, &budget.bracket) {
            Ok(b) => Some(b),
            Err(Error::NotMonotone { .. }) => {
                skipped.push(p.to_vec());
                None
            }
            Err(_) => None,
        }
    };
    let score = |b: &Option<Bracket>| b.as_ref().map_or(f64::INFINITY, |b| ratio_to_f64(&b.hi));
    let mut current = score(&objective(&params, budget.search_resolution, &mut evaluations, &mut skipped));
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    for _ in 0..budget.sweeps {
        if params.is_empty() || current == 1.0 {
            break;
        }
        let before = current;
        for i in 0..params.len() {
            let (mut lo, mut hi) = bounds[i];
            let eval_at = |x: f64, evals: &mut usize, skipped: &mut Vec<Vec<f64>>| {
                let mut p = params.clone();
                p[i] = x;
                score(&objective(&p, budget.search_resolution, evals, skipped))
            };
            let mut x1 = hi - INV_PHI * (hi - lo);
            let mut x2 = lo + INV_PHI * (hi - lo);
            let mut f1 = eval_at(x1, &mut evaluations, &mut skipped);
            let mut f2 = eval_at(x2, &mut evaluations, &mut skipped);
            for _ in 0..budget.line_evals.saturating_sub(2) {
                if f1 <= f2 {
                    hi = x2;
                    (x2, f2) = (x1, f1);
                    x1 = hi - INV_PHI * (hi - lo);
                    f1 = eval_at(x1, &mut evaluations, &mut skipped);
                } else {
                    lo = x1;
                    (x1, f1) = (x2, f2);
                    x2 = lo + INV_PHI * (hi - lo);
                    f2 = eval_at(x2, &mut evaluations, &mut skipped);
                }
            }
            let (xb, fb) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
            if fb < current {
                params[i] = xb;
                current = fb;
            }
        }
        if current >= before {
            break;
        }
    }
    let algorithm = family.instantiate(&params).with_params(params.clone());
    let bracket = p_bracket_monotone_with(&algorithm, budget.resolution, &budget.bracket)?;
    Ok(TuneResult { params, algorithm, bracket, evaluations: evaluations + 1, skipped })
}

/// Upper bound record from the inner or outer grid of a tuned region,
/// whichever is better; the record's witness is that grid's coloring.
pub fn grid_upper_bound(grid: &GridAlgorithm, method: &str, seed: Option<u64>) -> Result<(Coloring, BoundRecord)> {
    let coloring = grid.to_coloring()?;
    let mut record = certify_upper(&coloring)?;
    record.method = method.to_string();
    record.seed = seed;
    Ok((coloring, record))
}

/// `value` as a parseable rational (for configs and CSVs).
pub fn parse_value(s: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| Error::invalid(format!("not a rational: {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::debruijn::normal2_optimal_coloring;
    use crate::scalar::ratio;

    #[test]
    fn exhaustive_normal2() {
        let spec = DeBruijnSpec::normal(2).unwrap();
        let (c, v) = exhaustive_min(&spec).unwrap();
        assert_eq!(v, ratio(1, 4));
        assert_eq!(mono_fraction(&c).mono_edges, 4);
    }

    #[test]
    fn exhaustive_budget() {
        assert!(matches!(exhaustive_min(&DeBruijnSpec::normal(4).unwrap()), Err(Error::Budget { .. })));
    }

    #[test]
    fn flip_deltas_match_recount() {
        let spec = DeBruijnSpec::normal(3).unwrap();
        let mut rng = rng::stream(3, 0);
        let mut state = FlipState::new(&Coloring::from_fn(spec, |_| rng.gen()));
        for _ in 0..2000 {
            state.flip(rng.gen_range(0..spec.vertex_count()));
        }
        assert_eq!(state.mono(), state.recount());
        let c = Coloring::new(spec, state.bits().to_vec()).unwrap();
        assert_eq!(state.mono(), mono_fraction(&c).mono_edges);
    }

    #[test]
    fn local_search_small() {
        let spec = DeBruijnSpec::normal(2).unwrap();
        let cfg = SearchConfig { restarts: 10, max_steps: 2_000, ..Default::default() };
        for seed in 0..3 {
            let r = local_search(&spec, &SearchConfig { seed, ..cfg.clone() }).unwrap();
            assert_eq!(r.value, ratio(1, 4));
            assert!(r.value <= r.initial_value);
        }
        let orbit = SearchConfig { move_set: MoveSet::OrbitFlip, ..cfg };
        assert_eq!(local_search(&spec, &orbit).unwrap().value, ratio(1, 4));
    }

    #[test]
    fn staircase_moves_track_counts() {
        let dirs = MINUS_PLUS_MINUS;
        let mut s = Staircase::from_grid(&GridAlgorithm::constant(5, false), dirs).unwrap();
        assert_eq!(s.mono(), 625);
        let mut rng = rng::stream(9, 0);
        for _ in 0..5000 {
            let (a, b) = (rng.gen_range(0..5), rng.gen_range(0..5));
            let step = if rng.gen() { 1 } else { -1 };
            if let Some((cell, sign, d)) = s.propose(a, b, step) {
                s.commit(a, b, step, cell, sign, d);
            }
        }
        let g = s.to_grid();
        assert!(g.is_monotone(dirs));
        assert_eq!(grid_mono_count(&g), s.mono());
    }

    #[test]
    fn monotone_search_n2() {
        let cfg = SearchConfig { monotone_only: true, restarts: 4, max_steps: 5_000, ..Default::default() };
        let r = monotone_search(2, &cfg).unwrap();
        assert_eq!(r.value, ratio(1, 4));
        assert!(r.grid.is_monotone(r.directions));
        assert!(monotone_search(2, &SearchConfig::default()).is_err());
    }

    #[test]
    fn certify_upper_records() {
        let r = certify_upper(&normal2_optimal_coloring()).unwrap();
        assert_eq!(r.value, ratio(1, 4));
        let constant = Coloring::constant(DeBruijnSpec::normal(3).unwrap(), false);
        assert_eq!(certify_upper(&constant).unwrap().value, ratio(1, 1));
        let distinct = Coloring::constant(DeBruijnSpec::distinct(5).unwrap(), false);
        assert!(certify_upper(&distinct).is_err());
    }

    #[test]
    fn bound_record_line_roundtrip() {
        let mut r = certify_upper(&normal2_optimal_coloring()).unwrap();
        r.witness_path = Some("out/fig1.coloring".into());
        r.seed = Some(42);
        assert_eq!(BoundRecord::from_line(&r.to_line()).unwrap(), r);
        assert!(BoundRecord::from_line("direction=upper").is_err());
    }

    #[test]
    fn config_file() {
        let cfg = SearchConfig::parse("seed = 5\nrestarts=2 # two\nmove_set = orbit_flip\n").unwrap();
        assert_eq!((cfg.seed, cfg.restarts, cfg.move_set), (5, 2, MoveSet::OrbitFlip));
        assert!(SearchConfig::parse("bogus = 1").is_err());
        assert!(matches!(SearchConfig::parse("\n\nrestarts = x"), Err(Error::Parse { line: 3, .. })));
        assert!(SearchConfig::parse("restarts = 0").is_err());
    }
}

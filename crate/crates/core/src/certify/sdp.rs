//! The min-uncut SDP relaxation and a barrier solver for its invariant dual.
//!
//! Primal: minimize `1/2 + <C, X>` over PSD `X` with unit diagonal and
//! triangle constraints `<T, X> >= -1`, where `C` puts `w/4` on both
//! orientations of every edge (`w/2` on the diagonal for a self-loop).
//!
//! Dual: maximize `1/2 + sum_v y_v - sum_t lambda_t` subject to
//! `S = C - Diag(y) - sum_t lambda_t T_t` PSD and `lambda >= 0`.
//!
//! Both problems are invariant under the graph's symmetry group, so an
//! optimal dual may be averaged over it. The solver works with one `y` per
//! vertex orbit and one multiplier per triangle orbit (the orbit's total
//! mass), which keeps the problem size independent of `n`.

use nalgebra::{DMatrix, DVector};

use super::orbit::{triangle_orbits, PairAlgebra, SdpGraph, TriangleOrbit, TrianglePolicy};
use crate::debruijn::{DeBruijnSpec, Variant};
use crate::error::{Error, Result};

/// Largest distinct-graph parameter handled at desk scale.
pub const MAX_DISTINCT_N: usize = 12;
/// Largest normal-graph parameter handled at desk scale.
pub const MAX_NORMAL_N: usize = 6;

#[derive(Clone, Debug)]
pub struct SdpInstance {
    pub graph: SdpGraph,
    pub algebra: PairAlgebra,
    pub edge_count: u64,
    /// Coordinates of `C` in the pair algebra.
    pub objective: Vec<f64>,
    /// Diagonal classes, one per vertex orbit.
    pub vertex_orbits: Vec<usize>,
    pub policy: TrianglePolicy,
    pub triangles: Vec<TriangleOrbit>,
}

/// Build the SDP for a De Bruijn graph.
pub fn build_sdp(spec: &DeBruijnSpec, policy: TrianglePolicy) -> Result<SdpInstance> {
    let n = spec.n();
    let ok = match spec.variant() {
        Variant::Distinct => (5..=MAX_DISTINCT_N).contains(&n),
        Variant::Normal => n <= MAX_NORMAL_N,
    };
    if !ok {
        return Err(Error::Budget {
            what: "SDP instance",
            detail: format!(
                "{spec} is outside desk scale (distinct n in 5..={MAX_DISTINCT_N}, normal n <= {MAX_NORMAL_N})"
            ),
        });
    }
    build_graph_sdp(SdpGraph::DeBruijn(*spec), policy)
}

/// Build the SDP for any supported graph.
pub fn build_graph_sdp(graph: SdpGraph, policy: TrianglePolicy) -> Result<SdpInstance> {
    if let SdpGraph::Cycle(n) = graph {
        if n < 3 {
            return Err(Error::invalid("cycle SDP needs at least 3 vertices"));
        }
    }
    let algebra = PairAlgebra::new(graph);
    let edges = graph.edges();
    let w = 1.0 / edges.len() as f64;
    let mut sums = vec![0.0; algebra.len()];
    for &(u, v) in &edges {
        if u == v {
            sums[algebra.class_of(u, u)] += w / 2.0;
        } else {
            sums[algebra.class_of(u, v)] += w / 4.0;
            sums[algebra.class_of(v, u)] += w / 4.0;
        }
    }
    let objective = sums.iter().zip(algebra.classes()).map(|(s, c)| s / c.size as f64).collect();
    let triangles = triangle_orbits(&algebra, policy)?;
    let vertex_orbits = algebra.diagonal_classes();
    Ok(SdpInstance { graph, edge_count: edges.len() as u64, objective, vertex_orbits, policy, triangles, algebra })
}

impl SdpInstance {
    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Number of off-diagonal vertex pairs carrying objective weight.
    pub fn weighted_pairs(&self) -> u64 {
        let mut pairs: Vec<(usize, usize)> = self
            .graph
            .edges()
            .into_iter()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs.len() as u64
    }

    fn orbit_size(&self, o: usize) -> f64 {
        self.algebra.classes()[self.vertex_orbits[o]].size as f64
    }

    /// `S` for per-orbit `y` and per-triangle-orbit masses `mu` (indexed
    /// like `active`).
    fn slack(&self, y: &[f64], active: &[usize], mu: &[f64]) -> Vec<f64> {
        let mut s = self.objective.clone();
        for (o, &k) in self.vertex_orbits.iter().enumerate() {
            s[k] -= y[o];
        }
        for (&t, &m) in active.iter().zip(mu) {
            for (k, v) in self.triangles[t].coords(&self.algebra) {
                s[k] -= m * v;
            }
        }
        s
    }

    /// Dual objective `1/2 + sum_v y_v - sum mu`.
    pub fn dual_value(&self, y: &[f64], mu: &[f64]) -> f64 {
        0.5 + y.iter().enumerate().map(|(o, v)| v * self.orbit_size(o)).sum::<f64>() - mu.iter().sum::<f64>()
    }

    /// Smallest eigenvalue of `S` for a full dual candidate.
    pub fn slack_min_eigenvalue(&self, dual: &DualCandidate) -> f64 {
        let active: Vec<usize> = (0..self.triangles.len()).collect();
        self.algebra.min_eigenvalue(&self.slack(&dual.y, &active, &dual.mu))
    }
}

/// Floating-point dual point. Not trusted for bounds until rounded and verified.
#[derive(Clone, Debug)]
pub struct DualCandidate {
    /// Per-vertex value of `y` on each vertex orbit.
    pub y: Vec<f64>,
    /// Total multiplier mass per triangle orbit of the instance.
    pub mu: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub dual: DualCandidate,
    pub dual_value: f64,
    /// Objective of the central-path primal point `X = S^{-1} / t`.
    pub primal_value: f64,
    pub newton_steps: usize,
    pub converged: bool,
    pub warning: Option<String>,
}

const MAX_CENTERING_STEPS: usize = 80;

/// Solver knobs beyond tolerance and iteration budget.
#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Largest number of triangle orbits carried at once.
    pub max_active: usize,
    /// Orbits added per cutting-plane round.
    pub add_per_round: usize,
    pub max_rounds: usize,
    /// Gap at which intermediate cutting-plane rounds stop; the final round
    /// runs to the requested tolerance.
    pub separation_tol: f64,
    /// Growth factor of the barrier parameter between centerings.
    pub t_growth: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_active: 600, add_per_round: 150, max_rounds: 16, separation_tol: 1e-5, t_growth: 6.0 }
    }
}

/// Solve to duality gap `tol` within `max_iters` Newton steps.
pub fn solve_primal_dual(inst: &SdpInstance, tol: f64, max_iters: usize) -> SolveReport {
    solve_with(inst, tol, max_iters, &SolverOptions::default())
}

pub fn solve_with(inst: &SdpInstance, tol: f64, max_iters: usize, opts: &SolverOptions) -> SolveReport {
    let zero = DualCandidate { y: vec![0.0; inst.vertex_orbits.len()], mu: vec![0.0; inst.triangles.len()] };
    // X = I is primal feasible.
    let identity_value = 0.5 + inst.algebra.inner(&inst.objective, &inst.algebra.identity());
    if max_iters == 0 {
        return SolveReport {
            dual_value: inst.dual_value(&zero.y, &zero.mu),
            dual: zero,
            primal_value: identity_value,
            newton_steps: 0,
            converged: false,
            warning: Some("no iterations allowed; returning the zero dual".into()),
        };
    }
    let mut active: Vec<usize> = if inst.triangles.len() <= opts.max_active {
        (0..inst.triangles.len()).collect()
    } else {
        Vec::new()
    };
    let mut steps = 0usize;
    let mut best: Option<SolveReport> = None;
    let loose = opts.separation_tol.max(tol);
    let mut round = 0usize;
    loop {
        let budget = max_iters.saturating_sub(steps);
        if budget == 0 {
            break;
        }
        let all_in = active.len() == inst.triangles.len();
        let last_round = all_in || round + 1 >= opts.max_rounds.max(1);
        let run = barrier(inst, &active, if last_round { tol } else { loose }, budget, opts.t_growth);
        steps += run.steps;
        let mut mu_full = vec![0.0; inst.triangles.len()];
        for (&t, &m) in active.iter().zip(&run.mu) {
            mu_full[t] = m;
        }
        let report = SolveReport {
            dual_value: inst.dual_value(&run.y, &run.mu),
            dual: DualCandidate { y: run.y.clone(), mu: mu_full },
            primal_value: run.primal_value,
            newton_steps: steps,
            converged: run.converged && last_round,
            warning: run.warning.clone(),
        };
        if last_round {
            // The tight solve supersedes the loose rounds.
            best = Some(report);
            break;
        }
        if best.as_ref().map_or(true, |b| report.dual_value > b.dual_value) {
            best = Some(report);
        }
        round += 1;
        // Cutting planes: add the most violated inactive orbits at the primal point.
        let mut in_active = vec![false; inst.triangles.len()];
        active.iter().for_each(|&t| in_active[t] = true);
        let mut violated: Vec<(f64, usize)> = (0..inst.triangles.len())
            .filter(|&t| !in_active[t])
            .map(|t| (inst.triangles[t].value(&run.primal) + 1.0, t))
            .filter(|(v, _)| *v < -loose)
            .collect();
        if violated.is_empty() {
            // Separation is done; finish at full precision.
            round = opts.max_rounds;
            continue;
        }
        violated.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Drop orbits whose multiplier is negligible to make room.
        if active.len() + opts.add_per_round > opts.max_active {
            let mut keep: Vec<(f64, usize)> = active.iter().zip(&run.mu).map(|(&t, &m)| (m, t)).collect();
            keep.sort_by(|a, b| b.0.total_cmp(&a.0));
            keep.truncate(opts.max_active.saturating_sub(opts.add_per_round));
            active = keep.into_iter().map(|(_, t)| t).collect();
        }
        active.extend(violated.iter().take(opts.add_per_round).map(|&(_, t)| t));
        active.sort_unstable();
    }
    best.expect("at least one round ran")
}

struct BarrierRun {
    y: Vec<f64>,
    mu: Vec<f64>,
    primal: Vec<f64>,
    primal_value: f64,
    steps: usize,
    converged: bool,
    warning: Option<String>,
}

/// Path-following barrier method on the invariant dual, restricted to the
/// `active` triangle orbits.
fn barrier(inst: &SdpInstance, active: &[usize], tol: f64, max_steps: usize, growth: f64) -> BarrierRun {
    let alg = &inst.algebra;
    let k = alg.len();
    let no = inst.vertex_orbits.len();
    let na = active.len();
    let nv = no + na;
    let coords: Vec<Vec<(usize, f64)>> = active.iter().map(|&t| inst.triangles[t].coords(alg)).collect();
    // Direction matrices E_i with F = C - sum z_i E_i.
    let mut dirs: Vec<Vec<(usize, f64)>> = inst.vertex_orbits.iter().map(|&c| vec![(c, 1.0)]).collect();
    dirs.extend(coords.iter().cloned());
    let obj: Vec<f64> = (0..no).map(|o| inst.orbit_size(o)).chain(std::iter::repeat(-1.0).take(na)).collect();

    // Start: small multipliers, y below the spectrum of C.
    let mu0 = 1e-3 / (na.max(1) as f64) / inst.edge_count as f64;
    let mut mu = vec![mu0; na];
    let c_min = alg.min_eigenvalue(&inst.slack(&vec![0.0; no], active, &mu));
    let scale = alg.classes().iter().zip(&inst.objective).map(|(c, v)| v.abs() * c.size as f64).sum::<f64>()
        / alg.dim() as f64;
    let y0 = c_min - scale.max(1e-12);
    let mut y = vec![y0; no];

    let barrier_nu = (alg.dim() + na) as f64;
    let mut t = barrier_nu / (scale.max(1e-12) * alg.dim() as f64);
    let mut steps = 0usize;
    let mut warning = None;
    let mut converged = false;

    // Which class pairs (k, l) feed class m, grouped by l for fast G * A_l.
    let mut by_l: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); k];
    for &(a, l, m, c) in alg.structure() {
        by_l[l as usize].push((a as usize, m as usize, c));
    }
    let sizes: Vec<f64> = alg.classes().iter().map(|c| c.size as f64).collect();
    let transpose: Vec<usize> = alg.classes().iter().map(|c| c.transpose).collect();

    'outer: loop {
        // Center for the current t. Near the end the decrement stalls at
        // rounding noise, so centering is capped.
        let mut inner = 0usize;
        loop {
            if steps >= max_steps {
                warning = Some(format!("iteration budget exhausted at gap {:.3e}", barrier_nu / t));
                break 'outer;
            }
            let s = inst.slack(&y, active, &mu);
            let Some(g) = alg.inverse_pd(&s) else {
                warning = Some("lost positive definiteness".into());
                break 'outer;
            };
            // gradient
            let mut grad = vec![0.0; nv];
            for i in 0..nv {
                let tr: f64 = dirs[i].iter().map(|&(c, v)| sizes[c] * g[c] * v).sum();
                grad[i] = t * obj[i] - tr;
                if i >= no {
                    grad[i] += 1.0 / mu[i - no];
                }
            }
            // G * A_l for every l, then P_i = G * E_i.
            let mut ga = vec![vec![0.0; k]; k];
            for l in 0..k {
                for &(a, m, c) in &by_l[l] {
                    ga[l][m] += c * g[a];
                }
            }
            let mut p = DMatrix::<f64>::zeros(nv, k);
            for i in 0..nv {
                for &(l, v) in &dirs[i] {
                    for m in 0..k {
                        p[(i, m)] += v * ga[l][m];
                    }
                }
            }
            // tr(P_i P_j) = sum_m size_m P_i[transpose m] P_j[m]
            let mut q = DMatrix::<f64>::zeros(nv, k);
            for i in 0..nv {
                for m in 0..k {
                    q[(i, m)] = sizes[m] * p[(i, transpose[m])];
                }
            }
            let mut h = &q * p.transpose();
            for i in no..nv {
                h[(i, i)] += 1.0 / (mu[i - no] * mu[i - no]);
            }
            let hs = (&h + h.transpose()) * 0.5;
            let gv = DVector::from_vec(grad.clone());
            // At large t the Hessian is badly scaled; a tiny ridge keeps the
            // Newton direction computable without changing it materially.
            let diag_max = hs.diagonal().amax();
            let Some(chol) = [0.0, 1e-14, 1e-12, 1e-10].iter().find_map(|&r| {
                let mut m = hs.clone();
                for i in 0..m.nrows() {
                    m[(i, i)] += r * diag_max;
                }
                m.cholesky()
            }) else {
                warning = Some("Newton system lost definiteness".into());
                break 'outer;
            };
            let dz = chol.solve(&gv);
            let dec2 = gv.dot(&dz).max(0.0);
            let dec = dec2.sqrt();
            steps += 1;
            inner += 1;
            let mut alpha = if dec > 0.25 { 1.0 / (1.0 + dec) } else { 1.0 };
            loop {
                let ny: Vec<f64> = (0..no).map(|o| y[o] + alpha * dz[o]).collect();
                let nm: Vec<f64> = (0..na).map(|a| mu[a] + alpha * dz[no + a]).collect();
                if nm.iter().all(|&m| m > 0.0) && alg.inverse_pd(&inst.slack(&ny, active, &nm)).is_some() {
                    y = ny;
                    mu = nm;
                    break;
                }
                alpha *= 0.5;
                if alpha < 1e-12 {
                    warning = Some("line search failed".into());
                    break 'outer;
                }
            }
            if dec2 < 1e-10 || inner >= MAX_CENTERING_STEPS {
                break;
            }
        }
        if barrier_nu / t < tol {
            converged = true;
            break;
        }
        t *= growth;
    }
    let s = inst.slack(&y, active, &mu);
    let primal: Vec<f64> = alg.inverse_pd(&s).map_or_else(|| alg.identity(), |g| g.iter().map(|v| v / t).collect());
    let primal_value = 0.5 + alg.inner(&inst.objective, &primal);
    BarrierRun { y, mu, primal, primal_value, steps, converged, warning }
}

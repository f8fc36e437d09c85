//! Recognizes Calabi products from sampled cubic forms.
//!
//! At each sample we look for a unit `v` with
//! `C(v, ., .) = lambda2 I + (lambda1 - lambda2) v v^T`, or, for two factors, a
//! complement that splits into two eigenspaces with no cross terms. Such a `v` is
//! a Z-eigenvector of the cubic form (`C(v, v, .) = lambda1 v`), so candidates
//! come from shifted power iteration and Newton on that equation, started from
//! the frame axes, the eigenvectors of `C(e_a, ., .)`, the trace vector and a
//! fixed batch of pseudo-random directions. A Calabi product is
//! recognized when the detected constants do not vary across samples.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::CVector;
use crate::chart::ImmersionChart;
use crate::error::{Error, Result};
use crate::geometry::{sweep, CubicForm, PointGeometry, LAGRANGIAN_TOL};
use crate::products::{canonical_three, canonical_two, ProductChart};

pub const DEFAULT_TOL: f64 = 1e-6;

/// Eigenvalues closer than `MERGE_FACTOR * tol` count as one.
pub const MERGE_FACTOR: f64 = 10.0;

const POWER_ITERATIONS: usize = 200;
const NEWTON_ITERATIONS: usize = 50;
/// Random starts per dimension; they cover basins the frame-aligned seeds miss.
const RANDOM_SEEDS_PER_DIM: usize = 4;
const SEED_STREAM: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct E1Detection {
    /// `E_1` in orthonormal-frame components.
    pub e1: Vec<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThreeDetection {
    pub e1: Vec<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub dims: (usize, usize),
    /// Largest `|C(w_i, w_alpha, .)|` across the two blocks.
    pub cross_block: f64,
    pub residual: f64,
}

/// One Z-eigenvector with the spectrum of its shape operator on the complement.
#[derive(Clone, Debug)]
struct Candidate {
    v: Vec<f64>,
    lambda1: f64,
    eig_residual: f64,
    /// Eigenvalues on `v^perp`, ascending, with eigenvectors in frame components.
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

impl Candidate {
    fn clusters(&self, width: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.values.len() {
            if i == self.values.len() || self.values[i] - self.values[i - 1] > width {
                out.push((start, i));
                start = i;
            }
        }
        out
    }

    fn mean(&self, r: (usize, usize)) -> f64 {
        self.values[r.0..r.1].iter().sum::<f64>() / (r.1 - r.0) as f64
    }

    fn width(&self, r: (usize, usize)) -> f64 {
        self.values[r.1 - 1] - self.values[r.0]
    }
}

fn normalize(v: &mut [f64]) -> bool {
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(s > 1e-300) {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= s);
    true
}

fn shifted_power(c: &CubicForm, seed: &[f64], sign: f64, shift: f64) -> Vec<f64> {
    let mut v = seed.to_vec();
    for _ in 0..POWER_ITERATIONS {
        let w = c.apply2(&v);
        let mut next: Vec<f64> = w.iter().zip(&v).map(|(a, b)| sign * a + shift * b).collect();
        if !normalize(&mut next) {
            break;
        }
        v = next;
    }
    v
}

/// Newton on `C(v, v, .) - lambda v = 0`, `|v| = 1`.
fn newton(c: &CubicForm, seed: &[f64]) -> Option<Vec<f64>> {
    let n = c.dim();
    let mut v = seed.to_vec();
    if !normalize(&mut v) {
        return None;
    }
    let mut lambda: f64 = c.apply2(&v).iter().zip(&v).map(|(a, b)| a * b).sum();
    for _ in 0..NEWTON_ITERATIONS {
        let w = c.apply2(&v);
        let res: f64 = w.iter().zip(&v).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max);
        if res < 1e-15 {
            break;
        }
        let a = c.contract(&v);
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        let mut rhs = DVector::zeros(n + 1);
        for i in 0..n {
            for j in 0..n {
                jac[(i, j)] = 2.0 * a[(i, j)] - if i == j { lambda } else { 0.0 };
            }
            jac[(i, n)] = -v[i];
            jac[(n, i)] = v[i];
            rhs[i] = -(w[i] - lambda * v[i]);
        }
        rhs[n] = -0.5 * (v.iter().map(|x| x * x).sum::<f64>() - 1.0);
        let step = jac.lu().solve(&rhs)?;
        for i in 0..n {
            v[i] += step[i];
        }
        lambda += step[n];
        if !normalize(&mut v) || !lambda.is_finite() {
            return None;
        }
    }
    Some(v)
}

fn analyze(c: &CubicForm, v: Vec<f64>) -> Candidate {
    let n = c.dim();
    let a = c.contract(&v);
    let av = &a * DVector::from_column_slice(&v);
    let lambda1: f64 = av.iter().zip(&v).map(|(x, y)| x * y).sum();
    let eig_residual = av.iter().zip(&v).map(|(x, y)| (x - lambda1 * y).abs()).fold(0.0, f64::max);
    // orthonormal basis of v^perp from the Householder reflection taking v to e_0
    let s = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut u = v.clone();
    u[0] += s;
    let uu: f64 = u.iter().map(|x| x * x).sum();
    let basis: Vec<Vec<f64>> = (1..n)
        .map(|k| (0..n).map(|i| (if i == k { 1.0 } else { 0.0 }) - 2.0 * u[i] * u[k] / uu).collect())
        .collect();
    let q = DMatrix::from_fn(n, n - 1, |i, k| basis[k][i]);
    let b = q.transpose() * &a * &q;
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n - 1).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let col = &q * eig.eigenvectors.column(i);
            col.iter().copied().collect()
        })
        .collect();
    Candidate { v, lambda1, eig_residual, values, vectors }
}

fn candidates(c: &CubicForm) -> Vec<Candidate> {
    let n = c.dim();
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    for a in 0..n {
        let mut e = vec![0.0; n];
        e[a] = 1.0;
        let eig = SymmetricEigen::new(c.contract(&e));
        for k in 0..n {
            seeds.push(eig.eigenvectors.column(k).iter().copied().collect());
        }
        for b in a + 1..n {
            let mut d = e.clone();
            d[b] = 1.0;
            seeds.push(d.clone());
            d[b] = -1.0;
            seeds.push(d);
        }
        seeds.push(e);
    }
    // parallel to E_1 for a Calabi form unless it is traceless
    seeds.push((0..n).map(|k| (0..n).map(|i| c.get(i, i, k)).sum()).collect());
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_STREAM);
    for _ in 0..RANDOM_SEEDS_PER_DIM * n {
        seeds.push((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }
    let shift = c.frobenius() * (n as f64).sqrt() + 1.0;
    let mut out = Vec::new();
    for s in &seeds {
        let mut starts = vec![s.clone()];
        for sign in [1.0, -1.0] {
            starts.push(shifted_power(c, s, sign, shift));
        }
        for st in starts {
            if let Some(v) = newton(c, &st) {
                out.push(analyze(c, v));
            }
        }
    }
    out
}

/// Best single-complement candidate and its failure measure when none passes.
fn best_e1(cands: &[Candidate], tol: f64) -> (Option<E1Detection>, f64) {
    let merge = MERGE_FACTOR * tol;
    let mut best: Option<E1Detection> = None;
    let mut closest = f64::INFINITY;
    for cand in cands {
        let all = (0, cand.values.len());
        let width = cand.width(all);
        let lambda2 = cand.mean(all);
        let score = cand.eig_residual.max(width / MERGE_FACTOR);
        closest = closest.min(score);
        if cand.eig_residual > tol || width > merge || (cand.lambda1 - 2.0 * lambda2).abs() <= tol {
            continue;
        }
        let (l1, l2) = canonical_two(cand.lambda1, lambda2);
        let sign = if l2 == lambda2 { 1.0 } else { -1.0 };
        let det = E1Detection { e1: cand.v.iter().map(|x| sign * x).collect(), lambda1: l1, lambda2: l2, residual: score };
        // for n = 2 every Z-eigenvector qualifies; keep the largest lambda2
        let better = match &best {
            None => true,
            Some(b) => det.lambda2 > b.lambda2 + merge || ((det.lambda2 - b.lambda2).abs() <= merge && det.residual < b.residual),
        };
        if better {
            best = Some(det);
        }
    }
    (best, closest)
}

fn best_three(c: &CubicForm, cands: &[Candidate], tol: f64) -> (Option<ThreeDetection>, f64) {
    let merge = MERGE_FACTOR * tol;
    let mut best: Option<ThreeDetection> = None;
    let mut closest = f64::INFINITY;
    for cand in cands {
        let cl = cand.clusters(merge);
        if cl.len() != 2 {
            continue;
        }
        let (ra, rb) = (cl[0], cl[1]);
        let (la, lb) = (cand.mean(ra), cand.mean(rb));
        let mut cross: f64 = 0.0;
        for i in ra.0..ra.1 {
            for al in rb.0..rb.1 {
                let a = c.contract(&cand.vectors[al]);
                let wi = DVector::from_column_slice(&cand.vectors[i]);
                cross = cross.max((&a * wi).amax());
            }
        }
        let score = cand.eig_residual.max(cross);
        closest = closest.min(score);
        let l1 = cand.lambda1;
        let distinct = (l1 - 2.0 * la).abs() > tol && (l1 - 2.0 * lb).abs() > tol && (la - lb).abs() > merge;
        if cand.eig_residual > tol || cross > tol || !distinct {
            continue;
        }
        let (l1, l2, l3, dims) = canonical_three(l1, la, lb, (ra.1 - ra.0, rb.1 - rb.0));
        let kept = l1 == cand.lambda1 && ((l2 == la && l3 == lb) || (l2 == lb && l3 == la));
        let sign = if kept { 1.0 } else { -1.0 };
        let det = ThreeDetection {
            e1: cand.v.iter().map(|x| sign * x).collect(),
            lambda1: l1,
            lambda2: l2,
            lambda3: l3,
            dims,
            cross_block: cross,
            residual: score,
        };
        let better = match &best {
            None => true,
            Some(b) => det.lambda2 > b.lambda2 + merge || ((det.lambda2 - b.lambda2).abs() <= merge && det.residual < b.residual),
        };
        if better {
            best = Some(det);
        }
    }
    (best, closest)
}

/// A direction `E_1` with `h(E_1, E_1) = lambda1 J E_1`, `h(E_1, X) = lambda2 J X`
/// for `X` orthogonal to it, and `lambda1 != 2 lambda2`. Orientation makes
/// `lambda2 > 0`. For `n = 2` the largest `lambda2` is reported.
pub fn detect_e1(c: &CubicForm, tol: f64) -> Option<E1Detection> {
    if c.dim() < 2 {
        return None;
    }
    best_e1(&candidates(c), tol).0
}

/// As [`detect_e1`] but with the complement split into two eigenspaces with
/// constants `lambda2 > lambda3`, no cross terms, and
/// `2 lambda3 != lambda1 != 2 lambda2 != 2 lambda3`.
pub fn detect_three(c: &CubicForm, tol: f64) -> Option<ThreeDetection> {
    if c.dim() < 3 {
        return None;
    }
    best_three(c, &candidates(c), tol).0
}

/// Both detections at one sample, with the smallest failure measure seen.
#[derive(Clone, Debug, PartialEq)]
struct Sample {
    one: Option<E1Detection>,
    three: Option<ThreeDetection>,
    closest: f64,
}

fn detect_sample(c: &CubicForm, tol: f64) -> Sample {
    let cands = candidates(c);
    let (one, s1) = best_e1(&cands, tol);
    let (three, s3) = if c.dim() >= 3 { best_three(c, &cands, tol) } else { (None, f64::INFINITY) };
    Sample { one, three, closest: s1.min(s3) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    CalabiWithPoint,
    CalabiTwoFactor,
    NotCalabi,
    Undetermined,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub samples: usize,
    pub tolerance: f64,
    pub lagrangian_max: f64,
    pub detected_with_point: usize,
    pub detected_two_factor: usize,
    pub borderline: usize,
    pub failed: usize,
    pub detection_residual_max: f64,
    pub mean_curvature_max: f64,
    pub mean_curvature_min: f64,
    /// `|lambda1 lambda2 - lambda2^2 + c|` at the mean constants.
    pub lambda_relation: Option<f64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifierVerdict {
    pub kind: VerdictKind,
    /// Detected `E_1` at the first sample, as an ambient vector.
    pub e1: Option<CVector>,
    /// Mean detected constants `(lambda1, lambda2[, lambda3])`.
    pub lambdas: Vec<f64>,
    /// Max minus min of each constant over the samples.
    pub spread: Vec<f64>,
    pub block_dims: Option<(usize, usize)>,
    pub constancy: bool,
    pub minimal: bool,
    pub parallel_h_residual: f64,
    pub diagnostics: Diagnostics,
}

fn stats(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let k = rows[0].len();
    let mut mean = vec![0.0; k];
    let mut lo = vec![f64::INFINITY; k];
    let mut hi = vec![f64::NEG_INFINITY; k];
    for r in rows {
        for i in 0..k {
            mean[i] += r[i] / rows.len() as f64;
            lo[i] = lo[i].min(r[i]);
            hi[i] = hi[i].max(r[i]);
        }
    }
    (mean, hi.iter().zip(&lo).map(|(h, l)| h - l).collect())
}

fn ambient(g: &PointGeometry, e: &[f64]) -> CVector {
    let frame = &g.frame().tangent_frame;
    let mut out = CVector::zeros(frame[0].len());
    for (x, f) in e.iter().zip(frame) {
        out = &out + &(f * *x);
    }
    out
}

/// Classifies a lift from its cubic forms at `samples`.
///
/// A lift that fails the Lagrangian test at some sample is reported as
/// `NotCalabi` with the residual in the diagnostics rather than as an error.
pub fn classify(chart: &dyn ImmersionChart, samples: &[Vec<f64>], tol: f64) -> Result<ClassifierVerdict> {
    if samples.is_empty() {
        return Err(Error::ContractViolation("classify needs at least one sample".into()));
    }
    let n = chart.param_dim();
    if n < 2 {
        return Err(Error::ContractViolation(format!("classification needs dimension >= 2, got {n}")));
    }
    let geoms = sweep(chart, samples)?;
    let mut diag = Diagnostics { samples: samples.len(), tolerance: tol, ..Default::default() };
    diag.lagrangian_max = geoms.iter().map(PointGeometry::lagrangian_residual).fold(0.0, f64::max);
    let mut verdict = ClassifierVerdict {
        kind: VerdictKind::NotCalabi,
        e1: None,
        lambdas: vec![],
        spread: vec![],
        block_dims: None,
        constancy: false,
        minimal: false,
        parallel_h_residual: f64::NAN,
        diagnostics: Diagnostics::default(),
    };
    if diag.lagrangian_max > LAGRANGIAN_TOL {
        diag.reason = format!(
            "not a Lagrangian lift: residual {:e} exceeds {:e}",
            diag.lagrangian_max, LAGRANGIAN_TOL
        );
        verdict.diagnostics = diag;
        return Ok(verdict);
    }
    let mut hmin = f64::INFINITY;
    for g in &geoms {
        let h = g.mean_curvature()?.1;
        diag.mean_curvature_max = diag.mean_curvature_max.max(h);
        hmin = hmin.min(h);
        verdict.parallel_h_residual = verdict.parallel_h_residual.max(g.nabla_h()?.max_abs());
    }
    diag.mean_curvature_min = hmin;
    if verdict.parallel_h_residual.is_nan() {
        verdict.parallel_h_residual = 0.0;
    }
    let per: Vec<Sample> =
        geoms.par_iter().map(|g| g.cubic_form().map(|c| detect_sample(c, tol))).collect::<Result<_>>()?;

    for smp in &per {
        let r = match (&smp.one, &smp.three) {
            (Some(d), _) => d.residual,
            (None, Some(d)) => d.residual,
            (None, None) => smp.closest,
        };
        diag.detection_residual_max = diag.detection_residual_max.max(r);
        if smp.one.is_some() {
            diag.detected_with_point += 1;
        }
        if smp.three.is_some() {
            diag.detected_two_factor += 1;
        }
        if smp.one.is_none() && smp.three.is_none() {
            if smp.closest <= MERGE_FACTOR * tol {
                diag.borderline += 1;
            } else {
                diag.failed += 1;
            }
        }
    }
    let c0 = chart.space().base_curvature();
    let total = per.len();
    let threes: Vec<&ThreeDetection> = per.iter().filter_map(|s| s.three.as_ref()).collect();
    let ones: Vec<&E1Detection> = per.iter().filter_map(|s| s.one.as_ref()).collect();

    // Some forms carry both structures (the flat torus in CP^3 is a product of two
    // circles and also of a Clifford torus with a point); the finer split wins
    // when it holds with constant values everywhere.
    let two_factor = if threes.len() == total {
        let dims = threes[0].dims;
        if threes.iter().all(|d| d.dims == dims) {
            let rows: Vec<Vec<f64>> = threes.iter().map(|d| vec![d.lambda1, d.lambda2, d.lambda3]).collect();
            let (mean, spread) = stats(&rows);
            Some((dims, mean, spread))
        } else {
            None
        }
    } else {
        None
    };
    let two_factor_constant = two_factor.as_ref().is_some_and(|t| t.2.iter().all(|s| *s <= tol));

    if two_factor_constant || (two_factor.is_some() && ones.len() < total) {
        let (dims, mean, spread) = two_factor.expect("checked above");
        verdict.e1 = Some(ambient(&geoms[0], &threes[0].e1));
        verdict.block_dims = Some(dims);
        let trace = mean[0] + dims.0 as f64 * mean[1] + dims.1 as f64 * mean[2];
        verdict.minimal = c0 > 0.0 && trace.abs() <= tol;
        set_spread_verdict(&mut verdict, &mut diag, mean, spread, tol, VerdictKind::CalabiTwoFactor);
    } else if ones.len() == total {
        let rows: Vec<Vec<f64>> = ones.iter().map(|d| vec![d.lambda1, d.lambda2]).collect();
        let (mean, spread) = stats(&rows);
        verdict.e1 = Some(ambient(&geoms[0], &ones[0].e1));
        diag.lambda_relation = Some((mean[0] * mean[1] - mean[1] * mean[1] + c0).abs());
        verdict.minimal = c0 > 0.0 && (mean[1] - 1.0 / (n as f64).sqrt()).abs() <= tol;
        set_spread_verdict(&mut verdict, &mut diag, mean, spread, tol, VerdictKind::CalabiWithPoint);
    } else if diag.failed > 0 {
        verdict.kind = VerdictKind::NotCalabi;
        diag.reason = format!("no admissible E_1 at {} of {total} samples", diag.failed);
    } else {
        verdict.kind = VerdictKind::Undetermined;
        diag.reason = format!(
            "mixed detection: {} with point, {} two-factor, {} borderline",
            ones.len(),
            threes.len(),
            diag.borderline
        );
    }
    verdict.diagnostics = diag;
    Ok(verdict)
}

fn set_spread_verdict(
    verdict: &mut ClassifierVerdict,
    diag: &mut Diagnostics,
    mean: Vec<f64>,
    spread: Vec<f64>,
    tol: f64,
    kind: VerdictKind,
) {
    let worst = spread.iter().copied().fold(0.0, f64::max);
    verdict.constancy = worst <= tol;
    verdict.kind = if worst <= tol {
        diag.reason = "constants detected".into();
        kind
    } else if worst <= MERGE_FACTOR * tol {
        diag.reason = format!("spread {worst:e} is within {MERGE_FACTOR} x tolerance");
        VerdictKind::Undetermined
    } else {
        diag.reason = format!("detected values vary across samples (spread {worst:e})");
        VerdictKind::NotCalabi
    };
    if verdict.kind != kind {
        verdict.minimal = false;
    }
    verdict.lambdas = mean;
    verdict.spread = spread;
}

/// Largest `|nabla h|` over the samples.
pub fn parallel_residual(chart: &dyn ImmersionChart, samples: &[Vec<f64>]) -> Result<f64> {
    let geoms = sweep(chart, samples)?;
    let mut r: f64 = 0.0;
    for g in &geoms {
        r = r.max(g.nabla_h()?.max_abs());
    }
    Ok(r)
}

/// Comparison of `nabla h` for a product with a point against its factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockComparison {
    /// Largest `|nabla h|` over all samples.
    pub total: f64,
    /// Largest difference between the factor block and the factor's own `nabla h`,
    /// rescaled by the factor radius.
    pub factor_block_deviation: f64,
    /// Largest component with at least one index along `E_1`.
    pub other_blocks: f64,
    /// Largest `|nabla h|` of the factor itself.
    pub factor_nabla_h: f64,
}

/// For `(g1 f1, g2)` or `(g1, g2 f2)` with `|g_j| = r`, the factor block of
/// `nabla h` equals the factor's own `nabla h` divided by `r^2`, and every
/// component involving `E_1` vanishes.
pub fn factor_block_comparison(chart: &ProductChart, samples: &[Vec<f64>]) -> Result<BlockComparison> {
    let (n1, n2) = chart.meta().factor_dims;
    let (r1, r2) = chart
        .meta()
        .radii
        .ok_or_else(|| Error::Precondition("factor block comparison needs a curve of constant moduli".into()))?;
    let (factor, r, first) = match (n1 > 0, n2 > 0) {
        (true, false) => (chart.factor1(), r1, true),
        (false, true) => (chart.factor2(), r2, false),
        _ => return Err(Error::Precondition("factor block comparison needs exactly one point factor".into())),
    };
    let fchart = factor.chart().expect("positive-dimensional factor has a chart").clone();
    let out: Vec<(f64, f64, f64, f64)> = samples
        .par_iter()
        .map(|u| {
            let g = PointGeometry::at(chart, u)?;
            let d = g.nabla_h()?;
            let (_, p, q) = chart.split(u);
            let fg = PointGeometry::at(fchart.as_ref(), if first { p } else { q })?;
            let fd = fg.nabla_h()?;
            let nf = factor.dim();
            let mut dev: f64 = 0.0;
            for w in 0..nf {
                for a in 0..nf {
                    for b in 0..nf {
                        for c in 0..nf {
                            let x = d.get(w + 1, a + 1, b + 1, c + 1);
                            dev = dev.max((x - fd.get(w, a, b, c) / (r * r)).abs());
                        }
                    }
                }
            }
            let n = d.dim();
            let mut other: f64 = 0.0;
            for w in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            if w == 0 || a == 0 || b == 0 || c == 0 {
                                other = other.max(d.get(w, a, b, c).abs());
                            }
                        }
                    }
                }
            }
            Ok((d.max_abs(), dev, other, fd.max_abs()))
        })
        .collect::<Result<_>>()?;
    Ok(out.iter().fold(
        BlockComparison { total: 0.0, factor_block_deviation: 0.0, other_blocks: 0.0, factor_nabla_h: 0.0 },
        |acc, x| BlockComparison {
            total: acc.total.max(x.0),
            factor_block_deviation: acc.factor_block_deviation.max(x.1),
            other_blocks: acc.other_blocks.max(x.2),
            factor_nabla_h: acc.factor_nabla_h.max(x.3),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    /// `lambda1 x^3 + 3 lambda2 x |y|^2` plus optional extra terms on the complement.
    fn calabi_form(n: usize, l1: f64, l2: f64) -> CubicForm {
        CubicForm::from_fn(n, |a, b, c| {
            let mut idx = [a, b, c];
            idx.sort();
            match idx {
                [0, 0, 0] => l1,
                [0, i, j] if i == j && i > 0 => l2,
                _ => 0.0,
            }
        })
    }

    #[test]
    fn recovers_cp2_constants() {
        let d = detect_e1(&calabi_form(2, -S, S), 1e-6).unwrap();
        assert!((d.lambda1 + S).abs() < 1e-12 && (d.lambda2 - S).abs() < 1e-12);
    }

    #[test]
    fn n2_tie_break_prefers_largest_lambda2() {
        let l2 = 2f64.sqrt();
        let l1 = (l2 * l2 + 1.0) / l2;
        let d = detect_e1(&calabi_form(2, l1, l2), 1e-6).unwrap();
        assert!((d.lambda2 - l2).abs() < 1e-12 && (d.lambda1 - l1).abs() < 1e-12);
    }

    #[test]
    fn zero_form_has_no_direction() {
        assert!(detect_e1(&CubicForm::new(3, vec![0.0; 27]), 1e-6).is_none());
    }

    #[test]
    fn three_dimensional_with_point() {
        let d = detect_e1(&calabi_form(3, -0.5, 0.8), 1e-6).unwrap();
        assert!((d.lambda1 + 0.5).abs() < 1e-12 && (d.lambda2 - 0.8).abs() < 1e-12);
        assert!(detect_three(&calabi_form(3, -0.5, 0.8), 1e-6).is_none());
    }

    fn two_block(l1: f64, l2: f64, l3: f64) -> CubicForm {
        CubicForm::from_fn(3, |a, b, c| {
            let mut idx = [a, b, c];
            idx.sort();
            match idx {
                [0, 0, 0] => l1,
                [0, 1, 1] => l2,
                [0, 2, 2] => l3,
                _ => 0.0,
            }
        })
    }

    #[test]
    fn recovers_two_block_constants() {
        let d = detect_three(&two_block(0.0, 1.0, -1.0), 1e-6).unwrap();
        assert!(d.lambda1.abs() < 1e-12 && (d.lambda2 - 1.0).abs() < 1e-12 && (d.lambda3 + 1.0).abs() < 1e-12);
        assert_eq!(d.dims, (1, 1));
        // the same form is also a Clifford torus times a point
        let e = detect_e1(&two_block(0.0, 1.0, -1.0), 1e-6).unwrap();
        let l2 = 1.0 / 3f64.sqrt();
        assert!((e.lambda2 - l2).abs() < 1e-12 && (e.lambda1 + 2.0 * l2).abs() < 1e-12);
    }

    #[test]
    fn distinctness_guard() {
        // 2 lambda3 = lambda1
        assert!(detect_three(&two_block(1.0, 2.0, 0.5), 1e-6).is_none());
    }

    #[test]
    fn rotating_the_complement_keeps_the_constants() {
        let c = calabi_form(3, -0.5, 0.8);
        let th: f64 = 0.7;
        let q = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, th.cos(), th.sin(), 0.0, -th.sin(), th.cos()]);
        let d = detect_e1(&c.rotate(&q), 1e-6).unwrap();
        assert!((d.lambda1 + 0.5).abs() < 1e-12 && (d.lambda2 - 0.8).abs() < 1e-12);
    }
}

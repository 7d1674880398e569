//! In-process simulation of the full protocol: two sources, `N` workers and
//! a master.
//!
//! 1. Source 1 encodes `A^T` into `F_A`, source 2 encodes `B` into `F_B`;
//!    worker `n` receives `F_A(alpha_n)` and `F_B(alpha_n)`.
//! 2. Worker `n` computes `H(alpha_n) = F_A(alpha_n) F_B(alpha_n)`.
//! 3. Worker `n` builds `G_n(x) = sum_{i,l} r_n^{(i,l)} H(alpha_n) x^{i+tl}
//!    + sum_w R_w^{(n)} x^{t^2+w}` and sends `G_n(alpha_{n'})` to every
//!    worker `n'`.
//! 4. Worker `n'` sums what it received into `I(alpha_{n'})`.
//! 5. The master interpolates `I(x)` from `t^2 + z` values; its first `t^2`
//!    coefficients are the blocks of `Y = A^T B`.
//!
//! All randomness is keyed by `(seed, role, index)`, so the transcript does
//! not depend on the order in which workers run.

use std::collections::{BTreeMap, HashSet};

use rand_chacha::rand_core::RngCore;
use rayon::prelude::*;

use crate::blockmatrix::{assemble, partition, transpose_blockwise, BlockMatrix};
use crate::counts::n_polydot;
use crate::error::{Error, Result};
use crate::field::{
    extraction_vectors, generalized_vandermonde, EvaluationPoints, FieldElement, FieldModulus,
};
use crate::matrix::Matrix;
use crate::powersets::{important_power_grid, support_h, ExponentSet, SchemeParams};
use crate::rng::{stream, Role};
use crate::shares::{build_fa, build_fb, MaskPolicy, SharePolynomial};

/// Maximum number of evaluation point draws before giving up.
pub const SETUP_ATTEMPTS: usize = 64;

/// Order in which per-worker computations are executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    #[default]
    Parallel,
    Sequential,
    Reversed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolConfig {
    pub params: SchemeParams,
    pub m: usize,
    pub modulus: FieldModulus,
    pub seed: u64,
    /// Number of workers, always the closed-form count for `params`.
    pub workers: usize,
    pub mask_policy: MaskPolicy,
    pub schedule: Schedule,
}

impl ProtocolConfig {
    /// Validates divisibility and the collusion bound `z < N/2`. Whether the
    /// field is large enough is discovered by [`setup_points`].
    pub fn new(params: SchemeParams, m: usize, modulus: FieldModulus, seed: u64) -> Result<Self> {
        for parts in [params.s() as usize, params.t() as usize] {
            if m == 0 || !m.is_multiple_of(parts) {
                return Err(Error::IndivisibleDimensions { dim: m, parts });
            }
        }
        let workers = n_polydot(&params)? as usize;
        if 2 * params.z() as usize >= workers {
            return Err(Error::InvalidParams(format!(
                "z = {} must be below half of the {workers} workers",
                params.z()
            )));
        }
        Ok(Self {
            params,
            m,
            modulus,
            seed,
            workers,
            mask_policy: MaskPolicy::Fresh,
            schedule: Schedule::Parallel,
        })
    }

    pub fn with_mask_policy(mut self, policy: MaskPolicy) -> Self {
        self.mask_policy = policy;
        self
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    /// `t^2 + z`, the number of values the master interpolates from.
    pub fn master_evaluations(&self) -> usize {
        let t = self.params.t() as usize;
        t * t + self.params.z() as usize
    }

    fn worker_block(&self) -> usize {
        self.m / self.params.t() as usize
    }
}

/// Everything exchanged during one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub alphas: EvaluationPoints,
    pub fa_evals: Vec<Matrix>,
    pub fb_evals: Vec<Matrix>,
    pub h_evals: Vec<Matrix>,
    /// `extraction[k][n] = r_n^{(i,l)}` with `k = i + t l`.
    pub extraction: Vec<Vec<FieldElement>>,
    /// `g_messages[n][n'] = G_n(alpha_{n'})`, sent by `n` to `n'`.
    pub g_messages: Vec<Vec<Matrix>>,
    pub i_evals: Vec<Matrix>,
    /// Workers whose `I` values the master used.
    pub master_inputs: Vec<usize>,
    pub y: Matrix,
    pub fa_masks: Vec<(u64, usize)>,
    pub fb_masks: Vec<(u64, usize)>,
    pub g_masks: Vec<Vec<(u64, usize)>>,
}

fn for_each_worker<T, F>(schedule: Schedule, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    match schedule {
        Schedule::Parallel => (0..n).into_par_iter().map(f).collect(),
        Schedule::Sequential => (0..n).map(f).collect(),
        Schedule::Reversed => {
            let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
            for k in (0..n).rev() {
                out[k] = Some(f(k));
            }
            out.into_iter()
                .map(|v| v.expect("every slot filled"))
                .collect()
        }
    }
}

fn draw_distinct_nonzero<R: RngCore>(q: &FieldModulus, n: usize, rng: &mut R) -> Vec<FieldElement> {
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = q.sample_nonzero(rng);
        if seen.insert(a) {
            out.push(a);
        }
    }
    out
}

/// Draws `N` distinct nonzero points such that the generalized Vandermonde
/// on the support of `H` and the one on `{0, ..., t^2+z-1}` are invertible,
/// retrying up to [`SETUP_ATTEMPTS`] times.
pub fn setup_points(config: &ProtocolConfig) -> Result<EvaluationPoints> {
    let q = &config.modulus;
    let n = config.workers;
    let support = support_h(&config.params);
    if support.len() > n {
        return Err(Error::InvalidParams(format!(
            "{n} workers cannot cover a product support of {}",
            support.len()
        )));
    }
    let master_support = ExponentSet::range(0, config.master_evaluations() as u64);
    let mut rng = stream(config.seed, Role::Setup);
    for _ in 0..SETUP_ATTEMPTS {
        if q.q() - 1 < n as u64 {
            continue;
        }
        let alphas = draw_distinct_nonzero(q, n, &mut rng);
        let v = generalized_vandermonde(q, &alphas[..support.len()], &support);
        if v.rank(q) < support.len() {
            continue;
        }
        let w = generalized_vandermonde(q, &alphas[..master_support.len()], &master_support);
        if w.rank(q) < master_support.len() {
            continue;
        }
        return EvaluationPoints::new(alphas);
    }
    Err(Error::SetupExhausted(SETUP_ATTEMPTS))
}

/// `H(alpha_n) = F_A(alpha_n) F_B(alpha_n)`.
pub fn worker_compute_h(q: &FieldModulus, fa_eval: &Matrix, fb_eval: &Matrix) -> Result<Matrix> {
    if fa_eval.cols() != fb_eval.rows() {
        return Err(Error::ShapeMismatch {
            expected: (fa_eval.cols(), fb_eval.cols()),
            actual: fb_eval.shape(),
        });
    }
    fa_eval.mul(q, fb_eval)
}

/// Worker `n`'s masking polynomial. `extraction[k]` is `r_n^{(i,l)}` for
/// `k = i + t l`; the masks `R_w^{(n)}` come from the worker's own stream.
pub fn worker_build_g(
    q: &FieldModulus,
    n: usize,
    h_eval: &Matrix,
    extraction: &[FieldElement],
    params: &SchemeParams,
    seed: u64,
) -> Result<SharePolynomial> {
    let t = params.t() as usize;
    if extraction.len() != t * t {
        return Err(Error::LengthMismatch {
            expected: t * t,
            actual: extraction.len(),
        });
    }
    let coded = extraction
        .iter()
        .enumerate()
        .map(|(k, &r)| (k as u64, h_eval.scale(q, r)))
        .collect();
    let mut rng = stream(seed, Role::Worker(n as u32));
    let (rows, cols) = h_eval.shape();
    let secret = (0..params.z() as usize)
        .map(|w| {
            (
                (t * t + w) as u64,
                Matrix::random(q, rows, cols, &mut rng),
                w,
            )
        })
        .collect();
    SharePolynomial::new(h_eval.shape(), coded, secret)
}

/// Interpolates `I(x)` on `{0, ..., points.len()-1}` and assembles the first
/// `t^2` coefficients into the `m x m` output.
pub fn interpolate_output(
    q: &FieldModulus,
    points: &[FieldElement],
    evals: &[Matrix],
    t: usize,
) -> Result<Matrix> {
    if points.len() != evals.len() {
        return Err(Error::LengthMismatch {
            expected: points.len(),
            actual: evals.len(),
        });
    }
    if points.len() < t * t {
        return Err(Error::InvalidParams(
            "fewer evaluations than output blocks".into(),
        ));
    }
    let support = ExponentSet::range(0, points.len() as u64);
    let inv = generalized_vandermonde(q, points, &support).inverse(q)?;
    let (rows, cols) = evals[0].shape();
    let mut blocks = vec![Matrix::zeros(rows, cols); t * t];
    // coefficient i + t l is block (i, l); BlockMatrix is row-major in i
    for i in 0..t {
        for l in 0..t {
            let k = i + t * l;
            let dst = &mut blocks[i * t + l];
            for (j, e) in evals.iter().enumerate() {
                dst.add_scaled(q, e, inv[(k, j)])?;
            }
        }
    }
    Ok(assemble(&BlockMatrix::from_blocks(t, t, blocks)?))
}

/// Runs every phase and returns `Y = A^T B` with the full transcript.
pub fn run_protocol(
    a: &Matrix,
    b: &Matrix,
    config: &ProtocolConfig,
) -> Result<(Matrix, Transcript)> {
    let q = &config.modulus;
    let params = &config.params;
    let (m, s, t) = (config.m, params.s() as usize, params.t() as usize);
    for mat in [a, b] {
        if mat.shape() != (m, m) {
            return Err(Error::ShapeMismatch {
                expected: (m, m),
                actual: mat.shape(),
            });
        }
    }

    // sources
    let a_t = transpose_blockwise(&partition(a, s, t)?);
    let b_blocks = partition(b, s, t)?;
    let fa = build_fa(q, &a_t, params, config.seed, config.mask_policy)?;
    let fb = build_fb(q, &b_blocks, params, config.seed, config.mask_policy)?;
    let alphas = setup_points(config)?;
    let pts = alphas.as_slice();
    let n = config.workers;

    let fa_evals = for_each_worker(config.schedule, n, |k| fa.evaluate(q, pts[k]));
    let fb_evals = for_each_worker(config.schedule, n, |k| fb.evaluate(q, pts[k]));

    // workers, phase 2
    let h_evals = for_each_worker(config.schedule, n, |k| {
        worker_compute_h(q, &fa_evals[k], &fb_evals[k])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    // public extraction weights; surplus workers beyond |P(H)| get weight 0
    let support = support_h(params);
    let targets: Vec<u64> = important_power_grid(params)
        .iter()
        .map(|&(_, _, e)| e)
        .collect();
    let extraction: Vec<Vec<FieldElement>> =
        extraction_vectors(q, &pts[..support.len()], &support, &targets)?
            .into_iter()
            .map(|mut row| {
                row.resize(n, FieldElement::ZERO);
                row
            })
            .collect();

    let g_polys = for_each_worker(config.schedule, n, |k| {
        let r: Vec<FieldElement> = extraction.iter().map(|row| row[k]).collect();
        worker_build_g(q, k, &h_evals[k], &r, params, config.seed)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let g_messages = for_each_worker(config.schedule, n, |k| {
        pts.iter()
            .map(|&x| g_polys[k].evaluate(q, x))
            .collect::<Vec<_>>()
    });
    let block = config.worker_block();
    let i_evals = for_each_worker(config.schedule, n, |dst| {
        let mut acc = Matrix::zeros(block, block);
        for row in &g_messages {
            acc.add_scaled(q, &row[dst], FieldElement::ONE)
                .expect("all G evaluations share the block shape");
        }
        acc
    });

    // master
    let used = config.master_evaluations();
    let master_inputs: Vec<usize> = (0..used).collect();
    let y = interpolate_output(q, &pts[..used], &i_evals[..used], t)?;

    let transcript = Transcript {
        alphas: alphas.clone(),
        fa_evals,
        fb_evals,
        h_evals,
        extraction,
        g_messages,
        i_evals,
        master_inputs,
        y: y.clone(),
        fa_masks: fa.mask_layout(),
        fb_masks: fb.mask_layout(),
        g_masks: g_polys.iter().map(SharePolynomial::mask_layout).collect(),
    };
    Ok((y, transcript))
}

/// `(exponent, mask index)` of one masked coefficient.
type MaskSlot = (u64, usize);

/// Which mask structure a check inspected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MaskCheck {
    /// Source 1's secret terms as seen by the subset.
    SourceA,
    /// Source 2's secret terms as seen by the subset.
    SourceB,
    /// Worker `n`'s `R_w^{(n)}` terms as seen by the subset.
    Worker(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskFailure {
    pub check: MaskCheck,
    pub rank: usize,
    pub required: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetAudit {
    pub workers: Vec<usize>,
    pub failures: Vec<MaskFailure>,
}

impl SubsetAudit {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub subsets: Vec<SubsetAudit>,
}

impl AuditReport {
    pub fn passed(&self) -> usize {
        self.subsets.iter().filter(|s| s.passed()).count()
    }

    pub fn failed(&self) -> usize {
        self.subsets.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }
}

/// Coefficient matrix of the masks in the views of `subset`: row `n`,
/// column `k` holds `sum alpha_n^e` over the exponents `e` that carry mask
/// `k`. The views are a one-time pad exactly when it has full row rank.
pub fn mask_matrix(
    q: &FieldModulus,
    alphas: &[FieldElement],
    subset: &[usize],
    layout: &[(u64, usize)],
) -> Matrix {
    let mut cols: BTreeMap<usize, usize> = BTreeMap::new();
    for &(_, k) in layout {
        let next = cols.len();
        cols.entry(k).or_insert(next);
    }
    let mut out = Matrix::zeros(subset.len(), cols.len());
    for (row, &n) in subset.iter().enumerate() {
        for &(e, k) in layout {
            let c = cols[&k];
            out[(row, c)] = q.add(out[(row, c)], q.pow(alphas[n], e));
        }
    }
    out
}

fn sample_subset<R: RngCore>(n: usize, z: usize, rng: &mut R) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..z {
        let j = i + (rng.next_u64() % (n - i) as u64) as usize;
        pool.swap(i, j);
    }
    let mut out = pool[..z].to_vec();
    out.sort_unstable();
    out
}

/// Samples `subset_samples` coalitions of `z` workers and checks that every
/// mask structure they observe has full rank `z`.
pub fn audit_privacy(
    transcript: &Transcript,
    config: &ProtocolConfig,
    subset_samples: usize,
) -> AuditReport {
    let q = &config.modulus;
    let z = config.params.z() as usize;
    let alphas = transcript.alphas.as_slice();
    let mut rng = stream(config.seed, Role::Audit);

    // workers with identical G layouts share one check per subset
    let mut g_groups: Vec<(&[MaskSlot], Vec<usize>)> = Vec::new();
    for (n, layout) in transcript.g_masks.iter().enumerate() {
        match g_groups.iter_mut().find(|(l, _)| *l == layout) {
            Some((_, members)) => members.push(n),
            None => g_groups.push((layout.as_slice(), vec![n])),
        }
    }

    let subsets = (0..subset_samples)
        .map(|_| {
            let workers = sample_subset(alphas.len(), z, &mut rng);
            let mut failures = Vec::new();
            let mut check = |layout: &[(u64, usize)], ids: &mut dyn Iterator<Item = MaskCheck>| {
                let rank = mask_matrix(q, alphas, &workers, layout).rank(q);
                if rank < z {
                    failures.extend(ids.map(|check| MaskFailure {
                        check,
                        rank,
                        required: z,
                    }));
                }
            };
            check(
                &transcript.fa_masks,
                &mut std::iter::once(MaskCheck::SourceA),
            );
            check(
                &transcript.fb_masks,
                &mut std::iter::once(MaskCheck::SourceB),
            );
            for (layout, members) in &g_groups {
                check(layout, &mut members.iter().map(|&n| MaskCheck::Worker(n)));
            }
            SubsetAudit { workers, failures }
        })
        .collect();
    AuditReport { subsets }
}

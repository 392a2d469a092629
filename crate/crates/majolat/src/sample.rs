//! Reproducible generation of test inputs.
//!
//! Every draw is keyed by `(seed, index)`: the generator for index `i` is
//! an independent ChaCha stream, so results do not depend on evaluation
//! order or thread count. Rational samples live on a `1/n` grid and are
//! exact by construction.

use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{compare, Comparison, Distribution};
use crate::entropy::{renyi, tsallis, Alpha};
use crate::error::Error;
use crate::lattice::{join, meet, TTransform};
use crate::scalar::{Backend, Scalar};

/// Parameters for the samplers and the grid enumerator.
#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub dimension: usize,
    pub seed: u64,
    /// Rejection budget for incomparable-pair sampling.
    pub max_tries: usize,
    /// Denominator for rational grids and rational samples.
    pub grid_denominator: u64,
}

impl SampleConfig {
    pub fn new(dimension: usize, seed: u64) -> Self {
        assert!(dimension >= 1);
        Self { dimension, seed, max_tries: 10_000, grid_denominator: 3600 }
    }
}

/// Independent generator for one draw index.
pub(crate) fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn simplex_in(rng: &mut ChaCha8Rng, d: usize) -> Distribution<f64> {
    // Normalized unit-rate exponentials are uniform on the simplex.
    let mut values: Vec<f64> = (0..d).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = values.iter().sum();
    for v in &mut values {
        *v /= total;
    }
    Distribution::from_computed(values)
}

fn rational_in(rng: &mut ChaCha8Rng, d: usize, denominator: u64) -> Distribution<BigRational> {
    // d-1 sorted cut points in [0, n] turn into a weak composition of n.
    let n = denominator;
    let mut cuts: Vec<u64> = (0..d.saturating_sub(1)).map(|_| rng.gen_range(0..=n)).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(d);
    let mut prev = 0;
    for c in cuts {
        parts.push(c - prev);
        prev = c;
    }
    parts.push(n - prev);
    let values =
        parts.into_iter().map(|k| BigRational::from_ratio(k as i64, n as i64)).collect();
    Distribution::from_computed(values)
}

/// Uniform draw from the descending-sorted simplex, keyed by
/// `(cfg.seed, index)`.
pub fn sample_simplex(cfg: &SampleConfig, index: u64) -> Distribution<f64> {
    simplex_in(&mut stream_rng(cfg.seed, index), cfg.dimension)
}

/// Two independent simplex draws from one stream.
pub fn sample_pair(cfg: &SampleConfig, index: u64) -> (Distribution<f64>, Distribution<f64>) {
    let mut rng = stream_rng(cfg.seed, index);
    let p = simplex_in(&mut rng, cfg.dimension);
    let q = simplex_in(&mut rng, cfg.dimension);
    (p, q)
}

/// Three independent simplex draws from one stream.
pub fn sample_triple(
    cfg: &SampleConfig,
    index: u64,
) -> (Distribution<f64>, Distribution<f64>, Distribution<f64>) {
    let mut rng = stream_rng(cfg.seed, index);
    let p = simplex_in(&mut rng, cfg.dimension);
    let q = simplex_in(&mut rng, cfg.dimension);
    let r = simplex_in(&mut rng, cfg.dimension);
    (p, q, r)
}

/// Exact rational draw on the `1/grid_denominator` grid.
pub fn sample_rational(cfg: &SampleConfig, index: u64) -> Distribution<BigRational> {
    rational_in(&mut stream_rng(cfg.seed, index), cfg.dimension, cfg.grid_denominator)
}

/// Two exact rational draws from one stream.
pub fn sample_rational_pair(
    cfg: &SampleConfig,
    index: u64,
) -> (Distribution<BigRational>, Distribution<BigRational>) {
    let mut rng = stream_rng(cfg.seed, index);
    let p = rational_in(&mut rng, cfg.dimension, cfg.grid_denominator);
    let q = rational_in(&mut rng, cfg.dimension, cfg.grid_denominator);
    (p, q)
}

/// Rejection-sample a pair with crossing prefix sums.
///
/// Dimensions 1 and 2 are totally ordered (the single interior prefix sum
/// decides), so incomparable pairs require `d >= 3`.
pub fn sample_incomparable_pair(
    cfg: &SampleConfig,
    index: u64,
) -> Result<(Distribution<f64>, Distribution<f64>), Error> {
    if cfg.dimension < 3 {
        return Err(Error::DimensionTooSmall {
            dim: cfg.dimension,
            need: "d >= 3 for incomparable pairs",
        });
    }
    let backend = Backend::float64();
    let mut rng = stream_rng(cfg.seed, index);
    for _ in 0..cfg.max_tries {
        let p = simplex_in(&mut rng, cfg.dimension);
        let q = simplex_in(&mut rng, cfg.dimension);
        if compare(&p, &q, &backend) == Comparison::Incomparable {
            return Ok((p, q));
        }
    }
    Err(Error::ExhaustedTries { tries: cfg.max_tries })
}

/// Push a distribution downward with `k` random elementary transfers.
/// The result is always majorized by the input.
pub fn random_descent(
    base: &Distribution<f64>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Distribution<f64> {
    let d = base.dim();
    let mut values = base.values().to_vec();
    if d >= 2 {
        for _ in 0..k {
            let i = rng.gen_range(0..d);
            let mut j = rng.gen_range(0..d - 1);
            if j >= i {
                j += 1;
            }
            TTransform::new(rng.gen::<f64>(), i, j).apply(&mut values);
        }
    }
    Distribution::from_computed(values)
}

/// A common minorizer of `p` and `q`: the meet pushed further down by
/// `k ~ uniform{1..5}` random transfers.
pub fn sample_minorizer(
    p: &Distribution<f64>,
    q: &Distribution<f64>,
    cfg: &SampleConfig,
    index: u64,
) -> Distribution<f64> {
    let mut rng = stream_rng(cfg.seed, index);
    let k = rng.gen_range(1..=5);
    random_descent(&meet(p, q), k, &mut rng)
}

/// A comparable pair `p ≺ q`: a simplex draw pushed downward.
pub fn sample_comparable_pair(
    cfg: &SampleConfig,
    index: u64,
) -> (Distribution<f64>, Distribution<f64>) {
    let mut rng = stream_rng(cfg.seed, index);
    let q = simplex_in(&mut rng, cfg.dimension);
    let k = rng.gen_range(1..=5);
    let p = random_descent(&q, k, &mut rng);
    (p, q)
}

const GRID_CAP: usize = 100_000;

/// All sorted rational distributions with entries that are multiples of
/// `1/grid_denominator`, i.e. the partitions of the denominator into at
/// most `dimension` parts.
pub fn enumerate_grid(cfg: &SampleConfig) -> Result<Vec<Distribution<BigRational>>, Error> {
    let n = cfg.grid_denominator;
    let d = cfg.dimension;
    let count = partition_count(n, d);
    if count > GRID_CAP {
        return Err(Error::GridTooLarge { count, cap: GRID_CAP });
    }
    let mut out = Vec::with_capacity(count);
    let mut parts = Vec::with_capacity(d);
    descend(n, n, d, &mut parts, &mut out, n);
    Ok(out)
}

/// Partitions of `n` into at most `d` parts.
fn partition_count(n: u64, d: usize) -> usize {
    // p(m, k): partitions of m into at most k parts.
    let n = n as usize;
    let mut table = vec![vec![0usize; d + 1]; n + 1];
    for k in 0..=d {
        table[0][k] = 1;
    }
    for m in 1..=n {
        for k in 1..=d {
            table[m][k] =
                table[m][k - 1].saturating_add(if m >= k { table[m - k][k] } else { 0 });
        }
    }
    table[n][d]
}

fn descend(
    remaining: u64,
    max_part: u64,
    slots: usize,
    parts: &mut Vec<u64>,
    out: &mut Vec<Distribution<BigRational>>,
    denominator: u64,
) {
    if remaining == 0 {
        let mut values: Vec<BigRational> = parts
            .iter()
            .map(|&k| BigRational::from_ratio(k as i64, denominator as i64))
            .collect();
        values.resize(
            parts.len() + (slots), // pad the unused slots with zeros
            BigRational::from_ratio(0, 1),
        );
        out.push(Distribution::from_computed(values));
        return;
    }
    if slots == 0 {
        return;
    }
    let top = remaining.min(max_part);
    let bottom = remaining.div_ceil(slots as u64); // parts below this cannot finish
    for part in (bottom..=top).rev() {
        parts.push(part);
        descend(remaining - part, part, slots - 1, parts, out, denominator);
        parts.pop();
    }
}

/// What a counterexample search targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchFunctional {
    Shannon,
    Tsallis,
    Renyi,
}

impl std::str::FromStr for SearchFunctional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "shannon" => Ok(Self::Shannon),
            "tsallis" => Ok(Self::Tsallis),
            "renyi" => Ok(Self::Renyi),
            _ => Err(Error::UnknownFunctional(s.to_string())),
        }
    }
}

impl SearchFunctional {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Shannon => "shannon",
            Self::Tsallis => "tsallis",
            Self::Renyi => "renyi",
        }
    }

    fn eval(self, x: &[f64], alpha: Alpha) -> f64 {
        match self {
            Self::Shannon => renyi(x, Alpha::new(1.0).unwrap()),
            Self::Tsallis => tsallis(x, alpha),
            Self::Renyi => renyi(x, alpha),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchRelation {
    /// Gap `F(m) + F(j) - F(p) - F(q)`.
    Supermodular,
    /// Gap `F(p) + F(q) - F(m)`.
    Subadditive,
}

impl std::str::FromStr for SearchRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "supermod" | "supermodular" => Ok(Self::Supermodular),
            "subadd" | "subadditive" => Ok(Self::Subadditive),
            _ => Err(Error::Parse(format!("unknown relation {s:?}"))),
        }
    }
}

impl SearchRelation {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Supermodular => "supermod",
            Self::Subadditive => "subadd",
        }
    }
}

/// Sign of gap that counts as a hit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchDirection {
    Negative,
    Positive,
}

#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub functional: SearchFunctional,
    pub relation: SearchRelation,
    pub direction: SearchDirection,
    pub alpha: Alpha,
    pub dims: Vec<usize>,
    pub budget: usize,
    pub seed: u64,
    /// A hit needs |gap| above this threshold.
    pub threshold: f64,
}

/// A pinned counterexample (or extreme-gap) pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub alpha: f64,
    pub d: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// First hit in index order, if any.
    pub witness: Option<Witness>,
    /// Most extreme gap over the scanned prefix (all indices up to and
    /// including the hit), regardless of whether it crossed the threshold.
    pub extreme: Option<Witness>,
    /// Pairs sampled (comparable pairs count: the gap is exactly zero there).
    pub tries: usize,
}

/// Evaluate the requested lattice gap on the sampled pair.
pub fn lattice_gap(
    functional: SearchFunctional,
    relation: SearchRelation,
    alpha: Alpha,
    p: &Distribution<f64>,
    q: &Distribution<f64>,
) -> f64 {
    let m = meet(p, q);
    match relation {
        SearchRelation::Supermodular => {
            let j = join(p, q);
            functional.eval(m.values(), alpha) + functional.eval(j.values(), alpha)
                - functional.eval(p.values(), alpha)
                - functional.eval(q.values(), alpha)
        }
        SearchRelation::Subadditive => {
            functional.eval(p.values(), alpha) + functional.eval(q.values(), alpha)
                - functional.eval(m.values(), alpha)
        }
    }
}

/// Scan sampled incomparable pairs for a gap beyond the threshold in the
/// requested direction. Absence of a witness within the budget is a legal
/// outcome. Deterministic in `(seed, spec)`: indices are scanned in order
/// and the first hit wins.
pub fn search_counterexample(spec: &SearchSpec) -> SearchOutcome {
    let backend = Backend::float64();
    let mut extreme: Option<Witness> = None;
    let mut tries = 0;
    for index in 0..spec.budget {
        let d = spec.dims[index % spec.dims.len()];
        let cfg = SampleConfig::new(d, spec.seed);
        let (p, q) = sample_pair(&cfg, index as u64);
        tries += 1;
        if compare(&p, &q, &backend) != Comparison::Incomparable {
            continue;
        }
        let gap = lattice_gap(spec.functional, spec.relation, spec.alpha, &p, &q);
        let signed = match spec.direction {
            SearchDirection::Negative => -gap,
            SearchDirection::Positive => gap,
        };
        if extreme.as_ref().map_or(true, |w| {
            let best = match spec.direction {
                SearchDirection::Negative => -w.gap,
                SearchDirection::Positive => w.gap,
            };
            signed > best
        }) {
            extreme = Some(Witness {
                alpha: spec.alpha.get(),
                d,
                p: p.values().to_vec(),
                q: q.values().to_vec(),
                gap,
            });
        }
        if signed > spec.threshold {
            return SearchOutcome { witness: extreme.clone(), extreme, tries };
        }
    }
    SearchOutcome { witness: None, extreme, tries }
}

/// Re-verify a pinned witness: the pair must still be incomparable under
/// exact arithmetic, the exact meet/join must reproduce the float ones,
/// and the re-evaluated gap must agree with the pinned value.
pub fn reverify_witness(
    w: &Witness,
    functional: SearchFunctional,
    relation: SearchRelation,
) -> Result<(), String> {
    let be = Backend::float64();
    let alpha = Alpha::new(w.alpha).map_err(|e| e.to_string())?;
    let p = Distribution::new(w.p.clone(), &be).map_err(|e| format!("bad p: {e}"))?;
    let q = Distribution::new(w.q.clone(), &be).map_err(|e| format!("bad q: {e}"))?;
    let exact = Backend::exact();
    let (pe, qe) = (p.to_exact(), q.to_exact());
    if compare(&pe, &qe, &exact) != Comparison::Incomparable {
        return Err("pair is not incomparable under exact arithmetic".into());
    }
    let (me, je) = (meet(&pe, &qe), join(&pe, &qe));
    let (mf, jf) = (meet(&p, &q), join(&p, &q));
    for (a, b) in me.to_float().values().iter().zip(mf.values()) {
        if (a - b).abs() > 1e-9 {
            return Err("exact meet disagrees with float meet".into());
        }
    }
    for (a, b) in je.to_float().values().iter().zip(jf.values()) {
        if (a - b).abs() > 1e-9 {
            return Err("exact join disagrees with float join".into());
        }
    }
    let gap = lattice_gap(functional, relation, alpha, &p, &q);
    if (gap - w.gap).abs() > 1e-9 {
        return Err(format!("re-evaluated gap {gap} differs from pinned {}", w.gap));
    }
    Ok(())
}

/// One witness per line, as JSON.
pub fn write_witnesses<W: std::io::Write>(out: &mut W, ws: &[Witness]) -> Result<(), Error> {
    for w in ws {
        let line = serde_json::to_string(w).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_witnesses(text: &str) -> Result<Vec<Witness>, Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn simplex_draws_are_deterministic_and_valid() {
        let cfg = SampleConfig::new(5, 42);
        let a = sample_simplex(&cfg, 7);
        let b = sample_simplex(&cfg, 7);
        assert_eq!(a, b);
        let c = sample_simplex(&cfg, 8);
        assert_ne!(a, c);
        let total: f64 = a.values().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(a.values().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn singleton_simplex_is_point_mass() {
        let cfg = SampleConfig::new(1, 3);
        assert_eq!(sample_simplex(&cfg, 0).values(), &[1.0]);
    }

    #[test]
    fn largest_coordinate_mean_matches_order_statistics() {
        // E[max] over the uniform 3-simplex is (1 + 1/2 + 1/3)/3 = 11/18.
        let cfg = SampleConfig::new(3, 1);
        let n = 100_000;
        let mean: f64 =
            (0..n).map(|i| sample_simplex(&cfg, i).values()[0]).sum::<f64>() / n as f64;
        assert!((mean - 11.0 / 18.0).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn incomparable_pairs_verify_and_low_dims_are_rejected() {
        let cfg = SampleConfig::new(2, 5);
        assert!(matches!(
            sample_incomparable_pair(&cfg, 0),
            Err(Error::DimensionTooSmall { .. })
        ));
        let cfg = SampleConfig::new(3, 5);
        let be = Backend::float64();
        for i in 0..50 {
            let (p, q) = sample_incomparable_pair(&cfg, i).unwrap();
            assert_eq!(compare(&p, &q, &be), Comparison::Incomparable);
            // The meet differs from both endpoints for incomparable pairs.
            let m = meet(&p, &q);
            assert_ne!(m.values(), p.values());
            assert_ne!(m.values(), q.values());
        }
    }

    #[test]
    fn minorizers_stay_below_the_meet() {
        let cfg = SampleConfig::new(4, 9);
        let be = Backend::float64();
        for i in 0..50 {
            let (p, q) = sample_pair(&cfg, i);
            let r = sample_minorizer(&p, &q, &cfg, 1000 + i);
            let m = meet(&p, &q);
            assert!(matches!(
                compare(&r, &m, &be),
                Comparison::FirstMajorized | Comparison::Equal
            ));
            assert!(compare(&r, &p, &be) != Comparison::Incomparable);
            assert!(matches!(
                compare(&r, &p, &be),
                Comparison::FirstMajorized | Comparison::Equal
            ));
            assert!(matches!(
                compare(&r, &q, &be),
                Comparison::FirstMajorized | Comparison::Equal
            ));
        }
    }

    #[test]
    fn zero_descent_steps_returns_the_base() {
        let cfg = SampleConfig::new(4, 11);
        let (p, q) = sample_pair(&cfg, 0);
        let m = meet(&p, &q);
        let r = random_descent(&m, 0, &mut stream_rng(1, 1));
        assert_eq!(r, m);
        // The uniform distribution minorizes everything.
        let u = Distribution::<f64>::uniform(4);
        let be = Backend::float64();
        assert!(matches!(
            compare(&u, &m, &be),
            Comparison::FirstMajorized | Comparison::Equal
        ));
    }

    #[test]
    fn comparable_pairs_are_comparable() {
        let cfg = SampleConfig::new(5, 13);
        let be = Backend::float64();
        for i in 0..50 {
            let (p, q) = sample_comparable_pair(&cfg, i);
            assert!(matches!(
                compare(&p, &q, &be),
                Comparison::FirstMajorized | Comparison::Equal
            ));
        }
    }

    #[test]
    fn rational_samples_are_exact() {
        let mut cfg = SampleConfig::new(6, 17);
        cfg.grid_denominator = 360;
        let p = sample_rational(&cfg, 4);
        assert!(p.lorenz().total().is_one());
        assert_eq!(p, sample_rational(&cfg, 4));
    }

    #[test]
    fn grid_enumeration_matches_partition_counts() {
        // d=2, n=2: (1,0) and (1/2,1/2).
        let mut cfg = SampleConfig::new(2, 0);
        cfg.grid_denominator = 2;
        let grid = enumerate_grid(&cfg).unwrap();
        assert_eq!(grid.len(), 2);
        // d=2, n=4: (1,0), (3/4,1/4), (1/2,1/2).
        cfg.grid_denominator = 4;
        assert_eq!(enumerate_grid(&cfg).unwrap().len(), 3);
        // d=3, n=6: partitions of 6 into at most 3 parts.
        let mut cfg = SampleConfig::new(3, 0);
        cfg.grid_denominator = 6;
        let grid = enumerate_grid(&cfg).unwrap();
        assert_eq!(grid.len(), 7);
        // Oracle: direct partition enumeration.
        let mut count = 0;
        for a in 0..=6u64 {
            for b in 0..=a {
                for c in 0..=b {
                    if a + b + c == 6 {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(grid.len(), count);
        // Entries are distinct and exactly normalized.
        for p in &grid {
            assert!(p.lorenz().total().is_one());
        }
        for (i, p) in grid.iter().enumerate() {
            for q in &grid[i + 1..] {
                assert_ne!(p, q);
            }
        }
    }

    #[test]
    fn oversized_grids_are_rejected() {
        let mut cfg = SampleConfig::new(30, 0);
        cfg.grid_denominator = 600;
        assert!(matches!(enumerate_grid(&cfg), Err(Error::GridTooLarge { .. })));
    }

    #[test]
    fn witness_round_trip() {
        let w = Witness { alpha: 0.5, d: 3, p: vec![0.5, 0.3, 0.2], q: vec![0.4, 0.4, 0.2], gap: -1e-3 };
        let mut buf = Vec::new();
        write_witnesses(&mut buf, &[w.clone()]).unwrap();
        let back = read_witnesses(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].p, w.p);
        assert_eq!(back[0].gap, w.gap);
    }
}
